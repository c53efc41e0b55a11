"""8-bit raster type, crops, grayscale conversion, and a minimal PNG codec.

The PNG codec covers exactly what the benchmark emits and reads back:
8-bit grayscale or RGB, non-interlaced. Keeping it in-tree makes every
artifact byte-reproducible without depending on an external codec's
compressor settings.
"""

import struct
import zlib
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

# ITU-R BT.601 luma weights.
LUMA_R, LUMA_G, LUMA_B = 0.299, 0.587, 0.114


class Box(NamedTuple):
    """Axis-aligned pixel rectangle; (x, y) is the top-left corner."""

    x: int
    y: int
    w: int
    h: int


@dataclass(frozen=True)
class Image:
    """Row-major 8-bit raster, 1 (gray) or 3 (RGB) channels."""

    pixels: np.ndarray

    def __post_init__(self):
        p = self.pixels
        if p.dtype != np.uint8:
            raise ValueError(f"pixels must be uint8, got {p.dtype}")
        if p.ndim == 2:
            pass
        elif p.ndim == 3 and p.shape[2] in (1, 3):
            if p.shape[2] == 1:
                object.__setattr__(self, "pixels", p[:, :, 0])
        else:
            raise ValueError(f"bad pixel shape {p.shape}")
        if p.shape[0] < 1 or p.shape[1] < 1:
            raise ValueError(f"bad pixel shape {p.shape}")
        if not self.pixels.flags.c_contiguous:
            object.__setattr__(self, "pixels", np.ascontiguousarray(self.pixels))

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return 1 if self.pixels.ndim == 2 else self.pixels.shape[2]

    @property
    def data(self) -> bytes:
        return self.pixels.tobytes()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Image)
            and self.pixels.shape == other.pixels.shape
            and bool(np.array_equal(self.pixels, other.pixels))
        )


def uniform(width: int, height: int, color) -> Image:
    """Solid-color image; scalar color gives grayscale, 3-tuple gives RGB."""
    if np.isscalar(color):
        return Image(np.full((height, width), color, dtype=np.uint8))
    return Image(np.full((height, width, 3), color, dtype=np.uint8))


def iround(values: np.ndarray) -> np.ndarray:
    """Round-half-up to uint8 with clamping; the single quantization rule
    used by every pipeline stage."""
    return np.clip(np.floor(values + 0.5), 0.0, 255.0).astype(np.uint8)


def crop(img: Image, box: Box) -> Image:
    """Exact sub-raster copy, no resampling."""
    x, y, w, h = box
    if w < 1 or h < 1:
        raise ValueError(f"empty crop box {box}")
    if x < 0 or y < 0 or x + w > img.width or y + h > img.height:
        raise ValueError(f"crop box {box} outside {img.width}x{img.height} image")
    return Image(img.pixels[y : y + h, x : x + w].copy())


def to_grayscale(img: Image) -> Image:
    """BT.601 luma, rounded half-up."""
    if img.channels == 1:
        return Image(img.pixels.copy())
    p = img.pixels.astype(np.float64)
    luma = LUMA_R * p[:, :, 0] + LUMA_G * p[:, :, 1] + LUMA_B * p[:, :, 2]
    return Image(iround(luma))


# --- PNG ------------------------------------------------------------------

_PNG_SIG = b"\x89PNG\r\n\x1a\n"


def _chunk(tag: bytes, payload: bytes) -> bytes:
    return (
        struct.pack(">I", len(payload))
        + tag
        + payload
        + struct.pack(">I", zlib.crc32(tag + payload) & 0xFFFFFFFF)
    )


def png_bytes(img: Image) -> bytes:
    color_type = 0 if img.channels == 1 else 2
    ihdr = struct.pack(">IIBBBBB", img.width, img.height, 8, color_type, 0, 0, 0)
    raw = img.pixels.reshape(img.height, -1)
    scanlines = b"".join(b"\x00" + raw[y].tobytes() for y in range(img.height))
    idat = zlib.compress(scanlines, 6)
    return _PNG_SIG + _chunk(b"IHDR", ihdr) + _chunk(b"IDAT", idat) + _chunk(b"IEND", b"")


def write_png(img: Image, path) -> None:
    with open(path, "wb") as f:
        f.write(png_bytes(img))


def _unfilter(raw: bytes, height: int, width: int, nchan: int) -> np.ndarray:
    stride = width * nchan
    out = np.zeros((height, stride), dtype=np.uint8)
    pos = 0
    bpp = nchan
    for y in range(height):
        ftype = raw[pos]
        pos += 1
        line = np.frombuffer(raw, dtype=np.uint8, count=stride, offset=pos).astype(np.int32)
        pos += stride
        prev = out[y - 1].astype(np.int32) if y > 0 else np.zeros(stride, dtype=np.int32)
        if ftype == 0:
            cur = line
        elif ftype == 2:  # up
            cur = (line + prev) & 0xFF
        elif ftype in (1, 3, 4):  # sub / average / paeth need a scan
            cur = np.zeros(stride, dtype=np.int32)
            for i in range(stride):
                a = cur[i - bpp] if i >= bpp else 0
                b = prev[i]
                c = prev[i - bpp] if i >= bpp else 0
                if ftype == 1:
                    pred = a
                elif ftype == 3:
                    pred = (a + b) // 2
                else:
                    p = a + b - c
                    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
                    pred = a if (pa <= pb and pa <= pc) else (b if pb <= pc else c)
                cur[i] = (line[i] + pred) & 0xFF
        else:
            raise ValueError(f"unsupported PNG filter {ftype}")
        out[y] = cur.astype(np.uint8)
    return out


def png_decode(data: bytes) -> Image:
    if data[:8] != _PNG_SIG:
        raise ValueError("not a PNG file")
    pos = 8
    width = height = None
    nchan = None
    idat = b""
    while pos < len(data):
        (length,) = struct.unpack(">I", data[pos : pos + 4])
        tag = data[pos + 4 : pos + 8]
        payload = data[pos + 8 : pos + 8 + length]
        pos += 12 + length
        if tag == b"IHDR":
            width, height, depth, color, _, _, interlace = struct.unpack(">IIBBBBB", payload)
            if depth != 8 or interlace != 0 or color not in (0, 2):
                raise ValueError("only 8-bit gray/RGB non-interlaced PNG supported")
            nchan = 1 if color == 0 else 3
        elif tag == b"IDAT":
            idat += payload
        elif tag == b"IEND":
            break
    if width is None or not idat:
        raise ValueError("truncated PNG")
    raw = zlib.decompress(idat)
    flat = _unfilter(raw, height, width, nchan)
    pixels = flat.reshape(height, width) if nchan == 1 else flat.reshape(height, width, 3)
    return Image(pixels)


def read_png(path) -> Image:
    with open(path, "rb") as f:
        return png_decode(f.read())
