"""Frame protocol: `RECMAP-PLUGIN 1\\n` handshake once on stdout, then one
response frame per request frame.

Frame layout (both directions, bit-exact): 4-byte magic `IMG0`, width,
height, channels as little-endian uint32, then width*height*channels raw
samples, row-major, RGB order.
"""

import struct

import numpy as np

HANDSHAKE = b"RECMAP-PLUGIN 1\n"
MAGIC = b"IMG0"
HEADER = struct.Struct("<III")


class ProtocolError(Exception):
    pass


def read_frame(stream):
    """Read one frame; returns None on a clean end of stream."""
    head = stream.read(4)
    if not head:
        return None
    if len(head) < 4 or head != MAGIC:
        raise ProtocolError(f"bad frame magic {head!r}")
    raw = stream.read(HEADER.size)
    if len(raw) < HEADER.size:
        raise ProtocolError("truncated frame header")
    w, h, c = HEADER.unpack(raw)
    if c not in (1, 3) or w < 1 or h < 1:
        raise ProtocolError(f"bad frame dimensions {w}x{h}x{c}")
    payload = stream.read(w * h * c)
    if len(payload) < w * h * c:
        raise ProtocolError("truncated frame payload")
    pixels = np.frombuffer(payload, dtype=np.uint8)
    shape = (h, w) if c == 1 else (h, w, c)
    return pixels.reshape(shape)


def write_frame(stream, pixels: np.ndarray):
    h, w = pixels.shape[:2]
    c = 1 if pixels.ndim == 2 else pixels.shape[2]
    stream.write(MAGIC + HEADER.pack(w, h, c) + np.ascontiguousarray(pixels).tobytes())
    stream.flush()


def write_handshake(stream):
    stream.write(HANDSHAKE)
    stream.flush()
