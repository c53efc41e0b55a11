"""Baseline JPEG compression loss, simulated end to end.

Only the lossy stages are modeled: YCbCr conversion with sample rounding,
2x2 chroma subsampling, blockwise 8x8 DCT, quantization against the Annex-K
tables scaled by the standard quality factor, and reconstruction. Entropy
coding is omitted because it is lossless and therefore invisible to an
encode-then-decode roundtrip; the sanity tests compare against a real codec.
"""

import numpy as np

from . import kernels
from .image import Image, iround

# Annex K base quantization tables (zigzag undone, row-major).
LUMA_QTABLE = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.int64,
)

CHROMA_QTABLE = np.array(
    [
        [17, 18, 24, 47, 99, 99, 99, 99],
        [18, 21, 26, 66, 99, 99, 99, 99],
        [24, 26, 56, 99, 99, 99, 99, 99],
        [47, 66, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
        [99, 99, 99, 99, 99, 99, 99, 99],
    ],
    dtype=np.int64,
)

# Chroma subsampling is disabled at very high qualities, mirroring common
# encoder presets; the benchmark's q in [55, 85] always runs 4:2:0.
FULL_CHROMA_QUALITY = 95


def scaled_qtable(base: np.ndarray, quality: int) -> np.ndarray:
    """Annex-K table scaled by the standard quality factor (integer math)."""
    if not 1 <= quality <= 100:
        raise ValueError(f"quality must be in [1, 100], got {quality}")
    scale = 5000 // quality if quality < 50 else 200 - 2 * quality
    table = (base * scale + 50) // 100
    return np.clip(table, 1, 255)


def _pad_to(arr: np.ndarray, mult: int) -> np.ndarray:
    h, w = arr.shape
    ph = (-h) % mult
    pw = (-w) % mult
    if ph == 0 and pw == 0:
        return arr
    return np.pad(arr, ((0, ph), (0, pw)), mode="edge")


# Color conversion and chroma resampling are kernel primitives; the
# triangle (9:3:3:1) upsampler matches conforming decoders' smoothing.
_rgb_to_ycbcr = kernels.rgb_to_ycbcr
_ycbcr_to_rgb = kernels.ycbcr_to_rgb
_downsample2 = kernels.downsample2x2
_upsample2 = kernels.upsample_triangle


def _code_plane(plane_u8: np.ndarray, qtable: np.ndarray) -> np.ndarray:
    shifted = plane_u8.astype(np.float64) - 128.0
    rec = kernels.dct_quant_roundtrip(shifted, qtable.astype(np.float64))
    return iround(rec + 128.0)


def jpeg_roundtrip(img: Image, quality: int) -> Image:
    """Encode-then-decode loss at the given quality; deterministic."""
    qy = scaled_qtable(LUMA_QTABLE, quality)
    h, w = img.height, img.width

    if img.channels == 1:
        y = _pad_to(img.pixels, 8)
        return Image(_code_plane(y, qy)[:h, :w])

    qc = scaled_qtable(CHROMA_QTABLE, quality)
    subsample = quality < FULL_CHROMA_QUALITY
    mcu = 16 if subsample else 8
    y, cb, cr = _rgb_to_ycbcr(img.pixels)
    y = _pad_to(y, mcu)
    cb = _pad_to(cb, mcu)
    cr = _pad_to(cr, mcu)
    if subsample:
        cb = _downsample2(cb)
        cr = _downsample2(cr)
    y = _code_plane(y, qy)
    cb = _code_plane(cb, qc)
    cr = _code_plane(cr, qc)
    if subsample:
        cb = _upsample2(cb)
        cr = _upsample2(cr)
    return Image(_ycbcr_to_rgb(y, cb, cr)[:h, :w])
