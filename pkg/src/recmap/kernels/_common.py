"""Constants shared by both kernel backends.

Anything involving transcendentals is computed once here, in one place, so
the compiled and fallback backends consume identical coefficient values.
"""

import math

import numpy as np


def dct8_matrix() -> np.ndarray:
    """Orthonormal 8x8 DCT-II matrix."""
    c = np.empty((8, 8), dtype=np.float64)
    for i in range(8):
        s = math.sqrt(1.0 / 8.0) if i == 0 else math.sqrt(2.0 / 8.0)
        for j in range(8):
            c[i, j] = s * math.cos((2 * j + 1) * i * math.pi / 16.0)
    return c


DCT8 = dct8_matrix()


def gaussian_taps(sigma: float) -> np.ndarray:
    """Normalized 1D Gaussian kernel, radius ceil(3*sigma)."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    radius = math.ceil(3.0 * sigma)
    xs = [k - radius for k in range(2 * radius + 1)]
    w = np.array([math.exp(-(x * x) / (2.0 * sigma * sigma)) for x in xs], dtype=np.float64)
    return w / w.sum()
