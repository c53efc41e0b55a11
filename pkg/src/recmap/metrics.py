"""The six per-pair quality metrics: plate PSNR/SSIM, worst-digit PSNR/SSIM,
and digit/plate reading accuracy."""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .image import Image, crop, to_grayscale
from .ocr import read_plate
from .plates import N_DIGITS, CleanPlate

SSIM_C1 = (0.01 * 255.0) ** 2
SSIM_C2 = (0.03 * 255.0) ** 2
_SSIM_SIGMA = 1.5  # 11-tap Gaussian window


@dataclass(frozen=True)
class QualityScores:
    psnr_plate: float
    ssim_plate: float
    psnr_worst_digit: float
    ssim_worst_digit: float
    ocr_digit_acc: float
    ocr_plate_ok: bool


def _check_same_shape(a: Image, b: Image):
    if (a.width, a.height, a.channels) != (b.width, b.height, b.channels):
        raise ValueError(
            f"image shape mismatch: {a.width}x{a.height}x{a.channels} vs "
            f"{b.width}x{b.height}x{b.channels}"
        )


def psnr(a: Image, b: Image, max_value: float = 255.0) -> float:
    """10*log10(MAX^2 / MSE) over all samples; +inf when identical."""
    _check_same_shape(a, b)
    diff = a.pixels.astype(np.float64) - b.pixels.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(max_value * max_value / mse)


def ssim(a: Image, b: Image) -> float:
    """Mean local SSIM on grayscale with an 11x11 Gaussian window
    (sigma 1.5), clamp-to-edge, averaged over every pixel."""
    _check_same_shape(a, b)
    taps = kernels.gaussian_taps(_SSIM_SIGMA)
    if a.height < len(taps) or a.width < len(taps):
        raise ValueError(f"image smaller than the {len(taps)}x{len(taps)} SSIM window")
    x = to_grayscale(a).pixels.astype(np.float64)
    y = to_grayscale(b).pixels.astype(np.float64)
    mu_x, mu_y, ex2, ey2, exy = kernels.ssim_stats(x, y, taps)
    var_x = ex2 - mu_x * mu_x
    var_y = ey2 - mu_y * mu_y
    cov = exy - mu_x * mu_y
    num = (2.0 * mu_x * mu_y + SSIM_C1) * (2.0 * cov + SSIM_C2)
    den = (mu_x * mu_x + mu_y * mu_y + SSIM_C1) * (var_x + var_y + SSIM_C2)
    return float(np.mean(num / den))


def worst_digit(a: Image, b: Image, boxes, metric: str = "psnr") -> float:
    """Minimum of the metric over the six digit crops."""
    if len(boxes) != N_DIGITS:
        raise ValueError(f"expected {N_DIGITS} boxes, got {len(boxes)}")
    fn = {"psnr": psnr, "ssim": ssim}.get(metric)
    if fn is None:
        raise ValueError(f"unknown metric {metric!r}")
    return min(fn(crop(a, box), crop(b, box)) for box in boxes)


def score(restored: Image, truth: CleanPlate) -> QualityScores:
    """All six metrics for one restored/clean pair."""
    _check_same_shape(restored, truth.image)
    result = read_plate(restored)
    matches = sum(1 for r, t in zip(result.digits, truth.digits) if r == t)
    return QualityScores(
        psnr_plate=psnr(restored, truth.image),
        ssim_plate=ssim(restored, truth.image),
        psnr_worst_digit=worst_digit(restored, truth.image, truth.boxes, "psnr"),
        ssim_worst_digit=worst_digit(restored, truth.image, truth.boxes, "ssim"),
        ocr_digit_acc=matches / N_DIGITS,
        ocr_plate_ok=(result.digits == truth.digits),
    )
