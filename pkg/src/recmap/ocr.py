"""Deterministic plate reader: slot-aligned normalized cross-correlation
against the renderer's own glyphs.

The preprocessing chain (grayscale, contrast stretch, 2x upscale, binarize)
runs first; recognition then correlates each of the six known slots against
all ten glyph templates at 2x scale. When the primary binarization leaves an
ambiguous margin, the reader falls back through Otsu, adaptive-mean, and
inverted binarizations and keeps the most confident decision.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .image import Image, iround, to_grayscale
from .plates import PLATE_H, PLATE_W, digit_boxes, render_plate

UPSCALE = 2
MARGIN_THRESHOLD = 0.05
ADAPTIVE_WINDOW = 15
ADAPTIVE_OFFSET = 5.0
STRATEGIES = ("primary", "otsu", "adaptive", "inverted")


@dataclass(frozen=True)
class OcrResult:
    digits: str
    per_digit_confidence: tuple
    per_digit_margin: tuple
    strategy_used: tuple


def _check_plate_size(img: Image):
    if (img.width, img.height) != (PLATE_W, PLATE_H):
        raise ValueError(f"reader expects {PLATE_W}x{PLATE_H} input, got {img.width}x{img.height}")


def contrast_stretch(gray: np.ndarray) -> np.ndarray:
    lo = int(gray.min())
    hi = int(gray.max())
    if hi == lo:
        return np.zeros_like(gray)
    return iround((gray.astype(np.float64) - lo) * (255.0 / (hi - lo)))


def _upscale2x(gray: np.ndarray) -> np.ndarray:
    h, w = gray.shape
    m = np.array([[0.5, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 1.0]])
    return kernels.warp_bilinear(gray, m, h * UPSCALE, w * UPSCALE, (0.0,))


def otsu_threshold(gray: np.ndarray) -> int:
    """Threshold maximizing between-class variance."""
    hist = np.bincount(gray.reshape(-1), minlength=256).astype(np.float64)
    total = hist.sum()
    omega = np.cumsum(hist) / total
    mu = np.cumsum(hist * np.arange(256)) / total
    mu_t = mu[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        between = (mu_t * omega - mu) ** 2 / (omega * (1.0 - omega))
    between[~np.isfinite(between)] = -1.0
    return int(np.argmax(between))


def _binarize(base: np.ndarray, strategy: str) -> np.ndarray:
    if strategy == "primary":
        thr = float(base.sum(dtype=np.int64)) / base.size
        return np.where(base > thr, 255, 0).astype(np.uint8)
    if strategy == "otsu":
        return np.where(base > otsu_threshold(base), 255, 0).astype(np.uint8)
    if strategy == "adaptive":
        box = np.full(ADAPTIVE_WINDOW, 1.0 / ADAPTIVE_WINDOW)
        local = kernels.filter_sep(base.astype(np.float64), box, box)
        return np.where(base > local - ADAPTIVE_OFFSET, 255, 0).astype(np.uint8)
    if strategy == "inverted":
        return 255 - _binarize(base, "primary")
    raise ValueError(f"unknown strategy {strategy!r}")


def _base_image(img: Image) -> np.ndarray:
    gray = to_grayscale(img).pixels
    return _upscale2x(contrast_stretch(gray))


def preprocess_for_ocr(img: Image):
    """All candidate binarized images, in fallback order."""
    _check_plate_size(img)
    base = _base_image(img)
    return [(name, Image(_binarize(base, name))) for name in STRATEGIES]


def _slot_views(binary: np.ndarray):
    views = []
    for box in digit_boxes():
        x, y = box.x * UPSCALE, box.y * UPSCALE
        w, h = box.w * UPSCALE, box.h * UPSCALE
        views.append(binary[y : y + h, x : x + w])
    return views


@lru_cache(maxsize=1)
def _templates() -> np.ndarray:
    """(10, slot_pixels) mean-centered glyph templates at 2x, built through
    the reader's own preprocessing so clean plates correlate at exactly 1."""
    rows = []
    for d in range(10):
        plate = render_plate(str(d) * 6)
        binary = _binarize(_base_image(plate.image), "primary")
        slot = _slot_views(binary)[0].astype(np.float64).reshape(-1)
        rows.append(slot - slot.mean())
    return np.stack(rows)


def _correlate(slot: np.ndarray) -> np.ndarray:
    """NCC of one binarized slot against all ten templates."""
    t = _templates()
    v = slot.astype(np.float64).reshape(-1)
    v = v - v.mean()
    vn = float(np.sqrt((v * v).sum()))
    tn = np.sqrt((t * t).sum(axis=1))
    if vn == 0.0:
        return np.zeros(10)
    return (t @ v) / (tn * vn)


def read_plate(img: Image) -> OcrResult:
    """Always emits six digits; never raises on unreadable input."""
    _check_plate_size(img)
    base = _base_image(img)
    binaries = {}

    def slots_for(strategy):
        if strategy not in binaries:
            binaries[strategy] = _slot_views(_binarize(base, strategy))
        return binaries[strategy]

    digits = []
    confidences = []
    margins = []
    strategies = []
    for i in range(6):
        best = None  # (margin, order, digit, confidence, strategy)
        for order, strategy in enumerate(STRATEGIES):
            corr = _correlate(slots_for(strategy)[i])
            top = int(np.argmax(corr))
            c1 = float(corr[top])
            c2 = float(np.partition(corr, -2)[-2])
            margin = c1 - c2
            if strategy == "primary" and margin >= MARGIN_THRESHOLD:
                best = (margin, -order, top, c1, strategy)
                break
            if best is None or margin > best[0]:
                best = (margin, -order, top, c1, strategy)
        margin, _, top, c1, strategy = best
        digits.append(str(top))
        confidences.append(c1)
        margins.append(margin)
        strategies.append(strategy)
    return OcrResult(
        digits="".join(digits),
        per_digit_confidence=tuple(confidences),
        per_digit_margin=tuple(margins),
        strategy_used=tuple(strategies),
    )
