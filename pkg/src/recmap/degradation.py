"""The degradation operators and their composition into one deterministic
sample generator.

Pipeline order is fixed: geometric warp, edge blend, color jitter, Gaussian
blur, JPEG roundtrip, then de-warp back to the 256x64 restorer frame.

`degrade` does not run the stages on the full canvas. Because everything
outside the projected plate is a uniform background, the stages are applied
to a 16-aligned window around the plate and the background value is tracked
through each stage analytically. This is an exact rewrite, not an
approximation: the window has enough margin that clamp-to-edge filtering,
JPEG block alignment, and the de-warp's bilinear taps all see the same
values they would on the full canvas, and the contrast pivot is computed
from integer channel sums so it cannot drift between the two formulations.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .geometry import (
    DEFAULT_CAMERA,
    AnglePair,
    CameraModel,
    homography_inverse,
    plate_homography,
    project_quad,
)
from .image import LUMA_B, LUMA_G, LUMA_R, Image, iround
from .jpegsim import jpeg_roundtrip
from .plates import PLATE_H, PLATE_W, CleanPlate

CANVAS_BACKGROUND = (128, 128, 128)
DEFAULT_EDGE_TAU = 1.5

JITTER_RANGE = (0.8, 1.2)
BLUR_SIGMA_RANGE = (0.5, 1.5)
JPEG_QUALITY_RANGE = (55, 85)


@dataclass(frozen=True)
class DegradationParams:
    angles: AnglePair
    brightness: float = 1.0
    contrast: float = 1.0
    saturation: float = 1.0
    blur_sigma: float = 1.0
    jpeg_quality: int = 75
    edge_tau: float = DEFAULT_EDGE_TAU
    blur_bypass: bool = False
    blend_bypass: bool = False

    def validate(self):
        lo, hi = JITTER_RANGE
        for name in ("brightness", "contrast", "saturation"):
            v = getattr(self, name)
            if not lo <= v <= hi:
                raise ValueError(f"{name}={v} outside [{lo}, {hi}]")
        if not BLUR_SIGMA_RANGE[0] <= self.blur_sigma <= BLUR_SIGMA_RANGE[1]:
            raise ValueError(f"blur_sigma={self.blur_sigma} outside {BLUR_SIGMA_RANGE}")
        if not 1 <= self.jpeg_quality <= 100:
            raise ValueError(f"jpeg_quality={self.jpeg_quality} outside [1, 100]")
        if self.edge_tau <= 0:
            raise ValueError(f"edge_tau={self.edge_tau} must be positive")
        self.angles.validate_grid()


@dataclass(frozen=True)
class DistortedSample:
    input: Image
    truth: CleanPlate
    params: DegradationParams
    seed: int


def draw_params(rng: np.random.Generator, angles: AnglePair) -> DegradationParams:
    """Per-sample parameter draw; the draw order below is a compatibility
    contract (changing it changes every generated dataset)."""
    lo, hi = JITTER_RANGE
    brightness = float(rng.uniform(lo, hi))
    contrast = float(rng.uniform(lo, hi))
    saturation = float(rng.uniform(lo, hi))
    sigma = float(rng.uniform(*BLUR_SIGMA_RANGE))
    quality = int(rng.integers(JPEG_QUALITY_RANGE[0], JPEG_QUALITY_RANGE[1] + 1))
    return DegradationParams(
        angles=angles,
        brightness=brightness,
        contrast=contrast,
        saturation=saturation,
        blur_sigma=sigma,
        jpeg_quality=quality,
    )


# --- stages ----------------------------------------------------------------


def edge_blend(img: Image, quad: np.ndarray, tau: float, background) -> Image:
    """Soft compositing against the background along the quad boundary:
    alpha = logistic(signed_distance / tau)."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    d = kernels.sdf_quad(quad, img.height, img.width)
    alpha = 1.0 / (1.0 + np.exp(-d / tau))
    return Image(_blend_toward(img.pixels, alpha, background))


def _blend_toward(pixels: np.ndarray, alpha: np.ndarray, background) -> np.ndarray:
    if pixels.ndim == 3:
        return kernels.blend_alpha(pixels, alpha, background)
    bg = np.atleast_1d(np.asarray(background, dtype=np.float64))
    out = alpha * pixels.astype(np.float64) + (1.0 - alpha) * bg[0]
    return iround(out)


def exact_mean_luma(pixels: np.ndarray, extra_count: int = 0, extra_color=None) -> float:
    """Mean BT.601 luma with integer channel sums, so the value is identical
    however the image is partitioned. `extra_*` folds in a uniform region."""
    n = pixels.shape[0] * pixels.shape[1] + extra_count
    if pixels.ndim == 2:
        total = 1000 * int(pixels.sum(dtype=np.int64))
        if extra_count:
            total += 1000 * extra_count * int(extra_color)
        return total / (1000.0 * n)
    sr = int(pixels[:, :, 0].sum(dtype=np.int64))
    sg = int(pixels[:, :, 1].sum(dtype=np.int64))
    sb = int(pixels[:, :, 2].sum(dtype=np.int64))
    if extra_count:
        sr += extra_count * int(extra_color[0])
        sg += extra_count * int(extra_color[1])
        sb += extra_count * int(extra_color[2])
    return (299 * sr + 587 * sg + 114 * sb) / (1000.0 * n)


def _jitter(pixels: np.ndarray, mean_luma: float, brightness, contrast, saturation):
    """Brightness, contrast about the (brightness-scaled) mean luma, then
    saturation toward per-pixel luma; rounded uint8 out."""
    return kernels.jitter_u8(
        pixels, mean_luma, brightness, contrast, saturation, (LUMA_R, LUMA_G, LUMA_B)
    )


def color_jitter(img: Image, brightness: float, contrast: float, saturation: float) -> Image:
    if img.channels != 3:
        raise ValueError("color_jitter needs an RGB image")
    m0 = exact_mean_luma(img.pixels)
    return Image(_jitter(img.pixels, m0, brightness, contrast, saturation))


def gaussian_blur(img: Image, sigma: float) -> Image:
    """Separable Gaussian, kernel radius ceil(3*sigma), clamp-to-edge."""
    taps = kernels.gaussian_taps(sigma)
    p = img.pixels
    if p.ndim == 2:
        return Image(iround(kernels.filter_sep(p.astype(np.float64), taps, taps)))
    out = np.empty_like(p)
    for ch in range(3):
        out[:, :, ch] = iround(kernels.filter_sep(p[:, :, ch].astype(np.float64), taps, taps))
    return Image(out)


# --- composition -----------------------------------------------------------

# Window margin: blur radius (<= 5 at sigma 1.5) plus one bilinear tap.
_WINDOW_MARGIN = 6


def _plate_window(quad: np.ndarray, cam: CameraModel):
    """16-aligned canvas window that fully contains every stage's support."""
    x0 = int(math.floor(quad[:, 0].min())) - _WINDOW_MARGIN
    y0 = int(math.floor(quad[:, 1].min())) - _WINDOW_MARGIN
    x1 = int(math.ceil(quad[:, 0].max())) + _WINDOW_MARGIN
    y1 = int(math.ceil(quad[:, 1].max())) + _WINDOW_MARGIN
    x0 = max(0, (x0 // 16) * 16)
    y0 = max(0, (y0 // 16) * 16)
    x1 = min(cam.canvas_w, ((x1 + 15) // 16) * 16)
    y1 = min(cam.canvas_h, ((y1 + 15) // 16) * 16)
    return x0, y0, x1, y1


def _translate(m: np.ndarray, dx: float, dy: float) -> np.ndarray:
    t = np.array([[1.0, 0.0, dx], [0.0, 1.0, dy], [0.0, 0.0, 1.0]], dtype=np.float64)
    return m @ t


def degrade(
    truth: CleanPlate,
    params: DegradationParams,
    seed: int = 0,
    cam: CameraModel = DEFAULT_CAMERA,
) -> DistortedSample:
    """Run the full pipeline; byte-deterministic given (truth, params, seed)."""
    params.validate()
    hmat = plate_homography(params.angles, cam)
    quad = project_quad(params.angles, cam)
    x0, y0, x1, y1 = _plate_window(quad, cam)
    win_w, win_h = x1 - x0, y1 - y0
    n_outside = cam.canvas_w * cam.canvas_h - win_w * win_h
    bg = np.array(CANVAS_BACKGROUND, dtype=np.float64)

    # Stage 1: warp into the window. The window's extra pixels land outside
    # the source rectangle and become background, exactly as on the canvas.
    minv = _translate(homography_inverse(hmat), x0, y0)
    center = hmat @ np.array([PLATE_W / 2.0, PLATE_H / 2.0, 1.0])
    ref = (center[0] / center[2] - x0, center[1] / center[2] - y0)
    if minv[2, 0] * ref[0] + minv[2, 1] * ref[1] + minv[2, 2] < 0:
        minv = -minv
    win = kernels.warp_bilinear(truth.image.pixels, minv, win_h, win_w, bg)

    # Stage 2: edge blend. Pixels at background stay background bit-exactly,
    # so only the window needs the signed-distance evaluation.
    if not params.blend_bypass:
        d = kernels.sdf_quad(quad, win_h, win_w, origin=(x0, y0))
        alpha = 1.0 / (1.0 + np.exp(-d / params.edge_tau))
        win = _blend_toward(win, alpha, CANVAS_BACKGROUND)

    # Stage 3: color jitter. The contrast pivot folds the off-window
    # background into the integer luma sums.
    m0 = exact_mean_luma(win, extra_count=n_outside, extra_color=CANVAS_BACKGROUND)
    win = _jitter(win, m0, params.brightness, params.contrast, params.saturation)
    bg = _jitter(
        np.array(CANVAS_BACKGROUND, dtype=np.uint8).reshape(1, 1, 3),
        m0, params.brightness, params.contrast, params.saturation,
    ).reshape(3)

    # Stage 4: blur. Off-window pixels are uniform, hence blur-invariant;
    # the window margin exceeds the kernel radius so clamp-to-edge matches
    # the full-canvas result.
    if not params.blur_bypass:
        taps = kernels.gaussian_taps(params.blur_sigma)
        blurred = np.empty_like(win)
        for ch in range(3):
            blurred[:, :, ch] = iround(
                kernels.filter_sep(win[:, :, ch].astype(np.float64), taps, taps)
            )
        win = blurred

    # Stage 5: JPEG. The window is 16-aligned on the canvas block grid; the
    # off-window background quantizes like any all-flat MCU.
    win = jpeg_roundtrip(Image(win), params.jpeg_quality).pixels
    flat = np.empty((16, 16, 3), dtype=np.uint8)
    flat[:, :] = bg
    bg = jpeg_roundtrip(Image(flat), params.jpeg_quality).pixels[0, 0].astype(np.float64)

    # Stage 6: de-warp to the restorer frame, sampling the window.
    mdew = _translate(np.eye(3), -x0, -y0) @ hmat
    if mdew[2, 0] * PLATE_W / 2.0 + mdew[2, 1] * PLATE_H / 2.0 + mdew[2, 2] < 0:
        mdew = -mdew
    out = kernels.warp_bilinear(win, mdew, PLATE_H, PLATE_W, bg)
    return DistortedSample(input=Image(out), truth=truth, params=params, seed=seed)


def identity_params(angles: AnglePair = AnglePair(0.0, 0.0)) -> DegradationParams:
    """All stages at their identity settings (for round-trip checks)."""
    return DegradationParams(
        angles=angles,
        brightness=1.0,
        contrast=1.0,
        saturation=1.0,
        blur_sigma=BLUR_SIGMA_RANGE[0],
        jpeg_quality=100,
        blur_bypass=True,
        blend_bypass=True,
    )
