"""Hot-kernel dispatch: compiled extension when available, numpy otherwise.

Both backends implement the same four primitives with bit-identical results;
`BACKEND` reports which one is live. Set RECMAP_KERNELS=python to force the
fallback (used by the cross-backend equivalence tests and the benchmark).
"""

import os

import numpy as np

from ._common import DCT8, gaussian_taps  # noqa: F401  (re-exported)

if os.environ.get("RECMAP_KERNELS", "").lower() == "python":
    from . import _pykernels as _impl

    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        from . import _pykernels as _impl

        BACKEND = "python"


def backend_module(name: str):
    """Explicit backend lookup for tests and benchmarks."""
    if name == "python":
        from . import _pykernels

        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


def _as_chw(src: np.ndarray):
    if src.ndim == 2:
        return np.ascontiguousarray(src[:, :, None]), True
    return np.ascontiguousarray(src), False


def warp_bilinear(src, m, out_h, out_w, background, bbox=None, impl=None):
    """Inverse-mapped bilinear warp of a uint8 raster; see backend docs."""
    src3, squeeze = _as_chw(np.asarray(src, dtype=np.uint8))
    nch = src3.shape[2]
    bg = np.atleast_1d(np.asarray(background, dtype=np.float64))
    if bg.size == 1 and nch > 1:
        bg = np.repeat(bg, nch)
    if bg.size != nch:
        raise ValueError(f"background has {bg.size} components for {nch} channels")
    if bbox is None:
        box = (0, 0, out_w, out_h)
    else:
        x0, y0, x1, y1 = (int(t) for t in bbox)
        box = (max(x0, 0), max(y0, 0), min(x1, out_w), min(y1, out_h))
    mat = np.ascontiguousarray(np.asarray(m, dtype=np.float64).reshape(3, 3))
    out = (impl or _impl).warp_bilinear(src3, mat, int(out_h), int(out_w), bg, box)
    return out[:, :, 0] if squeeze else out


def sdf_quad(quad, h, w, origin=(0.0, 0.0), impl=None):
    """Signed distance field (positive inside) of a convex quad."""
    q = np.ascontiguousarray(np.asarray(quad, dtype=np.float64).reshape(4, 2))
    ox, oy = (float(origin[0]), float(origin[1]))
    return (impl or _impl).sdf_quad(q, int(h), int(w), ox, oy)


def filter_sep(img, kx, ky, impl=None):
    """Separable float64 correlation with clamp-to-edge borders."""
    a = np.ascontiguousarray(np.asarray(img, dtype=np.float64))
    if a.ndim != 2:
        raise ValueError("filter_sep expects a 2D plane")
    kxa = np.ascontiguousarray(np.asarray(kx, dtype=np.float64))
    kya = np.ascontiguousarray(np.asarray(ky, dtype=np.float64))
    if len(kxa) % 2 != 1 or len(kya) % 2 != 1:
        raise ValueError("kernel lengths must be odd")
    return (impl or _impl).filter_sep(a, kxa, kya)


def dct_quant_roundtrip(plane, qtable, impl=None):
    """Blockwise DCT quantization roundtrip on a level-shifted plane."""
    a = np.ascontiguousarray(np.asarray(plane, dtype=np.float64))
    if a.ndim != 2 or a.shape[0] % 8 or a.shape[1] % 8:
        raise ValueError(f"plane dims must be multiples of 8, got {a.shape}")
    q = np.ascontiguousarray(np.asarray(qtable, dtype=np.float64).reshape(8, 8))
    return (impl or _impl).dct_quant_roundtrip(a, q, DCT8)


def ssim_stats(x, y, taps, impl=None):
    """Filtered first and second moments of an image pair (for SSIM)."""
    xa = np.ascontiguousarray(np.asarray(x, dtype=np.float64))
    ya = np.ascontiguousarray(np.asarray(y, dtype=np.float64))
    if xa.shape != ya.shape or xa.ndim != 2:
        raise ValueError("ssim_stats expects two equal-shape 2D planes")
    ka = np.ascontiguousarray(np.asarray(taps, dtype=np.float64))
    return (impl or _impl).ssim_stats(xa, ya, ka)


def blend_alpha(pixels, alpha, background, impl=None):
    """Per-pixel compositing toward a background color with rounding."""
    p = np.ascontiguousarray(np.asarray(pixels, dtype=np.uint8))
    if p.ndim != 3:
        raise ValueError("blend_alpha expects an (h, w, c) raster")
    a = np.ascontiguousarray(np.asarray(alpha, dtype=np.float64))
    bg = np.ascontiguousarray(np.atleast_1d(np.asarray(background, dtype=np.float64)))
    if bg.size == 1 and p.shape[2] > 1:
        bg = np.repeat(bg, p.shape[2])
    return (impl or _impl).blend_alpha(p, a, bg)


def jitter_u8(pixels, mean_luma, brightness, contrast, saturation, luma_weights, impl=None):
    """Full color-jitter pass on an RGB raster, rounded to uint8."""
    p = np.ascontiguousarray(np.asarray(pixels, dtype=np.uint8))
    if p.ndim != 3 or p.shape[2] != 3:
        raise ValueError("jitter_u8 expects an (h, w, 3) raster")
    lr, lg, lb = (float(v) for v in luma_weights)
    return (impl or _impl).jitter_u8(
        p, float(mean_luma), float(brightness), float(contrast), float(saturation),
        lr, lg, lb,
    )


def rgb_to_ycbcr(pixels, impl=None):
    p = np.ascontiguousarray(np.asarray(pixels, dtype=np.uint8))
    if p.ndim != 3 or p.shape[2] != 3:
        raise ValueError("rgb_to_ycbcr expects an (h, w, 3) raster")
    return (impl or _impl).rgb_to_ycbcr(p)


def ycbcr_to_rgb(y, cb, cr, impl=None):
    planes = [np.ascontiguousarray(np.asarray(v, dtype=np.uint8)) for v in (y, cb, cr)]
    if not (planes[0].shape == planes[1].shape == planes[2].shape):
        raise ValueError("ycbcr planes must share a shape")
    return (impl or _impl).ycbcr_to_rgb(*planes)


def downsample2x2(plane, impl=None):
    p = np.ascontiguousarray(np.asarray(plane, dtype=np.uint8))
    if p.ndim != 2 or p.shape[0] % 2 or p.shape[1] % 2:
        raise ValueError(f"downsample2x2 needs even dims, got {p.shape}")
    return (impl or _impl).downsample2x2(p)


def upsample_triangle(plane, impl=None):
    p = np.ascontiguousarray(np.asarray(plane, dtype=np.uint8))
    if p.ndim != 2:
        raise ValueError("upsample_triangle expects a 2D plane")
    return (impl or _impl).upsample_triangle(p)
