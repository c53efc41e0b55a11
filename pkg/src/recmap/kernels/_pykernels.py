"""Numpy implementations of the hot per-pixel kernels.

This is the fallback backend selected when the compiled extension is
unavailable. The compiled backend must reproduce these results bit for bit,
so every arithmetic expression here fixes an evaluation order that the
extension copies literally (no reassociation, no fused multiply-add, no
BLAS-backed reductions).
"""

import numpy as np


def warp_bilinear(src, m, out_h, out_w, background, bbox):
    """Inverse-mapped bilinear warp.

    `m` maps destination pixel-center homogeneous coordinates to continuous
    source coordinates. Destinations outside `bbox`, behind the horizon
    (non-positive denominator), or mapping outside the source rectangle get
    the background color.
    """
    h, w, nch = src.shape
    out = np.empty((out_h, out_w, nch), dtype=np.uint8)
    for ch in range(nch):
        out[:, :, ch] = background[ch]
    x0, y0, x1, y1 = bbox
    if x1 <= x0 or y1 <= y0:
        return out

    u = np.arange(x0, x1, dtype=np.float64) + 0.5
    v = np.arange(y0, y1, dtype=np.float64) + 0.5
    uu, vv = np.meshgrid(u, v)
    den = m[2, 0] * uu + m[2, 1] * vv + m[2, 2]
    valid = den > 0.0
    safe_den = np.where(valid, den, 1.0)
    sx = (m[0, 0] * uu + m[0, 1] * vv + m[0, 2]) / safe_den
    sy = (m[1, 0] * uu + m[1, 1] * vv + m[1, 2]) / safe_den
    inside = valid & (sx >= 0.0) & (sx <= w) & (sy >= 0.0) & (sy <= h)

    px = sx - 0.5
    py = sy - 0.5
    fx0 = np.floor(px)
    fy0 = np.floor(py)
    fx = px - fx0
    fy = py - fy0
    # Clip in float space first: off-plate pixels can carry huge coordinates
    # that are about to be masked out but would overflow an integer cast.
    ix0 = np.clip(fx0, 0, w - 1).astype(np.int64)
    iy0 = np.clip(fy0, 0, h - 1).astype(np.int64)
    ix1 = np.clip(fx0 + 1.0, 0, w - 1).astype(np.int64)
    iy1 = np.clip(fy0 + 1.0, 0, h - 1).astype(np.int64)

    w00 = (1.0 - fx) * (1.0 - fy)
    w10 = fx * (1.0 - fy)
    w01 = (1.0 - fx) * fy
    w11 = fx * fy
    for ch in range(nch):
        plane = src[:, :, ch].astype(np.float64)
        acc = w00 * plane[iy0, ix0]
        acc = acc + w10 * plane[iy0, ix1]
        acc = acc + w01 * plane[iy1, ix0]
        acc = acc + w11 * plane[iy1, ix1]
        vals = np.clip(np.floor(acc + 0.5), 0.0, 255.0)
        region = out[y0:y1, x0:x1, ch]
        region[inside] = vals[inside].astype(np.uint8)
    return out


def sdf_quad(quad, h, w, ox, oy):
    """Signed distance from each pixel center to a convex quad boundary,
    positive inside. Pixel (x, y) is evaluated at (ox + x + 0.5, oy + y + 0.5).

    Distances are minimized in squared form with one square root at the end
    (sqrt is monotone and correctly rounded, so this is exact)."""
    px = ox + np.arange(w, dtype=np.float64) + 0.5
    py = oy + np.arange(h, dtype=np.float64) + 0.5
    pxx, pyy = np.meshgrid(px, py)

    area2 = 0.0
    for i in range(4):
        ax, ay = quad[i]
        bx, by = quad[(i + 1) % 4]
        area2 += ax * by - bx * ay
    sign = 1.0 if area2 >= 0.0 else -1.0

    d2min = np.full((h, w), np.inf, dtype=np.float64)
    inside = np.ones((h, w), dtype=bool)
    for i in range(4):
        ax, ay = quad[i]
        bx, by = quad[(i + 1) % 4]
        dx = bx - ax
        dy = by - ay
        inv_seg2 = 1.0 / (dx * dx + dy * dy)
        t = ((pxx - ax) * dx + (pyy - ay) * dy) * inv_seg2
        t = np.clip(t, 0.0, 1.0)
        ex = (ax + t * dx) - pxx
        ey = (ay + t * dy) - pyy
        d2min = np.minimum(d2min, ex * ex + ey * ey)
        cross = dx * (pyy - ay) - dy * (pxx - ax)
        inside &= (cross * sign) >= 0.0
    d = np.sqrt(d2min)
    return np.where(inside, d, -d)


def filter_sep(img, kx, ky):
    """Separable correlation with clamp-to-edge borders; horizontal pass
    first, taps accumulated in ascending order."""
    h, w = img.shape
    rx = (len(kx) - 1) // 2
    ry = (len(ky) - 1) // 2

    padded = np.pad(img, ((0, 0), (rx, rx)), mode="edge")
    tmp = kx[0] * padded[:, 0:w]
    for k in range(1, len(kx)):
        tmp = tmp + kx[k] * padded[:, k : k + w]

    padded = np.pad(tmp, ((ry, ry), (0, 0)), mode="edge")
    out = ky[0] * padded[0:h, :]
    for k in range(1, len(ky)):
        out = out + ky[k] * padded[k : k + h, :]
    return out


def _iround_u8(values):
    return np.clip(np.floor(values + 0.5), 0.0, 255.0).astype(np.uint8)


def blend_alpha(pixels, alpha, background):
    """out = round(alpha * pixel + (1 - alpha) * background) per channel."""
    p = pixels.astype(np.float64)
    out = alpha[:, :, None] * p + (1.0 - alpha)[:, :, None] * background[None, None, :]
    return _iround_u8(out)


def jitter_u8(pixels, mean_luma, brightness, contrast, saturation, lr, lg, lb):
    """Brightness, contrast about the scaled mean luma, saturation toward
    per-pixel luma, rounded to uint8 in one pass."""
    p = pixels.astype(np.float64)
    p1 = p * brightness
    pivot = brightness * mean_luma
    p2 = pivot + (p1 - pivot) * contrast
    luma = lr * p2[..., 0] + lg * p2[..., 1] + lb * p2[..., 2]
    out = saturation * p2 + (1.0 - saturation) * luma[..., None]
    return _iround_u8(out)


def rgb_to_ycbcr(pixels):
    r = pixels[:, :, 0].astype(np.float64)
    g = pixels[:, :, 1].astype(np.float64)
    b = pixels[:, :, 2].astype(np.float64)
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b
    cr = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b
    return _iround_u8(y), _iround_u8(cb), _iround_u8(cr)


def ycbcr_to_rgb(y, cb, cr):
    yf = y.astype(np.float64)
    cbf = cb.astype(np.float64) - 128.0
    crf = cr.astype(np.float64) - 128.0
    out = np.empty(y.shape + (3,), dtype=np.uint8)
    out[:, :, 0] = _iround_u8(yf + 1.402 * crf)
    out[:, :, 1] = _iround_u8(yf - 0.344136 * cbf - 0.714136 * crf)
    out[:, :, 2] = _iround_u8(yf + 1.772 * cbf)
    return out


def downsample2x2(plane):
    f = plane.astype(np.float64)
    quad = (f[0::2, 0::2] + f[0::2, 1::2]) + (f[1::2, 0::2] + f[1::2, 1::2])
    return _iround_u8(quad * 0.25)


def upsample_triangle(plane):
    """2x upsampling with the 9:3:3:1 triangle kernel, edge-clamped."""
    p = np.pad(plane, 1, mode="edge").astype(np.int64)
    c = p[1:-1, 1:-1]
    up, down = p[:-2, 1:-1], p[2:, 1:-1]
    left, right = p[1:-1, :-2], p[1:-1, 2:]
    ul, ur = p[:-2, :-2], p[:-2, 2:]
    dl, dr = p[2:, :-2], p[2:, 2:]
    h, w = plane.shape
    out = np.empty((2 * h, 2 * w), dtype=np.uint8)
    out[0::2, 0::2] = (9 * c + 3 * up + 3 * left + ul + 8) >> 4
    out[0::2, 1::2] = (9 * c + 3 * up + 3 * right + ur + 8) >> 4
    out[1::2, 0::2] = (9 * c + 3 * down + 3 * left + dl + 8) >> 4
    out[1::2, 1::2] = (9 * c + 3 * down + 3 * right + dr + 8) >> 4
    return out


def ssim_stats(x, y, taps):
    """The five Gaussian-filtered moment maps SSIM needs: E[x], E[y],
    E[x^2], E[y^2], E[xy]."""
    return (
        filter_sep(x, taps, taps),
        filter_sep(y, taps, taps),
        filter_sep(x * x, taps, taps),
        filter_sep(y * y, taps, taps),
        filter_sep(x * y, taps, taps),
    )


def dct_quant_roundtrip(plane, qtable, dct):
    """Per-8x8-block DCT, quantization (round half up), dequantization and
    inverse DCT. `plane` is level-shifted sample data, dims multiples of 8."""
    h, w = plane.shape
    blocks = (
        plane.reshape(h // 8, 8, w // 8, 8).transpose(0, 2, 1, 3).reshape(-1, 8, 8).copy()
    )
    coef = _mat_left(dct, blocks)
    coef = _mat_right_t(coef, dct)
    quant = np.floor(coef / qtable + 0.5) * qtable
    rec = _mat_left_t(dct, quant)
    rec = _mat_right(rec, dct)
    nby = h // 8
    nbx = w // 8
    return rec.reshape(nby, nbx, 8, 8).transpose(0, 2, 1, 3).reshape(h, w)


def _mat_left(c, x):
    # out[b,i,k] = sum_j c[i,j] * x[b,j,k], j ascending
    out = c[None, :, 0, None] * x[:, None, 0, :]
    for j in range(1, 8):
        out = out + c[None, :, j, None] * x[:, None, j, :]
    return out


def _mat_left_t(c, x):
    # out[b,j,k] = sum_i c[i,j] * x[b,i,k], i ascending
    out = c[None, 0, :, None] * x[:, 0, None, :]
    for i in range(1, 8):
        out = out + c[None, i, :, None] * x[:, i, None, :]
    return out


def _mat_right_t(x, c):
    # out[b,i,l] = sum_k x[b,i,k] * c[l,k], k ascending
    out = x[:, :, 0, None] * c[None, None, :, 0]
    for k in range(1, 8):
        out = out + x[:, :, k, None] * c[None, None, :, k]
    return out


def _mat_right(x, c):
    # out[b,j,l] = sum_k x[b,j,k] * c[k,l], k ascending
    out = x[:, :, 0, None] * c[None, 0, None, :]
    for k in range(1, 8):
        out = out + x[:, :, k, None] * c[None, k, None, :]
    return out
