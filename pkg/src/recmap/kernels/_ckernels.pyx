# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of _pykernels.

Every arithmetic expression matches the numpy fallback operation for
operation (same order, double precision, no FMA), so the two backends
produce bit-identical output; tests/test_kernels.py enforces this.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, floor, sqrt

cnp.import_array()


def warp_bilinear(const unsigned char[:, :, ::1] src, const double[:, ::1] m,
                  int out_h, int out_w, const double[::1] background, bbox):
    cdef Py_ssize_t h = src.shape[0]
    cdef Py_ssize_t w = src.shape[1]
    cdef Py_ssize_t nch = src.shape[2]
    cdef cnp.ndarray out_arr = np.empty((out_h, out_w, nch), dtype=np.uint8)
    cdef unsigned char[:, :, ::1] out = out_arr
    cdef Py_ssize_t bx0 = bbox[0], by0 = bbox[1], bx1 = bbox[2], by1 = bbox[3]
    cdef Py_ssize_t x, y, ch
    cdef unsigned char bgv
    cdef double u, v, den, sx, sy, px, py, fx0, fy0, fx, fy
    cdef double w00, w10, w01, w11, acc, val
    cdef Py_ssize_t ix0, iy0, ix0c, iy0c, ix1c, iy1c
    cdef double fw = <double>w
    cdef double fh = <double>h

    for ch in range(nch):
        bgv = <unsigned char>background[ch]
        for y in range(out_h):
            for x in range(out_w):
                out[y, x, ch] = bgv
    if bx1 <= bx0 or by1 <= by0:
        return out_arr

    for y in range(by0, by1):
        v = y + 0.5
        for x in range(bx0, bx1):
            u = x + 0.5
            den = m[2, 0] * u + m[2, 1] * v + m[2, 2]
            if den <= 0.0:
                continue
            sx = (m[0, 0] * u + m[0, 1] * v + m[0, 2]) / den
            sy = (m[1, 0] * u + m[1, 1] * v + m[1, 2]) / den
            if not (sx >= 0.0 and sx <= fw and sy >= 0.0 and sy <= fh):
                continue
            px = sx - 0.5
            py = sy - 0.5
            fx0 = floor(px)
            fy0 = floor(py)
            fx = px - fx0
            fy = py - fy0
            ix0 = <Py_ssize_t>fx0
            iy0 = <Py_ssize_t>fy0
            ix0c = _clampi(ix0, w - 1)
            iy0c = _clampi(iy0, h - 1)
            ix1c = _clampi(ix0 + 1, w - 1)
            iy1c = _clampi(iy0 + 1, h - 1)
            w00 = (1.0 - fx) * (1.0 - fy)
            w10 = fx * (1.0 - fy)
            w01 = (1.0 - fx) * fy
            w11 = fx * fy
            for ch in range(nch):
                acc = w00 * <double>src[iy0c, ix0c, ch]
                acc = acc + w10 * <double>src[iy0c, ix1c, ch]
                acc = acc + w01 * <double>src[iy1c, ix0c, ch]
                acc = acc + w11 * <double>src[iy1c, ix1c, ch]
                val = floor(acc + 0.5)
                if val < 0.0:
                    val = 0.0
                elif val > 255.0:
                    val = 255.0
                out[y, x, ch] = <unsigned char>val
    return out_arr


cdef inline Py_ssize_t _clampi(Py_ssize_t v, Py_ssize_t hi) nogil:
    if v < 0:
        return 0
    if v > hi:
        return hi
    return v


cdef inline unsigned char _round_u8(double v) nogil:
    cdef double r = floor(v + 0.5)
    if r < 0.0:
        return 0
    if r > 255.0:
        return 255
    return <unsigned char>r


def blend_alpha(const unsigned char[:, :, ::1] pixels, const double[:, ::1] alpha,
                const double[::1] background):
    cdef Py_ssize_t h = pixels.shape[0]
    cdef Py_ssize_t w = pixels.shape[1]
    cdef Py_ssize_t nch = pixels.shape[2]
    cdef cnp.ndarray out_arr = np.empty((h, w, nch), dtype=np.uint8)
    cdef unsigned char[:, :, ::1] out = out_arr
    cdef Py_ssize_t x, y, ch
    cdef double a, one_m
    for y in range(h):
        for x in range(w):
            a = alpha[y, x]
            one_m = 1.0 - a
            for ch in range(nch):
                out[y, x, ch] = _round_u8(a * <double>pixels[y, x, ch] + one_m * background[ch])
    return out_arr


def jitter_u8(const unsigned char[:, :, ::1] pixels, double mean_luma,
              double brightness, double contrast, double saturation,
              double lr, double lg, double lb):
    cdef Py_ssize_t h = pixels.shape[0]
    cdef Py_ssize_t w = pixels.shape[1]
    cdef cnp.ndarray out_arr = np.empty((h, w, 3), dtype=np.uint8)
    cdef unsigned char[:, :, ::1] out = out_arr
    cdef Py_ssize_t x, y
    cdef double pivot = brightness * mean_luma
    cdef double one_m = 1.0 - saturation
    cdef double p2r, p2g, p2b, luma
    for y in range(h):
        for x in range(w):
            p2r = pivot + (<double>pixels[y, x, 0] * brightness - pivot) * contrast
            p2g = pivot + (<double>pixels[y, x, 1] * brightness - pivot) * contrast
            p2b = pivot + (<double>pixels[y, x, 2] * brightness - pivot) * contrast
            luma = lr * p2r + lg * p2g + lb * p2b
            out[y, x, 0] = _round_u8(saturation * p2r + one_m * luma)
            out[y, x, 1] = _round_u8(saturation * p2g + one_m * luma)
            out[y, x, 2] = _round_u8(saturation * p2b + one_m * luma)
    return out_arr


def rgb_to_ycbcr(const unsigned char[:, :, ::1] pixels):
    cdef Py_ssize_t h = pixels.shape[0]
    cdef Py_ssize_t w = pixels.shape[1]
    cdef cnp.ndarray y_arr = np.empty((h, w), dtype=np.uint8)
    cdef cnp.ndarray cb_arr = np.empty((h, w), dtype=np.uint8)
    cdef cnp.ndarray cr_arr = np.empty((h, w), dtype=np.uint8)
    cdef unsigned char[:, ::1] yv = y_arr
    cdef unsigned char[:, ::1] cbv = cb_arr
    cdef unsigned char[:, ::1] crv = cr_arr
    cdef Py_ssize_t x, yy
    cdef double r, g, b
    for yy in range(h):
        for x in range(w):
            r = <double>pixels[yy, x, 0]
            g = <double>pixels[yy, x, 1]
            b = <double>pixels[yy, x, 2]
            yv[yy, x] = _round_u8(0.299 * r + 0.587 * g + 0.114 * b)
            cbv[yy, x] = _round_u8(128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b)
            crv[yy, x] = _round_u8(128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b)
    return y_arr, cb_arr, cr_arr


def ycbcr_to_rgb(const unsigned char[:, ::1] y, const unsigned char[:, ::1] cb,
                 const unsigned char[:, ::1] cr):
    cdef Py_ssize_t h = y.shape[0]
    cdef Py_ssize_t w = y.shape[1]
    cdef cnp.ndarray out_arr = np.empty((h, w, 3), dtype=np.uint8)
    cdef unsigned char[:, :, ::1] out = out_arr
    cdef Py_ssize_t x, yy
    cdef double yf, cbf, crf
    for yy in range(h):
        for x in range(w):
            yf = <double>y[yy, x]
            cbf = <double>cb[yy, x] - 128.0
            crf = <double>cr[yy, x] - 128.0
            out[yy, x, 0] = _round_u8(yf + 1.402 * crf)
            out[yy, x, 1] = _round_u8(yf - 0.344136 * cbf - 0.714136 * crf)
            out[yy, x, 2] = _round_u8(yf + 1.772 * cbf)
    return out_arr


def downsample2x2(const unsigned char[:, ::1] plane):
    cdef Py_ssize_t h = plane.shape[0] // 2
    cdef Py_ssize_t w = plane.shape[1] // 2
    cdef cnp.ndarray out_arr = np.empty((h, w), dtype=np.uint8)
    cdef unsigned char[:, ::1] out = out_arr
    cdef Py_ssize_t x, y
    cdef double quad
    for y in range(h):
        for x in range(w):
            quad = (
                (<double>plane[2 * y, 2 * x] + <double>plane[2 * y, 2 * x + 1])
                + (<double>plane[2 * y + 1, 2 * x] + <double>plane[2 * y + 1, 2 * x + 1])
            )
            out[y, x] = _round_u8(quad * 0.25)
    return out_arr


def upsample_triangle(const unsigned char[:, ::1] plane):
    cdef Py_ssize_t h = plane.shape[0]
    cdef Py_ssize_t w = plane.shape[1]
    cdef cnp.ndarray out_arr = np.empty((2 * h, 2 * w), dtype=np.uint8)
    cdef unsigned char[:, ::1] out = out_arr
    cdef Py_ssize_t x, y, yu, yd, xl, xr
    cdef long c, up, down, left, right
    for y in range(h):
        yu = y - 1 if y > 0 else 0
        yd = y + 1 if y < h - 1 else h - 1
        for x in range(w):
            xl = x - 1 if x > 0 else 0
            xr = x + 1 if x < w - 1 else w - 1
            c = 9 * <long>plane[y, x]
            up = <long>plane[yu, x]
            down = <long>plane[yd, x]
            left = <long>plane[y, xl]
            right = <long>plane[y, xr]
            out[2 * y, 2 * x] = <unsigned char>((c + 3 * up + 3 * left + <long>plane[yu, xl] + 8) >> 4)
            out[2 * y, 2 * x + 1] = <unsigned char>((c + 3 * up + 3 * right + <long>plane[yu, xr] + 8) >> 4)
            out[2 * y + 1, 2 * x] = <unsigned char>((c + 3 * down + 3 * left + <long>plane[yd, xl] + 8) >> 4)
            out[2 * y + 1, 2 * x + 1] = <unsigned char>((c + 3 * down + 3 * right + <long>plane[yd, xr] + 8) >> 4)
    return out_arr


def sdf_quad(const double[:, ::1] quad, int h, int w, double ox, double oy):
    cdef cnp.ndarray out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double ax[4]
    cdef double ay[4]
    cdef double dx[4]
    cdef double dy[4]
    cdef double inv_seg2[4]
    cdef double area2 = 0.0
    cdef double sign, px, py, d2min, t, ex, ey, d2, cross, d
    cdef Py_ssize_t i, x, y
    cdef bint inside

    for i in range(4):
        ax[i] = quad[i, 0]
        ay[i] = quad[i, 1]
    for i in range(4):
        dx[i] = quad[(i + 1) % 4, 0] - ax[i]
        dy[i] = quad[(i + 1) % 4, 1] - ay[i]
        inv_seg2[i] = 1.0 / (dx[i] * dx[i] + dy[i] * dy[i])
        area2 += ax[i] * quad[(i + 1) % 4, 1] - quad[(i + 1) % 4, 0] * ay[i]
    sign = 1.0 if area2 >= 0.0 else -1.0

    for y in range(h):
        py = oy + y + 0.5
        for x in range(w):
            px = ox + x + 0.5
            d2min = INFINITY
            inside = True
            for i in range(4):
                t = ((px - ax[i]) * dx[i] + (py - ay[i]) * dy[i]) * inv_seg2[i]
                if t < 0.0:
                    t = 0.0
                elif t > 1.0:
                    t = 1.0
                ex = (ax[i] + t * dx[i]) - px
                ey = (ay[i] + t * dy[i]) - py
                d2 = ex * ex + ey * ey
                if d2 < d2min:
                    d2min = d2
                cross = dx[i] * (py - ay[i]) - dy[i] * (px - ax[i])
                if cross * sign < 0.0:
                    inside = False
            d = sqrt(d2min)
            out[y, x] = d if inside else -d
    return out_arr


def filter_sep(const double[:, ::1] img, const double[::1] kx, const double[::1] ky):
    cdef Py_ssize_t h = img.shape[0]
    cdef Py_ssize_t w = img.shape[1]
    cdef Py_ssize_t nkx = kx.shape[0]
    cdef Py_ssize_t nky = ky.shape[0]
    cdef Py_ssize_t rx = (nkx - 1) // 2
    cdef Py_ssize_t ry = (nky - 1) // 2
    cdef cnp.ndarray tmp_arr = np.empty((h, w), dtype=np.float64)
    cdef cnp.ndarray out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] tmp = tmp_arr
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t x, y, k
    cdef double acc

    for y in range(h):
        for x in range(w):
            acc = kx[0] * img[y, _clampi(x - rx, w - 1)]
            for k in range(1, nkx):
                acc = acc + kx[k] * img[y, _clampi(x + k - rx, w - 1)]
            tmp[y, x] = acc
    for y in range(h):
        for x in range(w):
            acc = ky[0] * tmp[_clampi(y - ry, h - 1), x]
            for k in range(1, nky):
                acc = acc + ky[k] * tmp[_clampi(y + k - ry, h - 1), x]
            out[y, x] = acc
    return out_arr


def ssim_stats(const double[:, ::1] x, const double[:, ::1] y, const double[::1] taps):
    """Five filtered moment maps in one traversal; per-plane accumulation
    order matches five separate filter_sep calls exactly."""
    cdef Py_ssize_t h = x.shape[0]
    cdef Py_ssize_t w = x.shape[1]
    cdef Py_ssize_t nk = taps.shape[0]
    cdef Py_ssize_t r = (nk - 1) // 2
    cdef cnp.ndarray planes_arr = np.empty((5, h, w), dtype=np.float64)
    cdef cnp.ndarray tmp_arr = np.empty((5, h, w), dtype=np.float64)
    cdef cnp.ndarray out_arr = np.empty((5, h, w), dtype=np.float64)
    cdef double[:, :, ::1] planes = planes_arr
    cdef double[:, :, ::1] tmp = tmp_arr
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t i, j, k, p, src
    cdef double a0, a1, a2, a3, a4, kv

    for i in range(h):
        for j in range(w):
            planes[0, i, j] = x[i, j]
            planes[1, i, j] = y[i, j]
            planes[2, i, j] = x[i, j] * x[i, j]
            planes[3, i, j] = y[i, j] * y[i, j]
            planes[4, i, j] = x[i, j] * y[i, j]
    for i in range(h):
        for j in range(w):
            src = _clampi(j - r, w - 1)
            a0 = taps[0] * planes[0, i, src]
            a1 = taps[0] * planes[1, i, src]
            a2 = taps[0] * planes[2, i, src]
            a3 = taps[0] * planes[3, i, src]
            a4 = taps[0] * planes[4, i, src]
            for k in range(1, nk):
                src = _clampi(j + k - r, w - 1)
                kv = taps[k]
                a0 = a0 + kv * planes[0, i, src]
                a1 = a1 + kv * planes[1, i, src]
                a2 = a2 + kv * planes[2, i, src]
                a3 = a3 + kv * planes[3, i, src]
                a4 = a4 + kv * planes[4, i, src]
            tmp[0, i, j] = a0
            tmp[1, i, j] = a1
            tmp[2, i, j] = a2
            tmp[3, i, j] = a3
            tmp[4, i, j] = a4
    for i in range(h):
        for j in range(w):
            src = _clampi(i - r, h - 1)
            a0 = taps[0] * tmp[0, src, j]
            a1 = taps[0] * tmp[1, src, j]
            a2 = taps[0] * tmp[2, src, j]
            a3 = taps[0] * tmp[3, src, j]
            a4 = taps[0] * tmp[4, src, j]
            for k in range(1, nk):
                src = _clampi(i + k - r, h - 1)
                kv = taps[k]
                a0 = a0 + kv * tmp[0, src, j]
                a1 = a1 + kv * tmp[1, src, j]
                a2 = a2 + kv * tmp[2, src, j]
                a3 = a3 + kv * tmp[3, src, j]
                a4 = a4 + kv * tmp[4, src, j]
            out[0, i, j] = a0
            out[1, i, j] = a1
            out[2, i, j] = a2
            out[3, i, j] = a3
            out[4, i, j] = a4
    return out_arr[0], out_arr[1], out_arr[2], out_arr[3], out_arr[4]


def dct_quant_roundtrip(const double[:, ::1] plane, const double[:, ::1] qtable,
                        const double[:, ::1] dct):
    cdef Py_ssize_t h = plane.shape[0]
    cdef Py_ssize_t w = plane.shape[1]
    cdef cnp.ndarray out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double x[8][8]
    cdef double t1[8][8]
    cdef double co[8][8]
    cdef Py_ssize_t by, bx, i, j, k, l
    cdef double acc

    for by in range(0, h, 8):
        for bx in range(0, w, 8):
            for i in range(8):
                for j in range(8):
                    x[i][j] = plane[by + i, bx + j]
            # t1 = C . X
            for i in range(8):
                for k in range(8):
                    acc = dct[i, 0] * x[0][k]
                    for j in range(1, 8):
                        acc = acc + dct[i, j] * x[j][k]
                    t1[i][k] = acc
            # coef = t1 . C^T, then quantize in place
            for i in range(8):
                for l in range(8):
                    acc = t1[i][0] * dct[l, 0]
                    for k in range(1, 8):
                        acc = acc + t1[i][k] * dct[l, k]
                    co[i][l] = floor(acc / qtable[i, l] + 0.5) * qtable[i, l]
            # t1 = C^T . coef
            for j in range(8):
                for k in range(8):
                    acc = dct[0, j] * co[0][k]
                    for i in range(1, 8):
                        acc = acc + dct[i, j] * co[i][k]
                    t1[j][k] = acc
            # out = t1 . C
            for j in range(8):
                for l in range(8):
                    acc = t1[j][0] * dct[0, l]
                    for k in range(1, 8):
                        acc = acc + t1[j][k] * dct[k, l]
                    out[by + j, bx + l] = acc
    return out_arr
