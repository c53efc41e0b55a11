"""Viewing geometry: plate rotation, perspective projection, homography
construction, and inverse-mapped warping.

Conventions (fixed for the whole benchmark):
  - image coordinates are x right / y down, continuous, with pixel (i, j)
    covering [j, j+1) x [i, i+1) and its center at (j+0.5, i+0.5);
  - the plate is the z=0 rectangle spanning +-half_w x +-half_h in 3D,
    rotated by R_y(alpha) then R_x(beta), translated to z=distance, and
    projected through a pinhole at the origin;
  - projected corners are returned in TL, TR, BR, BL order.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .image import Image
from .plates import PLATE_H, PLATE_W


@dataclass(frozen=True)
class AnglePair:
    """Azimuthal (lateral) and elevational viewing angles, degrees."""

    alpha: float
    beta: float

    def validate_grid(self):
        if not (0.0 <= self.alpha <= 89.0 and 0.0 <= self.beta <= 89.0):
            raise ValueError(f"angles must lie in [0, 89]^2, got {self}")


@dataclass(frozen=True)
class CameraModel:
    focal_px: float = 512.0
    plate_distance_px: float = 512.0
    canvas_w: int = 384
    canvas_h: int = 384
    plate_half_w: float = PLATE_W / 2.0
    plate_half_h: float = PLATE_H / 2.0

    def __post_init__(self):
        if self.plate_distance_px <= self.plate_half_w:
            raise ValueError(
                "plate distance must exceed the plate half-width "
                f"({self.plate_distance_px} <= {self.plate_half_w})"
            )


DEFAULT_CAMERA = CameraModel()

# Plate-image rectangle corners (TL, TR, BR, BL) in continuous pixel coords.
PLATE_RECT = np.array(
    [[0.0, 0.0], [PLATE_W, 0.0], [PLATE_W, PLATE_H], [0.0, PLATE_H]], dtype=np.float64
)


def project_quad(angles: AnglePair, cam: CameraModel = DEFAULT_CAMERA) -> np.ndarray:
    """Project the rotated plate corners onto the canvas; (4, 2) float64."""
    angles.validate_grid()
    a = math.radians(angles.alpha)
    b = math.radians(angles.beta)
    ca, sa = math.cos(a), math.sin(a)
    cb, sb = math.cos(b), math.sin(b)
    hw, hh = cam.plate_half_w, cam.plate_half_h
    corners3 = [(-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh)]
    cx = cam.canvas_w / 2.0
    cy = cam.canvas_h / 2.0
    out = np.empty((4, 2), dtype=np.float64)
    for i, (x, y) in enumerate(corners3):
        # R_y(alpha) then R_x(beta), applied to (x, y, 0).
        rx = x * ca
        rz1 = -x * sa
        ry = y * cb + rz1 * sb
        rz = -y * sb + rz1 * cb
        z = rz + cam.plate_distance_px
        out[i, 0] = cam.focal_px * rx / z + cx
        out[i, 1] = cam.focal_px * ry / z + cy
    return out


def projected_extents(angles: AnglePair, cam: CameraModel = DEFAULT_CAMERA):
    """Projected lengths of the plate's central horizontal and vertical axes.

    This is the foreshortening measure: both lengths are strictly monotone
    in their angle over the whole grid, unlike the projected bounding box,
    whose height grows with beta at large alpha because the composed
    rotation shears the quad.
    """
    angles.validate_grid()
    a = math.radians(angles.alpha)
    b = math.radians(angles.beta)
    ca, sa = math.cos(a), math.sin(a)
    cb, sb = math.cos(b), math.sin(b)
    d, f = cam.plate_distance_px, cam.focal_px

    def proj(x, y):
        rx = x * ca
        rz1 = -x * sa
        ry = y * cb + rz1 * sb
        rz = -y * sb + rz1 * cb + d
        return f * rx / rz, f * ry / rz

    h0 = proj(-cam.plate_half_w, 0.0)
    h1 = proj(cam.plate_half_w, 0.0)
    v0 = proj(0.0, -cam.plate_half_h)
    v1 = proj(0.0, cam.plate_half_h)
    return math.dist(h0, h1), math.dist(v0, v1)


def dlt_homography(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """4-point direct linear transform; returns a 3x3 matrix normalized to
    H[2,2] = 1 that maps each src point to the matching dst point."""
    src = np.asarray(src, dtype=np.float64).reshape(4, 2)
    dst = np.asarray(dst, dtype=np.float64).reshape(4, 2)
    for pts, label in ((src, "source"), (dst, "destination")):
        if _has_collinear_triple(pts):
            raise ValueError(f"degenerate {label} quad: three points collinear")
    a = np.zeros((8, 9), dtype=np.float64)
    for i in range(4):
        x, y = src[i]
        u, v = dst[i]
        a[2 * i] = [x, y, 1, 0, 0, 0, -x * u, -y * u, -u]
        a[2 * i + 1] = [0, 0, 0, x, y, 1, -x * v, -y * v, -v]
    _, _, vt = np.linalg.svd(a)
    h = vt[-1].reshape(3, 3)
    det = np.linalg.det(h)
    if abs(det) < 1e-12:
        raise ValueError("singular homography")
    if abs(h[2, 2]) > 1e-12:
        h = h / h[2, 2]
    return h


def _has_collinear_triple(pts: np.ndarray) -> bool:
    scale = max(np.abs(pts).max(), 1.0)
    for i in range(4):
        for j in range(i + 1, 4):
            for k in range(j + 1, 4):
                v1 = pts[j] - pts[i]
                v2 = pts[k] - pts[i]
                if abs(v1[0] * v2[1] - v1[1] * v2[0]) < 1e-9 * scale * scale:
                    return True
    return False


def homography_inverse(h: np.ndarray) -> np.ndarray:
    inv = np.linalg.inv(h)
    if abs(inv[2, 2]) > 1e-12:
        inv = inv / inv[2, 2]
    return inv


def plate_homography(angles: AnglePair, cam: CameraModel = DEFAULT_CAMERA) -> np.ndarray:
    """Homography taking plate-image coordinates to canvas coordinates."""
    return dlt_homography(PLATE_RECT, project_quad(angles, cam))


def _orient_positive(m: np.ndarray, ref_uv) -> np.ndarray:
    """Flip the matrix sign if the projective denominator is negative at the
    reference point, so the in-front test `den > 0` is meaningful."""
    den = m[2, 0] * ref_uv[0] + m[2, 1] * ref_uv[1] + m[2, 2]
    return -m if den < 0 else m


def warp(
    img: Image,
    h: np.ndarray,
    canvas_size,
    background,
    bbox=None,
) -> Image:
    """Forward warp of `img` by homography `h` onto a canvas.

    Implemented as an inverse-mapping bilinear warp: each destination pixel
    center is pulled back through h^-1 and sampled from the source;
    destinations outside the source (or beyond the horizon line) get the
    background color.
    """
    cw, ch = canvas_size
    m = homography_inverse(np.asarray(h, dtype=np.float64))
    # Reference: the forward image of the source center must be on the
    # positive side of the denominator.
    center = np.asarray(h, dtype=np.float64) @ np.array(
        [img.width / 2.0, img.height / 2.0, 1.0]
    )
    if abs(center[2]) < 1e-15:
        raise ValueError("source center maps to the horizon line")
    ref = (center[0] / center[2], center[1] / center[2])
    m = _orient_positive(m, ref)
    out = kernels.warp_bilinear(img.pixels, m, ch, cw, background, bbox=bbox)
    return Image(out)


def dewarp(
    img: Image,
    h: np.ndarray,
    out_size=(PLATE_W, PLATE_H),
    background=(128.0, 128.0, 128.0),
) -> Image:
    """Undo a plate->canvas homography: sample the canvas back into an
    axis-aligned out_size raster (the restorer input frame)."""
    ow, oh = out_size
    scale = np.array(
        [[PLATE_W / ow, 0.0, 0.0], [0.0, PLATE_H / oh, 0.0], [0.0, 0.0, 1.0]],
        dtype=np.float64,
    )
    m = np.asarray(h, dtype=np.float64) @ scale
    # The output-center denominator is positive iff the plate sits in front
    # of the camera.
    m = _orient_positive(m, (ow / 2.0, oh / 2.0))
    out = kernels.warp_bilinear(img.pixels, m, oh, ow, background)
    return Image(out)
