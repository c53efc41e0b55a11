"""Full-grid evaluation and the recoverability analytics: indicator grid,
envelopes, boundary-AUC, interior-failure reliability, pointwise-max merge,
and the quality-metric/OCR proxy regression.

Grid conventions: cells are integer angle pairs (alpha, beta) in
[0, grid_max]^2; arrays are indexed [alpha, beta]. Envelope values use -1 for
empty rows/columns; the AUC integrand clamps those sentinels at 0 so the
area stays in [0, 1], while the stored envelopes keep the -1.
"""

import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .degradation import degrade, draw_params
from .geometry import AnglePair
from .metrics import score
from .plates import render_plate
from .restorers import PluginError, Restorer, RestorerSpec
from .rng import TAG_EVAL_SAMPLE, random_digits, stream

TABLE_VERSION = "1.0"
MAP_VERSION = "1.0"
PSNR_CAP = 99.0  # serialized stand-in for infinite PSNR

DEFAULT_THRESHOLD = 0.9
DEFAULT_GRID_MAX = 89
DEFAULT_EASY_N = 2
DEFAULT_HARD_N = 10
DEFAULT_EASY_CUTOFF = 60


@dataclass(frozen=True)
class CellResult:
    alpha: int
    beta: int
    n_images: int
    psnr: float
    ssim: float
    psnr_worst: float
    ssim_worst: float
    ocr_digit: float
    ocr_plate: float
    failed: int = 0


class EvalTable:
    """Per-cell aggregates over the evaluation grid."""

    def __init__(self, cells, seed, grid_max, easy_n, hard_n, easy_cutoff):
        self.cells = sorted(cells, key=lambda c: (c.alpha, c.beta))
        self.seed = seed
        self.grid_max = grid_max
        self.easy_n = easy_n
        self.hard_n = hard_n
        self.easy_cutoff = easy_cutoff
        self._by_pos = {(c.alpha, c.beta): c for c in self.cells}

    def get(self, alpha: int, beta: int) -> CellResult:
        return self._by_pos[(alpha, beta)]

    @property
    def n_cells_expected(self) -> int:
        return (self.grid_max + 1) ** 2

    def is_complete(self) -> bool:
        if len(self.cells) != self.n_cells_expected:
            return False
        return all(
            (a, b) in self._by_pos
            for a in range(self.grid_max + 1)
            for b in range(self.grid_max + 1)
        )

    def require_complete(self):
        if not self.is_complete():
            raise ValueError(
                f"incomplete table: {len(self.cells)} of {self.n_cells_expected} cells"
            )

    def failure_count(self) -> int:
        return sum(c.failed for c in self.cells)

    def rates(self) -> np.ndarray:
        """(n, n) plate-accuracy array indexed [alpha, beta]."""
        self.require_complete()
        n = self.grid_max + 1
        out = np.zeros((n, n), dtype=np.float64)
        for c in self.cells:
            out[c.alpha, c.beta] = c.ocr_plate
        return out

    def channel(self, name: str) -> np.ndarray:
        self.require_complete()
        n = self.grid_max + 1
        out = np.zeros((n, n), dtype=np.float64)
        for c in self.cells:
            out[c.alpha, c.beta] = getattr(c, name)
        return out

    # --- persistence ---------------------------------------------------------

    def to_csv(self, path):
        with open(path, "w", newline="") as f:
            f.write(
                f"# recmap-evaltable format_version={TABLE_VERSION} seed={self.seed} "
                f"grid_max={self.grid_max} easy_n={self.easy_n} hard_n={self.hard_n} "
                f"easy_cutoff={self.easy_cutoff}\n"
            )
            f.write(
                "alpha,beta,n_images,psnr_mean,ssim_mean,psnr_worst_digit,"
                "ssim_worst_digit,ocr_digit,ocr_plate,failed\n"
            )
            for c in self.cells:
                f.write(
                    f"{c.alpha},{c.beta},{c.n_images},{c.psnr:.6f},{c.ssim:.6f},"
                    f"{c.psnr_worst:.6f},{c.ssim_worst:.6f},{c.ocr_digit:.6f},"
                    f"{c.ocr_plate:.6f},{c.failed}\n"
                )

    @classmethod
    def from_csv(cls, path):
        with open(path) as f:
            header = f.readline().strip()
            if not header.startswith("# recmap-evaltable"):
                raise ValueError(f"{path}: not an EvalTable CSV")
            meta = dict(kv.split("=", 1) for kv in header.split()[2:])
            version = meta.get("format_version", "0")
            if version.split(".")[0] != TABLE_VERSION.split(".")[0]:
                raise ValueError(f"{path}: unsupported format_version {version}")
            f.readline()  # column header
            cells = []
            for line in f:
                parts = line.strip().split(",")
                if not parts or parts == [""]:
                    continue
                cells.append(
                    CellResult(
                        alpha=int(parts[0]),
                        beta=int(parts[1]),
                        n_images=int(parts[2]),
                        psnr=float(parts[3]),
                        ssim=float(parts[4]),
                        psnr_worst=float(parts[5]),
                        ssim_worst=float(parts[6]),
                        ocr_digit=float(parts[7]),
                        ocr_plate=float(parts[8]),
                        failed=int(parts[9]),
                    )
                )
        return cls(
            cells,
            seed=int(meta["seed"]),
            grid_max=int(meta["grid_max"]),
            easy_n=int(meta["easy_n"]),
            hard_n=int(meta["hard_n"]),
            easy_cutoff=int(meta["easy_cutoff"]),
        )


# --- grid evaluation ----------------------------------------------------------


def _cell_n_images(alpha, beta, easy_n, hard_n, easy_cutoff):
    return easy_n if alpha <= easy_cutoff and beta <= easy_cutoff else hard_n


def _cap(value: float) -> float:
    return PSNR_CAP if value > PSNR_CAP or math.isinf(value) else value


def _eval_one_cell(restorer, seed, alpha, beta, n) -> CellResult:
    cell_code = alpha * 90 + beta
    angles = AnglePair(float(alpha), float(beta))
    sums = np.zeros(6, dtype=np.float64)
    for i in range(n):
        rng = stream(seed, TAG_EVAL_SAMPLE, cell_code, i)
        digits = random_digits(rng)
        params = draw_params(rng, angles)
        truth = render_plate(digits)
        sample = degrade(truth, params, seed=seed)
        restored = restorer.restore(sample.input)
        s = score(restored, truth)
        sums += (
            _cap(s.psnr_plate),
            s.ssim_plate,
            _cap(s.psnr_worst_digit),
            s.ssim_worst_digit,
            s.ocr_digit_acc,
            1.0 if s.ocr_plate_ok else 0.0,
        )
    means = sums / n
    return CellResult(
        alpha=alpha,
        beta=beta,
        n_images=n,
        psnr=float(means[0]),
        ssim=float(means[1]),
        psnr_worst=float(means[2]),
        ssim_worst=float(means[3]),
        ocr_digit=float(means[4]),
        ocr_plate=float(means[5]),
    )


def _failed_cell(alpha, beta, n) -> CellResult:
    return CellResult(
        alpha=alpha, beta=beta, n_images=n,
        psnr=0.0, ssim=0.0, psnr_worst=0.0, ssim_worst=0.0,
        ocr_digit=0.0, ocr_plate=0.0, failed=1,
    )


_worker_restorer = None


def _eval_chunk(args):
    global _worker_restorer
    spec, plugin_fresh, plugin_timeout, seed, density, cells = args
    easy_n, hard_n, easy_cutoff = density
    if _worker_restorer is None or _worker_restorer.spec != spec:
        _worker_restorer = Restorer(spec, plugin_fresh=plugin_fresh, plugin_timeout=plugin_timeout)
    out = []
    failures = []
    for alpha, beta in cells:
        n = _cell_n_images(alpha, beta, easy_n, hard_n, easy_cutoff)
        try:
            out.append(_eval_one_cell(_worker_restorer, seed, alpha, beta, n))
        except PluginError as exc:
            out.append(_failed_cell(alpha, beta, n))
            failures.append((alpha, beta, f"{type(exc).__name__}: {exc}"))
    return out, failures


def eval_grid(
    spec: RestorerSpec,
    seed: int,
    grid_max: int = DEFAULT_GRID_MAX,
    easy_n: int = DEFAULT_EASY_N,
    hard_n: int = DEFAULT_HARD_N,
    easy_cutoff: int = DEFAULT_EASY_CUTOFF,
    jobs: int = 1,
    plugin_fresh: bool = False,
    plugin_timeout: float = 30.0,
    progress: bool = False,
) -> EvalTable:
    """Evaluate a restorer on every integer angle pair in [0, grid_max]^2.

    The evaluation set depends only on (seed, cell, image index), so tables
    are identical across restorers, worker counts, and visitation orders.
    """
    cells = [(a, b) for a in range(grid_max + 1) for b in range(grid_max + 1)]
    density = (easy_n, hard_n, easy_cutoff)
    results = []
    failures = []
    if jobs <= 1:
        restorer = Restorer(spec, plugin_fresh=plugin_fresh, plugin_timeout=plugin_timeout)
        try:
            done = 0
            for alpha, beta in cells:
                n = _cell_n_images(alpha, beta, easy_n, hard_n, easy_cutoff)
                try:
                    results.append(_eval_one_cell(restorer, seed, alpha, beta, n))
                except PluginError as exc:
                    results.append(_failed_cell(alpha, beta, n))
                    failures.append((alpha, beta, f"{type(exc).__name__}: {exc}"))
                done += 1
                if progress and done % 450 == 0:
                    print(f"  {done}/{len(cells)} cells", file=sys.stderr)
        finally:
            restorer.close()
    else:
        chunk = max(1, (len(cells) + jobs * 8 - 1) // (jobs * 8))
        tasks = [
            (spec, plugin_fresh, plugin_timeout, seed, density, cells[i : i + chunk])
            for i in range(0, len(cells), chunk)
        ]
        done = 0
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part, part_failures in pool.map(_eval_chunk, tasks):
                results.extend(part)
                failures.extend(part_failures)
                done += len(part)
                if progress:
                    print(f"  {done}/{len(cells)} cells", file=sys.stderr)

    table = EvalTable(
        results, seed=seed, grid_max=grid_max,
        easy_n=easy_n, hard_n=hard_n, easy_cutoff=easy_cutoff,
    )
    table.failures = sorted(failures)
    if failures and progress:
        print(f"  {len(failures)} cells failed", file=sys.stderr)
    return table


# --- analytics -----------------------------------------------------------------


def indicator(
    table: EvalTable, threshold: float = DEFAULT_THRESHOLD, channel: str = "ocr_plate"
) -> np.ndarray:
    """Boolean recoverability grid: accuracy >= threshold (inclusive).

    The default channel thresholds the fraction of fully-recognized plates;
    channel="ocr_digit" switches to the mean digit fraction alternative.
    """
    if channel not in ("ocr_plate", "ocr_digit"):
        raise ValueError(f"indicator channel must be ocr_plate or ocr_digit, got {channel!r}")
    return table.channel(channel) >= threshold


def envelopes(grid: np.ndarray):
    """Per-column beta_max and per-row alpha_max with max(empty) = -1."""
    grid = np.asarray(grid, dtype=bool)
    n_a, n_b = grid.shape
    beta_max = np.full(n_a, -1, dtype=np.int64)
    alpha_max = np.full(n_b, -1, dtype=np.int64)
    for a in range(n_a):
        hits = np.nonzero(grid[a])[0]
        if hits.size:
            beta_max[a] = hits[-1]
    for b in range(n_b):
        hits = np.nonzero(grid[:, b])[0]
        if hits.size:
            alpha_max[b] = hits[-1]
    return beta_max, alpha_max


def _trapezoid(values: np.ndarray) -> float:
    clamped = np.maximum(values.astype(np.float64), 0.0)
    return float(np.sum((clamped[:-1] + clamped[1:]) * 0.5))


def boundary_auc(beta_max: np.ndarray, alpha_max: np.ndarray) -> float:
    """Normalized area under both envelopes (trapezoidal rule, sentinel
    values clamped to zero inside the integrand only)."""
    extent = len(beta_max) - 1
    if extent < 1:
        raise ValueError("need at least a 2-point grid")
    area = (_trapezoid(beta_max) + _trapezoid(alpha_max)) / (2.0 * extent * extent)
    return area


def boundary_points(beta_max: np.ndarray, alpha_max: np.ndarray) -> np.ndarray:
    """The discrete boundary point set B_T as an (m, 2) array of (alpha, beta)."""
    pts = set()
    for a, b in enumerate(beta_max):
        if b >= 0:
            pts.add((a, int(b)))
    for b, a in enumerate(alpha_max):
        if a >= 0:
            pts.add((int(a), b))
    if not pts:
        return np.zeros((0, 2), dtype=np.float64)
    return np.array(sorted(pts), dtype=np.float64)


def reliability(grid: np.ndarray, beta_max, alpha_max, auc: float):
    """Reliability score F and the interior-failure list.

    Interior failures are unrecoverable cells inside both envelopes; each is
    scored by its Euclidean distance to the nearest boundary point, and F is
    the RMS of those distances normalized by the enclosed area.
    """
    grid = np.asarray(grid, dtype=bool)
    n_a, n_b = grid.shape
    extent = n_a - 1
    fail_pos = [
        (a, b)
        for a in range(n_a)
        for b in range(n_b)
        if not grid[a, b] and b <= beta_max[a] and a <= alpha_max[b]
    ]
    if not fail_pos:
        return 0.0, []
    enclosed = auc * extent * extent
    if enclosed <= 0.0:
        raise ValueError("interior failures with zero enclosed area")
    bpts = boundary_points(beta_max, alpha_max)
    fails = np.array(fail_pos, dtype=np.float64)
    delta = fails[:, None, :] - bpts[None, :, :]
    dist = np.sqrt(np.min(np.sum(delta * delta, axis=2), axis=1))
    f_score = math.sqrt(float(np.sum(dist * dist)) / enclosed)
    failures = [(int(a), int(b), float(d)) for (a, b), d in zip(fail_pos, dist)]
    return f_score, failures


@dataclass
class RecMap:
    threshold: float
    grid: np.ndarray  # bool, [alpha, beta]
    beta_max: np.ndarray
    alpha_max: np.ndarray
    auc: float
    f_score: float
    interior_failures: list
    failed_cells: int = 0

    @property
    def grid_max(self) -> int:
        return self.grid.shape[0] - 1

    def to_json_dict(self) -> dict:
        return {
            "format_version": MAP_VERSION,
            "threshold": self.threshold,
            "grid_max": self.grid_max,
            "grid": ["".join("1" if v else "0" for v in row) for row in self.grid],
            "beta_max": [int(v) for v in self.beta_max],
            "alpha_max": [int(v) for v in self.alpha_max],
            "auc": self.auc,
            "f_score": self.f_score,
            "interior_failures": [[a, b, d] for a, b, d in self.interior_failures],
            "failed_cells": self.failed_cells,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "RecMap":
        version = str(data.get("format_version", "0"))
        if version.split(".")[0] != MAP_VERSION.split(".")[0]:
            raise ValueError(f"unsupported map format_version {version}")
        grid = np.array([[ch == "1" for ch in row] for row in data["grid"]], dtype=bool)
        return cls(
            threshold=float(data["threshold"]),
            grid=grid,
            beta_max=np.array(data["beta_max"], dtype=np.int64),
            alpha_max=np.array(data["alpha_max"], dtype=np.int64),
            auc=float(data["auc"]),
            f_score=float(data["f_score"]),
            interior_failures=[(int(a), int(b), float(d)) for a, b, d in data["interior_failures"]],
            failed_cells=int(data.get("failed_cells", 0)),
        )


def map_from_grid(grid: np.ndarray, threshold: float, failed_cells: int = 0) -> RecMap:
    beta_max, alpha_max = envelopes(grid)
    auc = boundary_auc(beta_max, alpha_max)
    f_score, failures = reliability(grid, beta_max, alpha_max, auc)
    return RecMap(
        threshold=threshold,
        grid=np.asarray(grid, dtype=bool),
        beta_max=beta_max,
        alpha_max=alpha_max,
        auc=auc,
        f_score=f_score,
        interior_failures=failures,
        failed_cells=failed_cells,
    )


def compute_recmap(
    table: EvalTable, threshold: float = DEFAULT_THRESHOLD, channel: str = "ocr_plate"
) -> RecMap:
    grid = indicator(table, threshold, channel)
    return map_from_grid(grid, threshold, failed_cells=table.failure_count())


def max_map(maps) -> RecMap:
    """Pointwise-OR merge; envelopes, AUC and F recomputed from the union."""
    maps = list(maps)
    if not maps:
        raise ValueError("max_map needs at least one map")
    first = maps[0]
    merged = first.grid.copy()
    for m in maps[1:]:
        if m.threshold != first.threshold:
            raise ValueError(
                f"threshold mismatch: {m.threshold} vs {first.threshold}"
            )
        if m.grid.shape != first.grid.shape:
            raise ValueError("grid shape mismatch")
        merged |= m.grid
    return map_from_grid(merged, first.threshold,
                         failed_cells=sum(m.failed_cells for m in maps))


# --- proxy regression -----------------------------------------------------------


@dataclass(frozen=True)
class ProxyFit:
    metric: str
    slope: float
    intercept: float
    r_squared: float
    n_points: int
    binned_means: tuple  # (bin_center, mean_rate, std_rate, count)

    def to_json_dict(self) -> dict:
        return {
            "format_version": MAP_VERSION,
            "metric": self.metric,
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "n_points": self.n_points,
            "binned_means": [list(b) for b in self.binned_means],
        }


def proxy_fit(table: EvalTable, metric: str = "psnr", bins: int = 20) -> ProxyFit:
    """OLS of plate accuracy on the per-cell quality-metric mean, with
    equal-width binned means for the scatter summary."""
    table.require_complete()
    if metric not in ("psnr", "ssim"):
        raise ValueError(f"metric must be psnr or ssim, got {metric!r}")
    xs, ys = [], []
    for c in table.cells:
        if c.failed:
            continue
        x = c.psnr if metric == "psnr" else c.ssim
        if metric == "psnr" and x >= PSNR_CAP:
            continue
        xs.append(x)
        ys.append(c.ocr_plate)
    if len(xs) < 3:
        raise ValueError(f"only {len(xs)} finite points; need at least 3")
    x = np.array(xs)
    y = np.array(ys)
    xm, ym = float(x.mean()), float(y.mean())
    sxx = float(np.sum((x - xm) ** 2))
    sxy = float(np.sum((x - xm) * (y - ym)))
    slope = 0.0 if sxx == 0.0 else sxy / sxx
    intercept = ym - slope * xm
    ss_tot = float(np.sum((y - ym) ** 2))
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    r_squared = 0.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)

    lo, hi = float(x.min()), float(x.max())
    binned = []
    if hi > lo:
        edges = np.linspace(lo, hi, bins + 1)
        which = np.clip(np.digitize(x, edges) - 1, 0, bins - 1)
        for b in range(bins):
            sel = which == b
            if not np.any(sel):
                continue
            binned.append(
                (
                    float((edges[b] + edges[b + 1]) / 2.0),
                    float(y[sel].mean()),
                    float(y[sel].std()),
                    int(sel.sum()),
                )
            )
    else:
        binned.append((lo, ym, float(y.std()), len(xs)))
    return ProxyFit(
        metric=metric,
        slope=slope,
        intercept=intercept,
        r_squared=r_squared,
        n_points=len(xs),
        binned_means=tuple(binned),
    )
