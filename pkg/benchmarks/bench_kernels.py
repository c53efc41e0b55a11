#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Runs each hot kernel on production-shaped inputs plus one end-to-end
degrade+score per backend, and prints a speedup table. The two backends are
bit-identical (enforced by tests/test_kernels.py); this script is only
about speed.

Usage:
    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from recmap import kernels
from recmap.degradation import degrade, draw_params
from recmap.geometry import AnglePair, plate_homography, homography_inverse
from recmap.metrics import score
from recmap.plates import render_plate
from recmap.rng import stream


def _timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_cases():
    rng = np.random.default_rng(0)
    plate = render_plate("772951").image.pixels
    h = plate_homography(AnglePair(30.0, 30.0))
    minv = homography_inverse(h)
    canvas = rng.integers(0, 256, (384, 384, 3), dtype=np.uint8)
    quad = np.array([[96, 144], [288, 130], [300, 250], [90, 240]], dtype=np.float64)
    taps = kernels.gaussian_taps(1.2)
    plane = rng.uniform(-128, 127, (384, 384))
    qtable = np.full((8, 8), 16.0)

    return [
        ("warp 384x384", lambda impl: kernels.warp_bilinear(
            plate, minv, 384, 384, (128.0, 128.0, 128.0), impl=impl)),
        ("sdf 384x384", lambda impl: kernels.sdf_quad(quad, 384, 384, impl=impl)),
        ("blur 384x384", lambda impl: kernels.filter_sep(
            canvas[:, :, 0].astype(np.float64), taps, taps, impl=impl)),
        ("dct 384x384", lambda impl: kernels.dct_quant_roundtrip(plane, qtable, impl=impl)),
    ]


def end_to_end():
    truth = render_plate("772951")
    params = draw_params(stream(7, 2, 40 * 90 + 40, 0), AnglePair(40.0, 40.0))

    def run():
        sample = degrade(truth, params)
        score(sample.input, truth)

    return run


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = {"python": kernels.backend_module("python")}
    try:
        backends["cython"] = kernels.backend_module("cython")
    except ImportError:
        print("compiled backend not built; benchmarking the fallback only")

    print(f"active backend: {kernels.BACKEND}")
    print(f"{'kernel':<16}" + "".join(f"{name:>12}" for name in backends) + f"{'speedup':>10}")
    for label, fn in kernel_cases():
        times = {name: _timeit(lambda impl=impl: fn(impl), args.repeat)
                 for name, impl in backends.items()}
        row = f"{label:<16}" + "".join(f"{times[name] * 1e3:>10.2f}ms" for name in backends)
        if len(times) == 2:
            row += f"{times['python'] / times['cython']:>9.1f}x"
        print(row)

    # end-to-end uses whichever backend is active in this process
    run = end_to_end()
    run()  # warm template cache
    t = _timeit(run, args.repeat)
    print(f"\ndegrade+score per image ({kernels.BACKEND} backend): {t * 1e3:.1f} ms")
    print("re-run with RECMAP_KERNELS=python to time the fallback end to end")


if __name__ == "__main__":
    main()
