#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Usage:  python3 benchmarks/bench_kernels.py [--repeats N]

Workloads mirror the package's hot paths: batched cosine similarity
(dispersion scoring) and full EM fits on candidate-sized point sets
(confidence scoring, one fit per pair).
"""

import argparse
import statistics
import time

import numpy as np

from cs_probe import _kernels
from cs_probe.gmm import fit_gmm


def timeit(fn, repeats: int) -> float:
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def bench_cosines(rng, backend: str, repeats: int) -> float:
    X = rng.normal(size=(5000, 50))
    v = rng.normal(size=50)
    previous = _kernels.use_backend(backend)
    try:
        return timeit(lambda: _kernels.cosines_to(X, v), repeats=repeats * 7)
    finally:
        _kernels.use_backend(previous)


def bench_em(rng, backend: str, repeats: int, n_fits: int = 200) -> float:
    point_sets = [rng.normal(size=(30, 50)) for _ in range(n_fits)]

    def run():
        for i, X in enumerate(point_sets):
            fit_gmm(X, n_components=2, seed=i)

    previous = _kernels.use_backend(backend)
    try:
        return timeit(run, repeats=repeats)
    finally:
        _kernels.use_backend(previous)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=3,
                        help="median-of-N timing repeats")
    args = parser.parse_args()

    backends = _kernels.available_backends()
    if "cython" not in backends:
        print("compiled backend unavailable; run `pip install -e .` with a C compiler")

    print(f"{'workload':<34}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    rows = [
        ("cosines_to 5000x50",
         lambda b: bench_cosines(np.random.default_rng(0), b, args.repeats)),
        ("gmm fit 200x(30 pts, 50-D)",
         lambda b: bench_em(np.random.default_rng(1), b, args.repeats)),
    ]
    for name, bench in rows:
        times = {b: bench(b) for b in backends}
        line = f"{name:<34}" + "".join(f"{times[b] * 1e3:>10.2f}ms" for b in backends)
        if "cython" in times and "pure" in times:
            line += f"{times['pure'] / times['cython']:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
