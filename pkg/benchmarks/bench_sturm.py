"""Compiled vs pure-Python Sturm kernels.

    python3 benchmarks/bench_sturm.py [--n 4096] [--repeat 5]

Times a single Sturm count, a 64-shift batch count, bisection for the five
lowest eigenvalues, and a full negative spectrum of a magnetic channel
battery, for every available backend.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from magspec.channel import ChannelFactory, MeshConfig, build_mesh
from magspec.field import FieldSpec, flux_profile
from magspec.numerics import BACKENDS, count_below, count_below_many, eig_range, set_backend
from magspec.potential import step, tilde
from magspec.spectrum import negative_spectrum


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    fp = flux_profile(FieldSpec(1.0, 2.0))
    tp = tilde(step(60.0, 0.5))
    mat = ChannelFactory(fp, tp, build_mesh(args.n, "graded")).assemble(0).matrix
    taus = np.linspace(-60.0, 200.0, 64)

    cases = {
        "count (1 shift)": lambda b: count_below(mat, 0.0, b),
        "count (64 shifts)": lambda b: count_below_many(mat, taus, b),
        "bisect 5 lowest": lambda b: eig_range(mat, 0, 5, 1e-10, backend=b),
    }
    rows = []
    for name, fn in cases.items():
        rows.append((name, {b: best_of(lambda: fn(b), args.repeat) for b in sorted(BACKENDS)}))

    def spectrum():
        negative_spectrum(fp, tp, MeshConfig(args.n, "graded"), 4e-5)

    timings = {}
    for b in sorted(BACKENDS):
        set_backend(b)
        timings[b] = best_of(spectrum, max(1, args.repeat // 2))
    rows.append(("negative spectrum (~400 ch)", timings))

    names = sorted(BACKENDS)
    print(f"n = {args.n}, best of {args.repeat}")
    print(f"{'kernel':30s}" + "".join(f"{b:>14s}" for b in names) + ("   speedup" if len(names) > 1 else ""))
    for name, t in rows:
        line = f"{name:30s}" + "".join(f"{t[b] * 1e3:12.3f}ms" for b in names)
        if "cython" in t and "python" in t:
            line += f"   {t['python'] / t['cython']:7.1f}x"
        print(line)


if __name__ == "__main__":
    main()
