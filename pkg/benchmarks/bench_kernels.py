"""Compiled kernels versus the pure-Python fallback.

Usage::

    python benchmarks/bench_kernels.py [--paths N] [--points N] [--repeat K]

Both backends are called with identical inputs; outputs are compared
(bitwise for the path simulator, to 1e-10 relative for the density oracle)
before timings are printed.
"""
from __future__ import annotations

import argparse
import math
import time

import numpy as np

from conekernel import _fallback
from conekernel.density import _t_coef, angular_table
from conekernel.geometry import ConeUnion
from conekernel.radial import radial_table
from conekernel.simulate import PathConfig, _model_params

try:
    from conekernel import _kernels
except ImportError:  # pragma: no cover
    _kernels = None


def best_of(fn, repeat: int) -> tuple[float, object]:
    best, out = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_paths(V, alpha, n_paths, repeat):
    cfg = PathConfig(horizon=1.0, truncation=0.05, seed=1)
    p = _model_params(V, alpha, cfg.truncation, cfg)
    p["x0"] = [0.0, 0.0]
    rows = []
    for name, mod in (("compiled", _kernels), ("fallback", _fallback)):
        if mod is None:
            continue
        n = n_paths if mod is _kernels else max(1, n_paths // 100)
        dt, (out, nj, _) = best_of(lambda: mod.simulate_paths(p, 0, 0, n, 1), repeat)
        rows.append((name, n, dt, out, nj))
    if len(rows) == 2:
        m = rows[1][1]
        assert np.array_equal(rows[0][3][:m], rows[1][3]) and np.array_equal(rows[0][4][:m], rows[1][4])
    return [(r[0], r[1], r[2]) for r in rows]


def bench_density(V, alpha, n_points, repeat):
    ang = angular_table(V, alpha)
    rtab = radial_table(alpha)
    X = np.random.default_rng(0).uniform(-20, 20, (n_points, 2))
    c = _t_coef(1.0, alpha)
    rows, vals = [], []
    for name, mod in (("compiled", _kernels), ("fallback", _fallback)):
        if mod is None:
            continue
        n = n_points if mod is _kernels else max(1, n_points // 20)
        dt, (v, _) = best_of(lambda: mod.density_points(X[:n], alpha, ang, rtab, c, 1), repeat)
        rows.append((name, n, dt))
        vals.append(v)
    if len(vals) == 2:
        m = vals[1].size
        assert np.allclose(vals[0][:m], vals[1], rtol=1e-10, atol=1e-16)
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=200_000)
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    V = ConeUnion.single((1.0, 0.0), math.pi / 4)
    print(f"{'kernel':<22}{'backend':<10}{'n':>9}{'seconds':>11}{'per item (us)':>15}")
    for alpha in (0.5, 1.0, 1.5):
        for name, n, dt in bench_paths(V, alpha, args.paths, args.repeat):
            print(f"{'paths alpha=' + str(alpha):<22}{name:<10}{n:>9}{dt:>11.4f}{1e6 * dt / n:>15.2f}")
        for name, n, dt in bench_density(V, alpha, args.points, args.repeat):
            print(f"{'density alpha=' + str(alpha):<22}{name:<10}{n:>9}{dt:>11.4f}{1e6 * dt / n:>15.2f}")


if __name__ == "__main__":
    main()
