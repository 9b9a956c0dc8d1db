"""Compare the compiled kernels with the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Times the two hot paths (RK4 fundamental-matrix propagation and the
cell-cycle transport/renewal sweep) on each available backend, checks that the
backends agree, and prints one line per case.
"""
import argparse
import time

import numpy as np

from floquet_perron import kernels
from floquet_perron.cellcycle import CellCycleModel, age_grid, transport_plan, steps_per_period
from floquet_perron.coefficients import Constant, Cosine, SquareWave


def _best(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _timings(times):
    line = "  ".join(f"{b} {t * 1e3:8.2f} ms" for b, t in times.items())
    if len(times) > 1:
        line += f"  speedup {times['python'] / times['cython']:5.1f}x"
    return line


def rk4_case(dim, steps, seed=0):
    rng = np.random.default_rng(seed)
    stages = rng.uniform(0, 1, (steps, 3, dim, dim))
    stages[:, :, np.arange(dim), np.arange(dim)] -= 1.0
    h = np.full(steps, 1.0 / steps)
    return stages, h, np.eye(dim)


def transport_case(dx):
    m = CellCycleModel(
        (Cosine(0.1, 0.05), Constant(0.05)),
        (Cosine(1.5, 0.5), SquareWave(1.0, 2.0, 0.5)),
    )
    rows = steps_per_period(m, dx)
    plan = transport_plan(m, dx, 0.0, rows)
    n0 = np.tile(np.exp(-age_grid(m, dx)), (m.phases, 1))
    return plan, n0, rows


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    backends = kernels.available()
    print(f"backends: {', '.join(backends)} (active: {kernels.BACKEND})")

    for dim, steps in [(2, 2048), (8, 2048), (8, 16384)]:
        stages, h, x0 = rk4_case(dim, steps)
        times, outs = {}, {}
        for b in backends:
            times[b], (outs[b], _) = _best(lambda: kernels.rk4_propagate(stages, h, x0, backend=b), args.repeat)
        line = _timings(times)
        diff = max(np.max(np.abs(outs[b] - outs[backends[0]]) / np.abs(outs[backends[0]]).max()) for b in backends)
        print(f"rk4        dim={dim} steps={steps:6d}  {line}  max rel diff {diff:.1e}")

    for dx in [1 / 100, 1 / 200, 1 / 400]:
        plan, n0, rows = transport_case(dx)
        times, outs = {}, {}
        for b in backends:
            def go(b=b):
                n = n0.copy()
                mass = np.empty(rows)
                kernels.transport_steps(n, plan.loss_cls, plan.loss_fac, plan.bnd_cls, plan.bnd_w, plan.mult,
                                        0, rows, mass, plan.dx, backend=b)
                return n

            times[b], outs[b] = _best(go, args.repeat)
        line = _timings(times)
        diff = max(np.max(np.abs(outs[b] - outs[backends[0]])) / np.abs(outs[backends[0]]).max() for b in backends)
        print(f"transport  dx=1/{round(1 / dx):<4d} nodes={n0.size:6d}  {line}  max rel diff {diff:.1e}")


if __name__ == "__main__":
    main()
