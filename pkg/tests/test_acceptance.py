"""Acceptance criteria 1-8.

Each test prints one ``[PASS]``/``[FAIL]`` line with the measured quantity and
the threshold.  Run directly for the report alone::

    python tests/test_acceptance.py
"""
import functools
import math
import os
import sys
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from floquet_perron import config
from floquet_perron.cellcycle import (
    AgeTimeCoefficient,
    CellCycleModel,
    age_grid,
    averaged_perron_rate,
    check_assumptions,
    floquet_growth_rate,
    theorem3_compare,
)
from floquet_perron.cli import run as cli_run
from floquet_perron.coefficients import (
    Constant,
    Cosine,
    PeriodicMatrix,
    PeriodicMatrixSeq,
    Sampled,
    SquareWave,
    arith_mean,
    geom_mean,
)
from floquet_perron.floquet_discrete import theorem2_compare
from floquet_perron.floquet_ode import integrate_fundamental, theorem1_compare
from floquet_perron.lab import SweepConfig, gen_periodic_matrix, run_sweep, trial_model, trial_rng
from floquet_perron.schema import read_table
from floquet_perron.spectral import collatz_wielandt_lower, collatz_wielandt_upper, perron_metzler, perron_nonneg
from oracles import renewal_rate_constant, rightmost_real_root

SEED = 7


def report(number, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    print(line, flush=True)
    return ok


@functools.lru_cache(maxsize=None)
def cellcycle_sweep():
    cfg = SweepConfig(system="cellcycle", seed=SEED, trials=200, dx=1 / 200)
    t0 = time.perf_counter()
    res = run_sweep(cfg)
    return cfg, res, time.perf_counter() - t0


def criterion_1():
    t0 = time.perf_counter()
    res = run_sweep(SweepConfig(system="ode", seed=SEED, trials=1000))
    elapsed = time.perf_counter() - t0
    gaps = np.array([r.gap for r in res.records])
    ok = res.summary.errors == 0 and bool(np.all(gaps >= -1e-6)) and elapsed < 60
    return report(1, ok, f"1000 ODE systems (dim 1-8): min gap {gaps.min():.3e} >= -1e-6, "
                         f"errors {res.summary.errors}, runtime {elapsed:.1f} s < 60 s")


def criterion_2():
    t0 = time.perf_counter()
    res = run_sweep(SweepConfig(system="discrete", seed=SEED, trials=1000, dim=(1, 8), period=(1, 12)))
    elapsed = time.perf_counter() - t0
    gaps = np.array([r.gap for r in res.records])
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    b = np.array([[0.0, 4.0], [1.0, 0.0]])
    cyc = theorem2_compare(PeriodicMatrixSeq((swap, b)))
    closed = abs(cyc.lambda_per - 2.0) <= 1e-9 and abs(cyc.lambda_s - math.sqrt(2.0)) <= 1e-9
    ok = res.summary.errors == 0 and bool(np.all(gaps >= -1e-9)) and closed and elapsed < 10
    return report(2, ok, f"1000 discrete systems (dim 1-8, p 1-12): min gap {gaps.min():.3e} >= -1e-9, "
                         f"2-cycle |dl_per| {abs(cyc.lambda_per - 2):.1e} |dl_s| {abs(cyc.lambda_s - math.sqrt(2)):.1e} "
                         f"<= 1e-9, runtime {elapsed:.1f} s < 10 s")


def criterion_3():
    cfg, res, elapsed = cellcycle_sweep()
    admissible = all(check_assumptions(trial_model(cfg, t)).passed for t in range(cfg.trials))
    gaps = np.array([r.gap for r in res.records])
    ok = admissible and res.summary.errors == 0 and bool(np.all(gaps >= -5e-3)) and elapsed < 600
    return report(3, ok, f"200 cell-cycle models (I <= 4, product bound holds: {admissible}) at dx = 1/200: "
                         f"min gap {np.nanmin(gaps):.3e} >= -5e-3, errors {res.summary.errors}, "
                         f"runtime {elapsed:.1f} s < 600 s")


def criterion_4():
    one = CellCycleModel((Constant(0.0),), (Constant(1.0),))
    two = CellCycleModel((Constant(0.0), Constant(0.0)), (Constant(1.0), Constant(1.0)))
    lp1 = floquet_growth_rate(one, 1 / 400).eigenvalue
    ls1 = averaged_perron_rate(one).eigenvalue
    ref2 = renewal_rate_constant([1.0, 1.0])
    lp2 = floquet_growth_rate(two, 1 / 400).eigenvalue
    e1, e2, e3 = abs(lp1 - 1), abs(ls1 - 1), abs(lp2 - (math.sqrt(2) - 1))
    ok = e1 <= 2e-3 and e2 <= 1e-8 and e3 <= 2e-3 and abs(ref2 - (math.sqrt(2) - 1)) < 1e-12
    return report(4, ok, f"single phase K=1: |l_per-1| {e1:.2e} <= 2e-3, |l_s-1| {e2:.2e} <= 1e-8; "
                         f"two phase: |l_per-(sqrt2-1)| {e3:.2e} <= 2e-3")


def _random_scalar(rng, form, nonneg=False):
    lo = 0.0 if nonneg else -2.0
    if form == "constant":
        return Constant(float(rng.uniform(lo, 2)))
    if form == "cosine":
        return Cosine(float(rng.uniform(lo, 2)), float(rng.uniform(-2, 2)), float(rng.uniform(0, 1)))
    if form == "square":
        return SquareWave(float(rng.uniform(lo, 2)), float(rng.uniform(lo, 2)), float(rng.uniform(0.05, 0.95)),
                          float(rng.uniform(0, 1)))
    return Sampled(tuple(rng.uniform(lo, 2, int(rng.integers(1, 9)))), float(rng.uniform(0, 1)))


def criterion_5():
    rng = np.random.default_rng(SEED)
    ode_const = 0.0
    for t in range(100):
        a = gen_periodic_matrix(trial_rng(SEED, t), int(rng.integers(1, 9)), {"constant": 1.0})
        ode_const = max(ode_const, abs(theorem1_compare(a).gap))
    disc_const = 0.0
    for _ in range(100):
        n, p = int(rng.integers(1, 9)), int(rng.integers(1, 13))
        m = rng.uniform(0, 3, (n, n)) * (rng.random((n, n)) > 0.2)
        disc_const = max(disc_const, abs(theorem2_compare(PeriodicMatrixSeq((m,) * p)).gap))
    pde_const = 0.0
    for _ in range(10):
        phases = int(rng.integers(1, 5))
        ks = [float(rng.uniform(1.0, 3.0)) for _ in range(phases)]
        ds = [Constant(float(rng.uniform(0, 0.05))) for _ in range(phases)]
        k = tuple(AgeTimeCoefficient.gate(float(rng.uniform(0, 0.1)), Constant(v)) if rng.random() < 0.3
                  else Constant(v) for v in ks)
        m = CellCycleModel(tuple(ds), k)
        if not check_assumptions(m).passed:
            continue
        pde_const = max(pde_const, abs(theorem3_compare(m).gap))
    scalar = {}
    for form in ("constant", "cosine", "square", "sampled"):
        scalar[form] = max(abs(theorem1_compare(PeriodicMatrix(((_random_scalar(rng, form),),))).gap)
                           for _ in range(50))
    ok = ode_const <= 1e-7 and disc_const <= 1e-7 and pde_const <= 5e-3 and max(scalar.values()) <= 1e-7
    forms = ", ".join(f"{k} {v:.1e}" for k, v in scalar.items())
    return report(5, ok, f"constant inputs max |gap|: ODE {ode_const:.1e}, discrete {disc_const:.1e} <= 1e-7, "
                         f"PDE {pde_const:.1e} <= 5e-3; scalar ODE by form ({forms}) <= 1e-7")


def criterion_6():
    cfg, _, _ = cellcycle_sweep()
    worst = math.inf
    nodes = 0
    for t in range(cfg.trials):
        m = trial_model(cfg, t)
        ages = age_grid(m, cfg.dx)
        for k in m.transition:
            diff = np.array([arith_mean(p) - geom_mean(p) for p in k.pieces])
            per_node = diff[np.asarray(k.piece_index(ages))]
            worst = min(worst, float(per_node.min()))
            nodes += ages.size
    ok = worst >= -1e-12
    return report(6, ok, f"<K>_a - <K>_g over {nodes} grid points of {cfg.trials} models: min {worst:.3e} >= -1e-12")


def _smooth_ode():
    return PeriodicMatrix(((Cosine(-1.0, 0.8), Cosine(1.0, 0.9, 0.3)), (Cosine(2.0, 1.5, 0.1), Cosine(0.5, 2.0, 0.7))))


def criterion_7():
    a = _smooth_ode()
    fine = integrate_fundamental(a, 4096).floquet_eigenvalue
    e1 = abs(integrate_fundamental(a, 16).floquet_eigenvalue - fine)
    e2 = abs(integrate_fundamental(a, 32).floquet_eigenvalue - fine)
    rk_ratio = e1 / e2

    m = CellCycleModel((Constant(0.0),), (Cosine(1.0, 0.3),))
    lams = [floquet_growth_rate(m, dx).eigenvalue for dx in (1 / 50, 1 / 100, 1 / 200)]
    grid_ratio = abs(lams[0] - lams[1]) / abs(lams[1] - lams[2])

    rng = np.random.default_rng(SEED)
    tol = config.PERRON_TOL
    cw_worst = -math.inf
    for trial in range(500):
        n = int(rng.integers(1, 9))
        mat = rng.uniform(0, 5, (n, n)) * (rng.random((n, n)) > 0.3)
        if trial % 2:
            mat -= np.diag(rng.uniform(0, 5, n))
            rep = perron_metzler(mat)
        else:
            rep = perron_nonneg(mat)
        v = np.where(rep.eigenvector <= 0, tol, rep.eigenvector)
        scale = max(1.0, abs(rep.eigenvalue))
        excess = max(collatz_wielandt_lower(mat, v) - rep.eigenvalue, rep.eigenvalue - collatz_wielandt_upper(mat, v))
        cw_worst = max(cw_worst, excess / scale)

    oracle_worst = 0.0
    for trial in range(200):
        n = int(rng.integers(1, 5))
        mat = rng.integers(0, 25, (n, n)) / 8.0
        if trial % 2:
            mat -= np.diag(rng.integers(0, 25, n) / 8.0)
        lam = perron_metzler(mat).eigenvalue
        oracle_worst = max(oracle_worst, abs(lam - rightmost_real_root(mat)))

    ok = 8 <= rk_ratio <= 32 and grid_ratio >= 1.8 and cw_worst <= 10 * tol and oracle_worst <= 1e-8
    return report(7, ok, f"RK4 order ratio {rk_ratio:.2f} in [8, 32]; PDE refinement ratio {grid_ratio:.2f} >= 1.8; "
                         f"Collatz-Wielandt excess {cw_worst:.1e} <= {10 * tol:.0e}; "
                         f"char-poly oracle max diff {oracle_worst:.1e} <= 1e-8")


def _records_section(path):
    with open(path, encoding="utf-8") as fh:
        return "".join(line for line in fh if not line.startswith("#"))


def determinism(tmp_dir):
    results = []
    for name, text in [
        ("ode", f"system: ode\nseed: {SEED}\ntrials: 200\n"),
        ("discrete", f"system: discrete\nseed: {SEED}\ntrials: 200\n"),
        ("cellcycle", f"system: cellcycle\nseed: {SEED}\ntrials: 8\n"),
    ]:
        cfg = os.path.join(tmp_dir, f"{name}.yaml")
        with open(cfg, "w") as fh:
            fh.write(text)
        outs = []
        for k, jobs in enumerate(("1", "1", "2")):
            out = os.path.join(tmp_dir, f"{name}{k}.csv")
            cli_run(["sweep", cfg, "--jobs", jobs, "-o", out])
            outs.append(_records_section(out))
        _, _, rows = read_table(outs[0])
        results.append(outs[0] == outs[1] == outs[2] and len(rows) > 0)
    return results


def criterion_8(results):
    return report(8, all(results), "repeated sweeps (ode, discrete, cellcycle; serial twice and 2 workers) give "
                         f"byte-identical record sections: {results}")


class TestAcceptance:
    def test_criterion_1_ode_sweep(self, capsys):
        with capsys.disabled():
            assert criterion_1()

    def test_criterion_2_discrete_sweep(self, capsys):
        with capsys.disabled():
            assert criterion_2()

    def test_criterion_3_cellcycle_sweep(self, capsys):
        with capsys.disabled():
            assert criterion_3()

    def test_criterion_4_closed_form_pde(self, capsys):
        with capsys.disabled():
            assert criterion_4()

    def test_criterion_5_equality_cases(self, capsys):
        with capsys.disabled():
            assert criterion_5()

    def test_criterion_6_am_gm_loss(self, capsys):
        with capsys.disabled():
            assert criterion_6()

    def test_criterion_7_numerical_hygiene(self, capsys):
        with capsys.disabled():
            assert criterion_7()

    def test_criterion_8_determinism(self, tmp_path, capsys):
        results = determinism(str(tmp_path))
        with capsys.disabled():
            assert criterion_8(results)


if __name__ == "__main__":
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        flags = [criterion_1(), criterion_2(), criterion_3(), criterion_4(), criterion_5(), criterion_6(),
                 criterion_7(), criterion_8(determinism(tmp))]
    sys.exit(0 if all(flags) else 1)
