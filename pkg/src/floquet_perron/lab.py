"""Random instances and comparison sweeps.

Every trial draws from its own counter-based stream
``Philox(SeedSequence([seed, trial]))``, so a trial is reproducible on its own
and results do not depend on execution order or on the number of workers.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from . import config
from .cellcycle import AgeTimeCoefficient, CellCycleModel, check_assumptions, theorem3_compare
from .coefficients import SCHEMES, Constant, Cosine, PeriodicMatrix, PeriodicMatrixSeq, Sampled, SquareWave
from .errors import InvalidInputError
from .floquet_discrete import theorem2_compare
from .floquet_ode import theorem1_compare

FORMS = ("constant", "cosine", "square", "sampled")
SYSTEMS = ("ode", "discrete", "cellcycle", "periodic-d")
MAX_RESAMPLES = 100


def _default_forms():
    return {f: 1.0 for f in FORMS}


@dataclass(frozen=True)
class SweepConfig:
    system: str = "ode"
    seed: int = 0
    trials: int = 100
    dim: tuple = None  # phases for the cell-cycle classes
    period: tuple = (1, 12)  # discrete class only
    forms: dict = field(default_factory=_default_forms)
    scheme: str = "paper"
    tolerance: float = None
    time_period: float = 1.0
    steps: int = config.ODE_STEPS
    dx: float = 1.0 / config.PDE_STEPS_PER_PERIOD
    periods_warmup: int = config.PDE_WARMUP_PERIODS
    periods_measure: int = config.PDE_MEASURE_PERIODS

    def __post_init__(self):
        if self.system not in SYSTEMS:
            raise InvalidInputError(f"system must be one of {SYSTEMS}, got {self.system!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2**64:
            raise InvalidInputError(f"seed must be a 64-bit nonnegative integer, got {self.seed!r}")
        if isinstance(self.trials, bool) or not isinstance(self.trials, (int, np.integer)) or self.trials < 1:
            raise InvalidInputError(f"trials must be a positive integer, got {self.trials!r}")
        if self.dim is None:
            object.__setattr__(self, "dim", (1, 4) if self.system in ("cellcycle", "periodic-d") else (1, 8))
        for name in ("dim", "period"):
            lo, hi = getattr(self, name)
            if int(lo) != lo or int(hi) != hi or not 1 <= lo <= hi:
                raise InvalidInputError(f"{name} range must satisfy 1 <= lo <= hi, got {(lo, hi)!r}")
            object.__setattr__(self, name, (int(lo), int(hi)))
        unknown = set(self.forms) - set(FORMS)
        if unknown:
            raise InvalidInputError(f"unknown coefficient forms {sorted(unknown)}; expected a subset of {FORMS}")
        weights = [float(w) for w in self.forms.values()]
        if any(not math.isfinite(w) or w < 0 for w in weights) or sum(weights) <= 0:
            raise InvalidInputError("form weights must be nonnegative and not all zero")
        if self.scheme not in SCHEMES:
            raise InvalidInputError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.tolerance is not None and not self.tolerance >= 0:
            raise InvalidInputError("tolerance must be nonnegative")
        if not self.time_period > 0 or not self.dx > 0:
            raise InvalidInputError("time_period and dx must be positive")
        if self.steps < config.MIN_ODE_STEPS:
            raise InvalidInputError(f"steps must be >= {config.MIN_ODE_STEPS}")
        if self.periods_warmup < 0 or self.periods_measure < 1:
            raise InvalidInputError("need periods_warmup >= 0 and periods_measure >= 1")

    def default_tolerance(self):
        if self.tolerance is not None:
            return float(self.tolerance)
        if self.system == "ode":
            return config.compare_tolerance(config.TOL_COMPARE)
        if self.system == "discrete":
            return config.compare_tolerance(config.TOL_COMPARE_DISCRETE)
        return config.compare_tolerance_pde()


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    digest: str
    lambda_per: float
    lambda_s: float
    gap: float
    passed: bool  # None when the trial errored
    error: str = ""


@dataclass(frozen=True)
class SweepSummary:
    trials: int
    completed: int
    errors: int
    min_gap: float
    mean_gap: float
    violations: int
    violating_digests: tuple


@dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    records: tuple
    summary: SweepSummary


def trial_rng(seed, trial):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(trial)])))


def _pick_form(rng, forms):
    names = [f for f in FORMS if forms.get(f, 0) > 0]
    w = np.array([forms[f] for f in names], dtype=float)
    return names[int(rng.choice(len(names), p=w / w.sum()))]


def random_nonneg_scalar(rng, form, period=1.0, scale=2.0):
    """A nonnegative periodic coefficient of the given family."""
    if form == "constant":
        return Constant(float(rng.uniform(0, scale)), period)
    if form == "cosine":
        offset = float(rng.uniform(0.1, scale))
        return Cosine(offset, float(rng.uniform(-1, 1)) * offset, float(rng.uniform(0, period)), period)
    if form == "square":
        return SquareWave(
            float(rng.uniform(0, scale)),
            float(rng.uniform(0, scale)),
            float(rng.uniform(0.1, 0.9)),
            float(rng.uniform(0, period)),
            period,
        )
    if form == "sampled":
        m = int(rng.integers(1, 9))
        return Sampled(tuple(float(v) for v in rng.uniform(0, scale, m)), float(rng.uniform(0, period)), period)
    raise InvalidInputError(f"unknown form {form!r}")


def gen_periodic_matrix(rng, dim, forms=None, period=1.0, zero_prob=0.15):
    """Random periodic Metzler matrix.

    Off-diagonal entries are nonnegative and identically zero with probability
    ``zero_prob``; diagonal entries are shifted down by up to 3 so their sign varies.
    """
    if dim < 1:
        raise InvalidInputError("dim must be >= 1")
    forms = forms or _default_forms()
    rows = []
    for i in range(dim):
        row = []
        for j in range(dim):
            if i != j and rng.random() < zero_prob:
                rng.random()  # keep the draw count independent of the branch
                row.append(Constant(0.0, period))
                continue
            u = random_nonneg_scalar(rng, _pick_form(rng, forms), period)
            if i == j:
                u = u.plus(-float(rng.uniform(0, 3)))
            row.append(u)
        rows.append(tuple(row))
    return PeriodicMatrix(tuple(rows))


def gen_matrix_seq(rng, dim, p, zero_prob=0.2, scale=3.0):
    """Random p-periodic sequence of nonnegative matrices with exact zeros."""
    if dim < 1 or p < 1:
        raise InvalidInputError("dim and p must be >= 1")
    vals = rng.uniform(0, scale, (p, dim, dim))
    vals[rng.random((p, dim, dim)) < zero_prob] = 0.0
    return PeriodicMatrixSeq(tuple(vals))


def _modulated(rng, form, base, eps, period):
    """Positive coefficient with mean near ``base`` and relative swing at most ``eps``."""
    if form == "constant" or eps == 0:
        return Constant(base, period)
    if form == "cosine":
        return Cosine(base, base * eps * float(rng.uniform(-1, 1)), float(rng.uniform(0, period)), period)
    if form == "square":
        s = eps * float(rng.uniform(0, 1))
        return SquareWave(base * (1 - s), base * (1 + s), float(rng.uniform(0.2, 0.8)), float(rng.uniform(0, period)), period)
    m = int(rng.integers(2, 7))
    vals = base * (1 + eps * rng.uniform(-1, 1, m))
    return Sampled(tuple(float(v) for v in vals), float(rng.uniform(0, period)), period)


def _draw_cellcycle(rng, phases, forms, period, periodic_d_only):
    apoptosis, transition = [], []
    for _ in range(phases):
        k0 = float(rng.uniform(0.5, 3.0))
        d0 = float(rng.uniform(0, 0.2 / phases)) * k0
        if periodic_d_only:
            k = AgeTimeCoefficient.uniform(Constant(k0, period))
            d = AgeTimeCoefficient.uniform(_modulated(rng, _pick_form(rng, forms), d0, 1.0, period))
        else:
            eps = 0.6 / phases
            layout = rng.random()
            if layout < 0.6:
                k = AgeTimeCoefficient.uniform(_modulated(rng, _pick_form(rng, forms), k0, eps, period))
            elif layout < 0.85:
                onset = float(rng.uniform(0.0, 0.3 / k0))
                k = AgeTimeCoefficient.gate(onset, _modulated(rng, _pick_form(rng, forms), k0, eps, period))
            else:
                parts = int(rng.integers(2, 4))
                spacing = float(rng.uniform(0.2, 0.6)) / k0
                k = AgeTimeCoefficient.sampled(
                    spacing,
                    [_modulated(rng, _pick_form(rng, forms), k0 * float(rng.uniform(0.6, 1.4)), eps, period)
                     for _ in range(parts)],
                )
            d = AgeTimeCoefficient.uniform(_modulated(rng, _pick_form(rng, forms), d0, 1.0, period))
        apoptosis.append(d)
        transition.append(k)
    return CellCycleModel(tuple(apoptosis), tuple(transition))


def gen_cellcycle(rng, phases, forms=None, period=1.0, periodic_d_only=False):
    """Random cell-cycle model satisfying the boundedness and product-bound assumptions.

    Draws are resampled until :func:`check_assumptions` passes (at most 100 times).
    With ``periodic_d_only`` the transition rates are constant and only the
    apoptosis rates oscillate.
    """
    if not 1 <= phases:
        raise InvalidInputError("phases must be >= 1")
    forms = forms or _default_forms()
    for _ in range(MAX_RESAMPLES):
        m = _draw_cellcycle(rng, phases, forms, period, periodic_d_only)
        if check_assumptions(m).passed:
            return m
    raise InvalidInputError(f"no admissible model after {MAX_RESAMPLES} resamples")


def trial_model(cfg, trial):
    """The model drawn for ``trial``; deterministic in (seed, trial)."""
    rng = trial_rng(cfg.seed, trial)
    dim = int(rng.integers(cfg.dim[0], cfg.dim[1] + 1))
    if cfg.system == "ode":
        return gen_periodic_matrix(rng, dim, cfg.forms, cfg.time_period)
    if cfg.system == "discrete":
        p = int(rng.integers(cfg.period[0], cfg.period[1] + 1))
        return gen_matrix_seq(rng, dim, p)
    return gen_cellcycle(rng, dim, cfg.forms, cfg.time_period, cfg.system == "periodic-d")


def compare_model(cfg, model):
    tol = cfg.default_tolerance()
    if cfg.system == "ode":
        return theorem1_compare(model, cfg.steps, tol, cfg.scheme)
    if cfg.system == "discrete":
        return theorem2_compare(model, tol, cfg.scheme)
    dx = cfg.dx
    return theorem3_compare(model, dx, cfg.periods_warmup, cfg.periods_measure, tol, cfg.scheme)


def run_trial(cfg, trial):
    from .schema import model_digest

    digest = ""
    try:
        model = trial_model(cfg, trial)
        digest = model_digest(model)
        cmp = compare_model(cfg, model)
    except Exception as exc:  # recorded, never aborts the sweep
        return TrialRecord(trial, digest, math.nan, math.nan, math.nan, None, f"{type(exc).__name__}: {exc}")
    return TrialRecord(trial, digest, cmp.lambda_per, cmp.lambda_s, cmp.gap, bool(cmp.passed))


def summarize(records):
    done = [r for r in records if r.passed is not None]
    gaps = np.array([r.gap for r in done])
    bad = tuple(r.digest for r in done if not r.passed)
    return SweepSummary(
        trials=len(records),
        completed=len(done),
        errors=len(records) - len(done),
        min_gap=float(gaps.min()) if gaps.size else math.nan,
        mean_gap=float(gaps.mean()) if gaps.size else math.nan,
        violations=len(bad),
        violating_digests=bad,
    )


def run_sweep(cfg, jobs=1):
    """Run ``cfg.trials`` comparisons; records are ordered by trial index."""
    if jobs < 1:
        raise InvalidInputError("jobs must be >= 1")
    work = partial(run_trial, cfg)
    if jobs == 1:
        records = [work(t) for t in range(cfg.trials)]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(work, range(cfg.trials), chunksize=max(1, cfg.trials // (4 * jobs))))
    return SweepResult(cfg, tuple(records), summarize(records))


def scheme_rates(cfg, model):
    """lambda_s of ``model`` under each averaging scheme."""
    from .cellcycle import averaged_perron_rate
    from .coefficients import average_matrix_discrete, average_matrix_ode
    from .spectral import perron_metzler, perron_nonneg

    out = {}
    for scheme in SCHEMES:
        if cfg.system == "ode":
            out[scheme] = perron_metzler(average_matrix_ode(model, scheme)).eigenvalue
        elif cfg.system == "discrete":
            out[scheme] = perron_nonneg(average_matrix_discrete(model, scheme)).eigenvalue
        else:
            out[scheme] = averaged_perron_rate(model, cfg.dx, scheme).eigenvalue
    return out
