"""Age-structured multi-phase cell-cycle model.

Phase ``i`` has densities ``n_i(t, x)`` over age ``x`` that age at unit speed,
lose cells at rate ``d_i + K_i`` and feed phase ``i + 1`` through the
transition rate ``K_i``; the last phase feeds the first with a factor 2
(division).

Discretization: ages on a uniform grid with ``dt = dx`` so that every
characteristic moves exactly one cell per step.  The loss along each
characteristic segment is applied as ``exp(-integral of (d + K))`` computed
exactly in time, with the segment cut wherever a coefficient changes piece in
age.  The renewal integrals use the exact integral of the piecewise-constant
kernel against the piecewise-linear interpolant of the density, and the cyclic
dependence of the age-0 values is solved exactly each step.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from . import config, kernels
from .coefficients import Constant, PeriodicScalar, geom_mean
from .comparison import Comparison
from .errors import AssumptionError, DegenerateModelError, InvalidInputError
from .spectral import EigenReport

AGE_FORMS = ("uniform", "gate", "sampled")


@dataclass(frozen=True, eq=False)
class AgeTimeCoefficient:
    """Rate ``c(t, x)``: periodic in ``t``, piecewise constant in age ``x``.

    ``uniform``: one periodic function for all ages.
    ``gate``: zero below ``onset``, the periodic function from ``onset`` on.
    ``sampled``: ``parts[r]`` on ``[r * spacing, (r + 1) * spacing)``, the last
    part extending to infinity.
    """

    kind: str
    parts: tuple
    onset: float = 0.0
    spacing: float = 0.0

    def __post_init__(self):
        parts = tuple(self.parts)
        object.__setattr__(self, "parts", parts)
        if self.kind not in AGE_FORMS:
            raise InvalidInputError(f"unknown age form {self.kind!r}; expected one of {AGE_FORMS}")
        if not parts or not all(isinstance(p, PeriodicScalar) for p in parts):
            raise InvalidInputError("age-time coefficient needs periodic time parts")
        if self.kind in ("uniform", "gate") and len(parts) != 1:
            raise InvalidInputError(f"{self.kind} age form takes exactly one time coefficient")
        if self.kind == "gate" and not (math.isfinite(self.onset) and self.onset >= 0):
            raise InvalidInputError(f"gate onset must be a nonnegative number, got {self.onset!r}")
        if self.kind == "sampled" and not (math.isfinite(self.spacing) and self.spacing > 0):
            raise InvalidInputError(f"sampled age spacing must be positive, got {self.spacing!r}")
        period = parts[0].period
        for r, p in enumerate(parts):
            if not math.isclose(p.period, period, rel_tol=1e-12):
                raise InvalidInputError(f"age part {r} has period {p.period!r}, expected {period!r}")
            if p.minimum() < 0:
                raise InvalidInputError(f"age part {r} takes negative values (minimum {p.minimum()!r})")

    @classmethod
    def uniform(cls, u):
        return cls("uniform", (u,))

    @classmethod
    def gate(cls, onset, u):
        return cls("gate", (u,), onset=float(onset))

    @classmethod
    def sampled(cls, spacing, parts):
        return cls("sampled", tuple(parts), spacing=float(spacing))

    def __eq__(self, other):
        return (
            isinstance(other, AgeTimeCoefficient)
            and (self.kind, self.parts, self.onset, self.spacing)
            == (other.kind, other.parts, other.onset, other.spacing)
        )

    @property
    def period(self):
        return self.parts[0].period

    @property
    def edges(self):
        """Left ends of the age pieces (first is 0)."""
        if self.kind == "gate" and self.onset > 0:
            return np.array([0.0, self.onset])
        if self.kind == "sampled":
            return self.spacing * np.arange(len(self.parts))
        return np.array([0.0])

    @property
    def pieces(self):
        """Time coefficient of each age piece, aligned with :attr:`edges`."""
        if self.kind == "gate" and self.onset > 0:
            return (Constant(0.0, self.period), self.parts[0])
        return self.parts

    def piece_index(self, x):
        return np.searchsorted(self.edges, np.asarray(x, dtype=float), side="right") - 1

    def __call__(self, t, x):
        t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
        idx = self.piece_index(x)
        out = np.empty(t.shape)
        for r, p in enumerate(self.pieces):
            mask = idx == r
            if np.any(mask):
                out[mask] = p(t[mask])
        return out

    def maximum(self):
        return max(p.maximum() for p in self.pieces)

    def is_constant_in_time(self):
        return all(p.is_constant() for p in self.pieces)


def _as_age_coefficient(c):
    if isinstance(c, AgeTimeCoefficient):
        return c
    if isinstance(c, PeriodicScalar):
        return AgeTimeCoefficient.uniform(c)
    raise InvalidInputError(f"expected an age-time coefficient, got {type(c).__name__}")


def default_x_max(transition, factor=config.PDE_XMAX_FACTOR):
    """``factor / (smallest positive time-minimum of the transition rates)``."""
    mins = [p.minimum() for k in transition for p in _as_age_coefficient(k).pieces]
    positive = [v for v in mins if v > 0]
    return factor / min(positive) if positive else factor


@dataclass(frozen=True, eq=False)
class CellCycleModel:
    """I phases with apoptosis ``d_i(t, x)`` and exit rates ``K_i(t, x)`` (phase i -> i+1)."""

    apoptosis: tuple
    transition: tuple
    x_max: float = None

    def __post_init__(self):
        d = tuple(_as_age_coefficient(c) for c in self.apoptosis)
        k = tuple(_as_age_coefficient(c) for c in self.transition)
        if len(d) < 1 or len(d) != len(k):
            raise InvalidInputError("need one apoptosis and one transition rate per phase (at least one phase)")
        period = k[0].period
        for name, seq in (("apoptosis", d), ("transition", k)):
            for i, c in enumerate(seq):
                if not math.isclose(c.period, period, rel_tol=1e-12):
                    raise InvalidInputError(f"{name}[{i}] has period {c.period!r}, expected {period!r}")
        x_max = default_x_max(k) if self.x_max is None else float(self.x_max)
        if not (math.isfinite(x_max) and x_max > 0):
            raise InvalidInputError(f"x_max must be positive, got {self.x_max!r}")
        object.__setattr__(self, "apoptosis", d)
        object.__setattr__(self, "transition", k)
        object.__setattr__(self, "x_max", x_max)

    def __eq__(self, other):
        return (
            isinstance(other, CellCycleModel)
            and self.apoptosis == other.apoptosis
            and self.transition == other.transition
            and self.x_max == other.x_max
        )

    @property
    def phases(self):
        return len(self.transition)

    @property
    def period(self):
        return self.transition[0].period

    def is_constant_in_time(self):
        return all(c.is_constant_in_time() for c in self.apoptosis + self.transition)


@dataclass
class PopulationState:
    densities: np.ndarray
    time: float
    dx: float

    def mass(self):
        n = self.densities
        return float(self.dx * (np.sum(n[:, 1:-1]) + 0.5 * np.sum(n[:, 0] + n[:, -1])))


@dataclass(frozen=True)
class AssumptionReport:
    bounded: bool
    as2_value: float
    passed: bool
    phase_integrals: tuple


@dataclass(frozen=True)
class GrowthRun:
    report: EigenReport
    times: np.ndarray
    log_mass: np.ndarray
    period_rates: np.ndarray


def age_grid(m, dx):
    cells = int(round(m.x_max / dx))
    if cells < 2:
        raise InvalidInputError(f"age step {dx!r} too coarse for x_max = {m.x_max!r}")
    return dx * np.arange(cells + 1)


def steps_per_period(m, dx):
    ratio = m.period / dx
    steps = int(round(ratio))
    if steps < 1 or abs(ratio - steps) > 1e-9 * max(1.0, ratio):
        raise InvalidInputError(f"period / dx must be an integer (period {m.period!r}, dx {dx!r})")
    return steps


def _default_dx(m):
    return m.period / config.PDE_STEPS_PER_PERIOD


def _union_edges(*coefs):
    return np.unique(np.concatenate([c.edges for c in coefs]))


def _piece_at(coef, x):
    return int(coef.piece_index(x))


def check_assumptions(m, time_points=config.ASSUMPTION_TIME_GRID, age_points=8000):
    """Boundedness and the product bound prod_i int k_i e^{-M_i} > 1/2.

    ``k_i`` is the time-minimum of ``K_i`` and ``mu_i`` the time-maximum of
    ``d_i + K_i`` on a grid of ``time_points`` per period; ``M_i`` is the exact
    age-integral of ``mu_i``; the outer age-integral is trapezoidal.
    """
    tg = m.period * np.arange(time_points) / time_points
    x = np.linspace(0.0, m.x_max, age_points + 1)
    bounded = True
    integrals = []
    for d, k in zip(m.apoptosis, m.transition):
        bounded &= bool(np.isfinite(d.maximum()) and np.isfinite(k.maximum()))
        edges = _union_edges(d, k)
        edges = edges[edges < m.x_max]
        kmin = np.empty(edges.size)
        mu = np.empty(edges.size)
        for r, e in enumerate(edges):
            kp = k.pieces[_piece_at(k, e)]
            dp = d.pieces[_piece_at(d, e)]
            kv = np.asarray(kp(tg), dtype=float)
            kmin[r] = kv.min()
            mu[r] = np.max(kv + np.asarray(dp(tg), dtype=float))
        lengths = np.diff(np.append(edges, m.x_max))
        cum = np.concatenate([[0.0], np.cumsum(mu * lengths)])[:-1]
        idx = np.searchsorted(edges, x, side="right") - 1
        big_m = cum[idx] + mu[idx] * (x - edges[idx])
        integrals.append(float(np.trapezoid(kmin[idx] * np.exp(-big_m), x)))
    value = float(np.prod(integrals))
    return AssumptionReport(bounded, value, bool(bounded and value > 0.5), tuple(integrals))


# ---------------------------------------------------------------- transport


@dataclass(frozen=True)
class TransportPlan:
    """Loss factors and renewal weights for ``rows`` consecutive steps from ``t0``."""

    dx: float
    t0: float
    rows: int
    ages: np.ndarray
    loss_cls: np.ndarray
    loss_fac: np.ndarray
    bnd_cls: np.ndarray
    bnd_w: np.ndarray
    mult: np.ndarray


def _loss_classes(d, k, ages, dx, taus):
    """Class index per age interval and ``exp(-integral of d + K)`` per (step, class)."""
    edges = _union_edges(d, k)[1:]
    cells = ages.size - 1
    tol = 1e-12 * max(1.0, ages[-1])
    inner_start = np.searchsorted(edges, ages[:-1] + tol, side="left")
    inner_stop = np.searchsorted(edges, ages[1:] - tol, side="right")
    crossing = inner_stop > inner_start

    def rate_integral(x_mid, s_a, s_b):
        dp = d.pieces[_piece_at(d, x_mid)]
        kp = k.pieces[_piece_at(k, x_mid)]
        return dp.integral(taus + s_a, taus + s_b) + kp.integral(taus + s_a, taus + s_b)

    mids = ages[:-1] + 0.5 * dx
    pair = d.piece_index(mids) * len(k.pieces) + k.piece_index(mids)
    pair[crossing] = -1
    cls = np.empty(cells, dtype=np.int32)
    columns = []
    for key in np.unique(pair[pair >= 0]):
        cls[pair == key] = len(columns)
        mid = mids[np.argmax(pair == key)]
        columns.append(np.exp(-rate_integral(mid, 0.0, dx)))
    for j in np.flatnonzero(crossing):
        xa = ages[j]
        cuts = np.concatenate([[0.0], edges[inner_start[j]:inner_stop[j]] - xa, [dx]])
        total = np.zeros_like(taus)
        for s_a, s_b in zip(cuts[:-1], cuts[1:]):
            total += rate_integral(xa + 0.5 * (s_a + s_b), s_a, s_b)
        cls[j] = len(columns)
        columns.append(np.exp(-total))
    return cls, np.stack(columns, axis=1)


def _node_weights(k, ages, dx, j, tol):
    """(piece, weight) pairs of the hat function at node ``j`` against the pieces of ``k``."""
    edges = k.edges[1:]
    acc = {}
    for side in (-1, 1):
        if (side < 0 and j == 0) or (side > 0 and j == ages.size - 1):
            continue
        lo, hi = (ages[j - 1], ages[j]) if side < 0 else (ages[j], ages[j + 1])
        inner = edges[(edges > lo + tol) & (edges < hi - tol)]
        cuts = (np.concatenate([[lo], inner, [hi]]) - lo) / dx
        for u0, u1 in zip(cuts[:-1], cuts[1:]):
            p = _piece_at(k, lo + 0.5 * (u0 + u1) * dx)
            rise = 0.5 * (u1 * u1 - u0 * u0)
            acc[p] = acc.get(p, 0.0) + dx * (rise if side < 0 else (u1 - u0) - rise)
    return tuple(sorted((p, round(w, 15)) for p, w in acc.items()))


def _boundary_classes(k, ages, dx, taus_new):
    """Class index per node and renewal weight ``int K(t, x) hat_j(x) dx`` per (step, class)."""
    nodes = ages.size
    tol = 1e-12 * max(1.0, ages[-1])
    edges = k.edges[1:]
    near = np.zeros(nodes, dtype=bool)
    near[[0, nodes - 1]] = True
    if edges.size:
        lo = np.searchsorted(ages, edges - tol, side="left") - 1
        for offset in (0, 1, 2):
            near[np.clip(lo + offset, 0, nodes - 1)] = True
    keys = {}
    cls = np.empty(nodes, dtype=np.int32)
    plain = k.piece_index(ages)
    for p in np.unique(plain[~near]):
        cls[(plain == p) & ~near] = keys.setdefault(((int(p), round(dx, 15)),), len(keys))
    for j in np.flatnonzero(near):
        cls[j] = keys.setdefault(_node_weights(k, ages, dx, j, tol), len(keys))
    values = [np.asarray(k.pieces[p](taus_new), dtype=float) for p in range(len(k.pieces))]
    table = np.zeros((taus_new.size, len(keys)))
    for key, c in keys.items():
        for p, w in key:
            table[:, c] += w * values[p]
    return cls, table


def transport_plan(m, dx, t0=0.0, rows=None):
    rows = steps_per_period(m, dx) if rows is None else int(rows)
    ages = age_grid(m, dx)
    taus = t0 + dx * np.arange(rows)
    losses = [_loss_classes(d, k, ages, dx, taus) for d, k in zip(m.apoptosis, m.transition)]
    bounds = [_boundary_classes(k, ages, dx, taus + dx) for k in m.transition]
    nph = m.phases
    c1 = max(t.shape[1] for _, t in losses)
    c2 = max(t.shape[1] for _, t in bounds)
    loss_fac = np.ones((rows, nph, c1))
    bnd_w = np.zeros((rows, nph, c2))
    for i, ((_, lt), (_, bt)) in enumerate(zip(losses, bounds)):
        loss_fac[:, i, : lt.shape[1]] = lt
        bnd_w[:, i, : bt.shape[1]] = bt
    mult = np.ones(nph)
    mult[0] = 2.0
    return TransportPlan(
        dx=dx,
        t0=t0,
        rows=rows,
        ages=ages,
        loss_cls=np.ascontiguousarray(np.stack([c for c, _ in losses])),
        loss_fac=loss_fac,
        bnd_cls=np.ascontiguousarray(np.stack([c for c, _ in bounds])),
        bnd_w=bnd_w,
        mult=mult,
    )


def _run(plan, n, s0, nsteps, backend=None):
    mass = np.empty(nsteps)
    failed = kernels.transport_steps(
        n, plan.loss_cls, plan.loss_fac, plan.bnd_cls, plan.bnd_w, plan.mult, s0, nsteps, mass, plan.dx,
        backend=backend,
    )
    if failed >= 0:
        raise DegenerateModelError(f"renewal system singular at step {failed}; reduce dx")
    return mass


def step_transport(m, state, dt, backend=None):
    """Advance a population state by one step ``dt`` (which must equal the age step)."""
    if not math.isclose(dt, state.dx, rel_tol=1e-12):
        raise InvalidInputError(f"time step {dt!r} must equal the age step {state.dx!r}")
    ages = age_grid(m, state.dx)
    n = np.array(state.densities, dtype=float, order="C")
    if n.shape != (m.phases, ages.size):
        raise InvalidInputError(f"state shape {n.shape} does not match the model grid {(m.phases, ages.size)}")
    if np.any(n < 0) or not np.all(np.isfinite(n)):
        raise InvalidInputError("densities must be finite and nonnegative")
    plan = transport_plan(m, state.dx, state.time, rows=1)
    _run(plan, n, 0, 1, backend)
    return PopulationState(n, state.time + dt, state.dx)


# ---------------------------------------------------------------- growth rates


def _normalize_mass(n, dx):
    mass = dx * (np.sum(n[:, 1:-1]) + 0.5 * np.sum(n[:, 0] + n[:, -1]))
    return n / mass


def simulate_growth(
    m,
    dx=None,
    periods_warmup=config.PDE_WARMUP_PERIODS,
    periods_measure=config.PDE_MEASURE_PERIODS,
    require_assumptions=True,
    initial=None,
    backend=None,
):
    """Long-time growth of the periodic problem with per-period renormalization.

    The growth rate is the mean log mass ratio per period over the measurement
    window divided by the period.  Renormalizing once per period is power
    iteration on the period map; the change between successive normalized
    states at the end is reported as the residual.
    """
    dx = _default_dx(m) if dx is None else float(dx)
    if periods_warmup < 0 or periods_measure < 1:
        raise InvalidInputError("need periods_warmup >= 0 and periods_measure >= 1")
    if require_assumptions:
        chk = check_assumptions(m)
        if not chk.passed:
            raise AssumptionError(
                f"cell-cycle assumptions fail: product bound {chk.as2_value:.6g} must exceed 1/2 (bounded={chk.bounded})"
            )
    rows = steps_per_period(m, dx)
    plan = transport_plan(m, dx, 0.0, rows)
    if initial is None:
        try:
            initial = averaged_perron_rate(m, dx=dx).eigenvector
        except DegenerateModelError:
            initial = np.tile(np.exp(-plan.ages), (m.phases, 1))
    n = np.array(initial, dtype=float, order="C")
    if n.shape != (m.phases, plan.ages.size):
        raise InvalidInputError(f"initial state shape {n.shape} does not match the grid")
    n = np.ascontiguousarray(_normalize_mass(n, dx))

    total = periods_warmup + periods_measure
    rates = np.empty(total)
    log_mass = np.empty(total * rows)
    offset = 0.0
    previous = n.copy()
    warm_state = n.copy()
    residual = math.inf
    for p in range(total):
        mass = _run(plan, n, 0, rows, backend)
        end = mass[-1]
        if not (np.isfinite(end) and end > 1e-300):
            raise DegenerateModelError(f"population mass vanished during period {p}")
        with np.errstate(divide="ignore"):
            log_mass[p * rows : (p + 1) * rows] = offset + np.log(mass)
        rates[p] = math.log(end) / m.period
        offset += math.log(end)
        n /= end
        scale = np.max(np.abs(n))
        residual = float(np.max(np.abs(n - previous)) / scale)
        previous = n.copy()
        if p == periods_warmup - 1:
            warm_state = n.copy()
    if periods_warmup == 0:
        warm_state = n.copy()
    lam = float(np.mean(rates[periods_warmup:]))
    times = dx * np.arange(1, total * rows + 1)
    report = EigenReport(lam, warm_state, residual, total, residual <= config.PDE_RESIDUAL_TOL)
    return GrowthRun(report, times, log_mass, rates)


def floquet_growth_rate(m, dx=None, periods_warmup=config.PDE_WARMUP_PERIODS,
                        periods_measure=config.PDE_MEASURE_PERIODS, require_assumptions=True, backend=None):
    """lambda_per of the periodic cell-cycle problem (eigenvector: mass-normalized profiles)."""
    return simulate_growth(m, dx, periods_warmup, periods_measure, require_assumptions, backend=backend).report


def _log_expint(c, length):
    """log of int_0^length exp(-c y) dy, stable for either sign of c."""
    if length <= 0:
        return -math.inf
    cl = c * length
    if abs(cl) < 1e-12:
        return math.log(length) - 0.5 * cl
    if c > 0:
        return math.log(-math.expm1(-cl)) - math.log(c)
    return -cl + math.log(-math.expm1(cl)) - math.log(-c)


def _phase_means(m, scheme):
    """Per phase: (edges, transport rate, renewal kernel) as piecewise-constant age profiles."""
    out = []
    for d, k in zip(m.apoptosis, m.transition):
        edges = _union_edges(d, k)
        edges = edges[edges < m.x_max]
        rate = np.empty(edges.size)
        kern = np.empty(edges.size)
        for r, e in enumerate(edges):
            dp = d.pieces[_piece_at(d, e)]
            kp = k.pieces[_piece_at(k, e)]
            if scheme == "geometric":
                rate[r] = geom_mean(dp) + geom_mean(kp)
            else:
                rate[r] = dp.mean() + kp.mean()
            kern[r] = kp.mean() if scheme == "arithmetic" else geom_mean(kp)
        lengths = np.diff(np.append(edges, m.x_max))
        out.append((edges, lengths, rate, kern))
    return out


def _log_phase_integral(edges, lengths, rate, kern, lam):
    cum = 0.0
    terms = []
    for e, length, s, g in zip(edges, lengths, rate, kern):
        if g > 0:
            terms.append(math.log(g) - cum + _log_expint(s + lam, length))
        cum += (s + lam) * length
    return logsumexp(terms) if terms else -math.inf


def _characteristic(means):
    def log_f(lam):
        return math.log(2.0) + sum(_log_phase_integral(*ph, lam) for ph in means)

    return log_f


def averaged_perron_rate(m, dx=None, scheme="paper", tol=config.BISECT_TOL):
    """lambda_s of the averaged stationary problem.

    Root of ``2 prod_i int_0^x_max <K_i>_g exp(-int_0^x (<d_i>_a + <K_i>_a + lambda)) dx = 1``,
    evaluated exactly for piecewise-constant age profiles.  The eigenvector is
    the profiles ``Nbar_i`` sampled on the age grid, normalized to unit mass.
    """
    if scheme not in ("paper", "arithmetic", "geometric"):
        raise InvalidInputError(f"unknown averaging scheme {scheme!r}")
    dx = _default_dx(m) if dx is None else float(dx)
    means = _phase_means(m, scheme)
    log_f = _characteristic(means)
    mu_max = max(max(p.maximum() for p in d.pieces) + max(p.maximum() for p in k.pieces)
                 for d, k in zip(m.apoptosis, m.transition))
    k_max = max(k.maximum() for k in m.transition)
    lo, hi = -mu_max - 10.0, 10.0 * (k_max + 1.0)
    f_lo, f_hi = log_f(lo), log_f(hi)
    if not (f_lo >= 0.0 and f_hi <= 0.0):
        raise DegenerateModelError(
            f"characteristic equation not bracketed on [{lo:.6g}, {hi:.6g}] (log F = {f_lo:.3g}, {f_hi:.3g})"
        )
    lam, info = brentq(log_f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, full_output=True)
    residual = abs(math.expm1(log_f(lam)))

    ages = age_grid(m, dx)
    profiles = np.empty((m.phases, ages.size))
    start = 1.0
    for i, (edges, lengths, rate, kern) in enumerate(means):
        idx = np.searchsorted(edges, ages, side="right") - 1
        cum = np.concatenate([[0.0], np.cumsum((rate + lam) * lengths)])[:-1]
        profiles[i] = start * np.exp(-(cum[idx] + (rate[idx] + lam) * (ages - edges[idx])))
        start = start * math.exp(_log_phase_integral(edges, lengths, rate, kern, lam))
    profiles = _normalize_mass(profiles, dx)
    return EigenReport(float(lam), profiles, residual, int(info.iterations), residual <= 1e-9)


def proof_measure_masses(m, report, dx=None, scheme="paper"):
    """Total mass of each renewal probability measure built from the averaged profiles (should be 1)."""
    dx = _default_dx(m) if dx is None else float(dx)
    ages = age_grid(m, dx)
    means = _phase_means(m, scheme)
    prof = report.eigenvector
    out = []
    for i in range(m.phases):
        src = i - 1 if i > 0 else m.phases - 1
        edges, _, _, kern = means[src]
        g = kern[np.searchsorted(edges, ages, side="right") - 1]
        factor = 2.0 if i == 0 else 1.0
        out.append(factor * float(np.trapezoid(g * prof[src], ages)) / prof[i, 0])
    return np.array(out)


def artificial_loss(m):
    """Per phase: sup over age pieces of <K_i>_a - <K_i>_g (nonnegative by AM-GM)."""
    out = []
    for k in m.transition:
        edges = k.edges
        pieces = [p for e, p in zip(edges, k.pieces) if e < m.x_max]
        out.append(max(p.mean() - geom_mean(p) for p in pieces))
    return np.array(out)


def theorem3_compare(m, dx=None, periods_warmup=config.PDE_WARMUP_PERIODS,
                     periods_measure=config.PDE_MEASURE_PERIODS, tol=None, scheme="paper",
                     require_assumptions=True, backend=None):
    tol = config.compare_tolerance_pde() if tol is None else tol
    lam_per = floquet_growth_rate(
        m, dx, periods_warmup, periods_measure, require_assumptions, backend=backend
    ).eigenvalue
    lam_s = averaged_perron_rate(m, dx, scheme).eigenvalue
    return Comparison.of(lam_per, lam_s, tol, artificial_loss=artificial_loss(m))
