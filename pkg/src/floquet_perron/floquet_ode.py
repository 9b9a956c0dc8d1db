"""Floquet growth rate of a periodic Metzler ODE system via its monodromy matrix."""
import math
from dataclasses import dataclass

import numpy as np

from . import config, kernels
from .coefficients import PeriodicMatrix, average_matrix_ode
from .comparison import Comparison
from .errors import IntegrationError, InvalidInputError
from .spectral import EigenReport, perron_metzler, perron_nonneg


@dataclass(frozen=True)
class MonodromyResult:
    monodromy: np.ndarray
    floquet_eigenvalue: float
    floquet_vector: np.ndarray
    steps: int
    step_size: float
    n_steps: int
    min_entry: float
    perron: EigenReport


@dataclass(frozen=True)
class EigenFunction:
    times: np.ndarray
    values: np.ndarray
    periodicity_residual: float


def _segments(a, t0, t1, steps):
    """Cut [t0, t1] at coefficient discontinuities; ``steps`` per period sets the density."""
    period = a.period
    pts = [t0, t1]
    bps = a.breakpoints()
    if bps.size:
        first = math.floor(t0 / period) - 1
        last = math.ceil(t1 / period) + 1
        for k in range(first, last + 1):
            shifted = bps + k * period
            pts.extend(shifted[(shifted > t0) & (shifted < t1)])
    pts = np.sort(np.asarray(pts, dtype=float))
    keep = np.concatenate([[True], np.diff(pts) > 1e-12 * period])
    pts = pts[keep]
    pts[-1] = t1
    return pts


def _stage_arrays(a, t0, t1, steps):
    """Per-step A(t) at the three RK4 stage times plus the step sizes."""
    edges = _segments(a, t0, t1, steps)
    starts, sizes, mids = [], [], []
    for s0, s1 in zip(edges[:-1], edges[1:]):
        count = max(1, int(round(steps * (s1 - s0) / a.period)))
        h = (s1 - s0) / count
        starts.append(s0 + h * np.arange(count))
        sizes.append(np.full(count, h))
        mids.append(np.full(count, 0.5 * (s0 + s1)))
    start = np.concatenate(starts)
    h = np.concatenate(sizes)
    mid = np.concatenate(mids)
    times = start[:, None] + h[:, None] * np.array([0.0, 0.5, 1.0])
    d = a.dim
    stages = np.empty((start.size, 3, d, d))
    for i, row in enumerate(a.entries):
        for j, u in enumerate(row):
            if u.piecewise_constant:
                stages[:, :, i, j] = np.asarray(u(mid))[:, None]
            else:
                stages[:, :, i, j] = u(times)
    return stages, h


def _propagate(a, t0, t1, steps, x0, backend=None):
    stages, h = _stage_arrays(a, t0, t1, steps)
    x, failed = kernels.rk4_propagate(stages, h, x0, backend=backend)
    if failed >= 0:
        raise IntegrationError(f"non-finite state at RK4 step {failed} (t = {t0 + h[:failed].sum():.6g})", failed)
    return x, h


def integrate_fundamental(a, steps=config.ODE_STEPS, backend=None):
    """Monodromy matrix Phi(T) of X' = A(t) X and lambda_per = log(rho(Phi(T))) / T."""
    if not isinstance(a, PeriodicMatrix):
        raise InvalidInputError("integrate_fundamental needs a PeriodicMatrix")
    if int(steps) != steps or steps < config.MIN_ODE_STEPS:
        raise InvalidInputError(f"steps must be an integer >= {config.MIN_ODE_STEPS}, got {steps!r}")
    steps = int(steps)
    phi, h = _propagate(a, 0.0, a.period, steps, np.eye(a.dim), backend)
    min_entry = float(phi.min())
    floor = -config.NEG_CLAMP * max(1.0, float(np.abs(phi).max()))
    if min_entry < floor:
        raise IntegrationError(f"monodromy left the nonnegative orthant (min entry {min_entry:.3g}); use more steps")
    phi = np.where(phi < 0, 0.0, phi)
    rep = perron_nonneg(phi)
    if rep.eigenvalue <= 0:
        raise IntegrationError("monodromy has zero spectral radius")
    lam = math.log(rep.eigenvalue) / a.period
    return MonodromyResult(phi, lam, rep.eigenvector, steps, float(h.max()), int(h.size), min_entry, rep)


def floquet_eigenfunction(a, result, samples=65, backend=None):
    """Periodic eigenfunction X(t) of X' = (A(t) - lambda_per) X on ``samples`` equispaced times.

    Starts from the Perron vector of the monodromy; ``periodicity_residual`` is
    ``||X(T) - X(0)||_inf / ||X(0)||_inf``.
    """
    if samples < 2:
        raise InvalidInputError("samples must be at least 2")
    times = np.linspace(0.0, a.period, samples)
    x = result.floquet_vector.reshape(-1, 1).astype(float)
    values = [x[:, 0].copy()]
    for t0, t1 in zip(times[:-1], times[1:]):
        x, _ = _propagate(a, t0, t1, result.steps, x, backend)
        x = x * math.exp(-result.floquet_eigenvalue * (t1 - t0))
        values.append(x[:, 0].copy())
    values = np.array(values)
    values[values < 0] = 0.0
    ref = np.max(np.abs(values[0]))
    residual = float(np.max(np.abs(values[-1] - values[0])) / ref)
    return EigenFunction(times, values, residual)


def theorem1_compare(a, steps=config.ODE_STEPS, tol=None, scheme="paper", backend=None):
    """lambda_per of the periodic system against lambda_s of its averaged matrix."""
    tol = config.compare_tolerance() if tol is None else tol
    lam_per = integrate_fundamental(a, steps, backend).floquet_eigenvalue
    lam_s = perron_metzler(average_matrix_ode(a, scheme)).eigenvalue
    return Comparison.of(lam_per, lam_s, tol)
