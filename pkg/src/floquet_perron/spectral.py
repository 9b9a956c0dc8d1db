"""Perron roots of nonnegative and Metzler matrices.

The dominant eigenvalue is obtained by power iteration accelerated with
repeated squaring: ``M <- M @ M / max(M @ M)`` applied to the scaled matrix,
which tracks ``log ||A^(2^k)|| / 2^k`` and converges for reducible,
imprimitive and defective inputs alike.  Products of nonnegative matrices
involve no cancellation, so every entry keeps full relative precision.  The
eigenvector is read off a second squaring pass on the matrix shifted by the
(already known) spectral radius, which makes the dominant eigenvalue strictly
dominant.
"""
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

from . import config
from .errors import InvalidInputError

_MAX_SQUARINGS = 96
_POLISH_STEPS = 64


@dataclass(frozen=True)
class EigenReport:
    """Dominant eigenpair with convergence diagnostics.

    ``eigenvector`` is nonnegative with unit max-norm for matrix problems.
    ``residual`` is ``||A v - lambda v||_inf / max(1, ||A||_inf)``.
    """

    eigenvalue: float
    eigenvector: np.ndarray
    residual: float
    iterations: int
    converged: bool


def _as_square(a, name="matrix"):
    arr = np.array(a, dtype=float, copy=True)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise InvalidInputError(f"{name} must be a nonempty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has NaN or infinite entries")
    return arr


def as_nonneg(a):
    """Validated float copy of a nonnegative square matrix."""
    arr = _as_square(a, "nonnegative matrix")
    if np.any(arr < 0):
        i, j = np.argwhere(arr < 0)[0]
        raise InvalidInputError(f"nonnegative matrix has negative entry [{i}][{j}] = {arr[i, j]!r}")
    return arr


def as_metzler(a):
    """Validated float copy of a Metzler matrix (nonnegative off the diagonal)."""
    arr = _as_square(a, "Metzler matrix")
    off = arr.copy()
    np.fill_diagonal(off, 0.0)
    if np.any(off < 0):
        i, j = np.argwhere(off < 0)[0]
        raise InvalidInputError(f"Metzler matrix has negative off-diagonal entry [{i}][{j}] = {arr[i, j]!r}")
    return arr


def _relative_residual(a, v, lam):
    scale = max(1.0, float(np.max(np.sum(np.abs(a), axis=1))))
    return float(np.max(np.abs(a @ v - lam * v))) / scale


def _log_spectral_radius(b, budget):
    """log rho(b) for nonnegative ``b`` with max entry 1, or -inf if nilpotent."""
    m = b
    log_rho = 0.0
    used = 0
    for k in range(1, min(budget, _MAX_SQUARINGS) + 1):
        used = k
        p = m @ m
        s = p.max()
        if s == 0.0:
            return -np.inf, used, True
        inc = np.log(s) / 2.0**k
        log_rho += inc
        m = p / s
        if k >= 8 and abs(inc) <= 1e-17 * max(1.0, abs(log_rho)):
            return log_rho, used, True
    return log_rho, used, used >= _MAX_SQUARINGS


def _dominant_vector(b, budget):
    """Limit direction of ``b^n @ 1`` for nonnegative ``b`` with a strictly dominant root."""
    m = b / b.max()
    used = 0
    for _ in range(min(budget, _MAX_SQUARINGS)):
        used += 1
        p = m @ m
        p /= p.max()
        delta = np.max(np.abs(p - m))
        m = p
        if delta <= 1e-15:
            break
    v = m @ np.ones(m.shape[0])
    return v / v.max(), used


def perron_nonneg(a, tol=config.PERRON_TOL, max_iter=config.PERRON_MAX_ITER):
    """Spectral radius and a nonnegative eigenvector of a nonnegative matrix.

    Reducible and imprimitive matrices are accepted.  If the iteration budget
    runs out the best iterate is returned with ``converged=False``.
    """
    a = as_nonneg(a)
    if not tol > 0:
        raise InvalidInputError("tol must be positive")
    if max_iter < 1:
        raise InvalidInputError("max_iter must be positive")
    n = a.shape[0]
    scale = a.max()
    if scale == 0.0:
        return EigenReport(0.0, np.ones(n), 0.0, 0, True)

    b = a / scale
    log_rho, used, settled = _log_spectral_radius(b, max_iter)
    rho = 0.0 if log_rho == -np.inf else float(np.exp(log_rho) * scale)
    budget = max_iter - used

    shift = rho / scale if rho > 0 else 1.0
    shifted = b + shift * np.eye(n)
    if budget > 0:
        v, extra = _dominant_vector(shifted, budget)
        used += extra
        budget -= extra
    else:
        v = np.ones(n)
    residual = _relative_residual(a, v, rho)
    steps = 0
    while residual > tol and steps < min(budget, _POLISH_STEPS):
        w = shifted @ v
        v = w / w.max()
        residual = _relative_residual(a, v, rho)
        steps += 1
    used += steps
    return EigenReport(rho, v, residual, used, bool(settled and residual <= tol))


def perron_metzler(a, tol=config.PERRON_TOL, max_iter=config.PERRON_MAX_ITER):
    """Spectral abscissa (rightmost real eigenvalue) of a Metzler matrix."""
    a = as_metzler(a)
    c = max(0.0, -float(np.min(np.diag(a))))
    if c == 0.0:
        return perron_nonneg(a, tol, max_iter)
    shifted = a + c * np.eye(a.shape[0])
    rep = perron_nonneg(shifted, tol, max_iter)
    lam = rep.eigenvalue - c
    residual = _relative_residual(a, rep.eigenvector, lam)
    return EigenReport(lam, rep.eigenvector, residual, rep.iterations, bool(rep.converged and residual <= tol))


def _positive_vector(y):
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or not np.all(np.isfinite(y)) or np.any(y <= 0):
        raise InvalidInputError("Collatz-Wielandt test vector must be finite with strictly positive entries")
    return y


def collatz_wielandt_upper(a, y):
    """max_i (A y)_i / y_i, an upper bound on the Perron root for any y > 0."""
    a = as_metzler(a)
    y = _positive_vector(y)
    if y.shape[0] != a.shape[0]:
        raise InvalidInputError("test vector length does not match the matrix")
    return float(np.max(a @ y / y))


def collatz_wielandt_lower(a, y):
    """min_i (A y)_i / y_i, a lower bound on the Perron root for any y > 0."""
    a = as_metzler(a)
    y = _positive_vector(y)
    if y.shape[0] != a.shape[0]:
        raise InvalidInputError("test vector length does not match the matrix")
    return float(np.min(a @ y / y))


def is_irreducible(a):
    """True iff the graph with an edge wherever an off-diagonal entry is positive is strongly connected."""
    a = as_metzler(a)
    n = a.shape[0]
    if n == 1:
        return True
    adj = (a > 0).astype(np.int8)
    np.fill_diagonal(adj, 0)
    count, _ = connected_components(adj.T, directed=True, connection="strong")
    return count == 1
