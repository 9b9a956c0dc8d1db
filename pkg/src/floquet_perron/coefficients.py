"""Finitely parameterized T-periodic coefficients and their time averages.

Four families are supported, each with exact arithmetic means, exact
antiderivatives and exact extrema:

* :class:`Constant`  ``c``
* :class:`Cosine`    ``a + b cos(2 pi (t - phase) / T)``
* :class:`SquareWave` ``high`` on a fraction ``duty`` of each period starting
  at ``phase``, ``low`` elsewhere
* :class:`Sampled`   piecewise constant on ``m`` uniform cells starting at ``phase``

Geometric means ``exp(<log u>)`` are exact for all four families; a value that
vanishes on a set of positive measure gives exactly ``0``.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import config
from .errors import InvalidInputError

TWO_PI = 2.0 * math.pi


def _check_period(period):
    if not (math.isfinite(period) and period > 0):
        raise InvalidInputError(f"period must be a positive finite number, got {period!r}")


def _check_finite(name, *values):
    for v in values:
        if not math.isfinite(v):
            raise InvalidInputError(f"{name} parameters must be finite, got {v!r}")


class PeriodicScalar:
    """Base class for a real T-periodic function of time."""

    period: float
    piecewise_constant = False

    def __call__(self, t):
        raise NotImplementedError

    def integral(self, t0, t1):
        """Exact integral over [t0, t1] (vectorized over arrays)."""
        return self.primitive(t1) - self.primitive(t0)

    def primitive(self, t):
        raise NotImplementedError

    def mean(self):
        raise NotImplementedError

    def log_mean(self):
        """Time average of ``log u``; ``-inf`` when ``u`` vanishes on positive measure."""
        raise NotImplementedError

    def minimum(self):
        raise NotImplementedError

    def maximum(self):
        raise NotImplementedError

    def breakpoints(self):
        """Discontinuity times in [0, T), sorted."""
        return np.empty(0)

    def shifted(self, s):
        """The function ``t -> u(t + s)``."""
        raise NotImplementedError

    def scaled(self, c):
        raise NotImplementedError

    def plus(self, c):
        raise NotImplementedError

    def is_constant(self):
        return self.minimum() == self.maximum()


@dataclass(frozen=True)
class Constant(PeriodicScalar):
    value: float
    period: float = 1.0

    def __post_init__(self):
        _check_period(self.period)
        _check_finite("constant", self.value)

    def __call__(self, t):
        return np.full(np.shape(t), float(self.value)) if np.ndim(t) else float(self.value)

    def primitive(self, t):
        return self.value * np.asarray(t, dtype=float)

    def mean(self):
        return float(self.value)

    def log_mean(self):
        if self.value < 0:
            raise InvalidInputError("log-mean of a negative coefficient")
        return math.log(self.value) if self.value > 0 else -math.inf

    def minimum(self):
        return float(self.value)

    def maximum(self):
        return float(self.value)

    def shifted(self, s):
        return self

    def scaled(self, c):
        return Constant(self.value * c, self.period)

    def plus(self, c):
        return Constant(self.value + c, self.period)


@dataclass(frozen=True)
class Cosine(PeriodicScalar):
    offset: float
    amplitude: float
    phase: float = 0.0
    period: float = 1.0

    def __post_init__(self):
        _check_period(self.period)
        _check_finite("cosine", self.offset, self.amplitude, self.phase)

    def _theta(self, t):
        return TWO_PI * (np.asarray(t, dtype=float) - self.phase) / self.period

    def __call__(self, t):
        return self.offset + self.amplitude * np.cos(self._theta(t))

    def primitive(self, t):
        t = np.asarray(t, dtype=float)
        return self.offset * t + self.amplitude * self.period / TWO_PI * np.sin(self._theta(t))

    def mean(self):
        return float(self.offset)

    def log_mean(self):
        # <log(a + b cos)> = log((a + sqrt(a^2 - b^2)) / 2) for a >= |b|
        a, b = self.offset, abs(self.amplitude)
        if a - b < 0:
            raise InvalidInputError("log-mean of a coefficient taking negative values")
        if a == 0:
            return -math.inf
        return math.log(0.5 * (a + math.sqrt((a - b) * (a + b))))

    def minimum(self):
        return self.offset - abs(self.amplitude)

    def maximum(self):
        return self.offset + abs(self.amplitude)

    def shifted(self, s):
        return Cosine(self.offset, self.amplitude, self.phase - s, self.period)

    def scaled(self, c):
        return Cosine(self.offset * c, self.amplitude * c, self.phase, self.period)

    def plus(self, c):
        return Cosine(self.offset + c, self.amplitude, self.phase, self.period)


@dataclass(frozen=True)
class SquareWave(PeriodicScalar):
    low: float
    high: float
    duty: float
    phase: float = 0.0
    period: float = 1.0
    piecewise_constant = True

    def __post_init__(self):
        _check_period(self.period)
        _check_finite("square wave", self.low, self.high, self.duty, self.phase)
        if not 0.0 < self.duty < 1.0:
            raise InvalidInputError(f"square wave duty fraction must lie in (0, 1), got {self.duty!r}")

    def _frac(self, t):
        tau = (np.asarray(t, dtype=float) - self.phase) / self.period
        return tau - np.floor(tau), np.floor(tau)

    def __call__(self, t):
        f, _ = self._frac(t)
        return np.where(f < self.duty, self.high, self.low) + 0.0

    def primitive(self, t):
        f, whole = self._frac(t)
        per_period = self.duty * self.high + (1.0 - self.duty) * self.low
        part = self.high * np.minimum(f, self.duty) + self.low * np.maximum(f - self.duty, 0.0)
        return self.period * (whole * per_period + part)

    def mean(self):
        return self.duty * self.high + (1.0 - self.duty) * self.low

    def log_mean(self):
        if min(self.low, self.high) < 0:
            raise InvalidInputError("log-mean of a coefficient taking negative values")
        if self.low == 0 or self.high == 0:
            return -math.inf
        return self.duty * math.log(self.high) + (1.0 - self.duty) * math.log(self.low)

    def minimum(self):
        return float(min(self.low, self.high))

    def maximum(self):
        return float(max(self.low, self.high))

    def breakpoints(self):
        pts = np.array([self.phase, self.phase + self.duty * self.period]) % self.period
        return np.unique(pts)

    def shifted(self, s):
        return SquareWave(self.low, self.high, self.duty, self.phase - s, self.period)

    def scaled(self, c):
        return SquareWave(self.low * c, self.high * c, self.duty, self.phase, self.period)

    def plus(self, c):
        return SquareWave(self.low + c, self.high + c, self.duty, self.phase, self.period)


@dataclass(frozen=True, eq=False)
class Sampled(PeriodicScalar):
    values: tuple
    phase: float = 0.0
    period: float = 1.0
    piecewise_constant = True

    def __post_init__(self):
        _check_period(self.period)
        vals = tuple(float(v) for v in np.ravel(self.values))
        if len(vals) < 1:
            raise InvalidInputError("sampled coefficient needs at least one sample")
        _check_finite("sampled", *vals, self.phase)
        object.__setattr__(self, "values", vals)
        arr = np.array(vals)
        object.__setattr__(self, "_arr", arr)
        object.__setattr__(self, "_cum", np.concatenate([[0.0], np.cumsum(arr)]))

    def __eq__(self, other):
        return (
            isinstance(other, Sampled)
            and self.values == other.values
            and self.phase == other.phase
            and self.period == other.period
        )

    def __hash__(self):
        return hash((self.values, self.phase, self.period))

    def _cell(self, t):
        m = len(self.values)
        tau = (np.asarray(t, dtype=float) - self.phase) / self.period
        whole = np.floor(tau)
        pos = (tau - whole) * m
        k = np.minimum(np.floor(pos).astype(int), m - 1)
        return k, pos, whole

    def __call__(self, t):
        k, _, _ = self._cell(t)
        out = self._arr[k]
        return out if np.ndim(out) else float(out)

    def primitive(self, t):
        m = len(self.values)
        k, pos, whole = self._cell(t)
        part = self._cum[k] + (pos - k) * self._arr[k]
        return self.period * (whole * self._cum[-1] + part) / m

    def mean(self):
        return float(np.mean(self._arr))

    def log_mean(self):
        if np.any(self._arr < 0):
            raise InvalidInputError("log-mean of a coefficient taking negative values")
        if np.any(self._arr == 0):
            return -math.inf
        return float(np.mean(np.log(self._arr)))

    def minimum(self):
        return float(self._arr.min())

    def maximum(self):
        return float(self._arr.max())

    def breakpoints(self):
        m = len(self.values)
        if m == 1:
            return np.empty(0)
        pts = (self.phase + self.period * np.arange(m) / m) % self.period
        return np.unique(pts)

    def shifted(self, s):
        return Sampled(self.values, self.phase - s, self.period)

    def scaled(self, c):
        return Sampled(tuple(v * c for v in self.values), self.phase, self.period)

    def plus(self, c):
        return Sampled(tuple(v + c for v in self.values), self.phase, self.period)


def arith_mean(u):
    """(1/T) * integral of u over one period."""
    return u.mean()


def geom_mean(u):
    """exp of the time average of log u; exactly 0 when that average is -inf."""
    if u.minimum() < 0:
        raise InvalidInputError(f"geometric mean needs a nonnegative coefficient, minimum is {u.minimum()!r}")
    lm = u.log_mean()
    return 0.0 if lm == -math.inf else math.exp(lm)


def shifted_geom_mean(u):
    """Geometric mean of ``u - c`` plus ``c`` with ``c = min(0, min u)``.

    Used when a geometric average is requested for a coefficient that may be
    negative (diagonal entries of a Metzler system).  Never exceeds the
    arithmetic mean.
    """
    c = min(0.0, u.minimum())
    if c == 0:
        return geom_mean(u)
    # a few ulps of slack so the shifted minimum cannot round below zero
    c -= 8 * np.finfo(float).eps * max(1.0, abs(c), abs(u.maximum()))
    return geom_mean(u.plus(-c)) + c


def log_mean_quadrature(u, panels=config.QUAD_PANELS):
    """Composite-midpoint estimate of <log u> (independent of the closed forms)."""
    t = (np.arange(panels) + 0.5) * u.period / panels
    vals = np.asarray(u(t), dtype=float)
    if np.any(vals < 0):
        raise InvalidInputError("log-mean of a coefficient taking negative values")
    with np.errstate(divide="ignore"):
        return float(np.mean(np.log(vals)))


@dataclass(frozen=True, eq=False)
class PeriodicMatrix:
    """Square matrix of periodic coefficients sharing one period, Metzler for a.e. t."""

    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.entries)
        n = len(rows)
        if n < 1 or any(len(r) != n for r in rows):
            raise InvalidInputError("periodic matrix entries must form a nonempty square array")
        period = rows[0][0].period
        for i, row in enumerate(rows):
            for j, u in enumerate(row):
                if not isinstance(u, PeriodicScalar):
                    raise InvalidInputError(f"entry [{i}][{j}] is not a periodic coefficient")
                if not math.isclose(u.period, period, rel_tol=1e-12):
                    raise InvalidInputError(f"entry [{i}][{j}] has period {u.period!r}, expected {period!r}")
                if i != j and u.minimum() < 0:
                    raise InvalidInputError(
                        f"off-diagonal entry [{i}][{j}] takes negative values (minimum {u.minimum()!r})"
                    )
        object.__setattr__(self, "entries", rows)

    def __eq__(self, other):
        return isinstance(other, PeriodicMatrix) and self.entries == other.entries

    @property
    def dim(self):
        return len(self.entries)

    @property
    def period(self):
        return self.entries[0][0].period

    def __call__(self, t):
        """Matrix values at times ``t``; shape ``t.shape + (d, d)``."""
        t = np.asarray(t, dtype=float)
        out = np.empty(t.shape + (self.dim, self.dim))
        for i, row in enumerate(self.entries):
            for j, u in enumerate(row):
                out[..., i, j] = u(t)
        return out

    def breakpoints(self):
        pts = [u.breakpoints() for row in self.entries for u in row]
        pts = np.concatenate(pts) if pts else np.empty(0)
        return np.unique(pts)

    def shifted(self, s):
        return PeriodicMatrix(tuple(tuple(u.shifted(s) for u in row) for row in self.entries))

    def is_constant(self):
        return all(u.is_constant() for row in self.entries for u in row)


@dataclass(frozen=True, eq=False)
class PeriodicMatrixSeq:
    """p-periodic sequence A(0), ..., A(p-1) of nonnegative matrices."""

    matrices: tuple

    def __post_init__(self):
        mats = tuple(np.array(m, dtype=float) for m in self.matrices)
        if len(mats) < 1:
            raise InvalidInputError("matrix sequence needs period p >= 1")
        shape = mats[0].shape
        for k, m in enumerate(mats):
            if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
                raise InvalidInputError(f"matrix {k} is not a nonempty square matrix")
            if m.shape != shape:
                raise InvalidInputError(f"matrix {k} has shape {m.shape}, expected {shape}")
            if not np.all(np.isfinite(m)):
                raise InvalidInputError(f"matrix {k} has NaN or infinite entries")
            if np.any(m < 0):
                i, j = np.argwhere(m < 0)[0]
                raise InvalidInputError(f"matrix {k} has negative entry [{i}][{j}]")
            m.setflags(write=False)
        object.__setattr__(self, "matrices", mats)

    def __eq__(self, other):
        return (
            isinstance(other, PeriodicMatrixSeq)
            and len(self.matrices) == len(other.matrices)
            and all(np.array_equal(a, b) for a, b in zip(self.matrices, other.matrices))
        )

    @property
    def dim(self):
        return self.matrices[0].shape[0]

    @property
    def period(self):
        return len(self.matrices)

    def rotated(self, k=1):
        k %= self.period
        return PeriodicMatrixSeq(self.matrices[k:] + self.matrices[:k])


SCHEMES = ("paper", "arithmetic", "geometric")


def _check_scheme(scheme):
    if scheme not in SCHEMES:
        raise InvalidInputError(f"unknown averaging scheme {scheme!r}; expected one of {SCHEMES}")


def average_matrix_ode(a, scheme="paper"):
    """Constant Metzler matrix from time averages of a periodic matrix.

    ``paper``: arithmetic mean on the diagonal, geometric mean off it.
    ``arithmetic``: arithmetic mean everywhere.
    ``geometric``: geometric mean everywhere (diagonal via :func:`shifted_geom_mean`).
    """
    _check_scheme(scheme)
    n = a.dim
    out = np.empty((n, n))
    for i, row in enumerate(a.entries):
        for j, u in enumerate(row):
            if i == j:
                out[i, j] = shifted_geom_mean(u) if scheme == "geometric" else arith_mean(u)
            else:
                out[i, j] = arith_mean(u) if scheme == "arithmetic" else geom_mean(u)
    return out


def average_matrix_discrete(seq, scheme="paper"):
    """Entrywise geometric mean over one period (``arithmetic`` for the contrast scheme).

    Factors are sorted before summing so the result is bit-identical under
    any reordering of the sequence.
    """
    _check_scheme(scheme)
    stack = np.sort(np.stack(seq.matrices), axis=0)
    if seq.period == 1:
        return stack[0].copy()
    if scheme == "arithmetic":
        return stack.mean(axis=0)
    with np.errstate(divide="ignore"):
        logs = np.log(stack)
    out = np.exp(logs.mean(axis=0))
    out[np.any(stack == 0, axis=0)] = 0.0
    return out
