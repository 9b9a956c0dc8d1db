"""Discrete-time periodic systems lambda X(k+1) = A(k) X(k)."""
from functools import reduce

import numpy as np

from . import config
from .coefficients import PeriodicMatrixSeq, average_matrix_discrete
from .comparison import Comparison
from .errors import InvalidInputError
from .spectral import EigenReport, perron_nonneg


def period_product(seq):
    """A(p-1) @ ... @ A(1) @ A(0)."""
    if not isinstance(seq, PeriodicMatrixSeq):
        raise InvalidInputError("period_product needs a PeriodicMatrixSeq")
    return reduce(lambda acc, m: m @ acc, seq.matrices[1:], seq.matrices[0].copy())


def floquet_discrete(seq, tol=config.PERRON_TOL, max_iter=config.PERRON_MAX_ITER):
    """lambda_per = rho(period product) ** (1/p); eigenvector is X(0)."""
    rep = perron_nonneg(period_product(seq), tol, max_iter)
    lam = max(rep.eigenvalue, 0.0) ** (1.0 / seq.period)
    return EigenReport(lam, rep.eigenvector, rep.residual, rep.iterations, rep.converged)


def theorem2_compare(seq, tol=None, scheme="paper"):
    tol = config.compare_tolerance(config.TOL_COMPARE_DISCRETE) if tol is None else tol
    lam_per = floquet_discrete(seq).eigenvalue
    lam_s = perron_nonneg(average_matrix_discrete(seq, scheme)).eigenvalue
    return Comparison.of(lam_per, lam_s, tol)


def eigen_orbit(seq, report):
    """The p-periodic orbit X(0), ..., X(p) generated from the Perron vector (X(p) = X(0))."""
    lam = report.eigenvalue
    xs = [np.asarray(report.eigenvector, dtype=float)]
    for m in seq.matrices:
        nxt = m @ xs[-1]
        xs.append(nxt / lam if lam > 0 else nxt)
    return np.array(xs)
