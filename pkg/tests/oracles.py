"""Reference computations that share no code with the library."""
from fractions import Fraction

import numpy as np
import scipy.linalg
import sympy


def charpoly_fractions(a):
    """Characteristic polynomial coefficients (leading 1 first) by Faddeev-LeVerrier in exact arithmetic."""
    n = len(a)
    a = [[x if isinstance(x, Fraction) else Fraction(float(x)) for x in row] for row in a]
    coeffs = [Fraction(1)]
    m = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{k-1} I ; c_k = -tr(A M_k) / k
        am = [[sum(a[i][t] * m[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        m = [[am[i][j] + (coeffs[-1] if i == j else 0) for j in range(n)] for i in range(n)]
        amk = [[sum(a[i][t] * m[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        coeffs.append(-sum(amk[i][i] for i in range(n)) / k)
    return coeffs


def fraction_product(mats):
    """A(p-1) ... A(0) in exact rational arithmetic."""
    n = len(mats[0])
    acc = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for m in mats:
        m = [[Fraction(float(x)) for x in row] for row in m]
        acc = [[sum(m[i][t] * acc[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
    return acc


def rightmost_real_root(a):
    """Largest real eigenvalue via exact real-root isolation of the characteristic polynomial."""
    x = sympy.Symbol("x")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in charpoly_fractions(a)], x)
    roots = poly.real_roots()
    return max(float(r.evalf(30)) for r in roots)


def root_scan(a, points=20001):
    """Dense sign-change scan of det(xI - A) refined by bisection; returns the rightmost simple real root."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    bound = np.max(np.sum(np.abs(a), axis=1)) + 1.0
    xs = np.linspace(-bound, bound, points)
    det = np.array([np.linalg.det(x * np.eye(n) - a) for x in xs])
    idx = np.nonzero(np.sign(det[:-1]) * np.sign(det[1:]) <= 0)[0]
    if idx.size == 0:
        return None
    lo, hi = xs[idx[-1]], xs[idx[-1] + 1]
    f = lambda x: np.linalg.det(x * np.eye(n) - a)
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if np.sign(fm) == np.sign(flo) and fm != 0:
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def expm_growth(cells, h, periods=200):
    """Growth rate from exact piecewise-constant propagation.

    ``cells`` is a list of constant matrices, each held for time ``h``.  The
    state is renormalized each period; the rate is the log growth between the
    halfway point and the end divided by the elapsed time, which removes the
    transient offset.
    """
    step = np.eye(cells[0].shape[0])
    for c in cells:
        step = scipy.linalg.expm(c * h) @ step
    x = np.ones(step.shape[0])
    logs = [0.0]
    for _ in range(periods):
        x = step @ x
        s = np.abs(x).sum()
        logs.append(logs[-1] + np.log(s))
        x /= s
    t_period = h * len(cells)
    half = periods // 2
    return (logs[-1] - logs[half]) / ((periods - half) * t_period)


def renewal_rate_constant(ks, ds=None):
    """Growth rate of the constant cyclic renewal model 2 prod K_i / (lam + K_i + d_i) = 1 by bisection."""
    ds = ds or [0.0] * len(ks)
    f = lambda lam: 2.0 * np.prod([k / (lam + k + d) for k, d in zip(ks, ds)]) - 1.0
    lo = -min(k + d for k, d in zip(ks, ds)) + 1e-12
    hi = 10.0 * (max(ks) + 1)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
