# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: RK4 fundamental-matrix stepping and age transport."""
import numpy as np
cimport numpy as cnp
from libc.math cimport isfinite

cnp.import_array()


def rk4_propagate(const double[:, :, :, ::1] stages, const double[::1] h, x0):
    """Integrate X' = A(t) X with classical RK4.

    ``stages[n]`` holds A at the start, midpoint and end of step ``n``.
    Returns ``(X, failed_step)`` with ``failed_step = -1`` on success.
    """
    cdef Py_ssize_t nsteps = stages.shape[0]
    cdef Py_ssize_t d = stages.shape[2]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] xa = np.array(x0, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t k = xa.shape[1]
    cdef double[:, ::1] x = xa
    cdef double[:, ::1] k1 = np.empty((d, k))
    cdef double[:, ::1] k2 = np.empty((d, k))
    cdef double[:, ::1] k3 = np.empty((d, k))
    cdef double[:, ::1] k4 = np.empty((d, k))
    cdef double[:, ::1] y = np.empty((d, k))
    cdef Py_ssize_t n, i, j, c
    cdef double hh, acc, sixth
    for n in range(nsteps):
        hh = h[n]
        # k1 = A0 x
        for i in range(d):
            for c in range(k):
                acc = 0.0
                for j in range(d):
                    acc += stages[n, 0, i, j] * x[j, c]
                k1[i, c] = acc
        for i in range(d):
            for c in range(k):
                y[i, c] = x[i, c] + 0.5 * hh * k1[i, c]
        for i in range(d):
            for c in range(k):
                acc = 0.0
                for j in range(d):
                    acc += stages[n, 1, i, j] * y[j, c]
                k2[i, c] = acc
        for i in range(d):
            for c in range(k):
                y[i, c] = x[i, c] + 0.5 * hh * k2[i, c]
        for i in range(d):
            for c in range(k):
                acc = 0.0
                for j in range(d):
                    acc += stages[n, 1, i, j] * y[j, c]
                k3[i, c] = acc
        for i in range(d):
            for c in range(k):
                y[i, c] = x[i, c] + hh * k3[i, c]
        for i in range(d):
            for c in range(k):
                acc = 0.0
                for j in range(d):
                    acc += stages[n, 2, i, j] * y[j, c]
                k4[i, c] = acc
        sixth = hh / 6.0
        for i in range(d):
            for c in range(k):
                x[i, c] += sixth * (k1[i, c] + 2.0 * k2[i, c] + 2.0 * k3[i, c] + k4[i, c])
                if not isfinite(x[i, c]):
                    return xa, n
    return xa, -1


def transport_steps(double[:, ::1] n,
                    const int[:, ::1] loss_cls, const double[:, :, ::1] loss_fac,
                    const int[:, ::1] bnd_cls, const double[:, :, ::1] bnd_w,
                    const double[::1] mult, Py_ssize_t s0, Py_ssize_t nsteps,
                    double[::1] mass_out, double dx):
    """Advance age densities ``n`` (phases x ages) in place by ``nsteps`` steps.

    Step ``s`` uses row ``(s0 + s) % S`` of the loss-factor and boundary-weight
    tables.  Returns the failing step index or ``-1``.
    """
    cdef Py_ssize_t nph = n.shape[0]
    cdef Py_ssize_t nx = n.shape[1]
    cdef Py_ssize_t period = loss_fac.shape[0]
    cdef Py_ssize_t step, row, i, j, src
    cdef double[::1] inner = np.empty(nph)
    cdef double[::1] w0 = np.empty(nph)
    cdef double acc, alpha, beta, denom, b0, b, mass
    for step in range(nsteps):
        row = (s0 + step) % period
        for i in range(nph):
            for j in range(nx - 1, 0, -1):
                n[i, j] = n[i, j - 1] * loss_fac[row, i, loss_cls[i, j - 1]]
        # inflow of phase i is the outflow integral of phase i - 1
        for i in range(nph):
            src = i - 1 if i > 0 else nph - 1
            acc = 0.0
            for j in range(1, nx):
                acc += n[src, j] * bnd_w[row, src, bnd_cls[src, j]]
            inner[i] = acc
            w0[i] = bnd_w[row, src, bnd_cls[src, 0]]
        # b_i = mult_i (inner_i + w0_i b_{i-1}); write b_i = alpha + beta b_0
        alpha = 0.0
        beta = 1.0
        for i in range(1, nph):
            alpha = mult[i] * (inner[i] + w0[i] * alpha)
            beta = mult[i] * w0[i] * beta
        denom = 1.0 - mult[0] * w0[0] * beta
        if not denom > 0.0:
            return step
        b0 = mult[0] * (inner[0] + w0[0] * alpha) / denom
        n[0, 0] = b0
        b = b0
        for i in range(1, nph):
            b = mult[i] * (inner[i] + w0[i] * b)
            n[i, 0] = b
        mass = 0.0
        for i in range(nph):
            acc = 0.5 * (n[i, 0] + n[i, nx - 1])
            for j in range(1, nx - 1):
                acc += n[i, j]
            mass += acc
        mass_out[step] = mass * dx
    return -1
