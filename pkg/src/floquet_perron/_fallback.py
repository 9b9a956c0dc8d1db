"""Pure numpy versions of the compiled kernels (same signatures, same results)."""
import numpy as np


def _step_propagators(stages, h):
    """One-step RK4 propagators P_n, so that X_{n+1} = P_n X_n for a linear ODE."""
    a0, a1, a2 = stages[:, 0], stages[:, 1], stages[:, 2]
    d = stages.shape[-1]
    eye = np.eye(d)
    hh = h[:, None, None]
    k1 = a0
    k2 = a1 @ (eye + 0.5 * hh * k1)
    k3 = a1 @ (eye + 0.5 * hh * k2)
    k4 = a2 @ (eye + hh * k3)
    return eye + hh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _ordered_product(props):
    """P_{N-1} ... P_1 P_0 by pairwise (tree) reduction."""
    while props.shape[0] > 1:
        if props.shape[0] % 2:
            tail = props[-1:]
            props = props[:-1]
        else:
            tail = None
        props = props[1::2] @ props[0::2]
        if tail is not None:
            props = np.concatenate([props, tail])
    return props[0]


def rk4_propagate(stages, h, x0):
    """See :func:`floquet_perron._kernels.rk4_propagate`."""
    stages = np.asarray(stages, dtype=float)
    h = np.asarray(h, dtype=float)
    x0 = np.array(x0, dtype=float)
    if stages.shape[0] == 0:
        return x0, -1
    with np.errstate(over="ignore", invalid="ignore"):
        props = _step_propagators(stages, h)
        bad = ~np.all(np.isfinite(props), axis=(1, 2))
        if bad.any():
            return x0, int(np.argmax(bad))
        out = _ordered_product(props) @ x0
    if np.all(np.isfinite(out)):
        return out, -1
    x = x0
    with np.errstate(over="ignore", invalid="ignore"):
        for k, p in enumerate(props):
            x = p @ x
            if not np.all(np.isfinite(x)):
                return x, k
    return x, -1


def transport_steps(n, loss_cls, loss_fac, bnd_cls, bnd_w, mult, s0, nsteps, mass_out, dx):
    """See :func:`floquet_perron._kernels.transport_steps`."""
    nph, nx = n.shape
    period = loss_fac.shape[0]
    rows = np.arange(nph)[:, None]
    src = np.roll(np.arange(nph), 1)
    for step in range(nsteps):
        row = (s0 + step) % period
        n[:, 1:] = n[:, :-1] * loss_fac[row][rows, loss_cls]
        w = bnd_w[row][rows, bnd_cls]
        inner = np.sum(n[:, 1:] * w[:, 1:], axis=1)[src]
        w0 = w[src, 0]
        alpha, beta = 0.0, 1.0
        for i in range(1, nph):
            alpha = mult[i] * (inner[i] + w0[i] * alpha)
            beta = mult[i] * w0[i] * beta
        denom = 1.0 - mult[0] * w0[0] * beta
        if not denom > 0.0:
            return step
        b = mult[0] * (inner[0] + w0[0] * alpha) / denom
        n[0, 0] = b
        for i in range(1, nph):
            b = mult[i] * (inner[i] + w0[i] * b)
            n[i, 0] = b
        mass_out[step] = dx * float(np.sum(n[:, 1:-1]) + 0.5 * np.sum(n[:, 0] + n[:, -1]))
    return -1
