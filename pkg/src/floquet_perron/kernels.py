"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy fallback.
Setting ``FLOQUET_PERRON_PURE=1`` forces the fallback.
"""
import os

from . import _fallback

PURE_ENV_VAR = "FLOQUET_PERRON_PURE"

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _fallback}
if _compiled is not None:
    _BACKENDS["cython"] = _compiled

if os.environ.get(PURE_ENV_VAR, "") not in ("", "0") or _compiled is None:
    BACKEND = "python"
else:
    BACKEND = "cython"


def available():
    return tuple(sorted(_BACKENDS))


def get(name=None):
    """Kernel module for ``name`` (default: the active backend)."""
    return _BACKENDS[name or BACKEND]


def rk4_propagate(stages, h, x0, backend=None):
    return get(backend).rk4_propagate(stages, h, x0)


def transport_steps(n, loss_cls, loss_fac, bnd_cls, bnd_w, mult, s0, nsteps, mass_out, dx, backend=None):
    return get(backend).transport_steps(n, loss_cls, loss_fac, bnd_cls, bnd_w, mult, s0, nsteps, mass_out, dx)
