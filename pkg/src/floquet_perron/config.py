"""Numerical defaults shared by the library and the command line.

The comparison tolerance for the ODE and discrete checks can be overridden with
``FLOQUET_PERRON_TOL``; the cell-cycle tolerance with ``FLOQUET_PERRON_TOL_PDE``.
"""
import os

TOL_ENV_VAR = "FLOQUET_PERRON_TOL"
TOL_PDE_ENV_VAR = "FLOQUET_PERRON_TOL_PDE"

PERRON_TOL = 1e-10
PERRON_MAX_ITER = 100_000

ODE_STEPS = 2048
MIN_ODE_STEPS = 16
NEG_CLAMP = 1e-12

# composite midpoint panels for log-integrals without a closed form
QUAD_PANELS = 4096
# time grid used for min/max over a period in the assumption check
ASSUMPTION_TIME_GRID = 256

TOL_COMPARE = 1e-6
TOL_COMPARE_DISCRETE = 1e-9
TOL_COMPARE_PDE = 5e-3

PDE_STEPS_PER_PERIOD = 200
PDE_WARMUP_PERIODS = 10
PDE_MEASURE_PERIODS = 10
PDE_XMAX_FACTOR = 20.0
BISECT_TOL = 1e-12
# period-map power iteration counts as converged below this change
PDE_RESIDUAL_TOL = 1e-6


def _env_tolerance(name, default):
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    value = float(raw)
    if not value >= 0.0:
        raise ValueError(f"{name} must be a nonnegative number, got {raw!r}")
    return value


def compare_tolerance(default=TOL_COMPARE):
    """Comparison tolerance, honouring the environment override."""
    return _env_tolerance(TOL_ENV_VAR, default)


def compare_tolerance_pde(default=TOL_COMPARE_PDE):
    """Cell-cycle comparison tolerance, honouring ``FLOQUET_PERRON_TOL_PDE``."""
    return _env_tolerance(TOL_PDE_ENV_VAR, default)
