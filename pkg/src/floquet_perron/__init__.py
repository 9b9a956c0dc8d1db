"""Floquet growth rates of periodic positive systems compared with averaged Perron eigenvalues.

Three system classes are covered: monotone periodic ODEs, periodic sequences of
nonnegative matrices and an age-structured cell-cycle model with periodic
coefficients.  In each case the periodic growth rate ``lambda_per`` is compared
with the Perron eigenvalue ``lambda_s`` of a suitably time-averaged problem.
"""
__version__ = "0.1.0"

from .cellcycle import (
    AgeTimeCoefficient,
    CellCycleModel,
    PopulationState,
    averaged_perron_rate,
    check_assumptions,
    floquet_growth_rate,
    simulate_growth,
    step_transport,
    theorem3_compare,
)
from .coefficients import (
    Constant,
    Cosine,
    PeriodicMatrix,
    PeriodicMatrixSeq,
    Sampled,
    SquareWave,
    arith_mean,
    average_matrix_discrete,
    average_matrix_ode,
    geom_mean,
)
from .comparison import Comparison
from .errors import AssumptionError, DegenerateModelError, IntegrationError, InvalidInputError
from .floquet_discrete import floquet_discrete, period_product, theorem2_compare
from .floquet_ode import floquet_eigenfunction, integrate_fundamental, theorem1_compare
from .kernels import BACKEND
from .lab import SweepConfig, gen_periodic_matrix, run_sweep
from .spectral import (
    EigenReport,
    collatz_wielandt_lower,
    collatz_wielandt_upper,
    is_irreducible,
    perron_metzler,
    perron_nonneg,
)

__all__ = [
    "AgeTimeCoefficient",
    "AssumptionError",
    "BACKEND",
    "CellCycleModel",
    "Comparison",
    "Constant",
    "Cosine",
    "DegenerateModelError",
    "EigenReport",
    "IntegrationError",
    "InvalidInputError",
    "PeriodicMatrix",
    "PeriodicMatrixSeq",
    "PopulationState",
    "Sampled",
    "SquareWave",
    "SweepConfig",
    "arith_mean",
    "average_matrix_discrete",
    "average_matrix_ode",
    "averaged_perron_rate",
    "check_assumptions",
    "collatz_wielandt_lower",
    "collatz_wielandt_upper",
    "floquet_discrete",
    "floquet_eigenfunction",
    "floquet_growth_rate",
    "gen_periodic_matrix",
    "geom_mean",
    "integrate_fundamental",
    "is_irreducible",
    "period_product",
    "perron_metzler",
    "perron_nonneg",
    "run_sweep",
    "simulate_growth",
    "step_transport",
    "theorem1_compare",
    "theorem2_compare",
    "theorem3_compare",
]
