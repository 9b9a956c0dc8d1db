"""Result record for a periodic-versus-averaged growth rate comparison."""
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Comparison:
    lambda_per: float
    lambda_s: float
    gap: float
    passed: bool
    tolerance: float
    artificial_loss: np.ndarray = field(default=None)

    @classmethod
    def of(cls, lambda_per, lambda_s, tolerance, **extra):
        gap = float(lambda_per) - float(lambda_s)
        return cls(float(lambda_per), float(lambda_s), gap, bool(gap >= -tolerance), float(tolerance), **extra)
