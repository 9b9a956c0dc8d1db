"""Exception types raised by the library."""


class InvalidInputError(ValueError):
    """Input violates a documented precondition (sign, shape, NaN, ...)."""


class IntegrationError(RuntimeError):
    """Time integration produced a non-finite or sign-violating state."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class DegenerateModelError(RuntimeError):
    """The model has no usable growth rate (mass underflow, empty bracket)."""


class AssumptionError(RuntimeError):
    """A cell-cycle model fails the boundedness / product-bound assumptions."""
