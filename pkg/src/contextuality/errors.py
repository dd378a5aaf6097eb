"""Exception hierarchy shared by all modules."""


class ContextualityError(Exception):
    """Base class for errors raised by this package."""


class DimensionMismatchError(ContextualityError, ValueError):
    pass


class NotOrthonormalError(ContextualityError, ValueError):
    pass


class DependentVectorsError(ContextualityError, ValueError):
    pass


class ZeroVectorError(ContextualityError, ValueError):
    pass


class NotSelfAdjointError(ContextualityError, ValueError):
    pass


class SpectralError(ContextualityError, ArithmeticError):
    """Eigen-solver failure or an unacceptable reconstruction residual."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class NonCommutingError(ContextualityError, ValueError):
    def __init__(self, i: int, j: int, commutator_norm: float):
        super().__init__(
            f"operators {i} and {j} do not commute "
            f"(max |[A_{i}, A_{j}]| = {commutator_norm:.3e})"
        )
        self.pair = (i, j)
        self.commutator_norm = commutator_norm


class NotMaximalError(ContextualityError, ValueError):
    pass


class OutsideContextError(ContextualityError, ValueError):
    """Operator is not a linear combination of the context's projectors."""


class MalformedProblemError(ContextualityError, ValueError):
    pass


class IncompleteAssignmentError(ContextualityError, ValueError):
    pass


class NotUnitaryError(ContextualityError, ValueError):
    pass


class RaySetFormatError(ContextualityError, ValueError):
    pass


class ParallelRayWarning(UserWarning):
    """Two input rays span the same line and were merged."""
