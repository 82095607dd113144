"""Exception types shared across the package."""


class InvalidInput(ValueError):
    """Argument violates a documented precondition."""


class NotSquarefree(InvalidInput):
    pass


class NotFullRank(InvalidInput):
    pass


class UnsupportedDegree(InvalidInput):
    pass


class MissingInvariants(LookupError):
    """Order invariants are required but were not supplied (degree >= 3)."""


class PrecisionError(ArithmeticError):
    """Root isolation could not be certified within the precision cap."""


class BudgetExceeded(RuntimeError):
    """Projected enumeration size is above the configured node budget."""

    def __init__(self, projected, budget):
        super().__init__(f"projected {projected:.3g} nodes exceeds budget {budget:.3g}")
        self.projected = projected
        self.budget = budget


class ConsistencyError(AssertionError):
    """Two independent computations of the same quantity disagree."""
