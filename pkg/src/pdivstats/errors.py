"""Exception types shared across the package."""


class PdivError(Exception):
    """Base class for package errors."""


class InvalidSpec(PdivError, ValueError):
    """An experiment or operation was given parameters outside its domain."""


class BudgetExceeded(PdivError):
    """An exhaustive enumeration would exceed its configured budget."""


class NonPositiveGap(InvalidSpec):
    """The empirical proportion does not exceed the heuristic value."""
