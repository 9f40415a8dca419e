"""Exception types shared across the package."""


class OutOfRangeError(ValueError):
    """An argument lies beyond a precomputed table or a validated window."""


class ResourceLimitError(RuntimeError):
    """A computation would exceed a configured memory or enumeration cap."""


class DomainError(ValueError):
    """Input is well formed but violates a mathematical precondition."""


class AccuracyError(ArithmeticError):
    """A numerical routine cannot meet its certified accuracy budget.

    ``required`` carries the parameter value that would have been needed.
    """

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required
