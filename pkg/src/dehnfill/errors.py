"""Exception hierarchy shared by the numerical modules and the CLI."""


class DehnFillError(Exception):
    """Base class for every error raised by this package."""


class DomainError(DehnFillError, ValueError):
    """Input lies outside the region where the computation is defined."""


class CompleteStructureError(DomainError):
    """Raised for c = 0, the complete (euclidean) structure."""


class DegenerateLevelError(DomainError):
    """Raised for the point level s = 0 or levels too close to 1."""


class WindowError(DomainError):
    """Packing window would leave the floating point range."""


class NumericError(DehnFillError, ArithmeticError):
    """A root finder failed; carries diagnostics for the failing input.

    Attributes
    ----------
    diagnostics : dict
        Whatever the failing routine found useful (brackets, grids, counts).
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics
