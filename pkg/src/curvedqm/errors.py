"""Exception types shared across the package."""


class CurvedQMError(Exception):
    """Base class for all package errors."""


class DomainError(CurvedQMError):
    """Coordinate outside the open physical domain."""


class AdmissibilityError(CurvedQMError):
    """Quantum number or parameter set violates a normalizability bound."""


class DegenerateParameterError(CurvedQMError):
    """A polynomial recurrence hit an exactly zero denominator."""


class ComplexLeakError(CurvedQMError):
    """A nominally real evaluation produced a non-negligible imaginary part."""


class UnsupportedExtensionError(CurvedQMError):
    """The requested construction is not defined for this extension type."""


class NonConvergenceError(CurvedQMError):
    """A numerical routine failed its internal convergence check."""
