"""Exception types shared across the package.

Plain ``ValueError`` is raised for usage errors (bad arguments, wrong call);
the classes below mark conditions a caller may want to dispatch on.  The CLI
maps them to exit codes: usage -> 2, numerical failure / geometry -> 3,
domain -> 4.
"""


class EntrosymError(Exception):
    """Base class for package-specific failures."""


class DomainError(EntrosymError):
    """Input outside the mathematical domain of the requested operation."""


class MalformedSpectrumError(ValueError):
    """Root multiset violates its structural invariants (e.g. not
    closed under conjugation)."""


class DegenerateSpectrumError(DomainError):
    """Repeated roots where a formula requires simple roots."""


class NumericalFailure(EntrosymError):
    """An iterative engine failed to meet its tolerance.

    Carries the best value and the error estimate at the point of failure.
    """

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class GeometryError(NumericalFailure):
    """No admissible integration contour exists for the given spectrum."""
