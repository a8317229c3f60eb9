"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`GeometryError`, so the CLI can map families of failures to exit codes.
"""


class GeometryError(Exception):
    """Base class for all package errors."""


class InvalidInputError(GeometryError, ValueError):
    """Malformed or out-of-domain input (bad semiaxes, zero samples, ...)."""


class NumericDomainError(GeometryError, ArithmeticError):
    """An oracle produced a non-finite value where a finite one is required."""


class PreconditionError(GeometryError):
    """The input is well formed but violates a mathematical hypothesis."""


class NotRBallConvexError(PreconditionError):
    """Some principal curvature lies below 1/R (or below the curvature of L)."""


class DivergentIntegralError(PreconditionError):
    """A reciprocal-quadratic sphere integral has a non-positive coefficient."""


class HullInfeasibleError(PreconditionError):
    """No R-ball contains the body."""


class InfeasibleCutError(PreconditionError):
    """No ball on the inward normal line cuts off the requested volume."""


class EmptyBodyError(PreconditionError):
    """The requested set is empty (e.g. convolution body with delta > vol K)."""


class ReportIOError(GeometryError, OSError):
    """A report could not be written."""


class NotLConvexError(PreconditionError):
    """Some curvature of K lies below the matching curvature of L."""
