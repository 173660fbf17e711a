"""Exception hierarchy for the gpcp package."""


class GpcpError(Exception):
    """Base class for all package errors."""


class DimensionError(GpcpError, ValueError):
    """Vector or tensor dimensions do not agree."""


class ProjectionUnsupported(GpcpError):
    """The cone has no projection algorithm (halfspace representation)."""


class UnsupportedCone(GpcpError):
    """The operation is only defined for the nonnegative orthant."""


class OddOrderError(GpcpError, ValueError):
    """Positive definiteness was queried for an odd-order tensor."""


class EmptySolutionEstimate(GpcpError):
    """An error-bound scan needs at least one known solution point."""


class NotASolution(GpcpError):
    """The supplied base point is not a solution of the problem."""


class ParseError(GpcpError):
    """A problem file is not well-formed JSON."""


class ValidationError(GpcpError):
    """A problem file parsed but violates the schema."""
