"""Error types raised by the time-change library."""


class TimeChangeError(Exception):
    """Base class for every error raised by the library"""


class DomainError(TimeChangeError, ValueError):
    """Argument outside the domain of the operation"""


class RangeError(TimeChangeError, ValueError):
    """Value outside the range of a variance function"""


class ValidationError(TimeChangeError, ValueError):
    """Malformed input record (weights, breakpoints, configs)"""


class StateError(TimeChangeError):
    """Object used before it was fully built"""


class PreconditionError(TimeChangeError):
    """Operation not defined for this kind of input"""


class ResourceError(TimeChangeError):
    """Request exceeds a size or depth limit"""


class NumericalError(TimeChangeError):
    """Numerical method failed to converge or factorize"""


class InternalError(TimeChangeError):
    """Inconsistent intermediate result (catalog bug)"""


class ResolutionError(TimeChangeError):
    """Grid too coarse for the requested dyadic level"""


class FitError(TimeChangeError):
    """Not enough scales for a regression"""


class DegeneratePathError(TimeChangeError):
    """Path carries no information at the requested scales"""


class OutputError(TimeChangeError, OSError):
    """Report or dump could not be written"""
