"""Exception types raised by the library.

Every error carries a short message; the CLI maps the classes onto exit codes.
"""


class HeisQCError(Exception):
    """Base class for all library errors."""


class AxisPoint(HeisQCError, ValueError):
    """The projection onto the half-plane is undefined on the vertical axis."""


class DegenerateCurve(HeisQCError, ValueError):
    pass


class DomainEscape(HeisQCError, ValueError):
    pass


class UnsupportedDomain(HeisQCError, TypeError):
    pass


class UnknownFamily(HeisQCError, KeyError):
    pass


class UnknownName(HeisQCError, KeyError):
    pass


class DegenerateDerivative(HeisQCError, ArithmeticError):
    pass


class BoundaryTooClose(HeisQCError, ValueError):
    pass


class BadModuli(HeisQCError, ValueError):
    pass


class BadProfile(HeisQCError, ValueError):
    pass


class NoSolution(HeisQCError, RuntimeError):
    """The boundary-profile problem has no admissible solution."""

    def __init__(self, message, mismatch=None):
        super().__init__(message)
        self.mismatch = mismatch


class NonUnique(HeisQCError, RuntimeError):
    def __init__(self, message, anchors=()):
        super().__init__(message)
        self.anchors = tuple(anchors)


class PathInconsistent(HeisQCError, RuntimeError):
    pass


class ChartInversion(HeisQCError, RuntimeError):
    pass
