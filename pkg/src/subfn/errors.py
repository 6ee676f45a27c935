"""Exception hierarchy shared by all modules."""


class SubfnError(Exception):
    """Base class for every error raised by :mod:`subfn`."""


class DomainError(SubfnError, ValueError):
    """A scalar argument lies outside the admissible range."""


class DimensionError(SubfnError, ValueError):
    """Two collections that must correspond positionally differ in length."""


class ShapeError(SubfnError, ValueError):
    """State vectors or operators have incompatible shapes or kinds."""


class ParseError(SubfnError, ValueError):
    """An input file or serialized object could not be read or validated."""


class ConvergenceError(SubfnError, ArithmeticError):
    """A quadrature did not reach its tolerance at maximal refinement."""


class QuadratureFailure(ConvergenceError):
    """The contour quadrature produced a clearly negative density."""


class DiscretizationError(ConvergenceError):
    """A discretized measure violated its mass bracket."""
