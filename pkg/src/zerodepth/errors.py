"""Exception hierarchy shared by every module of the package."""


class ZeroDepthError(Exception):
    """Base class for all package errors."""


class DomainError(ZeroDepthError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class CapabilityError(ZeroDepthError):
    """The object cannot provide the requested derivative or evaluator."""


class EvaluationError(ZeroDepthError, ArithmeticError):
    """A user-supplied evaluator returned non-finite values."""


class PrecisionError(ZeroDepthError, ArithmeticError):
    """A quadrature tail could not be controlled within the tolerance budget.

    ``bound`` carries the achieved bound when one is available.
    """

    def __init__(self, msg, bound=None):
        super().__init__(msg)
        self.bound = bound


class ConsistencyError(ZeroDepthError, ArithmeticError):
    """Two independent formulas for the same quantity disagree."""


class ConditionError(ZeroDepthError):
    """A structural hypothesis (sign, convexity, monotonicity) is violated."""


class OutOfRangeError(ZeroDepthError, ValueError):
    """A Legendre abscissa s is outside the range covered by the profile."""


class ConvergenceError(ZeroDepthError, ArithmeticError):
    """An iterative procedure did not converge."""


class RefusalError(ZeroDepthError):
    """A pipeline refused to run because its input failed a diagnostic.

    ``report`` carries the :class:`~zerodepth.weights.ConditionReport`.
    """

    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


class DataFormatError(ZeroDepthError, ValueError):
    """An input file (sequence, majorant table, config) could not be parsed."""
