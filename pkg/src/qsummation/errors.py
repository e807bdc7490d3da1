"""Exception hierarchy shared by all evaluators."""


class QSumError(Exception):
    """Base class for every numerical error raised by the library."""

    kind = "QSumError"

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = context


class DomainError(QSumError, ValueError):
    """Input outside the documented domain of an operation."""

    kind = "DomainError"


class ZeroArgument(DomainError):
    """A function was evaluated at the excluded point 0."""

    kind = "ZeroArgument"


class PoleAt(QSumError, ArithmeticError):
    """Evaluation point lies on (or too close to) a pole."""

    kind = "PoleAt"

    def __init__(self, message, pole=None, **context):
        super().__init__(message, pole=pole, **context)
        self.pole = pole


class PoleOnPath(QSumError, ArithmeticError):
    """An integration ray or spiral passes through a singularity."""

    kind = "PoleOnPath"


class NonConvergent(QSumError, ArithmeticError):
    """A series or quadrature did not reach its tolerance within budget.

    The best partial value, when one exists, is attached as ``partial``.
    """

    kind = "NonConvergent"

    def __init__(self, message, partial=None, **context):
        super().__init__(message, partial=partial, **context)
        self.partial = partial
