"""Exception hierarchy shared by every module."""


class ExtremeOrderError(Exception):
    """Base class for all package errors."""


class InvalidInput(ExtremeOrderError, ValueError):
    """An argument violates a documented precondition."""


class EvaluationError(ExtremeOrderError, ArithmeticError):
    """A function could not be evaluated to a finite value."""


class BracketError(ExtremeOrderError, ValueError):
    """A root-finding bracket does not contain a sign change."""


class QuadratureError(ExtremeOrderError, ArithmeticError):
    """Adaptive quadrature failed to meet its tolerance."""


class CapError(ExtremeOrderError, ArithmeticError):
    """Generator inverse requested below the probability floor ``U_MIN``."""


class ScenarioError(ExtremeOrderError, ValueError):
    """A scenario document could not be parsed or validated.

    ``line`` is the 1-based source line when known, ``field`` the dotted
    path of the offending entry.
    """

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if field:
            prefix.append(field)
        super().__init__(": ".join(prefix + [message]) if prefix else message)
