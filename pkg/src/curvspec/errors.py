"""Exception hierarchy shared by all curvspec modules."""


class CurvspecError(Exception):
    """Base class for every error raised by curvspec."""


class InputError(CurvspecError, ValueError):
    """Malformed user input (bad expression, unknown name, bad parameter)."""


class NumericalError(CurvspecError, ArithmeticError):
    """A computation could not be carried out at the requested point."""


class ExpressionSyntaxError(InputError):
    def __init__(self, message: str, position: int, source: str = ""):
        self.position = position
        self.source = source
        super().__init__(f"{message} at offset {position}")


class UnknownIdentifier(InputError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown identifier {name!r}")


class DomainError(NumericalError):
    """A real-valued function was evaluated outside its domain."""


class SingularPoint(NumericalError):
    """The metric is degenerate or non-finite at the requested point."""


class DegeneratePlane(NumericalError):
    """Two vectors do not span a 2-plane."""


class DegeneratePencil(NumericalError):
    """The pair-index metric matrix is singular."""


class DegenerateMetric(NumericalError):
    pass


class WrongDimension(InputError):
    pass


class UnknownCase(InputError):
    pass


class BadParams(InputError):
    pass
