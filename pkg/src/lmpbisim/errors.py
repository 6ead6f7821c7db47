"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class LmpError(Exception):
    """Base class for all library errors."""


class ParseError(LmpError):
    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ScopeError(ParseError):
    """``eps>=q`` used inside the scope of a diamond."""


class InvariantError(LmpError):
    pass


class UnknownState(LmpError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnknownAction(LmpError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class DimensionMismatch(LmpError, ValueError):
    pass


class MassExceeded(LmpError, ValueError):
    pass


class ExactModeRequired(LmpError):
    pass


class InvalidDiscount(LmpError, ValueError):
    pass


class BudgetExhausted(LmpError):
    """Raised when a bound cannot be tightened within the exploration budget.

    ``bounds`` holds the partial result reached before giving up.
    """

    def __init__(self, message, bounds):
        super().__init__(message)
        self.bounds = bounds


class ActionMismatch(LmpError, ValueError):
    pass


class SizeLimit(LmpError):
    pass


class StateCapExceeded(SizeLimit):
    pass


class TheoremViolation(LmpError, AssertionError):
    """A property that must hold by theory was refuted; indicates a bug."""


class UnsupportedFragment(LmpError, ValueError):
    pass


class InvalidGrid(LmpError, ValueError):
    pass


class InvalidDepth(LmpError, ValueError):
    pass
