"""Exception types shared by every module."""


class BCError(Exception):
    """Base class for all package errors."""


class ParameterDomainError(BCError, ValueError):
    """Parameters outside the admissible domain (rank, multiplicities, nu, ...)."""


class IntegrityError(BCError):
    """An exact computation produced an impossible intermediate state.

    Raised for non-exact divisions, failed Weyl invariance and similar
    conditions that signal an implementation bug rather than bad input.
    """

    def __init__(self, message, remainder=None, element=None):
        super().__init__(message)
        self.remainder = remainder
        self.element = element


class PoleError(BCError, ArithmeticError):
    def __init__(self, message, factor=None):
        super().__init__(message)
        self.factor = factor


class ConditioningError(BCError):
    """Gram matrix numerically singular."""


class CutoffError(BCError):
    def __init__(self, message, suggested=None):
        super().__init__(message)
        self.suggested = suggested


class DivergenceError(BCError):
    pass


class ConfigError(BCError):
    def __init__(self, message, line=None, key=None):
        super().__init__(message)
        self.line = line
        self.key = key
