"""Exception hierarchy shared by every module of the package."""


class CrwError(Exception):
    """Base class for all package errors."""


class IndeterminateForm(CrwError, ArithmeticError):
    """An extended-real operation met two opposite (or equal) infinities."""

    def __init__(self, message, site=None):
        super().__init__(message if site is None else f"{message} (site {site})")
        self.site = site


class LengthMismatch(CrwError, ValueError):
    pass


class NonPositiveValue(CrwError, ValueError):
    def __init__(self, message, site=None):
        super().__init__(message if site is None else f"{message} (site {site})")
        self.site = site


class OutOfRange(CrwError, ValueError):
    def __init__(self, message, site=None):
        super().__init__(message if site is None else f"{message} (site {site})")
        self.site = site


class NonBinary(CrwError, ValueError):
    pass


class RNotFinite(CrwError, ValueError):
    pass


class InvariantViolation(CrwError):
    """A state contradicting a proved bound; always an implementation fault."""

    def __init__(self, message, context=None):
        super().__init__(message)
        self.context = context or {}


class OverflowGuard(CrwError, FloatingPointError):
    pass


class ConfigError(CrwError, ValueError):
    pass


class InsufficientData(CrwError):
    pass
