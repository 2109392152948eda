"""Exceptions raised by qdist."""


class QdistError(Exception):
    """Base class for every error raised by the library."""


class FieldError(QdistError):
    """Invalid field parameters or an undefined field operation (inverse of zero)."""


class DimensionError(QdistError):
    """Points or sets whose dimensions do not fit the requested operation."""


class UnsupportedCase(QdistError):
    """A construction was requested outside the cases where it exists."""


class ConfigError(QdistError):
    """Malformed, unknown or missing configuration values."""


class CapExceeded(QdistError):
    """A computation would exceed one of the resource caps in qdist.config."""

    def __init__(self, what, value, limit):
        self.what = what
        self.value = value
        self.limit = limit
        super().__init__(f"{what} = {value} exceeds the cap {limit}")

    def __reduce__(self):
        return type(self), (self.what, self.value, self.limit)


def check_cap(what, value, limit):
    """Raise CapExceeded when value > limit."""
    if value > limit:
        raise CapExceeded(what, value, limit)


class InvalidInput(QdistError, ValueError):
    """An argument outside the domain of the requested operation."""
