"""Exception types raised across the toolkit."""


class MeanValueError(Exception):
    """Base class for all toolkit errors."""


class DomainError(MeanValueError, ValueError):
    """An argument lies outside the valid domain of a potential or operation."""


class BracketError(MeanValueError, ValueError):
    """No sign change was found where one was required."""


class DegenerateFieldError(MeanValueError, ValueError):
    """A normalising quantity (a norm of the field or its gradient) vanishes."""


class CoverageError(MeanValueError, ValueError):
    """Sampled data does not span the grid."""


class PositivityError(MeanValueError, ValueError):
    """A field that must be nonnegative is not."""


class NotReachedError(MeanValueError, ValueError):
    """A threshold was not attained within the available data."""


class ConfigError(MeanValueError, ValueError):
    """An invalid run configuration. ``path`` names the offending field."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
