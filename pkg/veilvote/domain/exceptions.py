"""
Error hierarchy for veilvote.

Precondition failures subclass ValueError so callers that only know the
standard library can still catch them.
"""


class VeilvoteError(Exception):
    """Base class for all veilvote errors."""


class ParameterError(VeilvoteError, ValueError):
    """A numeric parameter is outside its admissible range."""


class UsageError(VeilvoteError, ValueError):
    """An operation was invoked in a state where it is undefined."""


class ConsistencyError(VeilvoteError, ValueError):
    """Inputs disagree with each other (lengths, dimensions, counts)."""


class ConfigError(VeilvoteError, ValueError):
    """A run configuration is invalid or references missing files."""


class DegenerateModelWarning(UserWarning):
    """A model was fitted on data containing a single class."""
