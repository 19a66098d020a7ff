"""Exception hierarchy shared across the package.

The CLI maps each class to a distinct exit code, so raising the right
type matters more than the message wording.
"""


class TvareffError(Exception):
    """Base class for all package-specific failures."""


class ConfigError(TvareffError):
    """Invalid or inconsistent run configuration."""


class DataError(TvareffError):
    """Input data cannot be ingested or is unusable for the request."""


class NumericalError(TvareffError):
    """A numerical procedure failed (singular system, bootstrap abort, ...)."""


class ValidationError(TvareffError):
    """A self-check battery reported at least one failing check."""
