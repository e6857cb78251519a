"""Exception types shared across the package."""


class AccuracyError(RuntimeError):
    """A quadrature budget cannot certify the requested tolerance."""


class ConfigError(ValueError):
    """A run configuration key is missing, unknown, or out of range."""


class InputError(ValueError):
    """An input file cannot be parsed."""
