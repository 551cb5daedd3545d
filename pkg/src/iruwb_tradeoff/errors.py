"""Exception types raised across the package."""


class ConfigError(ValueError):
    """A configuration violates one of its invariants."""


class UnsupportedConfiguration(ValueError):
    """No closed-form (or simulation) path exists for the requested setup."""
