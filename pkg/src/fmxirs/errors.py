"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid static configuration (units, frequencies, filter settings, config files)."""


class PreconditionError(ValueError):
    """A runtime precondition on the data was violated (e.g. non-integer projection window)."""
