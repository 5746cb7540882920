"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A model, grid or run configuration violates a documented bound."""


class NonConvergenceError(RuntimeError):
    """An iterative numerical procedure exhausted its budget."""
