"""Exception types shared across the package."""


class NumericFailure(RuntimeError):
    """An iterative numeric routine failed to converge or produced garbage."""


class DivergenceError(NumericFailure):
    """An optimizer run blew up (loss exceeded the divergence guard)."""

    def __init__(self, message: str, iteration: int):
        super().__init__(message)
        self.iteration = iteration


class ConfigError(ValueError):
    """A run configuration failed validation."""
