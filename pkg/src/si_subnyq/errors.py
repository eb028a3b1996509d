"""Exception types shared across the library."""


class SiSubnyqError(Exception):
    """Base class for all library errors."""


class DimensionError(SiSubnyqError):
    """Operands disagree on grid length, period, channel count, or alias support."""


class InvalidInputError(SiSubnyqError):
    """Input violates a documented precondition."""


class SingularOperatorError(SiSubnyqError):
    """A per-frequency operator is numerically singular.

    The message names the offending grid point; ``grid_index`` carries it
    programmatically.
    """

    def __init__(self, message: str, grid_index: int | None = None):
        super().__init__(message)
        self.grid_index = grid_index


class InfeasibleError(SiSubnyqError):
    """No support within the sparsity budget fits the measurements."""

    def __init__(self, message: str, best_residual: float | None = None,
                 best_support: frozenset[int] | None = None):
        super().__init__(message)
        self.best_residual = best_residual
        self.best_support = best_support


class ConfigError(SiSubnyqError):
    """An experiment configuration is malformed; the message names the field."""
