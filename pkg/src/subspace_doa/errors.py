"""Exception hierarchy shared across the package."""


class SubspaceDoaError(Exception):
    """Base class for all errors raised by this package."""


class ContractError(SubspaceDoaError, ValueError):
    """An argument violates an operation's precondition."""


class DomainError(ContractError):
    """A scalar argument lies outside its admissible domain (e.g. an angle)."""


class ConfigError(SubspaceDoaError, ValueError):
    """A configuration is malformed or infeasible."""


class NumericError(SubspaceDoaError, ArithmeticError):
    """A computation produced non-finite or otherwise unusable values."""


class EstimationFailure(NumericError):
    """Root-MUSIC could not produce the requested number of angles.

    Attributes:
        diagnostics: dict with the roots examined and the admissible count.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class TrainingDiverged(NumericError):
    """Training hit a non-finite loss."""

    def __init__(self, message, batch_index=None, param_norms=None):
        super().__init__(message)
        self.batch_index = batch_index
        self.param_norms = param_norms or []


class FileFormatError(SubspaceDoaError, OSError):
    """A dataset or checkpoint file is truncated, corrupt, or of the wrong kind."""
