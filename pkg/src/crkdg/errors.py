"""Exception hierarchy shared by all solver modules."""


class CRKDGError(Exception):
    """Base class for every error raised by the package."""


class ParameterError(CRKDGError, ValueError):
    """An argument is outside the supported range."""


class ConfigurationError(CRKDGError, ValueError):
    """Inconsistent solver/scenario configuration (unknown tag, bad key, ...)."""


class NumericError(CRKDGError, ArithmeticError):
    """Non-finite values or a failed iterative solve."""

    def __init__(self, message, cell=None):
        super().__init__(message if cell is None else f"{message} (cell {cell})")
        self.cell = cell


class AdmissibilityError(NumericError):
    """A state left the physically admissible set (e.g. negative density)."""

    def __init__(self, message, state=None, cell=None, stage=None):
        parts = [message]
        if stage is not None:
            parts.append(f"stage {stage}")
        if state is not None:
            parts.append(f"state {state!r}")
        super().__init__(", ".join(parts), cell=cell)
        self.state = state
        self.stage = stage


class DomainError(CRKDGError, ValueError):
    """An oracle was queried outside the range where it is valid."""


class AnalysisError(CRKDGError, RuntimeError):
    """Stability analysis found no stable CFL number."""
