"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Input shape does not match the penalty's domain."""


class UnsupportedPenaltyError(ValueError):
    """Requested operation has no tractable form for this penalty kind."""


class ContractViolationError(ValueError):
    """A caller-side consistency requirement was violated beyond tolerance."""


class InfeasibleError(ValueError):
    """The requested constraint set is empty."""


class ConvergenceError(RuntimeError):
    """Iterative solver exhausted its iteration budget."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class NumericError(RuntimeError):
    """A numerical kernel (factorization, SVD) failed; carries diagnostics."""
