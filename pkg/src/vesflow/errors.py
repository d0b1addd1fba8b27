"""Exception types raised by the solver and its I/O layer."""


class VesflowError(Exception):
    """Base class for all package-specific errors."""


class IncompatibleRhs(VesflowError):
    """Poisson right-hand side has a nonzero mean beyond tolerance."""


class UnsupportedOrder(VesflowError):
    """Requested Sobolev-norm order is not available."""


class NonFiniteState(VesflowError):
    """A stepper produced NaN or Inf values (time step too large)."""


class CflViolation(VesflowError):
    """Explicit diffusion stability bound dt <= h^2/(4 nu) violated."""


class InvariantViolation(VesflowError):
    """A structural invariant (mean-zero phase, no-slip walls) failed."""


class NotConverged(VesflowError):
    """Iteration hit its budget before reaching tolerance."""

    def __init__(self, iterations, residual):
        super().__init__(
            f"not converged after {iterations} iterations (residual {residual:.3e})"
        )
        self.iterations = iterations
        self.residual = residual


class InsufficientTail(VesflowError):
    """Too few usable samples for the decay-exponent fit."""


class ConfigError(VesflowError):
    """Base class for configuration problems."""


class ParseError(ConfigError):
    """Configuration file is not well-formed JSON."""


class ValidationError(ConfigError):
    """Configuration violates a documented constraint."""

    def __init__(self, constraint, value=None):
        msg = constraint if value is None else f"{constraint} (got {value})"
        super().__init__(msg)
        self.constraint = constraint
        self.value = value


class IoError(VesflowError):
    """Failure writing or reading a persistent output."""
