"""Exception types raised across the package."""


class HPRatesError(Exception):
    """Base class for all errors raised by hprates."""


class ParameterDomainError(HPRatesError, ValueError):
    """An input violates a stated precondition (e.g. ``1 < A < B``)."""


class BranchCutError(HPRatesError, ValueError):
    """A point lies on a cut where the requested branch is undefined."""


class PrecisionExhaustedError(HPRatesError, ArithmeticError):
    """The working precision is insufficient for the requested accuracy."""


class RankDeficiencyError(HPRatesError, ArithmeticError):
    """A linear system is singular at working precision and no fallback applies."""


class NonConvergenceError(HPRatesError, RuntimeError):
    """An iterative method failed to converge within its iteration cap."""


class NegativeDensityError(HPRatesError, ArithmeticError):
    """An equilibrium solve produced a density that is not strictly positive."""


class IdentityViolationError(HPRatesError, AssertionError):
    """A potential-theoretic identity failed; carries the worst residual."""

    def __init__(self, name, residual, location):
        self.name = name
        self.residual = residual
        self.location = location
        super().__init__(f"{name} violated: residual {residual:.3e} at z={location}")


class KindMismatchError(HPRatesError, TypeError):
    """An operation was applied to a result of the wrong kind."""


class PoleProximityError(HPRatesError, ArithmeticError):
    """The evaluation point is too close to a zero of the denominator."""


class SamplingResolutionError(HPRatesError, RuntimeError):
    """A sampling grid is too coarse to resolve the oscillations it counts."""
