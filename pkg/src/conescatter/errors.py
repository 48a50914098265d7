"""Exception and warning types raised across the package."""


class ConeScatterError(Exception):
    """Base class for all library errors."""


class InvalidParams(ConeScatterError, ValueError):
    """Physical inputs violate their invariants."""


class DomainError(ConeScatterError, ValueError):
    """A formula is evaluated outside the set where it is defined."""


class EvanescentMode(DomainError):
    """eta_l**2 <= 0: the channel has no propagating radial solution."""


class RegimeViolation(DomainError):
    """Small-frequency approximation requested with varpi > 0.05 * E."""


class NonConvergence(ConeScatterError, ArithmeticError):
    """A series or recurrence did not reach the requested tolerance."""


class QuadratureFailure(ConeScatterError, ArithmeticError):
    """Adaptive quadrature exhausted its subdivision budget."""


class ForwardSingularity(DomainError):
    """Full scattered-wave integrand evaluated exactly at delta_theta = +-q*pi."""


class NearForwardSingularity(DomainError):
    """Generic amplitude requested inside the forward guard band."""


class FitIllConditioned(ConeScatterError, ArithmeticError):
    """Asymptotic fit residual exceeds half of the fitted signal."""


class TruncationWarning(UserWarning):
    """Last retained partial wave is larger than the requested tolerance."""


class DomainWarning(UserWarning):
    """A result lies outside the interval where its derivation holds."""
