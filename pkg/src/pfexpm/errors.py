"""Exception hierarchy shared across the package."""


class PfexpmError(Exception):
    """Base class for all package-specific errors."""


class OrderOutOfRange(PfexpmError, ValueError):
    """Approximation order n is not an even integer in the supported range."""


class IterationLimitExceeded(PfexpmError, RuntimeError):
    """Root refinement failed to reach the residual target."""


class InvariantViolation(PfexpmError):
    """A validated structural invariant does not hold.

    `check` names the failed invariant; `detail` carries the offending values.
    """

    def __init__(self, check: str, detail: str = ""):
        self.check = check
        self.detail = detail
        super().__init__(f"{check}: {detail}" if detail else check)


class ParseError(PfexpmError, ValueError):
    """A table file or CLI argument is syntactically malformed."""


class PoleHit(PfexpmError, ZeroDivisionError):
    """Evaluation point coincides with (or underflows at) a pole."""


class ConditionViolated(PfexpmError, ValueError):
    """The digit-model applicability condition gamma > n*10^(1-D) fails."""


class SingularSystem(PfexpmError, RuntimeError):
    """A shifted linear system was reported singular by the factorization."""


class ConvergenceFailure(PfexpmError, RuntimeError):
    """The eigensolver did not converge."""


class OrderTooSmall(PfexpmError, ValueError):
    """n <= 2*rho(A): the spectral a priori bound is not applicable."""


class Overflow(PfexpmError, OverflowError):
    """A requested shift would overflow exp(c) in binary64."""


class BadSpec(PfexpmError, ValueError):
    """A matrix or benchmark specification is inconsistent."""


class OrderTooSmallWarning(UserWarning):
    """n <= 2*rho(A) on a run that proceeds anyway: no certified bound."""
