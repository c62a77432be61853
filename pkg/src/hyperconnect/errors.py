"""Exception and warning types raised by hyperconnect."""


class HyperconnectError(Exception):
    """Base class for all library errors."""


class PoleError(HyperconnectError, ValueError):
    """A gamma-type argument sits (numerically) on a non-positive integer."""

    def __init__(self, message, *, argument=None, index=None, location=None):
        super().__init__(message)
        self.argument = argument
        self.index = index
        self.location = location


class AssumptionViolated(HyperconnectError, ValueError):
    """Non-resonance requirement on beta failed (beta_i or beta_i - beta_j integer)."""


class TheoremHypothesisViolated(HyperconnectError, ValueError):
    """Re beta_n < -n + 2 does not hold, so the closed-form connection matrix is unavailable."""


class NoConvergence(HyperconnectError, ArithmeticError):
    """A series failed to reach its stopping criterion within the term cap."""


class DivergentAtOne(HyperconnectError, ArithmeticError):
    """The series at unit argument diverges (convergence margin s <= 0)."""


class ResonanceInconsistency(HyperconnectError, ArithmeticError):
    """A resonant order of the Frobenius recurrence is not consistent."""


class OutOfDomain(HyperconnectError, ValueError):
    """Point outside the disk of convergence of a local expansion."""


class BranchAmbiguity(HyperconnectError, ValueError):
    """Point lies on the branch cut of a non-integer power."""


class SingularD(HyperconnectError, ArithmeticError):
    """A diagonal entry of the D matrix vanishes."""


class DenominatorHit(HyperconnectError, ArithmeticError):
    """A denominator of the coefficient asymptotic formula vanishes."""


class IllConditioned(HyperconnectError, ArithmeticError):
    """The pointwise oracle system is too ill-conditioned to trust."""

    def __init__(self, message, condition_number=None):
        super().__init__(message)
        self.condition_number = condition_number


class SlowConvergence(UserWarning):
    """Series at unit argument converges with a small margin."""


class ReducibleWarning(UserWarning):
    """Parameters fall in a reducible case (alpha_i or alpha_i - beta_j integer)."""
