"""Parameter tuples of the generalized hypergeometric equation."""

import warnings
from dataclasses import dataclass

from .errors import AssumptionViolated, ReducibleWarning

INTEGER_TOL = 1e-6


def integer_distance(z):
    """Distance from complex ``z`` to the nearest integer."""
    z = complex(z)
    return abs(z - round(z.real))


@dataclass(frozen=True)
class ParameterSet:
    """alpha = (alpha_1..alpha_n) and beta = (beta_1..beta_{n-1}).

    ``beta_n`` is derived from alpha_1 + ... + alpha_n = beta_1 + ... + beta_n.
    Construction only normalises types; call :meth:`require_nonresonant`
    before building local bases.
    """

    alpha: tuple
    beta: tuple

    def __post_init__(self):
        alpha = tuple(complex(a) for a in self.alpha)
        beta = tuple(complex(b) for b in self.beta)
        if len(alpha) < 2:
            raise ValueError("need n >= 2 numerator parameters")
        if len(beta) != len(alpha) - 1:
            raise ValueError(f"beta must have n-1 = {len(alpha) - 1} entries, got {len(beta)}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def n(self):
        return len(self.alpha)

    @property
    def beta_n(self):
        return sum(self.alpha) - sum(self.beta)

    @property
    def beta_full(self):
        """(beta_1, ..., beta_{n-1}, beta_n)."""
        return self.beta + (self.beta_n,)

    def shifted(self, i):
        """Parameters (alpha_i; beta_i) of the i-th local solution at 0.

        Every entry moves by 1 - beta_i and the i-th beta slot becomes
        2 - beta_i.  ``shifted(0)`` is the set itself.
        """
        if i == 0:
            return self
        if not 1 <= i <= self.n - 1:
            raise ValueError(f"shift index must lie in [1, {self.n - 1}], got {i}")
        bi = self.beta[i - 1]
        alpha = tuple(a + 1 - bi for a in self.alpha)
        beta = tuple(2 - bi if k == i - 1 else b + 1 - bi for k, b in enumerate(self.beta))
        return ParameterSet(alpha, beta)

    def exponents_at_zero(self):
        return (0j,) + tuple(1 - b for b in self.beta)

    def exponents_at_one(self):
        return tuple(complex(k) for k in range(self.n - 1)) + (-self.beta_n,)

    def resonance_violations(self, tol=INTEGER_TOL):
        """Human-readable list of broken non-resonance conditions."""
        full = self.beta_full
        out = []
        for i, b in enumerate(full, start=1):
            if integer_distance(b) < tol:
                out.append(f"beta_{i} = {_fmt(b)} is an integer")
        for i in range(len(full)):
            for j in range(i + 1, len(full)):
                if integer_distance(full[i] - full[j]) < tol:
                    out.append(f"beta_{i + 1} - beta_{j + 1} = {_fmt(full[i] - full[j])} is an integer")
        return out

    def require_nonresonant(self, tol=INTEGER_TOL):
        """Raise AssumptionViolated unless beta_i and beta_i - beta_j are non-integers."""
        bad = self.resonance_violations(tol)
        if bad:
            raise AssumptionViolated(
                "non-resonance assumption violated (beta_i and beta_i - beta_j must not be "
                "integers): " + "; ".join(bad))
        reducible = [f"alpha_{i + 1}" for i, a in enumerate(self.alpha) if integer_distance(a) < tol]
        reducible += [f"alpha_{i + 1} - beta_{j + 1}"
                      for i, a in enumerate(self.alpha)
                      for j, b in enumerate(self.beta) if integer_distance(a - b) < tol]
        if reducible:
            warnings.warn("equation is reducible: integer " + ", ".join(reducible),
                          ReducibleWarning, stacklevel=2)
        return self

    def theorem_margin(self):
        """-n + 2 - Re beta_n; positive when the closed-form connection matrix applies."""
        return -self.n + 2 - self.beta_n.real


def _fmt(z):
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:g}"
    return f"{z.real:g}{z.imag:+g}j"
