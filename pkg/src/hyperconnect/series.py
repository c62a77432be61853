"""The series nFn-1 inside the unit disk and at x = 1.

At unit argument the terms decay only like m**(-1-s) with the convergence
margin s = -Re(beta_n) - shift, so plain truncation is useless for small s.
``evaluate_at_one`` therefore sums a few hundred terms directly and adds the
remainder from the large-m expansion of the term, t_m ~ C m**(-sigma) *
sum_k e_k m**(-k), whose tail sums are Hurwitz zeta values.  The pure
truncation route (``tail="raabe"``) is kept as an independent check.
"""

import cmath
import math
import os
import threading
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .complexfn import bernoulli_poly, hurwitz_zeta, pole_distance
from .errors import DivergentAtOne, NoConvergence, OutOfDomain, PoleError, SlowConvergence
from .params import integer_distance

EPS = np.finfo(float).eps
DISK_MAX_TERMS = 10**4
ONE_MAX_TERMS = 10**6
SLOW_MARGIN = 0.1
_ASYMPTOTIC_ORDER = 12


def max_terms_default(at_one):
    """Term cap, overridable through ``HYPERCONNECT_MAX_TERMS``."""
    env = os.environ.get("HYPERCONNECT_MAX_TERMS")
    if env:
        return int(env)
    return ONE_MAX_TERMS if at_one else DISK_MAX_TERMS


@dataclass(frozen=True)
class SeriesValue:
    value: complex
    tail_bound: float
    terms_used: int

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        object.__setattr__(self, "tail_bound", float(self.tail_bound))
        if not self.tail_bound >= 0:
            raise ValueError("tail_bound must be non-negative")
        if self.terms_used < 1:
            raise ValueError("terms_used must be >= 1")


def _check_denominators(beta):
    for j, b in enumerate(beta):
        if pole_distance(b) < 1e-8:
            raise PoleError(f"denominator parameter beta_{j + 1} = {b!r} is a non-positive integer",
                            argument=complex(b), index=j)


def _terminating_length(alpha):
    """Number of nonzero terms if some alpha is a non-positive integer, else None."""
    lengths = [1 - int(round(a.real)) for a in alpha
               if a.real < 0.5 and integer_distance(a) < 1e-12]
    return min(lengths) if lengths else None


class CoefficientStream:
    """Cached coefficients a_m = (alpha)_m / ((beta)_m m!) of nFn-1.

    The cache only grows; extension is serialised by a lock so several
    readers can share a stream.
    """

    def __init__(self, alpha, beta):
        self.alpha = np.asarray(alpha, dtype=np.complex128)
        self.beta = np.asarray(beta, dtype=np.complex128)
        _check_denominators(self.beta)
        self._cache = np.ones(1, dtype=np.complex128)
        self._lock = threading.Lock()

    @classmethod
    def from_params(cls, params, shift=0):
        return cls(np.asarray(params.alpha) + shift, np.asarray(params.beta) + shift)

    def __len__(self):
        return self._cache.shape[0]

    def _extend(self, m):
        with self._lock:
            have = self._cache.shape[0]
            if have > m:
                return
            want = max(m + 1, 2 * have)
            fresh = kernels.hyp_coefficients(self.alpha, self.beta, have - 1, self._cache[-1], want - have + 1)
            self._cache = np.concatenate([self._cache, fresh[1:]])

    def coeff(self, m):
        if m < 0:
            raise ValueError("m must be non-negative")
        if m >= self._cache.shape[0]:
            self._extend(m)
        return complex(self._cache[m])

    def coefficients(self, m):
        """Array a_0 .. a_m (a copy)."""
        if m >= self._cache.shape[0]:
            self._extend(m)
        return self._cache[:m + 1].copy()


def coeff_a(stream, m):
    return stream.coeff(m)


def evaluate_nFn1(params, shift, x, tol=1e-16, max_terms=None, chunk=64):
    """nFn-1(alpha + shift; beta + shift; x) for |x| < 1.

    Terms are accumulated in chunks until the last term and a geometric model
    of the remainder both drop below ``tol`` relative to the partial sum.
    """
    x = complex(x)
    alpha = np.asarray(params.alpha, dtype=np.complex128) + shift
    beta = np.asarray(params.beta, dtype=np.complex128) + shift
    _check_denominators(beta)
    if abs(x) >= 1:
        raise OutOfDomain(f"|x| = {abs(x):g} >= 1; use evaluate_at_one for x = 1")
    if x == 0:
        return SeriesValue(1 + 0j, 0.0, 1)
    cap = max_terms or max_terms_default(False)
    total = 0j
    abs_sum = 0.0
    m, t = 0, 1 + 0j
    while m < cap:
        count = min(chunk, cap - m)
        s, a, last, nxt = kernels.series_chunk(alpha, beta, x, m, t, count)
        total += s
        abs_sum += a
        m += count
        t = nxt
        if nxt == 0:
            return SeriesValue(total, EPS * abs_sum, m)
        r = max(abs(nxt) / abs(last) if last != 0 else 0.0, abs(x))
        if r < 1:
            tail = abs(nxt) / (1 - r)
            scale = max(abs(total), 1e-300)
            if abs(nxt) < tol * scale and tail < tol * scale:
                return SeriesValue(total, tail + EPS * math.sqrt(m) * abs_sum, m)
    raise NoConvergence(f"nFn-1 at x={x!r} did not converge within {cap} terms")


def convergence_margin(params, shift=0):
    """s = -Re(beta_n) - shift; the unit-argument series converges iff s > 0."""
    return -params.beta_n.real - shift


def _log_term_expansion(alpha, beta, order):
    # coefficients g_k of log t_m = const - sigma log m + sum_k g_k m^-k
    g = []
    for k in range(1, order + 1):
        acc = sum(bernoulli_poly(k + 1, a) for a in alpha)
        acc -= sum(bernoulli_poly(k + 1, b) for b in beta)
        acc -= bernoulli_poly(k + 1, 1.0)
        g.append((-1) ** (k + 1) * acc / (k * (k + 1)))
    return g


def _exp_series(g):
    # exp(sum_{k>=1} g_k u^k) = sum_k e_k u^k
    e = [1 + 0j]
    for k in range(1, len(g) + 1):
        e.append(sum(j * g[j - 1] * e[k - j] for j in range(1, k + 1)) / k)
    return e


def asymptotic_tail(alpha, beta, start, t_start, order=_ASYMPTOTIC_ORDER):
    """Remainder sum_{m >= start} t_m of the unit-argument series.

    ``t_start`` is the exact term at m = start; it fixes the constant of the
    expansion.  Returns ``(tail, error_estimate)``.
    """
    sigma = 1 - (complex(np.sum(alpha)) - complex(np.sum(beta)))
    e = _exp_series(_log_term_expansion(alpha, beta, order))
    shape = sum(ek * start ** (-k) for k, ek in enumerate(e))
    const = t_start / (cmath.exp(-sigma * math.log(start)) * shape)
    parts = [const * ek * hurwitz_zeta(sigma + k, start) for k, ek in enumerate(e)]
    return sum(parts), 2 * abs(parts[-1]) + 1e-15 * abs(sum(parts))


def _asymptotic_start(alpha, beta):
    size = max([abs(a) for a in alpha] + [abs(b) for b in beta] + [1.0])
    return int(max(256, math.ceil(40 * (1 + size))))


def evaluate_at_one(params, shift=0, *, tail="asymptotic", tol=1e-15, max_terms=None):
    """nFn-1(alpha + shift; beta + shift; 1).

    Parameters
    ----------
    tail : {"asymptotic", "raabe"}
        ``"asymptotic"`` adds the expansion-based remainder.  ``"raabe"`` is
        plain truncation with the bound ~ |t_M| M / s on what was dropped.

    Raises
    ------
    DivergentAtOne
        When the margin s = -Re(beta_n) - shift is not positive.
    """
    alpha = np.asarray(params.alpha, dtype=np.complex128) + shift
    beta = np.asarray(params.beta, dtype=np.complex128) + shift
    _check_denominators(beta)
    stop = _terminating_length(alpha)
    if stop is not None:
        s, a, _, _ = kernels.series_chunk(alpha, beta, 1.0, 0, 1.0, stop)
        return SeriesValue(s, EPS * math.sqrt(stop) * a, stop)
    margin = convergence_margin(params, shift)
    if margin <= 0:
        raise DivergentAtOne(f"series at x=1 diverges: margin s = {margin:g} <= 0 "
                             f"(needs Re beta_n < -{shift})")
    if margin < SLOW_MARGIN:
        warnings.warn(f"slow convergence at x=1: margin s = {margin:g}", SlowConvergence, stacklevel=2)
    cap = max_terms or max_terms_default(True)
    if tail == "asymptotic":
        start = min(_asymptotic_start(alpha, beta), cap)
        s, a, _, t_start = kernels.series_chunk(alpha, beta, 1.0, 0, 1.0, start)
        rest, err = asymptotic_tail(alpha, beta, start, t_start)
        return SeriesValue(s + rest, err + 4 * EPS * math.sqrt(start) * (a + abs(rest)), start)
    if tail != "raabe":
        raise ValueError(f"unknown tail model {tail!r}")
    return _sum_at_one_truncated(alpha, beta, margin, tol, cap)


def _sum_at_one_truncated(alpha, beta, margin, tol, cap, chunk=4096):
    total = 0j
    abs_sum = 0.0
    m, t = 0, 1 + 0j
    bound = math.inf
    while m < cap:
        count = min(chunk, cap - m)
        s, a, _, nxt = kernels.series_chunk(alpha, beta, 1.0, m, t, count)
        total += s
        abs_sum += a
        m += count
        t = nxt
        # sum_{k>=m} k^(-1-s) <= m^(-1-s) (1 + m/s); 1% covers the O(1/m) shape error
        bound = 1.01 * abs(nxt) * (m / margin + 1)
        scale = max(abs(total), 1e-300)
        if abs(nxt) < tol * scale and bound < tol * scale:
            break
    return SeriesValue(total, bound + EPS * math.sqrt(m) * abs_sum, m)


def falling_factorial(h, j):
    """[h]_j = h (h-1) ... (h-j+1) as an exact integer; [h]_0 = 1."""
    r = 1
    for k in range(j):
        r *= h - k
    return r


def weighted_partial_sums(stream, i, m):
    """Array of sum_{h<=k} [h]_{i-1} a_h for k = 0..m."""
    n = stream.alpha.shape[0]
    if not 1 <= i <= n - 1:
        raise ValueError(f"i must lie in [1, {n - 1}], got {i}")
    return kernels.falling_weighted_cumsum(stream.coefficients(m), i - 1)


def weighted_partial_sum(stream, i, m):
    """sum_{h=0}^{m} [h]_{i-1} a_h."""
    return complex(weighted_partial_sums(stream, i, m)[-1])
