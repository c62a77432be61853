"""Complex gamma-type functions in binary64.

Gamma and log Gamma use the Stirling series after shifting the argument to
|w| >= 18 with the functional recurrence, and reflection for Re z < 1/2.
Ratios of gammas at large argument go through the Stirling expansion of
log Gamma(z + a) - log Gamma(z + b), which avoids the cancellation of two
large log-gamma values.
"""

import cmath
import math
from fractions import Fraction
from functools import lru_cache

from .errors import PoleError

POLE_TOL = 1e-8

# Stirling series is applied once |w| >= _STIRLING_MIN; smaller arguments are
# shifted up with the recurrence Gamma(w + 1) = w Gamma(w).
_STIRLING_MIN = 18.0
_STIRLING_TERMS = 14
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)


def pole_distance(z):
    """Distance from ``z`` to the nearest non-positive integer."""
    z = complex(z)
    k = min(round(z.real), 0)
    return abs(z - k)


def _check_pole(z, tol):
    if pole_distance(z) < tol:
        raise PoleError(f"gamma pole at z={z!r} (distance < {tol:g})", argument=z)


def _stirling_log(w):
    # log Gamma(w) for |w| >= _STIRLING_MIN, Re w > 0
    total = (w - 0.5) * cmath.log(w) - w + _LOG_SQRT_2PI
    winv = 1.0 / w
    w2 = winv * winv
    p = winv
    for c in _stirling_coef():
        total += c * p
        p *= w2
    return total


def _right_log_gamma(z):
    # Re z >= 1/2; the sum of logs keeps the branch continuous from z > 0
    shift = 0j
    w = z
    while abs(w) < _STIRLING_MIN:
        shift += cmath.log(w)
        w += 1.0
    return _stirling_log(w) - shift


def _right_gamma(z):
    prod = 1 + 0j
    w = z
    while abs(w) < _STIRLING_MIN:
        prod *= w
        w += 1.0
    return cmath.exp(_stirling_log(w)) / prod


def gamma(z, pole_tol=POLE_TOL):
    """Gamma function of a complex argument.

    Raises
    ------
    PoleError
        If ``z`` is within ``pole_tol`` of a non-positive integer.
    """
    z = complex(z)
    _check_pole(z, pole_tol)
    if z.imag == 0.0 and z.real == int(z.real) and 0 < z.real <= 171:
        return complex(math.factorial(int(z.real) - 1))
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * gamma(1.0 - z, pole_tol))
    return _right_gamma(z)


def log_gamma(z, pole_tol=POLE_TOL):
    """log Gamma(z).

    For Re z >= 1/2 this is the branch continuous from the positive real
    axis.  For Re z < 1/2 it comes from reflection, so the imaginary part is
    only determined modulo 2*pi; ``exp(log_gamma(z))`` is always Gamma(z).
    """
    z = complex(z)
    _check_pole(z, pole_tol)
    if z.real < 0.5:
        return _LOG_PI - cmath.log(cmath.sin(math.pi * z)) - log_gamma(1.0 - z, pole_tol)
    return _right_log_gamma(z)


def rgamma(z, pole_tol=POLE_TOL):
    """1/Gamma(z); exactly zero at the poles of Gamma."""
    z = complex(z)
    if pole_distance(z) < pole_tol:
        return 0j
    return 1.0 / gamma(z, pole_tol)


def pochhammer(a, m):
    """Rising factorial (a)_m = a (a+1) ... (a+m-1), with (a)_0 = 1."""
    if m < 0:
        raise ValueError("m must be non-negative")
    a = complex(a)
    r = 1 + 0j
    for k in range(m):
        r *= a + k
    return r


def pochhammer_vec(v, m):
    """Product of ``pochhammer(a, m)`` over the entries of ``v``."""
    r = 1 + 0j
    for a in v:
        r *= pochhammer(a, m)
    return r


def log_gamma_vec(v, pole_tol=POLE_TOL):
    """Sum of log Gamma over ``v``; PoleError carries the offending index."""
    total = 0j
    for i, a in enumerate(v):
        try:
            total += log_gamma(a, pole_tol)
        except PoleError as exc:
            raise PoleError(f"gamma pole at entry {i} (value {complex(a)!r})",
                            argument=complex(a), index=i) from exc
    return total


def gamma_vec(v, pole_tol=POLE_TOL):
    """Product of Gamma over ``v`` computed as exp of summed log-gammas."""
    return cmath.exp(log_gamma_vec(v, pole_tol))


@lru_cache(maxsize=None)
def _stirling_coef():
    b = bernoulli_numbers(2 * _STIRLING_TERMS)
    return tuple(float(b[2 * k]) / (2 * k * (2 * k - 1)) for k in range(1, _STIRLING_TERMS + 1))


@lru_cache(maxsize=None)
def bernoulli_numbers(kmax):
    """Bernoulli numbers B_0..B_kmax as Fractions (B_1 = -1/2)."""
    b = [Fraction(0)] * (kmax + 1)
    b[0] = Fraction(1)
    for m in range(1, kmax + 1):
        acc = Fraction(0)
        for k in range(m):
            acc += math.comb(m + 1, k) * b[k]
        b[m] = -acc / (m + 1)
    return tuple(b)


def bernoulli_poly(k, a):
    """Bernoulli polynomial B_k(a) for complex ``a``."""
    b = bernoulli_numbers(k)
    a = complex(a)
    # Horner in a over sum_j C(k, j) B_j a^(k-j)
    r = 0j
    for j in range(k + 1):
        r = r * a + math.comb(k, j) * float(b[j])
    return r


def _stirling_diff_terms(z, a, b, kmax=30):
    # sum_k (-1)^(k+1) (B_{k+1}(a) - B_{k+1}(b)) / (k (k+1) z^k), stopped at the smallest term
    total = 0j
    zinv = 1.0 / z
    zpow = zinv
    prev = math.inf
    for k in range(1, kmax + 1):
        term = (-1) ** (k + 1) * (bernoulli_poly(k + 1, a) - bernoulli_poly(k + 1, b)) / (k * (k + 1)) * zpow
        mag = abs(term)
        if mag > prev:
            break
        total += term
        if mag < 1e-18 * max(abs(total), 1e-300):
            break
        prev = mag
        zpow *= zinv
    return total


def log_gamma_ratio(z, a, b, pole_tol=POLE_TOL):
    """log(Gamma(z + a) / Gamma(z + b)).

    Uses the large-|z| Stirling difference series when |z| dominates the
    shifts, otherwise the difference of two log-gammas.
    """
    z = complex(z)
    a = complex(a)
    b = complex(b)
    _check_pole(z + a, pole_tol)
    _check_pole(z + b, pole_tol)
    scale = max(abs(a), abs(b), 1.0)
    if z.real > 0 and abs(z) >= 30.0 * scale:
        return (a - b) * cmath.log(z) + _stirling_diff_terms(z, a, b)
    return log_gamma(z + a, pole_tol) - log_gamma(z + b, pole_tol)


def stirling_ratio(m, b, pole_tol=POLE_TOL):
    """Gamma(m + 1) / Gamma(m + b) for an integer m >= 1."""
    if m < 1:
        raise ValueError("m must be >= 1")
    try:
        return cmath.exp(log_gamma_ratio(m, 1.0, b, pole_tol))
    except PoleError as exc:
        raise PoleError(f"Gamma(m+b) pole at m={m}, b={complex(b)!r}",
                        argument=m + complex(b)) from exc


def stirling_leading(m, b):
    """Leading asymptote m**(1 - b) of ``stirling_ratio``."""
    return complex(m) ** (1.0 - complex(b))


def hurwitz_zeta(s, q, terms=10):
    """Hurwitz zeta sum_{k>=0} (k + q)^(-s) for Re s > 1 and real q > 0.

    Direct summation until the shifted argument exceeds ~|s| + 30, then
    Euler-Maclaurin with ``terms`` Bernoulli corrections.
    """
    s = complex(s)
    q = float(q)
    if s.real <= 1.0:
        raise ValueError("hurwitz_zeta needs Re s > 1")
    if q <= 0:
        raise ValueError("q must be positive")
    head = 0j
    shift = max(0, math.ceil(abs(s) + 30.0 - q))
    for k in range(shift):
        head += (k + q) ** (-s)
    a = q + shift
    loga = math.log(a)
    total = cmath.exp((1.0 - s) * loga) / (s - 1.0) + 0.5 * cmath.exp(-s * loga)
    b = bernoulli_numbers(2 * terms)
    rising = s  # s (s+1) ... (s+2j-2)
    for j in range(1, terms + 1):
        total += float(b[2 * j]) / math.factorial(2 * j) * rising * cmath.exp((-s - 2 * j + 1) * loga)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
    return head + total
