"""Connection coefficients from the large-m behaviour of Taylor coefficients.

If y_1^[0] = sum_j c_j y_j^[1] near x = 1, then only the singular solution
(1-x)**(-beta_n) shapes the growth of a_m, giving

    d_0^(n) c_n = Gamma(beta_n) Gamma(m+1) / Gamma(m+beta_n) * a_m + O(1/m),

while weighted partial sums of a_m recover the holomorphic part:

    sum_{j<=i} d^(j)_{i-j} c_j = (-1)^(i-1)/(i-1)! sum_{h<=m} [h]_{i-1} a_h + O(m^(Re beta_n + i - 1)).
"""

import math
from dataclasses import dataclass

import numpy as np

from .complexfn import gamma, log_gamma_ratio, rgamma
from .errors import DenominatorHit
from .frobenius import local_basis_at_one, shift_transfer
from .params import integer_distance
from .series import CoefficientStream, weighted_partial_sums

DEFAULT_SCHEDULE = tuple(2**k for k in range(6, 15))
DENOMINATOR_TOL = 1e-10


@dataclass(frozen=True)
class AsymptoticEstimate:
    target: str
    value: complex
    m_used: int
    k_used: int
    rate_exponent: float
    predicted_rate: float

    def __post_init__(self):
        if self.m_used < 2 * self.k_used:
            raise ValueError("m_used must be at least 2 * k_used")


def singular_expansion_term(m, alpha, exponents, d_coeffs, c, k):
    """Main term of the coefficient asymptotics of sum_j c_j (1-x)**e_j sum_l d^(j)_l (1-x)**l.

    Parameters
    ----------
    m : int
        Coefficient index.
    alpha : complex
        Exponent of the expanded solution at the origin (0 for y_1).
    exponents, d_coeffs, c
        Exponents e_j at 1, coefficient arrays d^(j) and connection coefficients.
    k : int
        Number of d-terms beyond the leading one.
    """
    total = 0j
    for e, d, cj in zip(exponents, d_coeffs, c):
        e = complex(e)
        if integer_distance(e) < 1e-12 and round(e.real) >= 0:
            continue  # 1/Gamma(-e) = 0
        lead = np.exp(log_gamma_ratio(m, alpha - e, alpha + 1))
        inner = 0j
        prod = 1 + 0j
        for ell in range(k + 1):
            if ell > 0:
                den = m + alpha - ell - e
                if abs(den) < DENOMINATOR_TOL:
                    raise DenominatorHit(f"m + alpha - {ell} - e vanishes at m = {m}")
                prod *= (-ell - e) / den
            inner += prod * (d[ell] if ell < len(d) else 0)
        total += lead * inner * cj * rgamma(-e)
    return complex(total)


schafke_schmidt_term = singular_expansion_term  # interface name


def fit_rate(ms, errors):
    """Least-squares slope of log|error| against log m."""
    ms = np.asarray(ms, dtype=float)
    errors = np.abs(np.asarray(errors))
    ok = errors > 0
    if ok.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(ms[ok]), np.log(errors[ok]), 1)[0])


def _difference_rate(f, m):
    # error ~ K m^p  =>  (f(m) - f(m/2)) / (f(m/2) - f(m/4)) ~ 2^p
    a, b, c = f(m), f(m // 2), f(m // 4)
    num, den = abs(a - b), abs(b - c)
    if num == 0 or den == 0:
        return float("nan")
    return math.log2(num / den)


def _stream(params):
    return CoefficientStream.from_params(params)


def cn_main_term(params, stream, m):
    bn = params.beta_n
    return gamma(bn) * np.exp(log_gamma_ratio(m, 1.0, bn)) * stream.coeff(m)


def estimate_cn(params, basis=None, m=2**14, stream=None):
    """Estimate of c_n from a_m; the error decays like 1/m."""
    if m < 16:
        raise ValueError("m must be at least 16")
    stream = stream or _stream(params)
    d0 = basis[-1].coeffs[0] if basis is not None else 1.0
    f = lambda k: cn_main_term(params, stream, k) / d0
    return AsymptoticEstimate("c_n", complex(f(m)), m, 0, _difference_rate(f, m), -1.0)


def step2_main_term(stream, i, m):
    w = weighted_partial_sums(stream, i, m)
    return (-1) ** (i - 1) / math.factorial(i - 1) * w


def estimate_step2(params, basis=None, i=1, m=2**14, stream=None):
    """Estimate of sum_{j<=i} d^(j)_{i-j} c_j from weighted partial sums of a_h."""
    n = params.n
    if not 1 <= i <= n - 1:
        raise ValueError(f"i must lie in [1, {n - 1}], got {i}")
    if m < 16:
        raise ValueError("m must be at least 16")
    stream = stream or _stream(params)
    sums = step2_main_term(stream, i, m)
    f = lambda k: complex(sums[k])
    return AsymptoticEstimate(f"sum_j d^(j)_{i}-j c_j (i={i})", f(m), m, 0,
                              _difference_rate(f, m), params.beta_n.real + i - 1)


def recover_first_column(params, basis=None, m=2**14):
    """(c_1, .., c_n) from the estimators; the d-table comes from ``basis``."""
    n = params.n
    basis = basis if basis is not None else local_basis_at_one(params, n + 1)
    stream = _stream(params)
    rhs = np.array([estimate_step2(params, basis, i, m, stream).value for i in range(1, n)])
    D = np.zeros((n - 1, n - 1), dtype=complex)
    for j in range(n - 1):
        for i in range(j, n - 1):
            D[i, j] = basis[j].coeffs[i - j]
    c = np.empty(n, dtype=complex)
    c[:n - 1] = np.linalg.solve(D, rhs)
    c[n - 1] = estimate_cn(params, basis, m, stream).value
    return c


def convergence_table(params, basis=None, schedule=DEFAULT_SCHEDULE, reference=None):
    """Estimates over a geometric m-schedule with fitted rates.

    Returns a dict keyed by target ("c_n", "step2_1", ...) holding the
    estimates, the errors against ``reference`` (the exact first column, or
    successive differences if omitted), fitted and predicted slopes.
    """
    n = params.n
    basis = basis if basis is not None else local_basis_at_one(params, n + 1)
    stream = _stream(params)
    mmax = max(schedule)
    sums = {i: step2_main_term(stream, i, mmax) for i in range(1, n)}
    out = {}
    d0 = basis[-1].coeffs[0]
    cn = np.array([cn_main_term(params, stream, m) / d0 for m in schedule])
    targets = {"c_n": (cn, -1.0)}
    for i in range(1, n):
        targets[f"step2_{i}"] = (np.array([sums[i][m] for m in schedule]), params.beta_n.real + i - 1)
    for name, (vals, predicted) in targets.items():
        if reference is not None:
            ref = _reference_value(name, reference, basis)
            errors = np.abs(vals - ref)
            ms = np.array(schedule)
        else:
            errors = np.abs(np.diff(vals))
            ms = np.array(schedule[1:])
        slope = fit_rate(ms, errors)
        # Step 1 can be dominated by either 1/m or m^(Re beta_n); report the nearer one
        candidates = {"1/m": -1.0, "m^Re(beta_n)": params.beta_n.real} if name == "c_n" else None
        out[name] = {"m": list(schedule), "values": vals, "errors": errors, "fitted_rate": slope,
                     "predicted_rate": predicted}
        if candidates:
            out[name]["regime"] = min(candidates, key=lambda k: abs(candidates[k] - slope))
    return out


def _reference_value(name, column, basis):
    if name == "c_n":
        return column[-1]
    i = int(name.split("_")[1])
    return sum(basis[j - 1].coeffs[i - j] * column[j - 1] for j in range(1, i + 1))


def lemma_identity_check(m, h, ell):
    """(m-h+1)_l == sum_p (-1)^(l-p) C(l, p) [h]_(l-p) (m+1)_p in exact integers."""
    def rising(a, k):
        r = 1
        for s in range(k):
            r *= a + s
        return r

    def falling(a, k):
        r = 1
        for s in range(k):
            r *= a - s
        return r

    left = rising(m - h + 1, ell)
    right = sum((-1) ** (ell - p) * math.comb(ell, p) * falling(h, ell - p) * rising(m + 1, p)
                for p in range(ell + 1))
    return left == right


def asymptotic_connection_matrix(params, basis, m=2**14):
    """All columns from the estimators; column i+1 uses the shifted parameter set."""
    from .connection import ConnectionMatrix, build_D, shift_parameters

    n = params.n
    D = build_D(basis)
    C = np.empty((n, n), dtype=complex)
    E = np.empty((n, n))
    for i in range(n):
        if i == 0:
            col = recover_first_column(params, basis, m)
            coarse = recover_first_column(params, basis, m // 2)
        else:
            shifted = shift_parameters(params, i)
            sb = local_basis_at_one(shifted, n + 1)
            T = shift_transfer(params, i, sb)
            col = D.solve(T @ recover_first_column(shifted, sb, m))
            coarse = D.solve(T @ recover_first_column(shifted, sb, m // 2))
        C[:, i] = col
        E[:, i] = np.abs(col - coarse)
    return ConnectionMatrix(C, "asymptotic", basis.normalization, E, {"m": m})
