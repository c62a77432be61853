"""Local Frobenius solutions of the generalized hypergeometric equation.

The operator is  delta * prod_i (delta + beta_i - 1) - x * prod_i (delta + alpha_i)
with delta = x d/dx.  Around x = 0 the solutions are hypergeometric series in
closed form.  Around x = 1 we expand in t = 1 - x: pushing t**s through the
operator (delta t**s = s t**s - s t**(s-1), x = 1 - t) gives

    L t**s = sum_{j=-n+1}^{1} P_j(s) t**(s+j),

with polynomial P_j, and the recurrence sum_q P_{q-n+1}(rho+N-q) d_{N-q} = 0.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import kernels
from .errors import AssumptionViolated, BranchAmbiguity, OutOfDomain, ResonanceInconsistency
from .params import ParameterSet, integer_distance
from .series import EPS, CoefficientStream, SeriesValue

DEFAULT_TRUNCATION = 64
CONSISTENCY_TOL = 1e-10


def apply_delta_monomial(s):
    """delta acting on t**s as ((power, coefficient), ...) pairs."""
    s = complex(s)
    return ((s, s), (s - 1, -s))


def _padd(p, q):
    return npoly.polyadd(p, q)


def _apply_factor(f, c):
    # (delta + c) on sum_o f[o](s) t^(s+o)
    g = {}
    for o, poly in f.items():
        sp = npoly.polymul(poly, np.array([o, 1], dtype=complex))
        g[o] = _padd(g.get(o, np.zeros(1, complex)), _padd(sp, c * poly))
        g[o - 1] = _padd(g.get(o - 1, np.zeros(1, complex)), -sp)
    return g


def _stirling2(jmax):
    s = np.zeros((jmax + 1, jmax + 1))
    s[0, 0] = 1
    for j in range(1, jmax + 1):
        for k in range(1, j + 1):
            s[j, k] = k * s[j - 1, k] + s[j - 1, k - 1]
    return s


@dataclass(frozen=True)
class DeltaOperator:
    """Factored form of the operator.

    ``left_factors`` are the offsets c of prod (delta + c) in the first product
    (0, beta_1 - 1, ..., beta_{n-1} - 1); ``right_factors`` are alpha_1..alpha_n.
    """

    left_factors: tuple
    right_factors: tuple

    def __post_init__(self):
        left = tuple(complex(c) for c in self.left_factors)
        right = tuple(complex(c) for c in self.right_factors)
        if len(left) != len(right):
            raise ValueError("both products need n factors")
        if left[0] != 0:
            raise ValueError("first left factor must be 0 (the bare delta)")
        object.__setattr__(self, "left_factors", left)
        object.__setattr__(self, "right_factors", right)

    @classmethod
    def from_params(cls, params):
        return cls((0j,) + tuple(b - 1 for b in params.beta), params.alpha)

    @property
    def n(self):
        return len(self.left_factors)

    @cached_property
    def t_action(self):
        """Array (n+2, n+1): row j+n holds ascending coefficients of P_j(s), j = -n..1."""
        n = self.n
        one = {0: np.ones(1, complex)}
        left = one
        for c in self.left_factors:
            left = _apply_factor(left, c)
        right = one
        for c in self.right_factors:
            right = _apply_factor(right, c)
        table = np.zeros((n + 2, n + 1), dtype=complex)
        for o, poly in left.items():
            table[o + n, :poly.shape[0]] += poly
        # multiply the second product by x = 1 - t
        for o, poly in right.items():
            table[o + n, :poly.shape[0]] -= poly
            table[o + 1 + n, :poly.shape[0]] += poly
        return table

    def leading_cancellation(self):
        """Max |coefficient| of P_{-n}; identically zero for this operator."""
        return float(np.abs(self.t_action[0]).max())

    @cached_property
    def x_form(self):
        """(a, b) with L = sum_k (a_k - x b_k) x^k (d/dx)^k."""
        n = self.n
        s2 = _stirling2(n)
        out = []
        for factors in (self.left_factors, self.right_factors):
            q = np.ones(1, complex)
            for c in factors:
                q = npoly.polymul(q, np.array([c, 1], dtype=complex))
            q = np.pad(q, (0, n + 1 - q.shape[0]))
            out.append(s2.T @ q)
        return out[0], out[1]


def recurrence_at_one(op, rho, count):
    """Stencil r[N, q], N < count, q = 0..n, with sum_q r[N, q] d[N-q] = 0.

    Characterises sum_m d_m t**(rho+m) as a solution; r[:, 0] is the
    indicial polynomial at 1 evaluated at rho + N.
    """
    n = op.n
    rho = complex(rho)
    N = np.arange(count, dtype=float)
    stencil = np.empty((count, n + 1), dtype=complex)
    for q in range(n + 1):
        stencil[:, q] = npoly.polyval(rho + N - q, op.t_action[q + 1])
    return stencil


def indicial_polynomial(op, point):
    """Indicial polynomial at x = 0 or x = 1 as a numpy Polynomial in rho."""
    if point == 0:
        q = np.ones(1, complex)
        for c in op.left_factors:
            q = npoly.polymul(q, np.array([c, 1], dtype=complex))
        return np.polynomial.Polynomial(q)
    if point == 1:
        return np.polynomial.Polynomial(op.t_action[1].copy())
    raise ValueError("point must be 0 or 1")


def indicial_roots(op, point):
    """Roots of the indicial polynomial, polished with two Newton steps."""
    poly = indicial_polynomial(op, point)
    roots = poly.roots().astype(complex)
    der = poly.deriv()
    for _ in range(2):
        d = der(roots)
        ok = d != 0
        roots[ok] = roots[ok] - poly(roots[ok]) / d[ok]
    return roots


@dataclass(frozen=True, eq=False)
class LocalSolution:
    """u**exponent * sum_m coeffs[m] u**m with u = x (point 0) or u = 1 - x (point 1)."""

    expansion_point: int
    exponent: complex
    coeffs: np.ndarray
    label: int

    @property
    def truncation_order(self):
        return self.coeffs.shape[0] - 1

    def truncated(self, order):
        return LocalSolution(self.expansion_point, self.exponent, self.coeffs[:order + 1], self.label)

    def scaled(self, factor):
        return LocalSolution(self.expansion_point, self.exponent, self.coeffs * factor, self.label)

    def __call__(self, x):
        return evaluate_local(self, x).value


@dataclass(frozen=True, eq=False)
class LocalBasis:
    """Fundamental system at one singular point, ordered as y_1..y_n."""

    point: int
    solutions: tuple
    params: ParameterSet
    normalization: tuple = field(default=None)

    def __len__(self):
        return len(self.solutions)

    def __iter__(self):
        return iter(self.solutions)

    def __getitem__(self, k):
        return self.solutions[k]

    def evaluate(self, x):
        """Values and error bounds of all solutions at ``x`` (two arrays)."""
        vals = [evaluate_local(s, x) for s in self.solutions]
        return (np.array([v.value for v in vals]), np.array([v.tail_bound for v in vals]))


def canonical_table(n):
    """d-table with d_0 = 1 and d_j = 0 for 1 <= j <= n-1-i (D is the identity)."""
    return tuple((1.0 + 0j,) + (0j,) * (n - 1 - i) for i in range(1, n)) + ((1.0 + 0j,),)


def _check_table(table, n):
    if table == "canonical" or table is None:
        return canonical_table(n)
    table = tuple(tuple(complex(v) for v in row) for row in table)
    if len(table) != n:
        raise ValueError(f"d-table needs {n} rows, got {len(table)}")
    for i, row in enumerate(table, start=1):
        want = n - i if i < n else 1
        if len(row) != want:
            raise ValueError(f"d-table row {i} needs {want} entries d_0..d_{want - 1}, got {len(row)}")
        if row[0] == 0:
            raise ValueError(f"d_0 of solution {i} must be nonzero")
    return table


def local_basis_at_zero(params, M=DEFAULT_TRUNCATION):
    """y_1 = nFn-1(alpha_0; beta_0; x), y_{i+1} = x**(1-beta_i) nFn-1(alpha_i; beta_i; x)."""
    params.require_nonresonant()
    sols = []
    for i in range(params.n):
        shifted = params.shifted(i)
        coeffs = CoefficientStream.from_params(shifted).coefficients(M)
        exponent = 0j if i == 0 else 1 - params.beta[i - 1]
        sols.append(LocalSolution(0, exponent, coeffs, i + 1))
    return LocalBasis(0, tuple(sols), params)


def local_basis_at_one(params, M=DEFAULT_TRUNCATION, normalization="canonical",
                       consistency_tol=CONSISTENCY_TOL):
    """Solutions (1-x)**(i-1) sum d^(i)_m (1-x)**m and (1-x)**(-beta_n) sum d^(n)_m (1-x)**m.

    ``normalization`` fixes d^(i)_0..d^(i)_{n-1-i} for i < n and d^(n)_0; the
    default ``"canonical"`` takes d_0 = 1 and zeros.  Those slots are exactly
    the resonant orders of the recurrence, where the equation must hold
    automatically; a residual above ``consistency_tol`` (relative) raises.
    """
    params.require_nonresonant()
    n = params.n
    table = _check_table(normalization, n)
    op = DeltaOperator.from_params(params)
    exponents = params.exponents_at_one()
    sols = []
    for i in range(1, n + 1):
        rho = exponents[i - 1]
        init = np.array(table[i - 1], dtype=complex)
        stencil = recurrence_at_one(op, rho, M + 1)
        d, resid = kernels.solve_recurrence(stencil, init, M + 1)
        _check_resonance(stencil, d, resid, init.shape[0], consistency_tol, i)
        sols.append(LocalSolution(1, rho, d, i))
    return LocalBasis(1, tuple(sols), params, table)


def _check_resonance(stencil, d, resid, nfree, tol, label):
    for N in range(nfree):
        terms = [abs(stencil[N, q] * d[N - q]) for q in range(stencil.shape[1]) if N - q >= 0]
        scale = max(terms + [1e-300])
        if resid[N] > tol * max(scale, 1.0):
            raise ResonanceInconsistency(
                f"solution {label}: order {N} equation residual {resid[N]:.3g} (scale {scale:.3g})")
    lead = np.abs(stencil[nfree:, 0])
    if lead.size and lead.min() < 1e-12 * max(1.0, np.abs(stencil[nfree:]).max()):
        N = nfree + int(lead.argmin())
        raise ResonanceInconsistency(f"solution {label}: unexpected resonance at order {N}")


def _local_variable(sol, x):
    return complex(x) if sol.expansion_point == 0 else 1 - complex(x)


def evaluate_local(sol, x):
    """Value of a local solution with the principal branch of u**exponent.

    On 0 < x < 1 this is the convention arg x = arg(1 - x) = 0.
    """
    u = _local_variable(sol, x)
    if abs(u) >= 1:
        raise OutOfDomain(f"|u| = {abs(u):g} >= 1 for a solution at x = {sol.expansion_point}")
    rho = sol.exponent
    is_int = integer_distance(rho) < 1e-12
    if u == 0:
        if rho == 0:
            return SeriesValue(sol.coeffs[0], 0.0, 1)
        if (is_int and round(rho.real) > 0) or (not is_int and rho.real > 0):
            return SeriesValue(0j, 0.0, 1)
        raise OutOfDomain(f"solution with exponent {rho} is singular at x = {sol.expansion_point}")
    if not is_int and u.imag == 0 and u.real < 0:
        raise BranchAmbiguity(f"x = {complex(x)!r} lies on the branch cut of u**{rho}")
    pre = u ** int(round(rho.real)) if is_int else u ** rho
    value, abs_sum, tail = kernels.horner_tail(sol.coeffs, u)
    bound = abs(pre) * (tail + EPS * math.sqrt(sol.coeffs.shape[0]) * abs_sum)
    return SeriesValue(pre * value, bound, sol.coeffs.shape[0])


def binomial_jet(exponent, order):
    """Coefficients of (1 - t)**exponent up to t**order."""
    c = np.empty(order + 1, dtype=complex)
    c[0] = 1
    for k in range(1, order + 1):
        c[k] = c[k - 1] * (k - 1 - exponent) / k
    return c


def shift_transfer(params, i, shifted_basis):
    """Express x**(1-beta_i) * (shifted basis at 1) in jets of the original basis.

    Returns the n x n matrix T whose column j holds the t**0..t**(n-2)
    coefficients of x**(1-beta_i) y_j[shifted] (for j < n) and, in the last
    slot, the leading coefficient of x**(1-beta_i) y_n[shifted].  Multiplying
    by D^{-1} of the original basis gives the coordinates of those functions.
    """
    n = params.n
    jet = binomial_jet(1 - params.beta[i - 1], n)
    T = np.zeros((n, n), dtype=complex)
    for j, sol in enumerate(shifted_basis.solutions[:-1]):
        series = np.zeros(n - 1, dtype=complex)
        lead = j  # exponent j for y_{j+1}
        for k in range(n - 1 - lead):
            series[lead + k] = sol.coeffs[k] if k < sol.coeffs.shape[0] else 0
        T[:n - 1, j] = np.convolve(jet, series)[:n - 1]
    T[n - 1, n - 1] = shifted_basis.solutions[-1].coeffs[0]
    return T


def d_matrix_entries(basis):
    """D with (i, j) = d^(j)_{i-j} for j <= i <= n-1 and last row (0, .., 0, d^(n)_0)."""
    n = len(basis)
    D = np.zeros((n, n), dtype=complex)
    for j in range(n - 1):
        coeffs = basis[j].coeffs
        for i in range(j, n - 1):
            D[i, j] = coeffs[i - j]
    D[n - 1, n - 1] = basis[n - 1].coeffs[0]
    return D


__all__ = [
    "AssumptionViolated", "DeltaOperator", "LocalBasis", "LocalSolution", "ParameterSet",
    "apply_delta_monomial", "binomial_jet", "canonical_table", "d_matrix_entries",
    "evaluate_local", "indicial_polynomial", "indicial_roots", "local_basis_at_one",
    "local_basis_at_zero", "recurrence_at_one", "shift_transfer",
]
