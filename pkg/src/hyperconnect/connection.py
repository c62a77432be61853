"""Connection matrix between the local bases at x = 0 and x = 1.

Orientation: Y0(x) = Y1(x) @ C on 0 < x < 1, where Y0, Y1 are row vectors of
the basis functions.  Column j of C holds the coordinates of y_j^[0] in the
basis at 1.

Methods
-------
theorem
    The closed form C = D^{-1} P with P built entry-wise from unit-argument
    series and gamma products.
column_shift
    Column 1 from the unit-argument formula; column i+1 from the first column
    of the shifted parameter set (alpha_i; beta_i), mapped back through
    x**(1-beta_i) and the jets of both bases at x = 1.
oracle
    Pointwise linear solve on sample points (see :mod:`hyperconnect.verify`).
asymptotic
    Coefficient-asymptotics estimators (see :mod:`hyperconnect.asymptotic`).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .complexfn import log_gamma_vec, pochhammer_vec, pole_distance
from .errors import DivergentAtOne, PoleError, SingularD, TheoremHypothesisViolated
from .frobenius import (DEFAULT_TRUNCATION, binomial_jet, d_matrix_entries, local_basis_at_one,
                        shift_transfer)
from .series import evaluate_at_one

METHODS = ("theorem", "column_shift", "oracle", "asymptotic")
ORDER = "Y0 = Y1 . C"


@dataclass(frozen=True, eq=False)
class DMatrix:
    entries: np.ndarray
    label: str = "basis at 1"

    def solve(self, rhs):
        return np.linalg.solve(self.entries, rhs)

    def inverse_abs(self):
        return np.abs(np.linalg.inv(self.entries))


@dataclass(frozen=True, eq=False)
class ConnectionMatrix:
    """n x n connection matrix with its provenance and per-entry error estimate."""

    entries: np.ndarray
    method: str
    normalization: tuple
    error_estimate: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("connection matrix must be square")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        err = np.broadcast_to(np.asarray(self.error_estimate, dtype=float), e.shape).copy()
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "error_estimate", err)

    @property
    def n(self):
        return self.entries.shape[0]

    def is_invertible(self, tol=1e-12):
        return abs(np.linalg.det(self.entries)) > tol * max(1.0, np.abs(self.entries).max()) ** self.n

    def column(self, j):
        return self.entries[:, j]


def build_D(basis):
    """D with entries d^(j)_{i-j} for j <= i <= n-1 and last row (0, .., 0, d^(n)_0)."""
    D = d_matrix_entries(basis)
    diag = np.abs(np.diag(D))
    if (diag == 0).any():
        k = int(np.argmin(diag))
        raise SingularD(f"D has a zero diagonal entry at position {k + 1}")
    return DMatrix(D)


def require_theorem_hypothesis(params):
    if params.theorem_margin() <= 0:
        raise TheoremHypothesisViolated(
            f"theorem hypothesis violated: Re beta_n < -n+2 "
            f"(n = {params.n}, Re beta_n = {params.beta_n.real:g})")


def _row_n_entry(shifted, beta_n):
    """Gamma(beta_shifted) Gamma(beta_n) / Gamma(alpha_shifted) through one exponentiation."""
    if any(pole_distance(a) < 1e-8 for a in shifted.alpha):
        return 0j, 0.0
    log_value = log_gamma_vec(shifted.beta + (beta_n,)) - log_gamma_vec(shifted.alpha)
    value = complex(np.exp(log_value))
    return value, 1e-13 * (2 * shifted.n) * abs(value)


def p_column(params, j, tail="asymptotic"):
    """Column j (0-based) of P and its error estimate."""
    n = params.n
    shifted = params.shifted(j)
    col = np.zeros(n, dtype=complex)
    err = np.zeros(n)
    for i in range(1, n):
        try:
            pre = ((-1) ** (i - 1) / math.factorial(i - 1)
                   * pochhammer_vec(shifted.alpha, i - 1) / pochhammer_vec(shifted.beta, i - 1))
            sv = evaluate_at_one(shifted, i - 1, tail=tail)
        except PoleError as exc:
            raise PoleError(f"P entry ({i}, {j + 1}): {exc}", argument=exc.argument,
                            index=exc.index, location=(i, j + 1)) from exc
        col[i - 1] = pre * sv.value
        err[i - 1] = abs(pre) * sv.tail_bound
    try:
        col[n - 1], err[n - 1] = _row_n_entry(shifted, params.beta_n)
    except PoleError as exc:
        raise PoleError(f"P entry ({n}, {j + 1}): {exc}", argument=exc.argument,
                        index=exc.index, location=(n, j + 1)) from exc
    return col, err


def build_P(params, tol=None, tail="asymptotic"):
    """The matrix P and its per-entry error estimate.

    Row i < n of column j is (-1)^(i-1)/(i-1)! (a)_{i-1}/(b)_{i-1} nFn-1(a+i-1; b+i-1; 1)
    for the shifted tuples (a; b) of the j-th solution at 0; row n is the gamma
    quotient.  ``tol`` is accepted for interface symmetry; unit-argument sums run
    to full precision.
    """
    params.require_nonresonant()
    require_theorem_hypothesis(params)
    n = params.n
    P = np.empty((n, n), dtype=complex)
    E = np.empty((n, n))
    for j in range(n):
        P[:, j], E[:, j] = p_column(params, j, tail)
    return P, E


def _propagate(D, err):
    return D.inverse_abs() @ err


def _basis_or_default(params, basis, M):
    return basis if basis is not None else local_basis_at_one(params, M)


def first_column(params, basis=None, M=DEFAULT_TRUNCATION, with_error=False):
    """Coordinates (c_1, .., c_n) of y_1^[0] in the basis at 1."""
    params.require_nonresonant()
    require_theorem_hypothesis(params)
    D = build_D(_basis_or_default(params, basis, M))
    rhs, err = p_column(params, 0)
    col = D.solve(rhs)
    return (col, _propagate(D, err)) if with_error else col


def shift_parameters(params, i):
    """(alpha + 1 - beta_i; beta + 1 - beta_i with slot i set to 2 - beta_i), validated."""
    shifted = params.shifted(i)
    shifted.require_nonresonant()
    return shifted


def shift_jet_matrix(beta_i, n):
    """Closed form of the transfer matrix for canonical bases on both sides.

    Upper-left block: lower-triangular Toeplitz with the coefficients
    (beta_i - 1)_k / k! of (1 - t)**(1 - beta_i); last diagonal entry 1.
    """
    jet = binomial_jet(1 - complex(beta_i), n)
    T = np.zeros((n, n), dtype=complex)
    for k in range(n - 1):
        for j in range(k + 1):
            T[k, j] = jet[k - j]
    T[n - 1, n - 1] = 1
    return T


def column_via_shift(params, basis=None, i=1, M=DEFAULT_TRUNCATION, with_error=False):
    """Column i+1 of C from the first column of the shifted parameter set.

    The shifted set has the same beta_n, so it converges at x = 1 exactly
    when the original does.
    """
    if not 1 <= i <= params.n - 1:
        raise ValueError(f"i must lie in [1, {params.n - 1}], got {i}")
    shifted = shift_parameters(params, i)
    if shifted.theorem_margin() <= 0:
        raise DivergentAtOne(
            f"shifted parameters (i = {i}) violate Re beta_n < -n+2; the direct P formula "
            "of the theorem method is still available")
    D = build_D(_basis_or_default(params, basis, M))
    shifted_basis = local_basis_at_one(shifted, params.n + 1)
    T = shift_transfer(params, i, shifted_basis)
    c_shift, err_shift = p_column(shifted, 0)
    col = D.solve(T @ c_shift)
    if with_error:
        return col, _propagate(D, np.abs(T) @ err_shift)
    return col


def connection_matrix(params, basis=None, method="theorem", M=DEFAULT_TRUNCATION, **options):
    """Connection matrix by the requested method.

    ``options`` are forwarded: ``sample_points`` for the oracle, ``m`` for the
    asymptotic estimators.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    params.require_nonresonant()
    basis = _basis_or_default(params, basis, M)
    norm = basis.normalization
    if method == "theorem":
        P, E = build_P(params)
        D = build_D(basis)
        return ConnectionMatrix(D.solve(P), method, norm, _propagate(D, E))
    if method == "column_shift":
        require_theorem_hypothesis(params)
        n = params.n
        C = np.empty((n, n), dtype=complex)
        E = np.empty((n, n))
        C[:, 0], E[:, 0] = first_column(params, basis, with_error=True)
        for i in range(1, n):
            C[:, i], E[:, i] = column_via_shift(params, basis, i, with_error=True)
        return ConnectionMatrix(C, method, norm, E)
    if method == "oracle":
        from .verify import oracle_connection_coefficients
        from .frobenius import local_basis_at_zero
        basis0 = local_basis_at_zero(params, max(M, basis[0].truncation_order))
        return oracle_connection_coefficients(params, basis0, basis, options.get("sample_points"))
    from .asymptotic import asymptotic_connection_matrix
    return asymptotic_connection_matrix(params, basis, m=options.get("m", 2**14))
