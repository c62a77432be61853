"""Independent checks: pointwise oracle, overlap residual and ODE residual."""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .connection import ConnectionMatrix
from .errors import IllConditioned
from .frobenius import DeltaOperator
from .params import INTEGER_TOL, ParameterSet, integer_distance

OVERLAP = (0.35, 0.65)
MAX_CONDITION = 1e10


def chebyshev_points(k, a=OVERLAP[0], b=OVERLAP[1]):
    """k Chebyshev nodes of the first kind on [a, b], ascending."""
    j = np.arange(k)
    nodes = np.cos((2 * j + 1) * np.pi / (2 * k))[::-1]
    return 0.5 * (a + b) + 0.5 * (b - a) * nodes


def _values(basis, points):
    vals = np.empty((len(points), len(basis)), dtype=complex)
    errs = np.empty((len(points), len(basis)))
    for p, x in enumerate(points):
        vals[p], errs[p] = basis.evaluate(x)
    return vals, errs


def oracle_connection_coefficients(params, basis0, basis1, sample_points=None):
    """Solve Y1(x_p) C = Y0(x_p) over the sample points.

    With exactly n points the system is square; more points give a least
    squares fit.  Default: 2n Chebyshev points on [0.35, 0.65].
    """
    n = params.n
    points = np.asarray(chebyshev_points(2 * n) if sample_points is None else sample_points)
    if points.shape[0] < n:
        raise ValueError(f"need at least n = {n} sample points")
    if np.unique(points).shape[0] != points.shape[0]:
        raise ValueError("sample points must be distinct")
    Y1, E1 = _values(basis1, points)
    Y0, E0 = _values(basis0, points)
    # column scaling keeps the condition number meaningful across solutions
    scale = np.abs(Y1).max(axis=0)
    scale[scale == 0] = 1
    A = Y1 / scale
    cond = float(np.linalg.cond(A))
    if cond > MAX_CONDITION:
        raise IllConditioned(f"oracle system condition number {cond:.3g} exceeds {MAX_CONDITION:g}",
                             condition_number=cond)
    C = np.linalg.lstsq(A, Y0, rcond=None)[0] / scale[:, None]
    resid = np.abs(Y1 @ C - Y0).max()
    with np.errstate(invalid="ignore"):
        spread = E1 @ np.abs(C)
    noise = max(E0.max(), np.nan_to_num(spread, nan=np.inf).max(), resid)  # inf * 0 -> inf
    err = cond * noise / np.abs(A).max() / scale[:, None] * np.ones((1, n))
    return ConnectionMatrix(C, "oracle", basis1.normalization, err,
                            {"condition_number": cond, "sample_points": points.tolist()})


def overlap_residual(C, basis0, basis1, points=None):
    """max_p,j |y_j^[0](x_p) - sum_k C[k, j] y_k^[1](x_p)| on real points of (0, 1)."""
    entries = C.entries if isinstance(C, ConnectionMatrix) else np.asarray(C, dtype=complex)
    points = chebyshev_points(20) if points is None else np.asarray(points)
    if np.any(np.iscomplex(points)) or np.any((points <= 0) | (points >= 1)):
        raise ValueError("overlap points must lie on the real interval (0, 1)")
    Y0, _ = _values(basis0, points)
    Y1, _ = _values(basis1, points)
    return float(np.abs(Y0 - Y1 @ entries).max())


def apply_operator(sol, op, x):
    """L y at x for the truncated local solution, by term-wise differentiation."""
    n = op.n
    a, b = op.x_form
    x = complex(x)
    u = x if sol.expansion_point == 0 else 1 - x
    S = kernels.derivative_sums(sol.coeffs, sol.exponent, u, n)
    k = np.arange(n + 1)
    if sol.expansion_point == 0:
        # x^k D^k x^(rho+m) = [rho+m]_k x^(rho+m)
        terms = u ** sol.exponent * S
    else:
        # D^k t^s = (-1)^k [s]_k t^(s-k)
        terms = x ** k * (-1.0) ** k * u ** (sol.exponent - k) * S
    return complex(np.sum((a - x * b) * terms))


def ode_residual(sol, op, points, orders=(16, 32, 64)):
    """{M: max_x |L y_M(x)|} for the solution truncated at each order M."""
    table = {}
    for M in orders:
        if M > sol.truncation_order:
            raise ValueError(f"solution only carries {sol.truncation_order} terms, asked for {M}")
        cut = sol.truncated(M)
        table[M] = max(abs(apply_operator(cut, op, x)) for x in points)
    return table


def decay_ratios(table):
    """Successive ratios residual(M) / residual(2M) from an ode_residual table."""
    orders = sorted(table)
    return [table[a] / table[b] if table[b] > 0 else np.inf for a, b in zip(orders, orders[1:])]


RESIDUAL_RADII = {0: (0.6, 0.7), 1: (0.45, 0.55)}


def residual_points(sol, count=10, radii=None):
    """Interior points whose local variable u has |u| inside ``radii``.

    Closer to the centre the residual at M = 64 sinks into rounding noise;
    further out the polynomial growth of the coefficients at x = 1 delays the
    geometric decay.  The defaults sit between the two for n <= 5.
    """
    lo, hi = radii or RESIDUAL_RADII[sol.expansion_point]
    u = np.linspace(lo, hi, count)
    return u if sol.expansion_point == 0 else 1 - u


@dataclass
class VerificationReport:
    max_overlap_residual: float
    oracle_deltas: list
    ode_residual_decay: dict
    condition_number: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "pass": bool(self.passed),
            "max_overlap_residual": float(self.max_overlap_residual),
            "oracle_deltas": [float(v) for v in self.oracle_deltas],
            "condition_number": float(self.condition_number),
            "ode_residual_decay": {label: {str(M): float(r) for M, r in sorted(t.items())}
                                   for label, t in self.ode_residual_decay.items()},
            "details": self.details,
        }


def verify(params, C, basis0, basis1, *, overlap_tol=1e-8, oracle_tol=1e-7, decay_factor=4.0,
           orders=(16, 32, 64), points=None, slack=0.0):
    """Run every check against a connection matrix and collect a report.

    ``slack`` widens the overlap and oracle thresholds for methods that carry
    their own error estimate (the asymptotic one).  ``orders=None`` skips the
    ODE-residual decay check.
    """
    op = DeltaOperator.from_params(params)
    points = chebyshev_points(20) if points is None else np.asarray(points)
    residual = overlap_residual(C, basis0, basis1, points)
    y1_scale = max(np.abs(basis1.evaluate(x)[0]).max() for x in points)
    oracle = oracle_connection_coefficients(params, basis0, basis1)
    deltas = np.abs(oracle.entries - C.entries).max(axis=0)
    decay = {}
    worst_ratio = np.inf
    if orders is not None:
        for tag, basis in (("0", basis0), ("1", basis1)):
            for sol in basis:
                t = ode_residual(sol, op, residual_points(sol), orders)
                decay[f"y{sol.label}@{tag}"] = t
                worst_ratio = min([worst_ratio] + decay_ratios(t))
    checks = {
        "overlap": bool(residual <= overlap_tol + slack * params.n * y1_scale),
        "oracle": bool(deltas.max() <= oracle_tol + slack),
        "ode_decay": bool(worst_ratio >= decay_factor),
    }
    return VerificationReport(residual, deltas.tolist(), decay, oracle.diagnostics["condition_number"],
                              all(checks.values()),
                              {"method": C.method, "checks": checks, "worst_decay_ratio": float(worst_ratio) if orders else None,
                               "thresholds": {"overlap": overlap_tol, "oracle": oracle_tol,
                                              "decay_factor": decay_factor}})


def random_parameters(rng, n, *, margin=0.05, theorem_gap=0.3, beta_n_width=1.5, imag=0.0,
                      beta_range=(0.2, 3.0), alpha_range=(0.1, 2.5)):
    """Admissible random parameters with Re beta_n < -n + 2 - theorem_gap.

    Every beta_i, beta_i - beta_j and alpha_i stays at least ``margin`` away
    from the integers.
    """
    while True:
        beta = rng.uniform(*beta_range, n - 1) + 1j * imag * rng.standard_normal(n - 1)
        top = -n + 2 - theorem_gap
        beta_n = rng.uniform(top - beta_n_width, top) + 1j * imag * rng.standard_normal()
        alpha = rng.uniform(*alpha_range, n - 1) + 1j * imag * rng.standard_normal(n - 1)
        alpha = np.append(alpha, beta_n + beta.sum() - alpha.sum())
        full = np.append(beta, beta_n)
        diffs = [full[i] - full[j] for i in range(n) for j in range(i + 1, n)]
        if all(integer_distance(v) >= max(margin, INTEGER_TOL) for v in list(full) + diffs + list(alpha)):
            return ParameterSet(tuple(alpha), tuple(beta))
