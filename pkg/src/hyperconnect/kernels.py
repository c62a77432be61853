"""Inner loops for series coefficients, partial sums and recurrences.

Every kernel exists twice: a loop version compiled with ``numba.njit`` and a
vectorised pure-numpy version.  The loop version is used when numba imports
and ``HYPERCONNECT_DISABLE_JIT`` is unset (or ``0``); setting it to ``1``
selects the numpy path.  Both paths take and return complex128 arrays.
"""

import os
from types import SimpleNamespace

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_FLAG = os.environ.get("HYPERCONNECT_DISABLE_JIT", "0").strip().lower()
USE_NUMBA = numba is not None and _FLAG in ("", "0", "false", "no")
BACKEND = "numba" if USE_NUMBA else "numpy"

_TAIL_WINDOW = 8


# ---------------------------------------------------------------------------
# loop implementations (compiled when numba is available)
# ---------------------------------------------------------------------------

def _hyp_coefficients_loop(alpha, beta, m0, a0, count):
    out = np.empty(count, dtype=np.complex128)
    if count == 0:
        return out
    a = a0
    out[0] = a
    for k in range(1, count):
        m = m0 + k - 1
        num = 1.0 + 0.0j
        for i in range(alpha.shape[0]):
            num *= alpha[i] + m
        den = m + 1.0 + 0.0j
        for j in range(beta.shape[0]):
            den *= beta[j] + m
        a = a * num / den
        out[k] = a
    return out


def _series_chunk_loop(alpha, beta, x, m0, t0, count):
    # sums t_{m0} .. t_{m0+count-1}; returns (sum, abs_sum, last, next)
    s = 0.0 + 0.0j
    abs_sum = 0.0
    t = t0
    last = t0
    for k in range(count):
        m = m0 + k
        s += t
        abs_sum += abs(t)
        last = t
        num = 1.0 + 0.0j
        for i in range(alpha.shape[0]):
            num *= alpha[i] + m
        den = m + 1.0 + 0.0j
        for j in range(beta.shape[0]):
            den *= beta[j] + m
        t = t * x * num / den
    return s, abs_sum, last, t


def _falling_weighted_cumsum_loop(a, j):
    out = np.empty(a.shape[0], dtype=np.complex128)
    s = 0.0 + 0.0j
    for h in range(a.shape[0]):
        w = 1.0
        for k in range(j):
            w *= h - k
        s += w * a[h]
        out[h] = s
    return out


def _geometric_tail(lo, hi, gap, au):
    if hi == 0.0:
        return 0.0
    if lo == 0.0:
        return np.inf
    r = max(au, (hi / lo) ** (1.0 / gap))
    if r >= 1.0:
        return np.inf
    return hi * r / (1.0 - r)


_geometric_tail_nb = numba.njit(cache=True)(_geometric_tail) if numba is not None else _geometric_tail


def _horner_tail_loop(coeffs, u):
    # returns (value, abs_sum, tail_estimate) of sum_m coeffs[m] u^m
    n = coeffs.shape[0]
    s = 0.0 + 0.0j
    abs_sum = 0.0
    p = 1.0 + 0.0j
    mags = np.zeros(n)
    for m in range(n):
        t = coeffs[m] * p
        s += t
        mags[m] = abs(t)
        abs_sum += mags[m]
        p *= u
    # envelope ratio between the two halves of the last window, so a single
    # sign change of the coefficients does not fake divergence
    start = n - _TAIL_WINDOW if n > _TAIL_WINDOW else 0
    mid = start + (n - start) // 2
    lo = 0.0
    for m in range(start, mid):
        lo = max(lo, mags[m])
    hi = 0.0
    for m in range(mid, n):
        hi = max(hi, mags[m])
    return s, abs_sum, _geometric_tail_nb(lo, hi, n - mid, abs(u))


def _solve_recurrence_loop(stencil, init, count):
    # stencil[N, q] multiplies d[N - q]; free slots N < len(init) are checked
    width = stencil.shape[1]
    nfree = init.shape[0]
    d = np.zeros(count, dtype=np.complex128)
    resid = np.zeros(nfree, dtype=np.float64)
    for N in range(count):
        acc = 0.0 + 0.0j
        for q in range(1, width):
            if N - q >= 0:
                acc += stencil[N, q] * d[N - q]
        if N < nfree:
            d[N] = init[N]
            resid[N] = abs(acc + stencil[N, 0] * d[N])
        else:
            d[N] = -acc / stencil[N, 0]
    return d, resid


def _derivative_sums_loop(coeffs, rho, u, kmax):
    # S_k = sum_m coeffs[m] [rho+m]_k u^m for k = 0..kmax
    out = np.zeros(kmax + 1, dtype=np.complex128)
    p = 1.0 + 0.0j
    for m in range(coeffs.shape[0]):
        c = coeffs[m] * p
        f = 1.0 + 0.0j
        for k in range(kmax + 1):
            out[k] += c * f
            f *= rho + m - k
        p *= u
    return out


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def _ratios(alpha, beta, ms):
    num = np.prod(alpha[:, None] + ms[None, :], axis=0) if alpha.size else np.ones(ms.size, complex)
    den = (ms + 1.0) * (np.prod(beta[:, None] + ms[None, :], axis=0) if beta.size else 1.0)
    return num / den


def _hyp_coefficients_np(alpha, beta, m0, a0, count):
    out = np.empty(count, dtype=np.complex128)
    if count == 0:
        return out
    ms = np.arange(m0, m0 + count - 1, dtype=np.float64)
    out[0] = a0
    out[1:] = a0 * np.cumprod(_ratios(alpha, beta, ms))
    return out


def _series_chunk_np(alpha, beta, x, m0, t0, count):
    ms = np.arange(m0, m0 + count, dtype=np.float64)
    steps = _ratios(alpha, beta, ms) * x
    prods = np.cumprod(steps)
    terms = np.empty(count, dtype=np.complex128)
    terms[0] = t0
    terms[1:] = t0 * prods[:-1]
    return terms.sum(), np.abs(terms).sum(), terms[-1], t0 * prods[-1]


def _falling_weights(h, j):
    w = np.ones(h.shape[0])
    for k in range(j):
        w *= h - k
    return w


def _falling_weighted_cumsum_np(a, j):
    h = np.arange(a.shape[0], dtype=np.float64)
    return np.cumsum(_falling_weights(h, j) * a)


def _horner_tail_np(coeffs, u):
    n = coeffs.shape[0]
    terms = coeffs * u ** np.arange(n)
    mags = np.abs(terms)
    value = terms.sum()
    abs_sum = mags.sum()
    start = max(n - _TAIL_WINDOW, 0)
    mid = start + (n - start) // 2
    lo = float(mags[start:mid].max()) if mid > start else 0.0
    hi = float(mags[mid:].max())
    return value, abs_sum, _geometric_tail(lo, hi, n - mid, abs(u))


def _solve_recurrence_np(stencil, init, count):
    width = stencil.shape[1]
    nfree = init.shape[0]
    d = np.zeros(count, dtype=np.complex128)
    resid = np.zeros(nfree)
    for N in range(count):
        lo = max(0, N - width + 1)
        # d[N-1], d[N-2], ... against stencil[N, 1], stencil[N, 2], ...
        past = d[lo:N][::-1]
        acc = np.dot(stencil[N, 1:1 + past.shape[0]], past)
        if N < nfree:
            d[N] = init[N]
            resid[N] = abs(acc + stencil[N, 0] * d[N])
        else:
            d[N] = -acc / stencil[N, 0]
    return d, resid


def _derivative_sums_np(coeffs, rho, u, kmax):
    ms = np.arange(coeffs.shape[0])
    base = coeffs * u ** ms
    out = np.empty(kmax + 1, dtype=np.complex128)
    f = np.ones(coeffs.shape[0], dtype=np.complex128)
    for k in range(kmax + 1):
        out[k] = np.dot(base, f)
        f = f * (rho + ms - k)
    return out


_LOOPS = {
    "hyp_coefficients": _hyp_coefficients_loop,
    "series_chunk": _series_chunk_loop,
    "falling_weighted_cumsum": _falling_weighted_cumsum_loop,
    "horner_tail": _horner_tail_loop,
    "solve_recurrence": _solve_recurrence_loop,
    "derivative_sums": _derivative_sums_loop,
}

numpy_backend = SimpleNamespace(
    hyp_coefficients=_hyp_coefficients_np,
    series_chunk=_series_chunk_np,
    falling_weighted_cumsum=_falling_weighted_cumsum_np,
    horner_tail=_horner_tail_np,
    solve_recurrence=_solve_recurrence_np,
    derivative_sums=_derivative_sums_np,
)

if numba is not None:
    numba_backend = SimpleNamespace(
        **{name: numba.njit(cache=True)(fn) for name, fn in _LOOPS.items()})
else:  # pragma: no cover
    numba_backend = None

_active = numba_backend if USE_NUMBA else numpy_backend


def _as_c(v):
    return np.ascontiguousarray(np.asarray(v, dtype=np.complex128).reshape(-1))


def hyp_coefficients(alpha, beta, m0, a0, count):
    """Coefficients a_{m0}, ..., a_{m0+count-1} of nFn-1 starting from a_{m0} = a0."""
    return _active.hyp_coefficients(_as_c(alpha), _as_c(beta), int(m0), complex(a0), int(count))


def series_chunk(alpha, beta, x, m0, t0, count):
    """Sum of terms t_m = a_m x^m for m0 <= m < m0+count, given t_{m0} = t0.

    Returns ``(sum, abs_sum, last_term, next_term)``.
    """
    s, a, last, nxt = _active.series_chunk(_as_c(alpha), _as_c(beta), complex(x),
                                           int(m0), complex(t0), int(count))
    return complex(s), float(a), complex(last), complex(nxt)


def falling_weighted_cumsum(a, j):
    """Running sums S[m] = sum_{h<=m} h (h-1) ... (h-j+1) a[h]."""
    return _active.falling_weighted_cumsum(_as_c(a), int(j))


def horner_tail(coeffs, u):
    """Evaluate sum_m coeffs[m] u^m; returns ``(value, abs_sum, tail_estimate)``."""
    v, a, t = _active.horner_tail(_as_c(coeffs), complex(u))
    return complex(v), float(a), float(t)


def solve_recurrence(stencil, init, count):
    """Forward-solve sum_q stencil[N, q] d[N-q] = 0 with d[:len(init)] prescribed.

    Returns the coefficients and, for each prescribed slot, the magnitude of
    the equation residual there.
    """
    stencil = np.ascontiguousarray(np.asarray(stencil, dtype=np.complex128))
    return _active.solve_recurrence(stencil, _as_c(init), int(count))


def derivative_sums(coeffs, rho, u, kmax):
    """S_k = sum_m coeffs[m] [rho+m]_k u^m for k = 0..kmax ([.]_k falling factorial)."""
    return _active.derivative_sums(_as_c(coeffs), complex(rho), complex(u), int(kmax))
