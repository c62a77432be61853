import math
import threading
import warnings

import mpmath
import numpy as np
import pytest

from hyperconnect import series as se
from hyperconnect.complexfn import gamma, pochhammer_vec
from hyperconnect.errors import DivergentAtOne, NoConvergence, OutOfDomain, PoleError, SlowConvergence
from hyperconnect.params import ParameterSet


def test_coeff_a():
    s = se.CoefficientStream((1, 1), (2,))
    assert se.coeff_a(s, 0) == 1
    assert abs(se.coeff_a(s, 3) - 0.25) < 1e-16
    p = ParameterSet((0.3, 0.5, 0.7), (1.4, 1.1))
    s = se.CoefficientStream.from_params(p)
    expect = pochhammer_vec(p.alpha, 10) / (pochhammer_vec(p.beta, 10) * math.factorial(10))
    assert abs(s.coeff(10) - expect) < 1e-15 * abs(expect)
    with pytest.raises(ValueError):
        s.coeff(-1)


def test_coeff_matches_pochhammer_quotient(p3):
    s = se.CoefficientStream.from_params(p3)
    for m in (0, 1, 7, 40):
        q = pochhammer_vec(p3.alpha, m) / pochhammer_vec(p3.beta + (1.0,), m)
        assert abs(s.coeff(m) - q) < 1e-13 * abs(q)


def test_pole_in_beta():
    with pytest.raises(PoleError):
        se.CoefficientStream((0.5, 0.5), (-2.0,))


def test_stream_concurrent_readers(p3):
    s = se.CoefficientStream.from_params(p3)
    ref = se.CoefficientStream.from_params(p3).coefficients(5000)
    errors = []

    def reader(m):
        if not np.allclose(s.coefficients(m), ref[:m + 1], rtol=1e-14):
            errors.append(m)

    threads = [threading.Thread(target=reader, args=(m,)) for m in (10, 900, 5000, 70, 3000, 1)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors


def test_evaluate_nFn1():
    p = ParameterSet((1, 1), (2,))
    assert se.evaluate_nFn1(p, 0, 0).value == 1
    v = se.evaluate_nFn1(p, 0, 0.5)
    assert abs(v.value - 2 * math.log(2)) <= max(v.tail_bound, 1e-15)
    p = ParameterSet((0.3, 0.5, 0.7), (1.4, 1.1))
    ref = complex(mpmath.hyp3f2(0.3, 0.5, 0.7, 1.4, 1.1, 0.4))
    v = se.evaluate_nFn1(p, 0, 0.4)
    assert abs(v.value - ref) < 1e-15
    shifted = se.evaluate_nFn1(p, 2, 0.4 + 0.3j)
    ref = complex(mpmath.hyp3f2(2.3, 2.5, 2.7, 3.4, 3.1, mpmath.mpc(0.4, 0.3)))
    assert abs(shifted.value - ref) < 1e-14 * abs(ref)


def test_evaluate_nFn1_errors():
    p = ParameterSet((0.3, 0.5), (1.4,))
    with pytest.raises(OutOfDomain):
        se.evaluate_nFn1(p, 0, 1.0)
    with pytest.raises(NoConvergence):
        se.evaluate_nFn1(p, 0, 0.999, max_terms=50)


def test_gauss_summation(p2):
    a, b = p2.alpha
    c = p2.beta[0]
    exact = gamma(c) * gamma(c - a - b) / (gamma(c - a) * gamma(c - b))
    v = se.evaluate_at_one(p2)
    assert abs(v.value - exact) <= 1e-9 * abs(exact)
    assert abs(v.value - exact) <= v.tail_bound
    # plain truncation is far less accurate, but its bound must still hold
    v = se.evaluate_at_one(p2, tail="raabe")
    assert abs(v.value - exact) <= v.tail_bound


def test_gauss_summation_spec_instance():
    p = ParameterSet((0.3, 0.5), (1.4,))
    exact = gamma(1.4) * gamma(0.6) / (gamma(1.1) * gamma(0.9))
    assert abs(se.evaluate_at_one(p).value - exact) < 1e-12 * abs(exact)


def test_at_one_terminating():
    p = ParameterSet((0.0, 0.5, 0.7), (1.4, 1.1))
    assert se.evaluate_at_one(p).value == 1
    p = ParameterSet((-2.0, 0.5), (1.4,))
    exact = gamma(1.4) * gamma(2.9) / (gamma(3.4) * gamma(0.9))
    assert abs(se.evaluate_at_one(p).value - exact) < 1e-14


def test_at_one_shift_against_mpmath():
    p = ParameterSet((0.2, 0.4, 0.6), (1.5, 1.2))  # beta_3 = -1.5
    v = se.evaluate_at_one(p, shift=1)
    ref = complex(mpmath.hyp3f2(1.2, 1.4, 1.6, 2.5, 2.2, 1))
    assert abs(v.value - ref) < 1e-12 * abs(ref)
    # doubling the truncation of the plain sum moves it toward the same value
    r1 = se.evaluate_at_one(p, 1, tail="raabe", max_terms=4096, tol=0).value
    r2 = se.evaluate_at_one(p, 1, tail="raabe", max_terms=8192, tol=0).value
    assert abs(r2 - ref) < abs(r1 - ref)
    # Richardson step with the known rate m^-0.5
    rich = (r2 - 2 ** -0.5 * r1) / (1 - 2 ** -0.5)
    assert abs(rich - ref) < 0.05 * abs(r2 - ref)


def test_at_one_divergent_and_slow():
    p = ParameterSet((0.3, 0.5), (0.2,))  # beta_2 = 0.6
    with pytest.raises(DivergentAtOne):
        se.evaluate_at_one(p)
    p = ParameterSet((0.3, 0.5), (0.85,))  # s = 0.05
    with pytest.warns(SlowConvergence):
        v = se.evaluate_at_one(p)
    exact = gamma(0.85) * gamma(0.05) / (gamma(0.55) * gamma(0.35))
    assert abs(v.value - exact) < 1e-9 * abs(exact)


def test_complex_parameters_at_one():
    p = ParameterSet((0.3 + 0.2j, 0.5 - 0.4j, 0.7), (1.4 + 0.1j, 2.15))
    ref = complex(mpmath.hyp3f2(*[mpmath.mpc(z.real, z.imag) for z in p.alpha + p.beta], 1))
    assert abs(se.evaluate_at_one(p).value - ref) < 1e-12 * abs(ref)


def test_falling_factorial():
    assert se.falling_factorial(5, 0) == 1
    assert se.falling_factorial(5, 3) == 60
    assert se.falling_factorial(2, 4) == 0


def test_weighted_partial_sum(p3):
    s = se.CoefficientStream.from_params(p3)
    a = s.coefficients(30)
    assert abs(se.weighted_partial_sum(s, 1, 30) - a.sum()) < 1e-15
    assert se.weighted_partial_sum(s, 2, 1) == a[1]
    with pytest.raises(ValueError):
        se.weighted_partial_sum(s, 3, 5)


def test_reindexing_identity_exact(p3):
    # sum_h [h]_{i-1} a_h  ==  (a)_{i-1}/(b)_{i-1} sum_l (a+i-1)_l / ((b+i-1)_l l!)
    s = se.CoefficientStream.from_params(p3)
    shifted = se.CoefficientStream(np.asarray(p3.alpha) + 1, np.asarray(p3.beta) + 1)
    pre = pochhammer_vec(p3.alpha, 1) / pochhammer_vec(p3.beta, 1)
    left = se.weighted_partial_sums(s, 2, 200)
    right = pre * np.cumsum(shifted.coefficients(199))
    assert left[0] == 0
    np.testing.assert_allclose(left[1:], right, rtol=1e-13)


def test_limit_of_weighted_sums():
    p = ParameterSet((0.3, 0.5, 0.7), (1.45, 3.55))  # beta_3 = -3.5
    s = se.CoefficientStream.from_params(p)
    lim = pochhammer_vec(p.alpha, 1) / pochhammer_vec(p.beta, 1) * se.evaluate_at_one(p, 1).value
    assert abs(se.weighted_partial_sum(s, 2, 4096) - lim) < 1e-6 * abs(lim)


def test_max_terms_env(monkeypatch):
    monkeypatch.setenv("HYPERCONNECT_MAX_TERMS", "123")
    assert se.max_terms_default(True) == 123


def test_series_value_validation():
    with pytest.raises(ValueError):
        se.SeriesValue(1, -1.0, 3)
    with pytest.raises(ValueError):
        se.SeriesValue(1, 0.0, 0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert se.SeriesValue(np.complex128(1), np.float64(0.5), 1).tail_bound == 0.5
