import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symspec import specfun as sf
from symspec.laws_exact import radial_density

mp.mp.dps = 50


# --- ln_gamma ---------------------------------------------------------------


def test_ln_gamma_trivial_values():
    assert sf.ln_gamma(1.0) == 0.0
    assert sf.ln_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-15)


def test_ln_gamma_no_overflow_at_171_5():
    ref = float(mp.loggamma(mp.mpf("171.5")))
    val = sf.ln_gamma(171.5)
    assert math.isfinite(val)
    assert abs(val / ref - 1.0) <= 1e-13


@pytest.mark.parametrize("a", [0.5, 1.5, 7.25, 33.3, 1e3, 12345.678, 1e6])
def test_ln_gamma_relative_accuracy(a):
    ref = mp.loggamma(mp.mpf(a))
    val = sf.ln_gamma(a)
    if ref == 0:
        assert val == 0
    else:
        assert abs((mp.mpf(val) - ref) / ref) <= 1e-13


@pytest.mark.parametrize("a", [0.0, -1.0, -2.5])
def test_ln_gamma_domain(a):
    with pytest.raises(sf.DomainError):
        sf.ln_gamma(a)


# --- incomplete gamma ------------------------------------------------------


@pytest.mark.parametrize("a", [0.5, 1.0, 3.7, 250.0, 1e5])
def test_q_at_zero_is_one(a):
    assert sf.reg_gamma_upper(a, 0.0) == 1.0
    assert sf.reg_gamma_lower(a, 0.0) == 0.0


def test_q_2_1_finite_sum():
    # Gamma(n, x) = (n-1)! e^-x sum_{k<n} x^k/k!  ->  Q(2, 1) = 2/e
    assert sf.reg_gamma_upper(2.0, 1.0) == pytest.approx(2.0 * math.exp(-1.0), rel=1e-14)


@pytest.mark.parametrize("x", [0.5, 2.0, 10.0])
def test_q_1_is_exponential(x):
    assert sf.reg_gamma_upper(1.0, x) == pytest.approx(math.exp(-x), rel=1e-14)


@pytest.mark.parametrize("a,x", [(0.0, 1.0), (-1.0, 1.0), (2.0, -0.1)])
def test_incomplete_gamma_domain(a, x):
    with pytest.raises(sf.DomainError):
        sf.reg_gamma_upper(a, x)
    with pytest.raises(sf.DomainError):
        sf.ln_reg_gamma_lower(a, x)


def _oracle_grid():
    pts = []
    for a in np.geomspace(0.5, 1e5, 14):
        for f in (1e-3, 0.1, 0.5, 0.9, 1.0, 1.1, 2.0, 5.0, 10.0):
            x = a * f
            if a > 1e3 and 0.5 <= f <= 2.0:
                # stay within a few standard deviations of the transition
                x = a + (f - 1.0) * 5.0 * math.sqrt(a)
            pts.append((float(a), float(x)))
    return pts


@pytest.mark.parametrize("a,x", _oracle_grid())
def test_incomplete_gamma_against_mpmath(a, x):
    q_ref = mp.gammainc(a, x, mp.inf, regularized=True)
    p_ref = mp.gammainc(a, 0, x, regularized=True)
    for val, ref in ((sf.reg_gamma_upper(a, x), q_ref), (sf.reg_gamma_lower(a, x), p_ref)):
        if ref > mp.mpf("1e-300"):
            assert abs((mp.mpf(val) - ref) / ref) <= 1e-12


def test_q_plus_p_is_one_on_random_grid():
    rng = np.random.default_rng(2024)
    a = rng.uniform(1.0, 1e4, 10_000)
    x = rng.uniform(0.0, 5.0, 10_000) * a
    total = sf.reg_gamma_upper(a, x) + sf.reg_gamma_lower(a, x)
    assert np.max(np.abs(total - 1.0)) <= 1e-14


def test_recurrence_in_log_space():
    # Q(a+1, x) = Q(a, x) + x^a e^-x / Gamma(a+1)
    rng = np.random.default_rng(7)
    a = rng.uniform(1.0, 1e4, 2000)
    x = rng.uniform(0.0, 5.0, 2000) * a
    lhs = sf.ln_reg_gamma_upper(a + 1.0, x)
    # the power term is formed at 30 digits; in double its three pieces
    # cancel down from ~1e5 and would dominate the comparison
    mp.mp.dps = 30
    term = np.array([float(mp.mpf(ai) * mp.log(xi) - xi - mp.loggamma(ai + 1)) for ai, xi in zip(a, x)])
    mp.mp.dps = 50
    rhs = np.logaddexp(sf.ln_reg_gamma_upper(a, x), term)
    finite = np.isfinite(lhs) & (lhs > -700)
    rel = np.abs(np.expm1(lhs[finite] - rhs[finite]))
    assert np.max(rel) <= 1e-11


@given(st.floats(0.5, 5e4), st.floats(0.0, 10.0))
def test_q_in_unit_interval_and_complementary(a, f):
    x = a * f
    q = sf.reg_gamma_upper(a, x)
    p = sf.reg_gamma_lower(a, x)
    assert 0.0 <= q <= 1.0 and 0.0 <= p <= 1.0
    assert abs(q + p - 1.0) <= 1e-14


@given(st.floats(1.0, 1e4), st.floats(0.0, 5.0), st.floats(0.0, 0.5))
def test_q_decreasing_in_x(a, f, df):
    x = a * f
    assert sf.reg_gamma_upper(a, x + df * a) <= sf.reg_gamma_upper(a, x) + 1e-15


def test_large_shape_log_stays_finite():
    # Q itself underflows here, its logarithm must not
    lq = sf.ln_reg_gamma_upper(1e5, 2e5)
    ref = float(mp.log(mp.gammainc(1e5, 2e5, mp.inf, regularized=True)))
    assert math.isfinite(lq)
    assert abs(lq / ref - 1.0) <= 1e-12


# --- error functions -------------------------------------------------------


def test_erfc_values():
    assert sf.erfc(0.0) == 1.0
    assert sf.erfc(-1.3) == pytest.approx(2.0 - sf.erfc(1.3), rel=1e-15)


@pytest.mark.parametrize("x", [-30.0, -5.0, -0.7, 0.3, 2.0, 9.0, 26.5])
def test_erfc_relative_accuracy(x):
    ref = mp.erfc(x)
    assert abs((mp.mpf(sf.erfc(x)) - ref) / ref) <= 1e-13


@pytest.mark.parametrize("x", [27.5, 30.0])
def test_erfc_below_double_range_rounds_to_zero(x):
    # erfc(30) ~ 2.6e-393 has no double representation; 0 is the correctly
    # rounded value and the logarithm stays exact
    assert mp.erfc(x) < mp.mpf("2.5e-324")
    assert sf.erfc(x) == 0.0
    assert sf.log_erfc(x) == pytest.approx(float(mp.log(mp.erfc(x))), rel=1e-14)


def test_erfcx_large_argument_asymptotics():
    x = 1e4
    # erfcx(x) x sqrt(pi) = 1 - 1/(2x^2) + 3/(4x^4) - ...
    series = 1.0 - 1.0 / (2 * x * x) + 3.0 / (4 * x**4)
    val = sf.erfcx(x) * x * math.sqrt(math.pi)
    assert abs(val - 1.0) <= 1e-7
    assert val == pytest.approx(series, rel=1e-14)
    assert math.isfinite(sf.erfcx(1e8)) and sf.erfcx(1e8) > 0


@pytest.mark.parametrize("x", np.linspace(0.0, 25.0, 26))
def test_erfcx_matches_scaled_erfc(x):
    ref = mp.exp(mp.mpf(x) ** 2) * mp.erfc(x)
    assert abs((mp.mpf(sf.erfcx(x)) - ref) / ref) <= 1e-12


@pytest.mark.parametrize("x", [-20.0, -1.0, 0.0, 3.0, 40.0, 300.0])
def test_log_erfc(x):
    assert sf.log_erfc(x) == pytest.approx(float(mp.log(mp.erfc(x))), rel=1e-13, abs=1e-15)


# --- quadrature ------------------------------------------------------------


def test_integrate_exponential_half_line():
    res = sf.integrate(lambda x: np.exp(-x), 0.0, math.inf)
    assert abs(res.value - 1.0) <= 1e-10
    assert res.abs_error_estimate >= 0 and res.evaluations > 0


def test_integrate_inverse_sqrt_singularity():
    res = sf.integrate(lambda x: x**-0.5, 0.0, 1.0, rel_tol=1e-10, abs_tol=1e-12)
    assert abs(res.value - 2.0) <= 1e-8


def test_integrate_radial_density_n5():
    res = sf.integrate(lambda r: radial_density(5, r), 0.0, math.inf, rel_tol=1e-11, abs_tol=1e-13)
    assert abs(res.value - 1.0) <= 1e-8


def test_integrate_reversed_and_empty():
    f = lambda x: x * x  # noqa: E731
    assert sf.integrate(f, 1.0, 0.0).value == pytest.approx(-1.0 / 3.0, rel=1e-13)
    assert sf.integrate(f, 2.0, 2.0).value == 0.0


def test_integrate_is_deterministic():
    f = lambda x: np.sin(x) ** 2 * np.exp(-0.1 * x)  # noqa: E731
    a = sf.integrate(f, 0.0, math.inf, breakpoints=(1.0, 10.0))
    b = sf.integrate(f, 0.0, math.inf, breakpoints=(1.0, 10.0))
    assert a == b


def test_integrate_budget_exhaustion_carries_estimate():
    with pytest.raises(sf.QuadratureConvergenceError) as info:
        sf.integrate(lambda x: 1.0 / x, 0.0, 1.0, max_intervals=20)
    assert isinstance(info.value.result, sf.QuadratureResult)
    assert info.value.result.value > 0


def test_integrate_rejects_bad_tolerances():
    with pytest.raises(sf.DomainError):
        sf.integrate(lambda x: x, 0.0, 1.0, rel_tol=0.0)


@given(st.floats(0.1, 20.0), st.floats(0.0, 5.0))
def test_integrate_gaussian_moments(scale, shift):
    res = sf.integrate(lambda x: np.exp(-((x - shift) ** 2) / (2 * scale**2)), shift, math.inf,
                       rel_tol=1e-11, abs_tol=1e-14)
    assert res.value == pytest.approx(scale * math.sqrt(math.pi / 2), rel=1e-9)


# --- tabulated CDF ---------------------------------------------------------


def test_tabulated_cdf_reproduces_exponential():
    tab = sf.TabulatedCDF(lambda x: np.exp(-x), np.linspace(0.0, 40.0, 2000))
    x = np.linspace(-1.0, 45.0, 777)
    assert np.max(np.abs(tab(x) - np.where(x > 0, -np.expm1(-np.maximum(x, 0)), 0.0))) <= 1e-8
