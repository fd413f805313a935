import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from symspec import laws_asymptotic as A
from symspec import laws_exact as L
from symspec.laws_asymptotic import EnsembleTag
from symspec.specfun import DomainError, integrate

TAGS = list(EnsembleTag)


def theta_ai_mp(s):
    s = mp.mpf(s)
    return mp.erfc(s / mp.sqrt(2)) / 4 + mp.erfc(-s / 2) * mp.exp(-s * s / 4) / (2 * mp.sqrt(2)) * (
        1 - mp.sqrt(mp.pi / 2) * s / 2 * mp.exp(s * s / 2) * mp.erfc(s / mp.sqrt(2))
    )


# --- edge profiles ---------------------------------------------------------


def test_theta_values_at_zero():
    assert A.edge_profile(EnsembleTag.GINIBRE_COMPLEX, 0.0) == pytest.approx(0.5, rel=1e-15)
    assert A.edge_profile(EnsembleTag.AI_DAGGER, 0.0) == pytest.approx(0.25 + 1 / (2 * math.sqrt(2)), rel=1e-14)
    assert A.edge_profile(EnsembleTag.AI_DAGGER, 0.0) == pytest.approx(0.603553, abs=1e-6)
    assert A.edge_profile(EnsembleTag.GINIBRE_REAL, 0.0) == pytest.approx(0.5 + 1 / (2 * math.sqrt(2)), rel=1e-14)


def test_theta_ai_limits_at_eight():
    assert abs(A.edge_profile(EnsembleTag.AI_DAGGER, 8.0)) <= 1e-6
    assert abs(A.edge_profile(EnsembleTag.AI_DAGGER, -8.0) - 1.0) <= 1e-6


def test_theta_ai_approaches_one_slowly():
    # the deficit behaves like 1/s^2 and the exact finite-N density agrees
    for s in (-8.0, -20.0, -50.0):
        deficit = 1.0 - A.edge_profile(EnsembleTag.AI_DAGGER, s)
        assert 0.5 / s**2 < deficit < 1.5 / s**2
    n = 10_000
    r = math.sqrt(2.0 * (1.0 - 8.0 / math.sqrt(n)))
    exact = L.radial_density(n, r) / r
    assert exact == pytest.approx(A.edge_profile(EnsembleTag.AI_DAGGER, -8.0), abs=2e-3)


@pytest.mark.parametrize("tag", [EnsembleTag.GINIBRE_REAL, EnsembleTag.GINIBRE_COMPLEX])
def test_ginibre_profiles_saturate(tag):
    assert A.edge_profile(tag, -8.0) == pytest.approx(1.0, abs=1e-6)
    assert A.edge_profile(tag, 8.0) == pytest.approx(0.0, abs=1e-6)


@pytest.mark.parametrize("s", [-30.0, -6.0, -1.5, 0.3, 2.0, 7.0, 25.0])
def test_theta_ai_against_high_precision(s):
    mp.mp.dps = 60
    assert A.edge_profile(EnsembleTag.AI_DAGGER, s) == pytest.approx(float(theta_ai_mp(s)), rel=1e-12)


@pytest.mark.parametrize("tag", TAGS)
def test_profiles_strictly_decreasing(tag):
    vals = A.edge_profile(tag, np.linspace(-6, 6, 500))
    assert np.all(np.diff(vals) < 0)


def test_profile_ordering_at_zero():
    t1, tai, t2 = (A.edge_profile(t, 0.0) for t in (EnsembleTag.GINIBRE_REAL, EnsembleTag.AI_DAGGER,
                                                    EnsembleTag.GINIBRE_COMPLEX))
    assert t1 > tai > t2 == 0.5


@pytest.mark.parametrize("tag", TAGS)
@given(s=st.floats(-50.0, 50.0))
def test_profiles_finite_in_log_space(tag, s):
    ln = A.ln_edge_profile(tag, s)
    assert math.isfinite(ln) and ln <= 1e-12


def test_profile_accepts_string_tags_and_arrays():
    out = A.edge_profile("gin2", np.array([0.0, 1.0]))
    assert out.shape == (2,) and out[0] == 0.5


# --- large-N radial density ------------------------------------------------


def test_density_large_n_deep_bulk():
    assert abs(A.density_large_n(50, 1.0) - 1.0) <= 1e-5


def test_density_large_n_at_edge():
    assert A.density_large_n(77, math.sqrt(2)) == pytest.approx(0.853553, abs=1e-6)


def test_density_large_n_close_to_exact_at_n100():
    r = np.linspace(0.0, 2.5, 501)
    gap = np.max(np.abs(L.radial_density(100, r) - A.density_large_n(100, r)))
    assert gap <= 0.01


def test_density_large_n_gap_shrinks_like_inverse_sqrt_n():
    r = np.linspace(0.0, 2.5, 501)
    gaps = [np.max(np.abs(L.radial_density(n, r) - A.density_large_n(n, r))) for n in (100, 400, 1600)]
    assert gaps[1] / gaps[0] == pytest.approx(0.5, abs=0.08)
    assert gaps[2] / gaps[1] == pytest.approx(0.5, abs=0.08)


def test_density_large_n_triangular_limit():
    r = np.array([0.3, 1.0, 1.3, 1.5, 2.0])
    dens = A.density_large_n(10**8, r)
    assert np.allclose(dens, np.where(r <= math.sqrt(2), r, 0.0), atol=1e-3)


def test_density_large_n_domain():
    with pytest.raises(DomainError):
        A.density_large_n(1, 1.0)
    with pytest.raises(DomainError):
        A.density_large_n(10, -1.0)


# --- bulk overlap law ------------------------------------------------------


def test_bulk_law_normalized():
    res = integrate(lambda t: A.bulk_overlap_law(0.0, t), 0.0, math.inf, rel_tol=1e-13, abs_tol=1e-15)
    assert abs(res.value - 1.0) <= 1e-10


@pytest.mark.parametrize("r", [0.0, 0.7, 1.3])
def test_bulk_law_mean(r):
    res = integrate(lambda t: t * A.bulk_overlap_law(r, t), 0.0, 1.0, rel_tol=1e-12, abs_tol=1e-15)
    # tail beyond 1: <tau>^2 / tau^2 integrates in closed form up to the exponential
    tail = integrate(lambda t: t * A.bulk_overlap_law(r, t), 1.0, math.inf, rel_tol=1e-12, abs_tol=1e-15)
    assert res.value + tail.value == pytest.approx(A.mean_tau(r), rel=1e-5)
    assert A.mean_tau(0.0) == 0.5


@pytest.mark.parametrize("r", [0.0, 1.0])
def test_bulk_law_mode(r):
    m = A.mean_tau(r)
    opt = minimize_scalar(lambda t: -A.bulk_overlap_law(r, t), bounds=(1e-3 * m, 10 * m), method="bounded",
                          options={"xatol": 1e-12})
    assert opt.x == pytest.approx(m / 3, rel=1e-6)


def test_bulk_law_domain():
    for r in (math.sqrt(2), 1.5):
        with pytest.raises(DomainError):
            A.bulk_overlap_law(r, 1.0)
    with pytest.raises(DomainError):
        A.bulk_overlap_law(0.5, 0.0)


# --- edge overlap laws -----------------------------------------------------


def test_edge_law_ai_value():
    assert A.edge_overlap_law(EnsembleTag.AI_DAGGER, 0.0, 1.0) == pytest.approx(0.2900, abs=5e-5)


@pytest.mark.parametrize("tag", TAGS)
@pytest.mark.parametrize("s", [-1.0, 0.0, 1.0])
def test_edge_law_normalized(tag, s):
    res = integrate(lambda x: A.edge_overlap_law(tag, s, x), 0.0, math.inf, rel_tol=1e-11, abs_tol=1e-14,
                    breakpoints=(0.1, 1.0, 10.0))
    assert abs(res.value - 1.0) <= 1e-6


def _edge_vs_bulk_ks(s):
    m = -s / 2  # <tau> sqrt(N) at edge position s
    grid = np.geomspace(m / 50, m * 200, 600)
    f = lambda x: A.edge_overlap_law(EnsembleTag.AI_DAGGER, s, x)  # noqa: E731
    cdf, acc, prev = [], 0.0, 0.0
    for g in grid:
        acc += integrate(f, prev, g, rel_tol=1e-10, abs_tol=1e-14).value
        prev = g
        cdf.append(acc)
    bulk = (1 + m / grid) * np.exp(-m / grid)
    return float(np.max(np.abs(np.array(cdf) - bulk)))


def test_edge_law_matches_bulk_shape_deep_inside():
    # measured 0.092 at s=-4, 0.027 at s=-8, 0.007 at s=-16
    assert _edge_vs_bulk_ks(-4.0) <= 0.1
    assert _edge_vs_bulk_ks(-16.0) <= 0.01


@pytest.mark.parametrize("tag", TAGS)
@given(s=st.floats(-40.0, 40.0), sigma=st.floats(1e-3, 1e3))
def test_edge_law_finite_nonnegative(tag, s, sigma):
    v = A.edge_overlap_law(tag, s, sigma, log=True)
    assert v == -math.inf or math.isfinite(v)


def test_edge_law_domain():
    with pytest.raises(DomainError):
        A.edge_overlap_law(EnsembleTag.AI_DAGGER, 0.0, 0.0)
    with pytest.raises(DomainError):
        A.edge_overlap_law(EnsembleTag.GINIBRE_REAL, 0.0, np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        A.edge_overlap_law(EnsembleTag.GINIBRE_REAL, 0.0, 1.0, refine_n=100)


# --- refined factor --------------------------------------------------------


@pytest.mark.parametrize("s,sigma", [(0.0, 1.0), (0.5, 2.0), (-2.0, 1.0)])
def test_refined_factor_large_n_limit(s, sigma):
    n = 10**8
    lead = math.sqrt(n) / (2 * sigma) + s / (2 * sigma) - 1 / (2 * sigma**2)
    assert abs(A.refined_edge_factor(n, s, sigma, log=True) - lead) <= 1e-3


def test_refined_factor_is_exact():
    n, s, sigma = 100, 0.5, 2.0
    x = n * (1 + s / math.sqrt(n))
    y = 1 / (1 + math.sqrt(n) * sigma)
    assert A.refined_edge_factor(n, s, sigma) == pytest.approx(math.exp(x * y / 2), rel=1e-12)


def test_refined_factor_small_sigma_finite_in_log():
    v = A.refined_edge_factor(100, 0.0, 1e-3, log=True)
    assert math.isfinite(v)


def test_refined_factor_domain():
    with pytest.raises(DomainError):
        A.refined_edge_factor(100, 0.0, 0.0)


def test_refined_mode_tends_to_leading_law():
    sig = np.array([0.2, 1.0, 4.0])
    lead = A.edge_overlap_law(EnsembleTag.AI_DAGGER, 0.5, sig)
    n = 10**12
    ref = A.edge_overlap_law(EnsembleTag.AI_DAGGER, 0.5, sig, refine_n=n)
    # next term in the exponent: -(s - 1/sigma) / (2 sigma^2 sqrt(N))
    assert np.allclose(np.log(ref / lead), -(0.5 - 1 / sig) / (2 * sig**2 * math.sqrt(n)), rtol=1e-3, atol=1e-12)
