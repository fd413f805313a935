import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from symspec.ensembles import (
    EnsembleKind,
    EnsembleSpec,
    derive_stream,
    generate,
    sample,
    sample_goe,
    sample_haar_unit_vector,
)
from symspec.specfun import integrate


def _within_3se(draws, target):
    draws = np.asarray(draws)
    se = draws.std(ddof=1) / math.sqrt(draws.size)
    return abs(draws.mean() - target) <= 3 * se


# --- streams ---------------------------------------------------------------


def test_stream_deterministic():
    a = derive_stream(42, 0).standard_normal(100)
    b = derive_stream(42, 0).standard_normal(100)
    assert np.array_equal(a, b)


def test_streams_for_different_workers_are_independent():
    a = derive_stream(42, 0).standard_normal(10_000)
    b = derive_stream(42, 1).standard_normal(10_000)
    assert stats.ks_2samp(a, b).pvalue > 0.001
    assert abs(stats.pearsonr(a, b)[0]) < 4 / math.sqrt(a.size)


def test_stream_seed_sensitivity():
    a = derive_stream(42, 0).standard_normal(10)
    b = derive_stream(43, 0).standard_normal(10)
    assert np.all(a != b)


def test_stream_accepts_full_64_bit_seeds():
    a = derive_stream(2**64 - 1, 2**63).standard_normal(3)
    assert np.all(np.isfinite(a))


# --- GOE -------------------------------------------------------------------


@pytest.fixture(scope="module")
def goe_draws():
    rng = derive_stream(5, 0)
    return np.array([sample_goe(4, rng) for _ in range(100_000)])


def test_goe_symmetric_exactly():
    x = sample_goe(9, derive_stream(1, 0))
    assert np.array_equal(x, x.T) and x.dtype == float


def test_goe_second_moments(goe_draws):
    x = goe_draws
    n = 4
    assert _within_3se(x[:, 0, 1] ** 2, 1 / n)
    assert _within_3se(x[:, 0, 0] ** 2, 2 / n)
    # (nm) = (lk) gives the same variance as (nm) = (kl)
    assert _within_3se(x[:, 0, 1] * x[:, 1, 0], 1 / n)


@pytest.mark.parametrize("a,b", [((0, 1), (2, 3)), ((0, 1), (0, 2)), ((0, 0), (1, 1)), ((0, 0), (0, 1)),
                                 ((1, 2), (3, 3))])
def test_goe_disjoint_pairs_decorrelated(goe_draws, a, b):
    assert _within_3se(goe_draws[:, a[0], a[1]] * goe_draws[:, b[0], b[1]], 0.0)


def test_goe_zero_mean(goe_draws):
    assert _within_3se(goe_draws[:, 0, 2], 0.0)
    assert _within_3se(goe_draws[:, 3, 3], 0.0)


# --- full ensembles --------------------------------------------------------


@pytest.mark.parametrize("kind", [EnsembleKind.AI_GAUSSIAN, EnsembleKind.AI_BERNOULLI])
@settings(max_examples=20)
@given(n=st.integers(2, 40), seed=st.integers(0, 2**64 - 1))
def test_ai_kinds_transpose_symmetric(kind, n, seed):
    j = sample(EnsembleSpec(kind, n, seed), derive_stream(seed, 0))
    assert np.array_equal(j, j.T)


def test_bernoulli_entries_are_plus_minus_half():
    rng = derive_stream(3, 0)
    for _ in range(50):
        j = sample(EnsembleSpec(EnsembleKind.AI_BERNOULLI, 4), rng)
        assert set(np.unique(j.real)) <= {-0.5, 0.5}
        assert set(np.unique(j.imag)) <= {-0.5, 0.5}


def test_bernoulli_signs_balanced():
    rng = derive_stream(4, 0)
    j = np.array([sample(EnsembleSpec(EnsembleKind.AI_BERNOULLI, 10), rng) for _ in range(2000)])
    iu = np.triu_indices(10)
    signs = np.sign(j[:, iu[0], iu[1]].real).ravel()
    assert abs(signs.mean()) <= 4 / math.sqrt(signs.size)


def test_gaussian_offdiagonal_variance():
    n = 100
    rng = derive_stream(8, 0)
    spec = EnsembleSpec(EnsembleKind.AI_GAUSSIAN, n)
    vals = np.array([abs(sample(spec, rng)[0, 1]) ** 2 for _ in range(10_000)])
    assert _within_3se(vals, 2 / n)


@pytest.mark.parametrize("kind", [EnsembleKind.GINIBRE_COMPLEX, EnsembleKind.GINIBRE_REAL])
def test_ginibre_entry_variance(kind):
    n = 20
    rng = derive_stream(9, 0)
    spec = EnsembleSpec(kind, n)
    vals = np.concatenate([np.abs(sample(spec, rng)).ravel() ** 2 for _ in range(500)])
    assert _within_3se(vals, 2 / n)
    if kind is EnsembleKind.GINIBRE_REAL:
        assert np.all(sample(spec, rng).imag == 0)


def test_generate_is_reproducible_per_index():
    spec = EnsembleSpec(EnsembleKind.AI_GAUSSIAN, 6, 77)
    assert np.array_equal(generate(spec, 3), generate(spec, 3))
    assert not np.array_equal(generate(spec, 3), generate(spec, 4))
    assert not np.array_equal(generate(spec, 3), generate(EnsembleSpec(EnsembleKind.AI_GAUSSIAN, 6, 78), 3))


@pytest.mark.parametrize("bad", [dict(n=1), dict(n=3, master_seed=-1), dict(n=3, master_seed=2**64)])
def test_spec_validation(bad):
    with pytest.raises(ValueError):
        EnsembleSpec(EnsembleKind.AI_GAUSSIAN, **bad)


# --- Haar vectors ----------------------------------------------------------


@given(n=st.integers(2, 60), seed=st.integers(0, 2**32))
def test_haar_unit_norm(n, seed):
    v = sample_haar_unit_vector(n, derive_stream(seed, 0))
    assert abs(np.vdot(v, v).real - 1.0) <= 1e-14


def _haar_y(n, m, seed):
    rng = derive_stream(seed, 0)
    return np.array([abs(v @ v) ** 2 for v in (sample_haar_unit_vector(n, rng) for _ in range(m))])


def test_haar_n2_mean():
    assert _within_3se(_haar_y(2, 100_000, 21), 2 / 3)


def test_haar_n5_second_moment():
    n = 5
    ref = (n - 1) * integrate(lambda p: p ** (n - 2) * (1 - p * p) ** 2, 0.0, 1.0).value
    assert ref == pytest.approx(1 / 6, rel=1e-12)
    assert _within_3se(_haar_y(n, 100_000, 22) ** 2, ref)
