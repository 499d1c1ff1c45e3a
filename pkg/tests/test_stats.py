import numpy as np
import pytest

from mcips.stats import (
    bonferroni,
    bootstrap_ci,
    correlation_z,
    dispersion_test,
    ks_exponential,
    paired_z,
    statistic_names,
    statistics_matrix,
    statistics_vector,
    two_sample_z,
)


def test_ks_exponential_self_consistent():
    rng = np.random.default_rng(1)
    p = [ks_exponential(rng.exponential(1.0, 200))[1] for _ in range(400)]
    # p-values of a true null are uniform
    hist = np.histogram(p, bins=4, range=(0, 1))[0]
    assert np.all(np.abs(hist - 100) < 3 * np.sqrt(100 * 0.75))


def test_ks_rejects_wrong_rate():
    x = np.random.default_rng(2).exponential(0.5, 5000)
    assert ks_exponential(x)[1] < 1e-6


def test_dispersion():
    rng = np.random.default_rng(3)
    assert dispersion_test(rng.poisson(4.0, 5000), 4.0)[1] > 1e-3
    overdispersed = rng.negative_binomial(2, 1 / 3, 5000)
    assert dispersion_test(overdispersed, 4.0)[1] < 1e-6


def test_identical_samples_accept():
    a = np.random.default_rng(4).normal(size=(100, 5))
    z, p = two_sample_z(a, a)
    assert np.all(z == 0) and np.all(p == 1)
    z, p = paired_z(a, a)
    assert np.all(z == 0) and not bonferroni(p)[0]


def test_shifted_samples_reject():
    rng = np.random.default_rng(5)
    a = rng.normal(size=(400, 3))
    b = rng.normal(size=(400, 3))
    shift = 5.0 * np.sqrt(2 / 400)
    z, p = two_sample_z(a + shift, b)
    assert bonferroni(p, 0.01)[0] and np.all(z > 2)


def test_bonferroni_threshold():
    reject, thr, mask = bonferroni([0.001, 0.5, 0.2, 0.9], 0.01)
    assert thr == pytest.approx(0.0025) and reject and mask.tolist() == [True, False, False, False]


def test_bootstrap_ci_covers_mean():
    x = np.random.default_rng(6).normal(3.0, 1.0, 500)
    lo, hi = bootstrap_ci(x, seed=1)
    assert lo < 3.0 < hi
    assert bootstrap_ci(x, seed=1) == (lo, hi)


def test_correlation_z():
    rng = np.random.default_rng(7)
    x = rng.normal(size=2000)
    assert abs(correlation_z(x, rng.normal(size=2000))[1]) < 4
    assert correlation_z(x, x)[0] == pytest.approx(1.0)
    assert correlation_z(np.ones(5), x[:5]) == (0.0, 0.0)


def test_statistics_vector_by_hand():
    v = statistics_vector([1, 2, 3, 1], n=2, max_lag=1)
    assert v.densities.tolist() == [0.5, 0.25, 0.25]
    assert v.pairs[0, 1] == pytest.approx(1 / 3) and v.pairs[2, 0] == pytest.approx(1 / 3)
    assert v.pairs.sum() == pytest.approx(1.0)


def test_matrix_matches_vector():
    rng = np.random.default_rng(8)
    W = rng.integers(1, 5, (7, 60))
    M = statistics_matrix(W, 3, max_lag=4)
    for row, w in zip(M, W):
        assert np.allclose(row, statistics_vector(w, 3, 4).flat())
    assert M.shape[1] == len(statistic_names(3, 4))


def test_statistic_count():
    # 4 densities, 16 pairs, 8 lags x 3 classes
    assert len(statistic_names(3)) == 44
