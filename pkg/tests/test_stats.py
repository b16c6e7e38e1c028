import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sps

from ecspade import BadNu, DimMismatch, NotSPD, log_density, mahalanobis_sq, make_background, sample
from ecspade.verify import random_spd


def test_identity_model_caches():
    m = make_background([0.0], [[1.0]], 10)
    assert m.chol.tolist() == [[1.0]]
    assert m.cov_inv.tolist() == [[1.0]]
    assert m.d == 1


def test_fig1_model():
    m = make_background(np.full(10, 2.0), np.eye(10), 10)
    np.testing.assert_array_equal(m.chol, np.eye(10))
    assert m.nu == 10.0


def test_model_is_read_only():
    m = make_background([0.0, 1.0], np.eye(2), 5)
    with pytest.raises(ValueError):
        m.mean[0] = 3.0


@pytest.mark.parametrize("cov", [[[1, 2], [2, 1]], [[1, 0], [0, 0]], [[1, 0.5], [0.4, 1]]])
def test_not_spd(cov):
    with pytest.raises(NotSPD):
        make_background([0, 0], cov, 10)


@pytest.mark.parametrize("nu", [2.0, 1.5, -3, 0])
def test_bad_nu(nu):
    with pytest.raises(BadNu):
        make_background([0], [[1]], nu)


def test_dim_mismatch():
    with pytest.raises(DimMismatch):
        make_background([0, 0, 0], np.eye(2), 10)
    m = make_background([0, 0], np.eye(2), 10)
    with pytest.raises(DimMismatch):
        mahalanobis_sq(m, [1, 2, 3])


def test_mahalanobis_examples():
    m = make_background([0, 0], np.eye(2), 10)
    assert mahalanobis_sq(m, [3, 4]) == pytest.approx(25.0, rel=1e-15)
    m = make_background([1.5, -2.0], [[2.0, 0.3], [0.3, 1.0]], 10)
    assert mahalanobis_sq(m, [1.5, -2.0]) == 0.0


def test_mahalanobis_vs_explicit_inverse():
    rng = np.random.default_rng(11)
    for _ in range(50):
        d = int(rng.integers(1, 15))
        R = random_spd(rng, d, cond=1e3)
        mu = rng.normal(size=d)
        x = rng.normal(size=d) * 3
        m = make_background(mu, R, 6.5)
        explicit = (x - mu) @ np.linalg.inv(R) @ (x - mu)
        assert mahalanobis_sq(m, x) == pytest.approx(explicit, rel=1e-10)


def test_mahalanobis_batch_matches_single():
    rng = np.random.default_rng(2)
    m = make_background(rng.normal(size=4), random_spd(rng, 4), 7)
    X = rng.normal(size=(20, 4))
    batch = mahalanobis_sq(m, X)
    assert batch.shape == (20,)
    np.testing.assert_allclose(batch, [mahalanobis_sq(m, x) for x in X], rtol=1e-14)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), d=st.integers(1, 8))
def test_mahalanobis_affine_invariance(seed, d):
    rng = np.random.default_rng(seed)
    R = random_spd(rng, d, cond=20)
    mu, x, v = rng.normal(size=(3, d))
    M = rng.normal(size=(d, d)) + 3 * np.eye(d)
    base = mahalanobis_sq(make_background(mu, R, 5), x)
    moved = mahalanobis_sq(make_background(M @ mu + v, M @ R @ M.T, 5), M @ x + v)
    assert moved == pytest.approx(base, rel=1e-8, abs=1e-12)


def test_log_density_gaussian_limit_at_mode():
    m = make_background([0.0], [[1.0]], 1e6)
    assert abs(log_density(m, [0.0]) + 0.5 * np.log(2 * np.pi)) < 1e-3


def test_log_density_matches_scipy():
    # scipy parameterizes by the scale matrix; ours by the covariance R
    rng = np.random.default_rng(5)
    for nu in (2.5, 4.0, 10.0, 37.3):
        d = 4
        R = random_spd(rng, d)
        mu = rng.normal(size=d)
        m = make_background(mu, R, nu)
        X = mu + rng.normal(size=(30, d)) * 2
        ref = sps.multivariate_t(loc=mu, shape=R * (nu - 2) / nu, df=nu).logpdf(X)
        np.testing.assert_allclose(log_density(m, X), ref, rtol=1e-11, atol=1e-11)


def test_log_density_max_at_mean():
    rng = np.random.default_rng(9)
    m = make_background(rng.normal(size=5), random_spd(rng, 5), 4.0)
    top = log_density(m, m.mean)
    X = m.mean + rng.normal(size=(100, 5)) * rng.uniform(1e-3, 3, size=(100, 1))
    assert np.all(log_density(m, X) < top)


def test_fatter_tail_for_smaller_nu():
    d = 3
    R = np.diag([1.0, 2.0, 0.5])
    x = np.array([np.sqrt(100 * d), 0, 0])  # D(x) = 100 d
    lo = make_background(np.zeros(d), R, 4.0)
    hi = make_background(np.zeros(d), R, 30.0)
    x = x * np.sqrt(R[0, 0])
    assert mahalanobis_sq(lo, x) == pytest.approx(100 * d)
    assert log_density(lo, x) > log_density(hi, x)


def test_density_integrates_to_one_2d():
    m = make_background([0.0, 0.0], np.eye(2), 10)
    g = np.linspace(-60, 60, 1201)
    h = g[1] - g[0]
    xx, yy = np.meshgrid(g, g)
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    total = np.exp(log_density(m, pts)).sum() * h * h
    assert abs(total - 1) < 1e-3
    assert np.isfinite(log_density(m, [1.0, 1.0]))


def test_density_integrates_to_one_1d():
    m = make_background([0.5], [[2.0]], 3.0)
    g = np.linspace(-3000, 3000, 2_000_001)
    total = np.exp(log_density(m, g[:, None])).sum() * (g[1] - g[0])
    assert abs(total - 1) < 1e-3


def test_sampler_moments():
    m = make_background([0.0, 0.0], np.eye(2), 10)
    z = sample(m, 100_000, seed=123).data
    assert np.all(np.abs(z.mean(axis=0)) < 0.02)
    assert np.all(np.abs(np.cov(z.T) - np.eye(2)) < 0.05)


def test_sampler_mean_mahalanobis_equals_d():
    m = make_background(np.full(10, 2.0), np.eye(10), 10)
    z = sample(m, 100_000, seed=7).data
    assert abs(mahalanobis_sq(m, z).mean() / 10 - 1) < 0.02


def test_sampler_correlated_covariance():
    rng = np.random.default_rng(3)
    R = random_spd(rng, 3, cond=10)
    m = make_background([1.0, -1.0, 0.5], R, 8)
    z = sample(m, 200_000, seed=1).data
    np.testing.assert_allclose(np.cov(z.T), R, atol=0.05 * np.max(R))


def test_sampler_tail_matches_t_marginal():
    # first coordinate of a multivariate t is a scaled univariate t
    m = make_background([0.0, 0.0], np.eye(2), 5)
    z = sample(m, 50_000, seed=4).data[:, 0]
    scale = np.sqrt((5 - 2) / 5)
    ks = sps.kstest(z / scale, sps.t(df=5).cdf)
    assert ks.pvalue > 1e-3


def test_sampler_determinism():
    m = make_background([0.0, 1.0], np.eye(2), 10)
    a = sample(m, 1000, seed=42, stream=(3, 1)).data
    b = sample(m, 1000, seed=42, stream=(3, 1)).data
    c = sample(m, 1000, seed=42, stream=(3, 2)).data
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    batch = sample(m, 5, seed=42, stream=7)
    assert len(batch) == 5 and batch.stream == (7,) and batch.seed == 42


def test_gaussian_model():
    m = make_background([0.0, 0.0], np.eye(2), np.inf)
    assert m.gaussian
    ref = sps.multivariate_normal(np.zeros(2), np.eye(2)).logpdf([0.3, -1.0])
    assert log_density(m, [0.3, -1.0]) == pytest.approx(ref, rel=1e-13)
