"""Gaussian-process core: dense-solve equivalence, jitter, likelihood, MLE."""

import numpy as np
import pytest

import oracles
from priorbo import Kernel, NumericalError, fit_gp, fit_gp_mle, log_marginal_likelihood
from priorbo.errors import ConfigError
from priorbo.gp import DEFAULT_MLE_BOUNDS, chol_with_jitter


def _random_instance(rng, n=None, d=None):
    n = n or int(rng.integers(2, 12))
    d = d or int(rng.integers(1, 4))
    X = rng.uniform(size=(n, d))
    y = rng.normal(size=n)
    ls = rng.uniform(0.2, 1.5, size=d)
    signal = float(rng.uniform(0.5, 2.0))
    noise = float(rng.uniform(1e-6, 1e-2))
    return X, y, ls, signal, noise


class TestPosteriorAgainstDenseOracle:
    """The factorized posterior equals a naive dense linear solve."""

    def test_mean_and_variance_match_oracle(self):
        """Both kernels, random small instances, 1e-8 relative agreement."""
        rng = np.random.default_rng(101)
        for family in ("matern52", "gaussian"):
            for _ in range(8):
                X, y, ls, signal, noise = _random_instance(rng)
                post = fit_gp(X, y, Kernel(family, ls, signal), noise)
                Xq = rng.uniform(size=(6, X.shape[1]))
                mean, var = post.predict(Xq)
                o_mean, o_var = oracles.dense_gp_posterior(
                    family, X, y, Xq, ls, signal, noise
                )
                np.testing.assert_allclose(mean, o_mean, rtol=1e-8, atol=1e-10)
                np.testing.assert_allclose(var, o_var, rtol=1e-8, atol=1e-10)

    def test_interpolates_with_small_noise(self):
        """At training inputs the mean reproduces y and variance is tiny."""
        rng = np.random.default_rng(7)
        X = rng.uniform(size=(10, 2))
        y = rng.normal(size=10)
        post = fit_gp(X, y, Kernel("matern52", np.array([0.5, 0.5])), 1e-10)
        mean, var = post.predict(X)
        np.testing.assert_allclose(mean, y, atol=1e-4)
        assert np.all(var < 1e-4)

    def test_far_field_reverts_to_prior(self):
        """Far from all data the mean tends to 0 and variance to s^2."""
        X = np.zeros((3, 1)) + np.array([[0.0], [0.1], [0.2]])
        y = np.array([5.0, 5.1, 4.9])
        post = fit_gp(X, y, Kernel("gaussian", np.array([0.1]), 1.5), 1e-6)
        mean, var = post.predict(np.array([[50.0]]))
        np.testing.assert_allclose(mean, 0.0, atol=1e-8)
        np.testing.assert_allclose(var, 1.5**2, rtol=1e-8)

    def test_two_point_symmetric_configuration(self):
        """Midpoint of two equal-y observations matches the dense oracle."""
        X = np.array([[0.2], [0.8]])
        y = np.array([1.0, 1.0])
        mid = np.array([[0.5]])
        post = fit_gp(X, y, Kernel("matern52", np.array([0.4])), 1e-6)
        mean, var = post.predict(mid)
        o_mean, o_var = oracles.dense_gp_posterior(
            "matern52", X, y, mid, [0.4], 1.0, 1e-6
        )
        np.testing.assert_allclose(mean, o_mean, rtol=1e-10)
        np.testing.assert_allclose(var, o_var, rtol=1e-10)

    def test_translation_identity(self):
        """Shifting y by c moves the mean by exactly c * k(x)^T Kinv 1."""
        rng = np.random.default_rng(13)
        X = rng.uniform(size=(8, 2))
        y = rng.normal(size=8)
        kernel = Kernel("matern52", np.array([0.5, 0.7]))
        noise = 1e-4
        Xq = rng.uniform(size=(5, 2))
        c = 3.7
        base, _ = fit_gp(X, y, kernel, noise).predict(Xq)
        shifted, _ = fit_gp(X, y + c, kernel, noise).predict(Xq)
        ones_response, _ = fit_gp(X, np.ones(8), kernel, noise).predict(Xq)
        np.testing.assert_allclose(shifted, base + c * ones_response, rtol=1e-9)

    def test_posterior_covariance_consistent_with_variance(self):
        """predict_cov's diagonal equals predict's variance."""
        rng = np.random.default_rng(17)
        X, y, ls, signal, noise = _random_instance(rng, n=9, d=2)
        post = fit_gp(X, y, Kernel("gaussian", ls, signal), noise)
        Xq = rng.uniform(size=(7, 2))
        _, var = post.predict(Xq)
        mean_c, cov = post.predict_cov(Xq)
        np.testing.assert_allclose(np.diag(cov), var, rtol=1e-8, atol=1e-12)
        eigs = np.linalg.eigvalsh(0.5 * (cov + cov.T))
        assert eigs.min() > -1e-9

    def test_variance_never_negative(self):
        """Clamping keeps reported variances nonnegative under cancellation."""
        rng = np.random.default_rng(19)
        X = rng.uniform(size=(20, 1))
        y = rng.normal(size=20)
        post = fit_gp(X, y, Kernel("gaussian", np.array([2.0])), 0.0)
        _, var = post.predict(X)
        assert np.all(var >= 0.0)


class TestCholeskyJitter:
    """Escalating-jitter factorization."""

    def test_clean_matrix_uses_zero_jitter(self):
        """Well-conditioned matrices factorize without jitter."""
        A = np.array([[2.0, 0.5], [0.5, 1.0]])
        L, jitter = chol_with_jitter(A)
        assert jitter == 0.0
        np.testing.assert_allclose(L @ L.T, A, rtol=1e-12)

    def test_singular_matrix_needs_jitter(self):
        """A rank-deficient PSD matrix factorizes once jitter is added."""
        v = np.array([[1.0], [1.0]])
        A = v @ v.T  # rank one
        L, jitter = chol_with_jitter(A)
        assert jitter > 0.0
        np.testing.assert_allclose(L @ L.T, A + jitter * np.eye(2), rtol=1e-9)

    def test_hopeless_matrix_raises(self):
        """A clearly negative-definite matrix fails with NumericalError."""
        with pytest.raises(NumericalError):
            chol_with_jitter(np.array([[-1.0, 0.0], [0.0, -1.0]]))

    def test_duplicate_points_still_fit(self):
        """Duplicated inputs with zero noise rely on the jitter ladder."""
        X = np.array([[0.5], [0.5], [0.7]])
        y = np.array([1.0, 1.0, 2.0])
        post = fit_gp(X, y, Kernel("gaussian", np.array([0.3])), 0.0)
        assert post.jitter >= 0.0
        mean, _ = post.predict(np.array([[0.5]]))
        np.testing.assert_allclose(mean, 1.0, atol=1e-3)


class TestLogMarginalLikelihood:
    """Closed-form likelihood against the dense oracle."""

    def test_matches_dense_oracle(self):
        """LML equals the naive determinant-based formula."""
        rng = np.random.default_rng(23)
        for _ in range(10):
            X, y, ls, signal, noise = _random_instance(rng)
            got = log_marginal_likelihood(X, y, Kernel("matern52", ls, signal), noise)
            want = oracles.dense_log_marginal_likelihood(
                "matern52", X, y, ls, signal, noise
            )
            np.testing.assert_allclose(got, want, rtol=1e-8)

    def test_higher_for_well_matched_noise(self):
        """Data generated with noise prefers the true noise level."""
        rng = np.random.default_rng(29)
        X = np.linspace(0, 1, 30)[:, None]
        kernel = Kernel("gaussian", np.array([0.2]))
        true_noise = 0.05**2
        f = np.sin(6 * X[:, 0])
        y = f + rng.normal(scale=0.05, size=30)
        good = log_marginal_likelihood(X, y, kernel, true_noise)
        bad = log_marginal_likelihood(X, y, kernel, 1e-9)
        assert good > bad


class TestInputValidation:
    """fit_gp contract checks."""

    def test_row_count_mismatch(self):
        """X and y must have equal rows."""
        with pytest.raises(ConfigError):
            fit_gp(np.zeros((3, 1)), np.zeros(2), Kernel("matern52", np.array([1.0])), 1e-6)

    def test_empty_data_rejected(self):
        """Zero observations cannot be fit."""
        with pytest.raises(ConfigError):
            fit_gp(np.zeros((0, 1)), np.zeros(0), Kernel("matern52", np.array([1.0])), 1e-6)

    def test_kernel_dimension_mismatch(self):
        """The kernel's length-scale count must match the data."""
        with pytest.raises(ConfigError):
            fit_gp(np.zeros((3, 2)), np.zeros(3), Kernel("matern52", np.array([1.0])), 1e-6)

    def test_negative_noise_rejected(self):
        """Noise variance must be >= 0."""
        with pytest.raises(ConfigError):
            fit_gp(np.zeros((3, 1)), np.zeros(3), Kernel("matern52", np.array([1.0])), -1.0)

    def test_nonfinite_data_rejected(self):
        """NaN observations are a usage error, not a numeric event."""
        with pytest.raises(ConfigError):
            fit_gp(
                np.array([[0.0], [1.0]]),
                np.array([0.0, np.nan]),
                Kernel("matern52", np.array([1.0])),
                1e-6,
            )


class TestMaximumLikelihood:
    """Seeded pattern-search hyperparameter selection."""

    def test_deterministic_under_seed(self):
        """Identical generators give identical fits."""
        rng_data = np.random.default_rng(31)
        X = rng_data.uniform(size=(15, 1))
        y = np.sin(8 * X[:, 0])
        a = fit_gp_mle(X, y, rng=np.random.default_rng(5))
        b = fit_gp_mle(X, y, rng=np.random.default_rng(5))
        np.testing.assert_array_equal(a.kernel.length_scales, b.kernel.length_scales)
        assert a.noise_variance == b.noise_variance
        assert a.log_likelihood == b.log_likelihood

    def test_respects_bounds(self):
        """Selected parameters stay inside the log-space search box."""
        rng = np.random.default_rng(37)
        X = rng.uniform(size=(12, 2))
        y = rng.normal(size=12)
        fit = fit_gp_mle(X, y, rng=np.random.default_rng(0))
        lo_ls, hi_ls = DEFAULT_MLE_BOUNDS["log_length_scale"]
        assert np.all(np.log(fit.kernel.length_scales) >= lo_ls - 1e-12)
        assert np.all(np.log(fit.kernel.length_scales) <= hi_ls + 1e-12)
        lo_n, hi_n = DEFAULT_MLE_BOUNDS["log_noise_scale"]
        assert lo_n - 1e-12 <= 0.5 * np.log(fit.noise_variance) <= hi_n + 1e-12

    def test_beats_default_hyperparameters(self):
        """The fitted likelihood is at least that of a default kernel."""
        rng = np.random.default_rng(41)
        X = rng.uniform(size=(20, 1))
        y = np.sin(10 * X[:, 0]) + rng.normal(scale=0.05, size=20)
        fit = fit_gp_mle(X, y, rng=np.random.default_rng(1))
        ys = (y - fit.y_mean) / fit.y_scale
        default_ll = log_marginal_likelihood(
            X, ys, Kernel("matern52", np.array([0.2])), 1e-6
        )
        assert fit.log_likelihood >= default_ll - 1e-9

    def test_constant_outputs_pin_noise_scale_to_lower_bound(self):
        """Zero-spread y standardizes to zeros and drives noise to the floor."""
        X = np.linspace(0, 1, 8)[:, None]
        y = np.full(8, 3.0)
        fit = fit_gp_mle(X, y, rng=np.random.default_rng(2))
        assert fit.y_scale == 1.0
        lo_n = DEFAULT_MLE_BOUNDS["log_noise_scale"][0]
        np.testing.assert_allclose(0.5 * np.log(fit.noise_variance), lo_n, atol=0.5)

    def test_reports_standardization_constants(self):
        """y_mean / y_scale reflect the raw outputs."""
        X = np.linspace(0, 1, 10)[:, None]
        y = 100.0 + 5.0 * np.sin(7 * X[:, 0])
        fit = fit_gp_mle(X, y, rng=np.random.default_rng(3))
        np.testing.assert_allclose(fit.y_mean, np.mean(y), rtol=1e-12)
        np.testing.assert_allclose(fit.y_scale, np.std(y), rtol=1e-12)

    def test_needs_two_observations(self):
        """A single observation cannot drive the likelihood search."""
        with pytest.raises(ConfigError):
            fit_gp_mle(np.zeros((1, 1)), np.zeros(1))

    def test_recovers_short_length_scale(self):
        """Fast-wiggling data selects a much shorter scale than slow data."""
        X = np.linspace(0, 1, 40)[:, None]
        fast = np.sin(40 * X[:, 0])
        slow = np.sin(2 * X[:, 0])
        fit_fast = fit_gp_mle(X, fast, rng=np.random.default_rng(4))
        fit_slow = fit_gp_mle(X, slow, rng=np.random.default_rng(4))
        assert fit_fast.kernel.length_scales[0] < fit_slow.kernel.length_scales[0]
