"""Exact Gaussian-process regression with a zero prior mean.

The posterior at a query point x given data (X, y) and noise variance v is

    mean(x) = k(x)^T (K + v I)^{-1} y
    var(x)  = k(x, x) - k(x)^T (K + v I)^{-1} k(x)

computed through a Cholesky factorization with escalating jitter.  Hyper-
parameter estimation maximizes the log marginal likelihood with a seeded
multi-restart pattern search over log parameters; it standardizes the
outputs (zero mean, unit variance) internally, so the returned scales live
in standardized space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky, solve_triangular

from .errors import ConfigError, NumericalError
from .kernels import Kernel

# Jitter escalation: try the plain matrix first, then powers of ten.
_JITTERS = (0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4)

# Default MLE search box, log scale, for inputs standardized to [0, 1]^d and
# outputs standardized to unit variance.
DEFAULT_MLE_BOUNDS = {
    "log_length_scale": (np.log(0.01), np.log(10.0)),
    "log_signal_scale": (-4.0, 4.0),
    "log_noise_scale": (-12.0, 0.0),
}
MLE_RESTARTS = 8
MLE_EVALS_PER_RESTART = 200


def chol_with_jitter(A: np.ndarray) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor of ``A + jitter * I``, escalating the jitter.

    Returns the factor and the jitter actually used; raises
    :class:`NumericalError` once the largest jitter still fails.
    """
    n = A.shape[0]
    eye = np.eye(n)
    for jitter in _JITTERS:
        try:
            L = cholesky(A + jitter * eye, lower=True)
            return L, jitter
        except np.linalg.LinAlgError:
            continue
        except ValueError:
            break
    raise NumericalError(
        f"cholesky failed for a {n}x{n} matrix even with jitter {_JITTERS[-1]:g}"
    )


@dataclass
class GpPosterior:
    """Factorized GP posterior; produced by :func:`fit_gp`."""

    X: np.ndarray
    y: np.ndarray
    kernel: Kernel
    noise_variance: float
    L: np.ndarray
    alpha: np.ndarray
    jitter: float

    @property
    def n(self) -> int:
        return self.X.shape[0]

    def predict(self, Xq: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and variance at query rows ``Xq`` (m, d)."""
        Xq = np.atleast_2d(np.asarray(Xq, dtype=float))
        ks = self.kernel(self.X, Xq)  # (n, m)
        mean = ks.T @ self.alpha
        v = solve_triangular(self.L, ks, lower=True)
        var = self.kernel.diag(Xq) - np.sum(v * v, axis=0)
        return mean, np.maximum(var, 0.0)

    def predict_cov(self, Xq: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean vector and full covariance over ``Xq``."""
        Xq = np.atleast_2d(np.asarray(Xq, dtype=float))
        ks = self.kernel(self.X, Xq)
        mean = ks.T @ self.alpha
        v = solve_triangular(self.L, ks, lower=True)
        cov = self.kernel(Xq) - v.T @ v
        return mean, cov

    def log_marginal_likelihood(self) -> float:
        n = self.n
        return float(
            -0.5 * self.y @ self.alpha
            - np.sum(np.log(np.diag(self.L)))
            - 0.5 * n * np.log(2.0 * np.pi)
        )


def fit_gp(X: np.ndarray, y: np.ndarray, kernel: Kernel, noise_variance: float) -> GpPosterior:
    """Factorize the posterior for data ``(X, y)`` under ``kernel``.

    Parameters
    ----------
    X : array, shape (n, d)
    y : array, shape (n,)
    kernel : Kernel
    noise_variance : float
        Observation noise variance, >= 0.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] != y.shape[0]:
        raise ConfigError("X and y row counts differ")
    if X.shape[0] == 0:
        raise ConfigError("cannot fit a GP on zero observations")
    if kernel.d != X.shape[1]:
        raise ConfigError("kernel dimensionality does not match the data")
    if noise_variance < 0.0 or not np.isfinite(noise_variance):
        raise ConfigError("noise variance must be finite and >= 0")
    if np.any(~np.isfinite(X)) or np.any(~np.isfinite(y)):
        raise ConfigError("GP training data must be finite")
    K = kernel(X) + noise_variance * np.eye(X.shape[0])
    L, jitter = chol_with_jitter(K)
    alpha = solve_triangular(
        L.T, solve_triangular(L, y, lower=True), lower=False
    )
    return GpPosterior(
        X=X, y=y, kernel=kernel, noise_variance=float(noise_variance),
        L=L, alpha=alpha, jitter=jitter,
    )


def log_marginal_likelihood(
    X: np.ndarray, y: np.ndarray, kernel: Kernel, noise_variance: float
) -> float:
    """LML of ``(X, y)`` under ``kernel`` and the given noise variance."""
    return fit_gp(X, y, kernel, noise_variance).log_marginal_likelihood()


@dataclass(frozen=True)
class MleFit:
    """Hyperparameters selected by :func:`fit_gp_mle` (standardized space)."""

    kernel: Kernel
    noise_variance: float
    log_likelihood: float
    y_mean: float
    y_scale: float


def fit_gp_mle(
    X: np.ndarray,
    y: np.ndarray,
    family: str = "matern52",
    rng: np.random.Generator | None = None,
    *,
    bounds: dict[str, tuple[float, float]] | None = None,
    restarts: int = MLE_RESTARTS,
    evals_per_restart: int = MLE_EVALS_PER_RESTART,
) -> MleFit:
    """Maximum-likelihood kernel selection for standardized-input data.

    ``X`` is expected in the unit box; ``y`` is standardized internally to
    zero mean and unit variance (zero spread falls back to scale 1), and
    the returned scales refer to that standardized space.  The search runs
    ``restarts`` pattern searches of at most ``evals_per_restart`` likelihood
    evaluations each over ``(log ell_1..d, log s, log noise_scale)``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] < 2:
        raise ConfigError("MLE needs at least two observations")
    if rng is None:
        rng = np.random.default_rng(0)
    bounds = dict(DEFAULT_MLE_BOUNDS if bounds is None else bounds)
    d = X.shape[1]
    y_mean = float(np.mean(y))
    y_scale = float(np.std(y))
    if y_scale == 0.0 or not np.isfinite(y_scale):
        y_scale = 1.0
    ys = (y - y_mean) / y_scale

    lo = np.array(
        [bounds["log_length_scale"][0]] * d
        + [bounds["log_signal_scale"][0], bounds["log_noise_scale"][0]]
    )
    hi = np.array(
        [bounds["log_length_scale"][1]] * d
        + [bounds["log_signal_scale"][1], bounds["log_noise_scale"][1]]
    )

    def objective(theta: np.ndarray) -> float:
        kern = Kernel(
            family=family,
            length_scales=np.exp(theta[:d]),
            signal_scale=float(np.exp(theta[d])),
        )
        noise_var = float(np.exp(2.0 * theta[d + 1]))
        try:
            return log_marginal_likelihood(X, ys, kern, noise_var)
        except NumericalError:
            return -np.inf

    best_theta = None
    best_val = -np.inf
    for _ in range(max(1, restarts)):
        start = lo + rng.uniform(size=lo.shape) * (hi - lo)
        theta, val = _pattern_search_box(objective, start, lo, hi, evals_per_restart)
        if val > best_val:
            best_val, best_theta = val, theta
    if best_theta is None or not np.isfinite(best_val):
        raise NumericalError("every MLE restart failed to factorize")
    kernel = Kernel(
        family=family,
        length_scales=np.exp(best_theta[:d]),
        signal_scale=float(np.exp(best_theta[d])),
    )
    return MleFit(
        kernel=kernel,
        noise_variance=float(np.exp(2.0 * best_theta[d + 1])),
        log_likelihood=best_val,
        y_mean=y_mean,
        y_scale=y_scale,
    )


def _pattern_search_box(
    fn,
    start: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    max_evals: int,
) -> tuple[np.ndarray, float]:
    """Gradient-free coordinate pattern search maximizing ``fn`` in a box."""
    x = np.clip(start, lo, hi)
    fx = fn(x)
    evals = 1
    step = 0.25 * (hi - lo)
    min_step = 1e-4
    while evals < max_evals and np.max(step / (hi - lo)) > min_step:
        improved = False
        for i in range(x.shape[0]):
            for sign in (1.0, -1.0):
                if evals >= max_evals:
                    break
                cand = x.copy()
                cand[i] = np.clip(cand[i] + sign * step[i], lo[i], hi[i])
                if cand[i] == x[i]:
                    continue
                fc = fn(cand)
                evals += 1
                if fc > fx:
                    x, fx = cand, fc
                    improved = True
                    break
        if not improved:
            step *= 0.5
    return x, fx
