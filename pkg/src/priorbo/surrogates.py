"""Optimizer-facing surrogate wrappers.

These standardize data once per refit — inputs to the unit box through the
search space, outputs to zero mean and unit variance — fit the underlying
model, and translate predictions back to data units.  Working-scale
coordinates go in; means and variances in objective units come out.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .forest import DEFAULT_TREES, RandomForest
from .gp import GpPosterior, fit_gp, fit_gp_mle
from .kernels import Kernel
from .space import SearchSpace

DEFAULT_NOISE_VARIANCE = 1e-6
DEFAULT_LENGTH_SCALE = 0.2
DEFAULT_SIGNAL_SCALE = 1.0


class GpSurrogate:
    """GP regression on standardized data, fixed kernel or per-fit MLE.

    Parameters
    ----------
    space : SearchSpace
        Supplies the unit-box input transform.
    kernel : Kernel, optional
        Fixed kernel in standardized coordinates; defaults to Matern 5/2
        with length scale 0.2 per dimension and unit signal scale.
    noise_variance : float
        Observation noise variance in standardized output units.
    mle : bool
        Re-estimate kernel and noise by maximum likelihood on every fit.
    kernel_family : str
        Family used when ``mle`` is on or no kernel is given.
    """

    def __init__(
        self,
        space: SearchSpace,
        kernel: Kernel | None = None,
        noise_variance: float = DEFAULT_NOISE_VARIANCE,
        *,
        mle: bool = False,
        kernel_family: str = "matern52",
    ):
        self.space = space
        self.kernel = kernel or Kernel(
            family=kernel_family,
            length_scales=np.full(space.d, DEFAULT_LENGTH_SCALE),
            signal_scale=DEFAULT_SIGNAL_SCALE,
        )
        self.noise_variance = noise_variance
        self.mle = mle
        self.kernel_family = kernel_family
        self._post: GpPosterior | None = None
        self._y_mean = 0.0
        self._y_scale = 1.0

    def fit(self, X: np.ndarray, y: np.ndarray, rng: np.random.Generator) -> "GpSurrogate":
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float).ravel()
        U = self.space.to_unit(X)
        if self.mle and y.shape[0] >= 2:
            mle = fit_gp_mle(U, y, family=self.kernel_family, rng=rng)
            self.kernel = mle.kernel
            self.noise_variance = mle.noise_variance
            self._y_mean, self._y_scale = mle.y_mean, mle.y_scale
        else:
            self._y_mean = float(np.mean(y))
            scale = float(np.std(y))
            self._y_scale = scale if scale > 0.0 and np.isfinite(scale) else 1.0
        ys = (y - self._y_mean) / self._y_scale
        self._post = fit_gp(U, ys, self.kernel, self.noise_variance)
        return self

    @property
    def posterior(self) -> GpPosterior:
        if self._post is None:
            raise ConfigError("surrogate is not fitted")
        return self._post

    def predict(self, Z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Mean and variance in data units at working-scale rows ``Z``."""
        mean, var = self.posterior.predict(self.space.to_unit(np.atleast_2d(Z)))
        return self._y_mean + self._y_scale * mean, self._y_scale**2 * var

    def predict_cov(self, Z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Mean vector and full posterior covariance in data units."""
        mean, cov = self.posterior.predict_cov(self.space.to_unit(np.atleast_2d(Z)))
        return self._y_mean + self._y_scale * mean, self._y_scale**2 * cov


class ForestSurrogate:
    """Random-forest regression; predictions are piecewise constant.

    Trees are invariant to the monotone per-dimension rescaling the GP needs,
    so the data is used in working scale directly.
    """

    def __init__(self, n_trees: int = DEFAULT_TREES, bootstrap: bool = True):
        self.forest = RandomForest(n_trees=n_trees, bootstrap=bootstrap)

    def fit(self, X: np.ndarray, y: np.ndarray, rng: np.random.Generator) -> "ForestSurrogate":
        self.forest.fit(np.atleast_2d(X), y, rng)
        return self

    def predict(self, Z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.forest.predict(np.atleast_2d(Z))

    def predict_cov(self, Z: np.ndarray):
        raise ConfigError("joint posterior draws need a GP surrogate")


Surrogate = GpSurrogate | ForestSurrogate
