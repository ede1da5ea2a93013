"""Stationary covariance functions with per-dimension length scales."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError

_FAMILIES = ("matern52", "gaussian")
_SQRT5 = np.sqrt(5.0)


@dataclass(frozen=True)
class Kernel:
    """Anisotropic stationary kernel.

    The scaled distance is ``r = sqrt(sum_i ((x_i - z_i) / ell_i)^2)``;
    ``matern52`` evaluates ``s^2 (1 + sqrt(5) r + 5 r^2 / 3) exp(-sqrt(5) r)``
    and ``gaussian`` evaluates ``s^2 exp(-r^2 / 2)``.

    Parameters
    ----------
    family : {"matern52", "gaussian"}
    length_scales : array, shape (d,)
        Strictly positive, one per input dimension.
    signal_scale : float
        Output scale ``s``; the kernel variance is ``s^2``.
    """

    family: str
    length_scales: np.ndarray
    signal_scale: float = 1.0

    def __post_init__(self) -> None:
        if self.family not in _FAMILIES:
            raise ConfigError(f"unknown kernel family {self.family!r}")
        ls = np.atleast_1d(np.asarray(self.length_scales, dtype=float))
        if np.any(~np.isfinite(ls)) or np.any(ls <= 0.0):
            raise ConfigError("length scales must be finite and positive")
        if not (np.isfinite(self.signal_scale) and self.signal_scale > 0.0):
            raise ConfigError("signal scale must be finite and positive")
        object.__setattr__(self, "length_scales", ls)

    @property
    def d(self) -> int:
        return self.length_scales.shape[0]

    @property
    def variance(self) -> float:
        return self.signal_scale**2

    def with_params(self, **kwargs) -> "Kernel":
        return replace(self, **kwargs)

    def __call__(self, X: np.ndarray, Z: np.ndarray | None = None) -> np.ndarray:
        """Covariance matrix between row sets ``X`` (n, d) and ``Z`` (m, d)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Z = X if Z is None else np.atleast_2d(np.asarray(Z, dtype=float))
        r = _scaled_distance(X, Z, self.length_scales)
        if self.family == "gaussian":
            k = np.exp(-0.5 * r * r)
        else:
            sr = _SQRT5 * r
            k = (1.0 + sr + (5.0 / 3.0) * r * r) * np.exp(-sr)
        return self.variance * k

    def diag(self, X: np.ndarray) -> np.ndarray:
        """k(x, x) for each row of ``X`` (constant for stationary kernels)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.full(X.shape[0], self.variance)


def _scaled_distance(X: np.ndarray, Z: np.ndarray, ls: np.ndarray) -> np.ndarray:
    Xs = X / ls
    Zs = Z / ls
    # Clamp tiny negative values from cancellation before the square root.
    d2 = (
        np.sum(Xs * Xs, axis=1)[:, None]
        - 2.0 * (Xs @ Zs.T)
        + np.sum(Zs * Zs, axis=1)[None, :]
    )
    return np.sqrt(np.maximum(d2, 0.0))
