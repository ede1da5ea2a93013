"""Axis-aligned search spaces with linear or log10-scaled dimensions.

A :class:`SearchSpace` is a box.  Every dimension carries a scale: linear
dimensions are used as-is, log dimensions are transformed to log10
coordinates once, at construction.  All internal machinery (priors,
surrogates, acquisition maximization) operates in this *working scale*;
objective functions are evaluated in the original scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_SCALES = ("linear", "log")


@dataclass(frozen=True)
class Dimension:
    """One axis of a search box.

    Parameters
    ----------
    name : str
        Identifier used in config files and CSV headers.
    lower, upper : float
        Bounds in the original scale.  ``lower < upper`` is required, and
        log-scaled dimensions need ``lower > 0``.
    scale : {"linear", "log"}
        Log dimensions operate on log10-transformed coordinates.
    """

    name: str
    lower: float
    upper: float
    scale: str = "linear"

    def __post_init__(self) -> None:
        if self.scale not in _SCALES:
            raise DomainError(f"unknown scale {self.scale!r} for {self.name!r}")
        if not np.isfinite(self.lower) or not np.isfinite(self.upper):
            raise DomainError(f"non-finite bounds for {self.name!r}")
        if not self.lower < self.upper:
            raise DomainError(
                f"need lower < upper for {self.name!r}, got [{self.lower}, {self.upper}]"
            )
        if self.scale == "log" and self.lower <= 0.0:
            raise DomainError(f"log dimension {self.name!r} needs lower > 0")

    @property
    def warped_lower(self) -> float:
        return np.log10(self.lower) if self.scale == "log" else self.lower

    @property
    def warped_upper(self) -> float:
        return np.log10(self.upper) if self.scale == "log" else self.upper


class SearchSpace:
    """Product of :class:`Dimension` axes with warp/unwarp helpers."""

    def __init__(self, dims: list[Dimension] | tuple[Dimension, ...]):
        if len(dims) == 0:
            raise DomainError("a search space needs at least one dimension")
        names = [d.name for d in dims]
        if len(set(names)) != len(names):
            raise DomainError("dimension names must be unique")
        self.dims = tuple(dims)
        self.lower = np.array([d.lower for d in dims], dtype=float)
        self.upper = np.array([d.upper for d in dims], dtype=float)
        self.warped_lower = np.array([d.warped_lower for d in dims], dtype=float)
        self.warped_upper = np.array([d.warped_upper for d in dims], dtype=float)
        self._log_mask = np.array([d.scale == "log" for d in dims], dtype=bool)

    @property
    def d(self) -> int:
        return len(self.dims)

    @property
    def names(self) -> list[str]:
        return [dim.name for dim in self.dims]

    @property
    def warped_range(self) -> np.ndarray:
        return self.warped_upper - self.warped_lower

    def warp(self, x: np.ndarray) -> np.ndarray:
        """Original-scale point(s) -> working-scale coordinates."""
        x = self._check_shape(x)
        z = np.array(x, dtype=float, copy=True)
        if self._log_mask.any():
            z[..., self._log_mask] = np.log10(z[..., self._log_mask])
        return z

    def unwarp(self, z: np.ndarray) -> np.ndarray:
        """Working-scale point(s) -> original coordinates."""
        z = self._check_shape(z)
        x = np.array(z, dtype=float, copy=True)
        if self._log_mask.any():
            x[..., self._log_mask] = 10.0 ** x[..., self._log_mask]
        return x

    def to_unit(self, z: np.ndarray) -> np.ndarray:
        """Working-scale coordinates -> the unit box [0, 1]^d."""
        z = self._check_shape(z)
        return (np.asarray(z, dtype=float) - self.warped_lower) / self.warped_range

    def from_unit(self, u: np.ndarray) -> np.ndarray:
        u = self._check_shape(u)
        return self.warped_lower + np.asarray(u, dtype=float) * self.warped_range

    def contains(self, x: np.ndarray, *, warped: bool = False, atol: float = 0.0) -> np.ndarray | bool:
        """Membership test; pass ``warped=True`` for working-scale points."""
        x = self._check_shape(x)
        lo = self.warped_lower if warped else self.lower
        hi = self.warped_upper if warped else self.upper
        ok = np.all((x >= lo - atol) & (x <= hi + atol), axis=-1)
        return bool(ok) if ok.ndim == 0 else ok

    def clip(self, z: np.ndarray) -> np.ndarray:
        """Clip working-scale point(s) into the box."""
        z = self._check_shape(z)
        return np.clip(z, self.warped_lower, self.warped_upper)

    def sample_uniform(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Uniform draws over the working-scale box, shape (size, d)."""
        u = rng.uniform(size=(size, self.d))
        return self.warped_lower + u * self.warped_range

    def center(self) -> np.ndarray:
        """Center of the working-scale box."""
        return 0.5 * (self.warped_lower + self.warped_upper)

    def _check_shape(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape == () or x.shape[-1] != self.d:
            raise DomainError(
                f"expected trailing dimension {self.d}, got shape {x.shape}"
            )
        return x

    def __repr__(self) -> str:
        axes = ", ".join(
            f"{d.name}[{d.lower:g}, {d.upper:g}]{'(log)' if d.scale == 'log' else ''}"
            for d in self.dims
        )
        return f"SearchSpace({axes})"


def unit_space(d: int, prefix: str = "x") -> SearchSpace:
    """Convenience constructor for the unit box [0, 1]^d."""
    return SearchSpace([Dimension(f"{prefix}{i}", 0.0, 1.0) for i in range(d)])
