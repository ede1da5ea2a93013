"""Belief densities over the location of an objective's optimum.

A :class:`Prior` is a product of independent per-dimension components
(truncated Gaussian or uniform) over a :class:`~priorbo.space.SearchSpace`,
evaluated in the working scale, plus a small additive floor that keeps the
density strictly positive everywhere in the box.  Gaussian components are
truncation-normalized in closed form; sampling uses per-dimension rejection.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import ConfigError, DomainError
from .space import SearchSpace

EPSILON_FLOOR = 1e-12
_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)

# Rejection-sampling guard: below this acceptance rate after this many raw
# draws the prior is considered incompatible with the box.
_MAX_REJECTION_DRAWS = 10_000_000
_MIN_ACCEPT_RATE = 1e-6


@dataclass(frozen=True)
class GaussianBelief:
    """Gaussian component, truncated to its dimension's bounds."""

    mu: float
    sigma: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.mu):
            raise ConfigError("gaussian belief needs a finite mu")
        if not (np.isfinite(self.sigma) and self.sigma > 0.0):
            raise ConfigError(f"gaussian belief needs sigma > 0, got {self.sigma}")


@dataclass(frozen=True)
class UniformBelief:
    """Flat component over its dimension's bounds."""


Belief = GaussianBelief | UniformBelief


class PriorQuality(str, enum.Enum):
    """Synthetic prior strength used by the experiment protocol."""

    STRONG = "strong"
    WEAK = "weak"
    WRONG = "wrong"


STRONG_SIGMA_PCT = 0.01
WEAK_SIGMA_PCT = 0.10


@dataclass(frozen=True)
class PriorExtrema:
    """Density extrema of a prior over its box (floor included)."""

    min_density: float
    max_density: float
    argmin: np.ndarray
    argmax: np.ndarray

    @property
    def ratio(self) -> float:
        return self.max_density / self.min_density


class Prior:
    """Product belief density over a search space, working scale.

    Parameters
    ----------
    space : SearchSpace
        Box the belief lives on.  All coordinates handed to this class are
        working-scale (log dimensions already log10-transformed).
    beliefs : sequence of GaussianBelief | UniformBelief
        One component per dimension.
    epsilon_floor : float
        Additive constant keeping the joint density strictly positive.
    """

    def __init__(
        self,
        space: SearchSpace,
        beliefs: list[Belief] | tuple[Belief, ...],
        epsilon_floor: float = EPSILON_FLOOR,
    ):
        if len(beliefs) != space.d:
            raise ConfigError(
                f"need one belief per dimension ({space.d}), got {len(beliefs)}"
            )
        if epsilon_floor < 0.0:
            raise ConfigError("epsilon_floor must be >= 0")
        self.space = space
        self.beliefs = tuple(beliefs)
        self.epsilon_floor = float(epsilon_floor)
        lo, hi = space.warped_lower, space.warped_upper
        self._mu = np.zeros(space.d)
        self._sigma = np.zeros(space.d)
        self._gauss = np.zeros(space.d, dtype=bool)
        for i, b in enumerate(self.beliefs):
            if isinstance(b, GaussianBelief):
                self._gauss[i] = True
                self._mu[i] = b.mu
                self._sigma[i] = b.sigma
            elif not isinstance(b, UniformBelief):
                raise ConfigError(f"unknown belief component {b!r}")
        # Truncation mass of each Gaussian component inside the box.
        self._mass = np.ones(space.d)
        g = self._gauss
        if g.any():
            a = (lo[g] - self._mu[g]) / self._sigma[g]
            b = (hi[g] - self._mu[g]) / self._sigma[g]
            mass = ndtr(b) - ndtr(a)
            if np.any(mass < 1e-300):
                raise ConfigError(
                    "a gaussian belief has vanishing mass inside the box"
                )
            self._mass[g] = mass
        # Per-dimension log densities of the uniform components.
        self._log_uniform = -np.log(space.warped_range)

    # -- evaluation ---------------------------------------------------------

    def log_density(self, z: np.ndarray) -> np.ndarray | float:
        """Log of :meth:`density` at working-scale point(s) ``z``."""
        z = np.asarray(z, dtype=float)
        scalar = z.ndim == 1
        pts = np.atleast_2d(z)
        if pts.shape[-1] != self.space.d:
            raise DomainError(f"expected points of dimension {self.space.d}")
        inside = self.space.contains(pts, warped=True, atol=1e-9)
        if not np.all(inside):
            raise DomainError("density requested outside the search box")
        logp = np.zeros(pts.shape[0])
        g = self._gauss
        if g.any():
            t = (pts[:, g] - self._mu[g]) / self._sigma[g]
            comp = (
                -0.5 * t * t
                - np.log(self._sigma[g])
                - _LOG_SQRT_2PI
                - np.log(self._mass[g])
            )
            logp += comp.sum(axis=1)
        if (~g).any():
            logp += self._log_uniform[~g].sum()
        if self.epsilon_floor > 0.0:
            logp = np.logaddexp(np.log(self.epsilon_floor), logp)
        return float(logp[0]) if scalar else logp

    def density(self, z: np.ndarray) -> np.ndarray | float:
        """Joint belief density (with additive floor) at point(s) ``z``."""
        return np.exp(self.log_density(z))

    def decayed_density(self, z: np.ndarray, gamma: float) -> np.ndarray | float:
        """``density(z) ** gamma`` for a decay exponent ``gamma >= 0``."""
        if gamma < 0.0 or not np.isfinite(gamma):
            raise DomainError(f"decay exponent must be finite and >= 0, got {gamma}")
        return np.exp(gamma * np.asarray(self.log_density(z)))

    # -- structure ----------------------------------------------------------

    @property
    def is_flat(self) -> bool:
        """True when every component is uniform, i.e. the density is constant."""
        return not bool(self._gauss.any())

    def mode(self) -> np.ndarray:
        """Componentwise density maximizer: mu clipped to the box, or center."""
        lo, hi = self.space.warped_lower, self.space.warped_upper
        out = 0.5 * (lo + hi)
        g = self._gauss
        out[g] = np.clip(self._mu[g], lo[g], hi[g])
        return out

    def extrema(self, grid_resolution: int = 4096) -> PriorExtrema:
        """Density extrema over a per-dimension lattice, mode, and corners.

        The product structure factorizes exactly: the extrema of the joint
        density over a tensor lattice are products of per-dimension extrema,
        so the scan costs O(d * grid_resolution).  The mode coordinate and
        the box endpoints are always included in the scan.
        """
        if grid_resolution < 2:
            raise DomainError("grid_resolution must be >= 2")
        lo, hi = self.space.warped_lower, self.space.warped_upper
        mode = self.mode()
        per_dim_min = np.zeros(self.space.d)
        per_dim_max = np.zeros(self.space.d)
        argmin = np.zeros(self.space.d)
        argmax = np.zeros(self.space.d)
        for i in range(self.space.d):
            grid = np.linspace(lo[i], hi[i], grid_resolution)
            pts = np.append(grid, mode[i])
            if self._gauss[i]:
                t = (pts - self._mu[i]) / self._sigma[i]
                vals = np.exp(-0.5 * t * t) / (
                    self._sigma[i] * np.sqrt(2.0 * np.pi) * self._mass[i]
                )
            else:
                vals = np.full(pts.shape, np.exp(self._log_uniform[i]))
            j_min, j_max = int(np.argmin(vals)), int(np.argmax(vals))
            per_dim_min[i] = vals[j_min]
            per_dim_max[i] = vals[j_max]
            argmin[i] = pts[j_min]
            argmax[i] = pts[j_max]
        eps = self.epsilon_floor
        return PriorExtrema(
            min_density=float(np.prod(per_dim_min) + eps),
            max_density=float(np.prod(per_dim_max) + eps),
            argmin=argmin,
            argmax=argmax,
        )

    # -- sampling -----------------------------------------------------------

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` in-box points, shape (size, d), working scale."""
        out = np.empty((size, self.space.d))
        lo, hi = self.space.warped_lower, self.space.warped_upper
        for i in range(self.space.d):
            if self._gauss[i]:
                out[:, i] = _sample_truncated(
                    rng, self._mu[i], self._sigma[i], lo[i], hi[i], size
                )
            else:
                out[:, i] = lo[i] + rng.uniform(size=size) * (hi[i] - lo[i])
        return out

    def __repr__(self) -> str:
        parts = []
        for dim, b in zip(self.space.dims, self.beliefs):
            if isinstance(b, GaussianBelief):
                parts.append(f"{dim.name}~N({b.mu:.4g}, {b.sigma:.4g})")
            else:
                parts.append(f"{dim.name}~U")
        return f"Prior({', '.join(parts)})"


def _sample_truncated(
    rng: np.random.Generator,
    mu: float,
    sigma: float,
    lo: float,
    hi: float,
    size: int,
) -> np.ndarray:
    """Rejection-sample a truncated Gaussian component."""
    out = np.empty(size)
    filled = 0
    drawn = 0
    while filled < size:
        batch = max(size - filled, 64)
        cand = mu + sigma * rng.standard_normal(batch)
        drawn += batch
        keep = cand[(cand >= lo) & (cand <= hi)]
        take = min(keep.size, size - filled)
        out[filled : filled + take] = keep[:take]
        filled += take
        if drawn >= _MAX_REJECTION_DRAWS and filled / drawn < _MIN_ACCEPT_RATE:
            raise ConfigError(
                f"truncated gaussian (mu={mu:g}, sigma={sigma:g}) rejects nearly "
                f"all draws on [{lo:g}, {hi:g}]"
            )
    return out


def uniform_prior(space: SearchSpace, epsilon_floor: float = EPSILON_FLOOR) -> Prior:
    """Flat belief over the whole box."""
    return Prior(space, [UniformBelief() for _ in range(space.d)], epsilon_floor)


def synthetic_prior(
    space: SearchSpace,
    location: np.ndarray,
    quality: PriorQuality | str,
    rng: np.random.Generator | None = None,
    *,
    empirical_maximizer: np.ndarray | None = None,
    mean_redraw_cap: int = 1000,
    epsilon_floor: float = EPSILON_FLOOR,
) -> Prior:
    """Build a benchmark prior of controlled quality around a known optimum.

    Strong and weak priors center a Gaussian on the optimum plus per-dimension
    noise of one standard deviation; their widths are 1% and 10% of each
    dimension's working-scale range.  Means drawn outside the box are redrawn
    (up to ``mean_redraw_cap`` times, then clipped).  Wrong priors center a
    strong-width Gaussian on the empirical *maximizer* with no noise, so they
    are identical across repetitions.

    Parameters
    ----------
    space : SearchSpace
    location : array
        The optimum's location in the original scale.
    quality : PriorQuality or str
        ``strong``, ``weak``, or ``wrong``.
    rng : numpy Generator
        Required for strong/weak (the mean offset is random); unused for wrong.
    empirical_maximizer : array
        Required for wrong priors; original scale.
    """
    quality = PriorQuality(quality)
    lo, hi = space.warped_lower, space.warped_upper
    rng_needed = quality in (PriorQuality.STRONG, PriorQuality.WEAK)
    if rng_needed and rng is None:
        raise ConfigError(f"{quality.value} priors need an rng for the mean offset")
    if quality is PriorQuality.WRONG:
        if empirical_maximizer is None:
            raise ConfigError("wrong priors need the empirical maximizer")
        center = space.warp(np.asarray(empirical_maximizer, dtype=float))
        sigma_pct = STRONG_SIGMA_PCT
        noisy = False
    else:
        center = space.warp(np.asarray(location, dtype=float))
        sigma_pct = STRONG_SIGMA_PCT if quality is PriorQuality.STRONG else WEAK_SIGMA_PCT
        noisy = True
    sigmas = sigma_pct * space.warped_range
    beliefs: list[Belief] = []
    for i in range(space.d):
        mean = float(np.clip(center[i], lo[i], hi[i]))
        if noisy:
            mean = _offset_mean(rng, center[i], sigmas[i], lo[i], hi[i], mean_redraw_cap)
        beliefs.append(GaussianBelief(mu=mean, sigma=float(sigmas[i])))
    return Prior(space, beliefs, epsilon_floor)


def _offset_mean(
    rng: np.random.Generator,
    center: float,
    sigma: float,
    lo: float,
    hi: float,
    cap: int,
) -> float:
    """Redraw ``center + N(0, sigma)`` until it lands in the box; clip after cap."""
    mean = center + sigma * rng.standard_normal()
    tries = 1
    while not (lo <= mean <= hi) and tries < cap:
        mean = center + sigma * rng.standard_normal()
        tries += 1
    return float(np.clip(mean, lo, hi))
