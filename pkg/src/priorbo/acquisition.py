"""Myopic acquisition functions and their decaying prior weighting.

All acquisitions follow the minimization convention and are nonnegative, so
multiplying by a positive belief density keeps the ranking meaningful.  The
prior-weighted value at step ``n`` is

    weighted(x) = alpha(x) * density(x) ** (beta / n)

where ``beta`` expresses confidence in the belief: the exponent decays like
1/n, so the belief's influence vanishes as evidence accumulates.  Scoring
happens in log space to survive the huge dynamic range; ``alpha = 0`` points
score ``-inf`` and rank below every positive-value point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .errors import ConfigError, DomainError
from .gp import chol_with_jitter
from .priors import Prior, PriorExtrema
from .space import SearchSpace
from .surrogates import Surrogate

ACQUISITION_KINDS = ("ei", "pi", "ucb", "ts")
DEFAULT_UCB_KAPPA = 2.0
DEFAULT_TS_CANDIDATES = 512
DEFAULT_BASE_BINS = 64

# Candidate budget for acquisition maximization.
UNIFORM_CANDIDATES = 1024
PRIOR_CANDIDATES = 512
LOCAL_CANDIDATES = 64
LOCAL_SIGMA = 0.05  # Gaussian perturbation scale, fraction of each range.
REFINE_TOP_K = 8
REFINE_STEPS = 100

_TIE_REL_TOL = 1e-12


@dataclass(frozen=True)
class DecaySchedule:
    """Exponent schedule ``gamma(n) = beta / n`` for the belief weight."""

    beta: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.beta) and self.beta > 0.0):
            raise ConfigError(f"beta must be finite and positive, got {self.beta}")

    def gamma(self, n: int) -> float:
        if n < 1:
            raise DomainError("the decay step index starts at 1")
        return self.beta / n


@dataclass(frozen=True)
class PriorWeighting:
    """Belief density and confidence attached to an acquisition."""

    prior: Prior
    beta: float
    bin_values: bool = False
    base_bins: int = DEFAULT_BASE_BINS

    @property
    def schedule(self) -> DecaySchedule:
        return DecaySchedule(self.beta)


@dataclass
class AcquisitionSpec:
    """Which acquisition to maximize and how to weight it."""

    kind: str = "ei"
    ucb_kappa: float = DEFAULT_UCB_KAPPA
    ts_candidate_count: int = DEFAULT_TS_CANDIDATES
    prior_weighting: PriorWeighting | None = None

    def __post_init__(self) -> None:
        if self.kind not in ACQUISITION_KINDS:
            raise ConfigError(f"unknown acquisition kind {self.kind!r}")
        if self.ucb_kappa <= 0.0:
            raise ConfigError("ucb_kappa must be positive")
        if self.ts_candidate_count < 2:
            raise ConfigError("ts_candidate_count must be at least 2")

    @property
    def needs_augmented_data(self) -> bool:
        """UCB and joint-draw selection read the surrogate mean directly, so
        they are fitted on observations shifted to a zero minimum."""
        return self.kind in ("ucb", "ts")


def _phi(z: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * z * z) / np.sqrt(2.0 * np.pi)


def expected_improvement(
    mean: np.ndarray, sd: np.ndarray, incumbent: float
) -> np.ndarray:
    """E[max(incumbent - Y, 0)] under a N(mean, sd^2) posterior."""
    mean = np.asarray(mean, dtype=float)
    sd = np.asarray(sd, dtype=float)
    out = np.maximum(incumbent - mean, 0.0)
    pos = sd > 0.0
    if np.any(pos):
        z = (incumbent - mean[pos]) / sd[pos]
        out = np.array(out, copy=True)
        out[pos] = sd[pos] * (z * ndtr(z) + _phi(z))
    return out


def probability_of_improvement(
    mean: np.ndarray, sd: np.ndarray, incumbent: float
) -> np.ndarray:
    """P[Y < incumbent] under a N(mean, sd^2) posterior."""
    mean = np.asarray(mean, dtype=float)
    sd = np.asarray(sd, dtype=float)
    out = (mean < incumbent).astype(float)
    pos = sd > 0.0
    if np.any(pos):
        out = np.array(out, copy=True)
        out[pos] = ndtr((incumbent - mean[pos]) / sd[pos])
    return out


def ucb_lower(mean: np.ndarray, sd: np.ndarray, kappa: float = DEFAULT_UCB_KAPPA) -> np.ndarray:
    """Optimism for minimization, clamped nonnegative: max(0, kappa*sd - mean).

    ``mean`` must come from a surrogate fitted on augmented (min-zero)
    observations, otherwise the clamp is meaningless.
    """
    return np.maximum(0.0, kappa * np.asarray(sd) - np.asarray(mean))


def thompson_values(
    surrogate: Surrogate, candidates: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """One joint posterior draw over the candidates, scored as max(0, -g).

    Fitted on augmented observations, a draw below zero beats the incumbent;
    the clamp keeps values nonnegative so belief weighting stays monotone.
    """
    mean, cov = surrogate.predict_cov(candidates)
    L, _ = chol_with_jitter(cov)
    g = mean + L @ rng.standard_normal(mean.shape[0])
    return np.maximum(0.0, -g)


def augment_observations(y: np.ndarray) -> np.ndarray:
    """Shift observations so the incumbent sits at zero."""
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise ConfigError("cannot augment an empty observation set")
    return y - np.min(y)


# -- prior binning for piecewise-constant surrogates -------------------------


def bin_count(beta: float, n: int, base_bins: int = DEFAULT_BASE_BINS) -> int:
    """Bin budget for decayed belief values; shrinks at the decay rate."""
    if n < 1:
        raise DomainError("the decay step index starts at 1")
    return max(1, int(np.ceil(base_bins * beta / n)))


def binned_decayed_density(
    prior: Prior,
    Z: np.ndarray,
    beta: float,
    n: int,
    base_bins: int = DEFAULT_BASE_BINS,
    extrema: PriorExtrema | None = None,
) -> np.ndarray:
    """Decayed density rounded onto a shrinking linear grid of levels.

    With a piecewise-constant surrogate a smooth weight would reintroduce
    infinitely many acquisition levels; rounding the decayed density onto
    ``bin_count(beta, n)`` levels spanning its range keeps the weighted
    acquisition piecewise constant, and the level count shrinks at the same
    1/n rate as the belief's influence.
    """
    gamma = beta / n
    ext = extrema if extrema is not None else prior.extrema()
    # Clamp exponents so extreme confidences cannot overflow the level grid.
    log_lo = min(gamma * np.log(ext.min_density), 700.0)
    log_hi = min(gamma * np.log(ext.max_density), 700.0)
    v_lo, v_hi = np.exp(log_lo), np.exp(log_hi)
    v = np.exp(np.minimum(gamma * np.asarray(prior.log_density(Z)), 700.0))
    k = bin_count(beta, n, base_bins)
    if k == 1 or v_hi <= v_lo:
        return np.full(np.shape(v), 0.5 * (v_lo + v_hi))
    step = (v_hi - v_lo) / (k - 1)
    levels = np.clip(np.rint((v - v_lo) / step), 0, k - 1)
    return v_lo + levels * step


# -- scoring and maximization -------------------------------------------------


def tie_break_argmax(
    values: np.ndarray, rng: np.random.Generator, rel_tol: float = _TIE_REL_TOL
) -> int:
    """Index of the maximum, chosen uniformly at random among ties."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ConfigError("cannot take an argmax over zero values")
    top = np.max(v)
    if np.isneginf(top):
        ties = np.arange(v.size)
    else:
        ties = np.nonzero(v >= top - rel_tol * max(1.0, abs(top)))[0]
    return int(ties[rng.integers(ties.size)])


class _Scorer:
    """Log-space weighted acquisition over working-scale points."""

    def __init__(
        self,
        spec: AcquisitionSpec,
        surrogate: Surrogate,
        incumbent_value: float | None,
        n: int,
    ):
        self.spec = spec
        self.surrogate = surrogate
        self.incumbent_value = incumbent_value
        self.n = n
        w = spec.prior_weighting
        self._gamma = w.schedule.gamma(n) if w is not None else 0.0
        self._extrema = w.prior.extrema() if w is not None and w.bin_values else None

    def alpha(self, Z: np.ndarray) -> np.ndarray:
        mean, var = self.surrogate.predict(Z)
        sd = np.sqrt(var)
        kind = self.spec.kind
        if kind == "ei":
            return expected_improvement(mean, sd, self.incumbent_value)
        if kind == "pi":
            return probability_of_improvement(mean, sd, self.incumbent_value)
        if kind == "ucb":
            return ucb_lower(mean, sd, self.spec.ucb_kappa)
        raise ConfigError("joint-draw values are tied to one candidate set")

    def log_weight(self, Z: np.ndarray) -> np.ndarray:
        w = self.spec.prior_weighting
        if w is None or w.prior.is_flat:
            # A constant belief carries no location information; giving it
            # unit weight (not density ** gamma, a constant) makes weighting
            # an exact no-op, so flat-belief runs reproduce plain runs.
            return np.zeros(np.atleast_2d(Z).shape[0])
        if w.bin_values:
            binned = binned_decayed_density(
                w.prior, Z, w.beta, self.n, w.base_bins, self._extrema
            )
            return np.log(binned)
        return self._gamma * np.asarray(w.prior.log_density(Z))

    def score_alpha(self, Z: np.ndarray, alpha: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(alpha) + self.log_weight(Z)

    def __call__(self, Z: np.ndarray) -> np.ndarray:
        return self.score_alpha(Z, self.alpha(Z))


def _candidate_counts(spec: AcquisitionSpec) -> tuple[int, int, int]:
    if spec.kind != "ts":
        return UNIFORM_CANDIDATES, PRIOR_CANDIDATES, LOCAL_CANDIDATES
    total = spec.ts_candidate_count
    n_uni = max(1, round(total * UNIFORM_CANDIDATES / 1600))
    n_pri = max(1, round(total * PRIOR_CANDIDATES / 1600))
    n_loc = max(1, total - n_uni - n_pri)
    return n_uni, n_pri, n_loc


def generate_candidates(
    spec: AcquisitionSpec,
    space: SearchSpace,
    candidate_prior: Prior,
    incumbent_x: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """Uniform, belief-drawn, and incumbent-local candidates, stacked."""
    n_uni, n_pri, n_loc = _candidate_counts(spec)
    uniform = space.sample_uniform(rng, n_uni)
    from_prior = candidate_prior.sample(rng, n_pri)
    local = incumbent_x + rng.standard_normal((n_loc, space.d)) * (
        LOCAL_SIGMA * space.warped_range
    )
    return np.vstack([uniform, from_prior, space.clip(local)])


def maximize(
    spec: AcquisitionSpec,
    surrogate: Surrogate,
    space: SearchSpace,
    candidate_prior: Prior,
    incumbent_x: np.ndarray,
    n: int,
    rng: np.random.Generator,
    incumbent_value: float | None = None,
) -> np.ndarray:
    """Pick the next working-scale evaluation point.

    Scores a seeded candidate set (uniform + belief + local), refines the
    top :data:`REFINE_TOP_K` closed-form candidates with a box-constrained
    pattern search, and breaks exact ties uniformly at random.  Joint-draw
    selection (``ts``) is defined only on its candidate set, so it skips
    refinement.

    Parameters
    ----------
    spec : AcquisitionSpec
    surrogate : fitted surrogate
        Must be fitted on augmented observations for ``ucb``/``ts``.
    candidate_prior : Prior
        Density d for the belief-drawn candidate block; pass a uniform prior
        when no belief weighting is active.
    incumbent_x : array
        Working-scale location of the current best finite observation.
    n : int
        1-based index of the upcoming model-guided evaluation.
    incumbent_value : float
        Best observed objective value; required for ``ei``/``pi``.
    """
    if spec.kind in ("ei", "pi") and incumbent_value is None:
        raise ConfigError(f"{spec.kind} needs the incumbent value")
    candidates = generate_candidates(spec, space, candidate_prior, incumbent_x, rng)
    if spec.kind == "ts":
        alpha = thompson_values(surrogate, candidates, rng)
        w = spec.prior_weighting
        if w is None:
            scores = _log_nonneg(alpha)
        else:
            scorer = _Scorer(spec, surrogate, incumbent_value, n)
            scores = scorer.score_alpha(candidates, alpha)
        return candidates[tie_break_argmax(scores, rng)]
    scorer = _Scorer(spec, surrogate, incumbent_value, n)
    scores = scorer(candidates)
    k = min(REFINE_TOP_K, candidates.shape[0])
    top = np.argsort(scores, kind="stable")[-k:]
    refined, refined_scores = _batched_pattern_search(
        scorer, candidates[top], space, REFINE_STEPS
    )
    pool = np.vstack([candidates, refined])
    pool_scores = np.concatenate([scores, refined_scores])
    return pool[tie_break_argmax(pool_scores, rng)]


def _log_nonneg(alpha: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(alpha)


def _batched_pattern_search(
    scorer, starts: np.ndarray, space: SearchSpace, steps: int
) -> tuple[np.ndarray, np.ndarray]:
    """Coordinate pattern search on all start points at once."""
    lo, hi = space.warped_lower, space.warped_upper
    span = space.warped_range
    k, d = starts.shape
    xs = np.array(starts, copy=True)
    fs = scorer(xs)
    h = np.full(k, 0.1)
    for _ in range(steps):
        active = h > 1e-6
        if not np.any(active):
            break
        # Probe +/- h along every axis for every active searcher.
        offsets = np.concatenate([np.eye(d), -np.eye(d)])  # (2d, d)
        probes = xs[:, None, :] + h[:, None, None] * offsets[None, :, :] * span
        probes = np.clip(probes, lo, hi)
        flat = probes.reshape(-1, d)
        vals = scorer(flat).reshape(k, 2 * d)
        best = np.argmax(vals, axis=1)
        best_vals = vals[np.arange(k), best]
        improved = active & (best_vals > fs)
        xs[improved] = probes[np.arange(k), best][improved]
        fs[improved] = best_vals[improved]
        h[active & ~improved] *= 0.5
    return xs, fs
