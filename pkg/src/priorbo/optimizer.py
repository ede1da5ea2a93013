"""Sequential model-based minimization loop.

One run is: evaluate an initial design of ``m_init`` points, then for
``n = 1..n_iter`` refit the surrogate on all finite observations, maximize
the (optionally belief-weighted) acquisition, and evaluate the proposal.
Non-finite objective values are recorded and counted against the budget but
excluded from surrogate fits; a surrogate that fails numerically yields a
uniform fallback proposal, flagged in the result.
"""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass, field

import numpy as np

from .acquisition import AcquisitionSpec, augment_observations, maximize
from .errors import ConfigError, NumericalError
from .kernels import Kernel
from .priors import Prior, uniform_prior
from .space import SearchSpace
from .surrogates import (
    DEFAULT_NOISE_VARIANCE,
    ForestSurrogate,
    GpSurrogate,
    Surrogate,
)

SURROGATE_KINDS = ("gp", "gp-mle", "forest")
INIT_MODES = ("prior_with_mode", "prior_only", "uniform", "uniform_with_mode")


@dataclass
class OptimizerConfig:
    """Knobs for one optimization run.

    ``m_init`` counts design evaluations, ``n_iter`` model-guided ones.  The
    conventional design size is d + 1 (2 in one dimension); the conventional
    belief confidence is ``n_iter / 10``, resolved by the harness.
    """

    m_init: int
    n_iter: int
    acquisition: AcquisitionSpec = field(default_factory=AcquisitionSpec)
    surrogate: str = "gp"
    init_mode: str = "uniform"
    seed: int = 0
    noise_variance: float = DEFAULT_NOISE_VARIANCE
    kernel: Kernel | None = None
    n_trees: int = 10

    def __post_init__(self) -> None:
        if self.m_init < 1:
            raise ConfigError("m_init must be >= 1")
        if self.n_iter < 0:
            raise ConfigError("n_iter must be >= 0")
        if self.surrogate not in SURROGATE_KINDS:
            raise ConfigError(
                f"unknown surrogate {self.surrogate!r}; pick from {SURROGATE_KINDS}"
            )
        if self.init_mode not in INIT_MODES:
            raise ConfigError(
                f"unknown init_mode {self.init_mode!r}; pick from {INIT_MODES}"
            )


def default_design_size(d: int) -> int:
    return max(2, d + 1)


@dataclass(frozen=True)
class RunRecord:
    """One objective evaluation inside a run."""

    phase: str  # "init" | "bo"
    index: int  # 1-based position in the evaluation sequence
    x: np.ndarray  # original-scale coordinates
    y: float
    incumbent: float
    regret: float
    elapsed_ms: float
    fallback: bool = False


@dataclass
class RunResult:
    """Full trace of one run plus summary fields."""

    records: list[RunRecord]
    incumbent_x: np.ndarray | None
    incumbent_value: float
    fallback_count: int
    nonfinite_count: int

    @property
    def regrets(self) -> np.ndarray:
        return np.array([r.regret for r in self.records])

    @property
    def incumbents(self) -> np.ndarray:
        return np.array([r.incumbent for r in self.records])


def initial_design(
    config: OptimizerConfig,
    space: SearchSpace,
    prior: Prior | None,
    rng: np.random.Generator,
) -> np.ndarray:
    """Working-scale design points for the configured init mode."""
    m = config.m_init
    mode = config.init_mode
    if mode in ("prior_with_mode", "prior_only", "uniform_with_mode") and prior is None:
        raise ConfigError(f"init_mode {mode!r} needs a prior")
    if mode == "uniform":
        return space.sample_uniform(rng, m)
    if mode == "uniform_with_mode":
        rest = space.sample_uniform(rng, m - 1) if m > 1 else np.empty((0, space.d))
        return np.vstack([prior.mode()[None, :], rest])
    if mode == "prior_only":
        return prior.sample(rng, m)
    rest = prior.sample(rng, m - 1) if m > 1 else np.empty((0, space.d))
    return np.vstack([prior.mode()[None, :], rest])


def _build_surrogate(config: OptimizerConfig, space: SearchSpace) -> Surrogate:
    if config.surrogate == "forest":
        return ForestSurrogate(n_trees=config.n_trees)
    return GpSurrogate(
        space,
        kernel=config.kernel,
        noise_variance=config.noise_variance,
        mle=config.surrogate == "gp-mle",
    )


def run(
    config: OptimizerConfig,
    space: SearchSpace,
    objective,
    prior: Prior | None = None,
    *,
    known_minimum: float | None = None,
    rng: np.random.Generator | None = None,
) -> RunResult:
    """Execute one optimization run.

    Parameters
    ----------
    config : OptimizerConfig
    space : SearchSpace
    objective : callable
        Maps an original-scale point to a scalar; non-finite returns are
        tolerated.
    prior : Prior, optional
        Belief used by prior-based init modes and as the candidate sampler;
        the acquisition's own weighting (if any) lives in
        ``config.acquisition.prior_weighting``.
    known_minimum : float, optional
        Enables exact simple-regret bookkeeping.
    rng : numpy Generator, optional
        Overrides the generator seeded from ``config.seed``; passing one lets
        a caller share a stream between prior construction and the run.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    spec = config.acquisition
    if (
        config.surrogate == "forest"
        and spec.prior_weighting is not None
        and not spec.prior_weighting.bin_values
    ):
        # Piecewise-constant surrogates need the weight binned, or the
        # weighted acquisition stops being piecewise constant.
        spec = dataclasses.replace(
            spec,
            prior_weighting=dataclasses.replace(
                spec.prior_weighting, bin_values=True
            ),
        )
    weighting = spec.prior_weighting
    candidate_prior = weighting.prior if weighting is not None else None
    if candidate_prior is None:
        candidate_prior = prior if prior is not None else uniform_prior(space)

    records: list[RunRecord] = []
    X: list[np.ndarray] = []
    y: list[float] = []
    incumbent = np.inf
    incumbent_x: np.ndarray | None = None
    fallbacks = 0
    nonfinite = 0

    def evaluate(z: np.ndarray, phase: str, index: int, t0: float, fallback: bool) -> None:
        nonlocal incumbent, incumbent_x, nonfinite
        value = float(objective(space.unwarp(z)))
        X.append(np.asarray(z, dtype=float))
        y.append(value)
        if np.isfinite(value):
            if value < incumbent:
                incumbent = value
                incumbent_x = np.asarray(z, dtype=float)
        else:
            nonfinite += 1
        regret = incumbent - known_minimum if known_minimum is not None else np.nan
        elapsed_ms = (time.perf_counter() - t0) * 1000.0
        records.append(
            RunRecord(
                phase=phase,
                index=index,
                x=space.unwarp(z),
                y=value,
                incumbent=incumbent,
                regret=regret,
                elapsed_ms=elapsed_ms,
                fallback=fallback,
            )
        )

    design = initial_design(config, space, prior, rng)
    for i, z in enumerate(design):
        evaluate(z, "init", i + 1, time.perf_counter(), False)

    for n in range(1, config.n_iter + 1):
        t0 = time.perf_counter()
        finite = np.isfinite(np.asarray(y))
        proposal = None
        fallback = False
        if np.any(finite):
            Xf = np.asarray(X)[finite]
            yf = np.asarray(y)[finite]
            inc_value = float(np.min(yf))
            inc_x = Xf[int(np.argmin(yf))]
            y_fit = augment_observations(yf) if spec.needs_augmented_data else yf
            try:
                surrogate = _build_surrogate(config, space).fit(Xf, y_fit, rng)
                proposal = maximize(
                    spec,
                    surrogate,
                    space,
                    candidate_prior,
                    incumbent_x=inc_x,
                    n=n,
                    rng=rng,
                    incumbent_value=inc_value if spec.kind in ("ei", "pi") else None,
                )
            except NumericalError:
                proposal = None
        if proposal is None:
            proposal = space.sample_uniform(rng, 1)[0]
            fallback = True
            fallbacks += 1
        evaluate(proposal, "bo", config.m_init + n, t0, fallback)

    return RunResult(
        records=records,
        incumbent_x=space.unwarp(incumbent_x) if incumbent_x is not None else None,
        incumbent_value=incumbent,
        fallback_count=fallbacks,
        nonfinite_count=nonfinite,
    )
