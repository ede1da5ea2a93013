"""Reproducible experiment harness over the analytic benchmarks.

An experiment is R repetitions of one strategy on one benchmark.  Run seeds
derive from the master seed through a fixed 64-bit mixing function, each
repetition owns its generator, and every float is serialized with ``repr``,
so rerunning a config reproduces its CSVs byte for byte (timing is recorded
only on request, as wall-clock values are inherently nondeterministic).

Outputs per experiment: one trace CSV per repetition with header
``run_id,seed,phase,iter,x0..x{d-1},y,incumbent,regret,elapsed_ms`` and one
aggregate CSV of per-iteration mean/stderr of log10(regret + 1e-12).
"""

from __future__ import annotations

import os
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .acquisition import AcquisitionSpec, PriorWeighting
from .benchmarks import Benchmark, get_benchmark
from .errors import ConfigError, RunError, TraceParseError
from .optimizer import (
    INIT_MODES,
    OptimizerConfig,
    RunRecord,
    RunResult,
    default_design_size,
    run,
)
from .priors import GaussianBelief, Prior, PriorQuality, UniformBelief, synthetic_prior
from .space import SearchSpace

STRATEGIES = ("random", "prior_sampling", "vanilla_bo", "pibo")
LOG_REGRET_FLOOR = 1e-12

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix_seed(master_seed: int, index: int) -> int:
    """Fixed 64-bit seed mixing (splitmix64 finalizer) for run ``index``."""
    z = (master_seed + (index + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


@dataclass(frozen=True)
class BeliefSpec:
    """Per-dimension belief as written in a config file."""

    kind: str  # "gaussian" | "uniform"
    mu: float | None = None
    sigma: float | None = None
    sigma_pct: float | None = None

    def resolve(self, lo: float, hi: float):
        if self.kind == "uniform":
            return UniformBelief()
        if self.kind != "gaussian":
            raise ConfigError(f"unknown belief kind {self.kind!r}")
        if self.mu is None:
            raise ConfigError("gaussian belief needs mu")
        if (self.sigma is None) == (self.sigma_pct is None):
            raise ConfigError("gaussian belief needs exactly one of sigma, sigma_pct")
        sigma = self.sigma if self.sigma is not None else self.sigma_pct * (hi - lo)
        return GaussianBelief(mu=self.mu, sigma=float(sigma))


@dataclass
class ExperimentConfig:
    """One experiment: a strategy on a benchmark, repeated R times."""

    benchmark: str
    strategy: str
    repetitions: int = 20
    master_seed: int = 0
    output_dir: str = "results"
    label: str | None = None
    prior_quality: str | None = None
    beliefs: tuple[BeliefSpec, ...] | None = None
    m_init: int | None = None
    n_iter: int = 50
    beta: float | None = None
    surrogate: str = "gp"
    acquisition: str = "ei"
    init_mode: str | None = None
    ucb_kappa: float = 2.0
    ts_candidate_count: int = 512
    record_timing: bool = False
    workers: int | None = None

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ConfigError(
                f"unknown strategy {self.strategy!r}; pick from {STRATEGIES}"
            )
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if self.n_iter < 0:
            raise ConfigError("n_iter must be >= 0")
        if self.prior_quality is not None:
            try:
                PriorQuality(self.prior_quality)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        if self.init_mode is not None and self.init_mode not in INIT_MODES:
            raise ConfigError(f"unknown init_mode {self.init_mode!r}")
        if self._needs_prior() and self.prior_quality is None and self.beliefs is None:
            raise ConfigError(
                f"strategy {self.strategy!r} needs a prior "
                "(set prior quality or explicit beliefs)"
            )

    def _needs_prior(self) -> bool:
        if self.strategy in ("pibo", "prior_sampling"):
            return True
        if self.strategy == "vanilla_bo":
            mode = self.init_mode or "uniform_with_mode"
            return mode != "uniform"
        return False

    @property
    def stem(self) -> str:
        if self.label:
            return self.label
        parts = [self.benchmark, self.strategy]
        if self.prior_quality:
            parts.append(self.prior_quality)
        if self.strategy == "pibo" and self.beta is not None:
            parts.append(f"b{self.beta:g}")
        return "_".join(parts)


@dataclass
class RunOutcome:
    """Result of one repetition, successful or not."""

    index: int
    seed: int
    records: list[RunRecord] | None
    error: str | None = None
    fallback_count: int = 0
    nonfinite_count: int = 0

    @property
    def ok(self) -> bool:
        return self.records is not None


@dataclass
class Aggregate:
    """Per-iteration mean and standard error of log10(regret + floor)."""

    iters: np.ndarray
    phases: list[str]
    mean: np.ndarray
    stderr: np.ndarray
    runs: int

    @property
    def init_boundary(self) -> int:
        """Index of the last design evaluation (0 when there is none)."""
        count = 0
        for p in self.phases:
            if p != "init":
                break
            count += 1
        return count


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    outcomes: list[RunOutcome]
    aggregate: Aggregate
    trace_paths: list[Path] = field(default_factory=list)
    aggregate_path: Path | None = None

    @property
    def completed(self) -> int:
        return sum(1 for o in self.outcomes if o.ok)


def _build_prior(
    config: ExperimentConfig, bench: Benchmark, rng: np.random.Generator
) -> Prior | None:
    space = bench.space
    if config.beliefs is not None:
        if len(config.beliefs) != space.d:
            raise ConfigError(
                f"got {len(config.beliefs)} beliefs for {space.d} dimensions"
            )
        lo, hi = space.warped_lower, space.warped_upper
        comps = [b.resolve(lo[i], hi[i]) for i, b in enumerate(config.beliefs)]
        return Prior(space, comps)
    if config.prior_quality is not None:
        quality = PriorQuality(config.prior_quality)
        kwargs = {}
        if quality is PriorQuality.WRONG:
            kwargs["empirical_maximizer"] = bench.empirical_maximizer
        return synthetic_prior(
            space, bench.known_minimizers[0], quality, rng, **kwargs
        )
    return None


def _sampling_strategy_run(
    bench: Benchmark, m: int, n: int, prior: Prior | None, rng: np.random.Generator
) -> RunResult:
    """Pure sampling baseline: every proposal from the prior, or uniform."""
    space = bench.space
    records: list[RunRecord] = []
    incumbent = np.inf
    incumbent_x = None
    nonfinite = 0
    for i in range(m + n):
        t0 = time.perf_counter()
        if prior is not None:
            z = prior.sample(rng, 1)[0]
        else:
            z = space.sample_uniform(rng, 1)[0]
        x = space.unwarp(z)
        value = float(bench(x))
        if np.isfinite(value):
            if value < incumbent:
                incumbent, incumbent_x = value, x
        else:
            nonfinite += 1
        records.append(
            RunRecord(
                phase="init" if i < m else "bo",
                index=i + 1,
                x=x,
                y=value,
                incumbent=incumbent,
                regret=incumbent - bench.known_minimum,
                elapsed_ms=(time.perf_counter() - t0) * 1000.0,
            )
        )
    return RunResult(
        records=records,
        incumbent_x=incumbent_x,
        incumbent_value=incumbent,
        fallback_count=0,
        nonfinite_count=nonfinite,
    )


def _resolved_beta(config: ExperimentConfig) -> float:
    return config.beta if config.beta is not None else max(config.n_iter, 1) / 10.0


def execute_run(config: ExperimentConfig, index: int) -> RunOutcome:
    """Run one repetition; never raises, failures are captured."""
    seed = mix_seed(config.master_seed, index)
    try:
        bench = get_benchmark(config.benchmark)
        rng = np.random.default_rng(seed)
        prior = _build_prior(config, bench, rng)
        m = config.m_init or default_design_size(bench.space.d)
        if config.strategy in ("random", "prior_sampling"):
            sampler_prior = prior if config.strategy == "prior_sampling" else None
            result = _sampling_strategy_run(bench, m, config.n_iter, sampler_prior, rng)
        else:
            weighting = None
            if config.strategy == "pibo":
                weighting = PriorWeighting(
                    prior=prior,
                    beta=_resolved_beta(config),
                    bin_values=config.surrogate == "forest",
                )
            init_mode = config.init_mode or (
                "prior_with_mode" if config.strategy == "pibo" else "uniform_with_mode"
            )
            if init_mode != "uniform" and prior is None:
                init_mode = "uniform"
            opt = OptimizerConfig(
                m_init=m,
                n_iter=config.n_iter,
                acquisition=AcquisitionSpec(
                    kind=config.acquisition,
                    ucb_kappa=config.ucb_kappa,
                    ts_candidate_count=config.ts_candidate_count,
                    prior_weighting=weighting,
                ),
                surrogate=config.surrogate,
                init_mode=init_mode,
                seed=seed,
            )
            result = run(
                opt,
                bench.space,
                bench,
                prior=prior,
                known_minimum=bench.known_minimum,
                rng=rng,
            )
        return RunOutcome(
            index=index,
            seed=seed,
            records=result.records,
            fallback_count=result.fallback_count,
            nonfinite_count=result.nonfinite_count,
        )
    except Exception:
        return RunOutcome(
            index=index, seed=seed, records=None, error=traceback.format_exc()
        )


def aggregate_outcomes(outcomes: list[RunOutcome]) -> Aggregate:
    """Mean and standard error of log floored regret, per iteration."""
    good = [o for o in outcomes if o.ok]
    if not good:
        raise RunError("no successful repetitions to aggregate")
    lengths = {len(o.records) for o in good}
    if len(lengths) != 1:
        raise RunError(f"trace lengths differ across runs: {sorted(lengths)}")
    log_regret = np.array(
        [[np.log10(r.regret + LOG_REGRET_FLOOR) for r in o.records] for o in good]
    )
    runs = log_regret.shape[0]
    mean = log_regret.mean(axis=0)
    if runs > 1:
        stderr = log_regret.std(axis=0, ddof=1) / np.sqrt(runs)
    else:
        stderr = np.zeros(log_regret.shape[1])
    first = good[0].records
    return Aggregate(
        iters=np.array([r.index for r in first]),
        phases=[r.phase for r in first],
        mean=mean,
        stderr=stderr,
        runs=runs,
    )


# -- CSV serialization --------------------------------------------------------


def _fmt(v: float) -> str:
    return repr(float(v))


def trace_header(d: int) -> str:
    xs = ",".join(f"x{i}" for i in range(d))
    return f"run_id,seed,phase,iter,{xs},y,incumbent,regret,elapsed_ms"


def trace_csv(outcome: RunOutcome, d: int, record_timing: bool) -> str:
    lines = [trace_header(d)]
    for rec in outcome.records:
        xs = ",".join(_fmt(c) for c in rec.x)
        elapsed = rec.elapsed_ms if record_timing else 0.0
        lines.append(
            f"{outcome.index},{outcome.seed},{rec.phase},{rec.index},{xs},"
            f"{_fmt(rec.y)},{_fmt(rec.incumbent)},{_fmt(rec.regret)},{_fmt(elapsed)}"
        )
    return "\n".join(lines) + "\n"


AGGREGATE_HEADER = "iter,phase,mean_log10_regret,stderr_log10_regret,runs"


def aggregate_csv(agg: Aggregate) -> str:
    lines = [AGGREGATE_HEADER]
    for i in range(agg.iters.size):
        lines.append(
            f"{agg.iters[i]},{agg.phases[i]},{_fmt(agg.mean[i])},"
            f"{_fmt(agg.stderr[i])},{agg.runs}"
        )
    return "\n".join(lines) + "\n"


def read_aggregate_csv(path: str | Path) -> Aggregate:
    text = Path(path).read_text()
    lines = [
        (i + 1, ln) for i, ln in enumerate(text.splitlines()) if ln.strip()
    ]
    if not lines or lines[0][1] != AGGREGATE_HEADER:
        raise TraceParseError(f"{path}:1: expected header {AGGREGATE_HEADER!r}")
    iters, phases, means, errs, runs = [], [], [], [], 0
    for lineno, ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 5:
            raise TraceParseError(f"{path}:{lineno}: malformed row {ln!r}")
        try:
            iters.append(int(parts[0]))
            phases.append(parts[1])
            means.append(float(parts[2]))
            errs.append(float(parts[3]))
            runs = int(parts[4])
        except ValueError as exc:
            raise TraceParseError(f"{path}:{lineno}: {exc}") from exc
    return Aggregate(
        iters=np.array(iters),
        phases=phases,
        mean=np.array(means),
        stderr=np.array(errs),
        runs=runs,
    )


# -- experiment drivers -------------------------------------------------------


def run_experiment(config: ExperimentConfig, write: bool = True) -> ExperimentResult:
    """Run all repetitions (parallel when workers > 1) and write CSVs.

    Raises :class:`RunError` if every repetition fails; individual failures
    are recorded in the outcomes and skipped by the aggregate.
    """
    get_benchmark(config.benchmark)  # validate the name before spawning work
    if write:
        out = Path(config.output_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise OSError(f"cannot create output directory {out}: {exc}") from exc
    workers = config.workers or os.cpu_count() or 1
    indices = list(range(config.repetitions))
    if workers > 1 and config.repetitions > 1:
        with ProcessPoolExecutor(max_workers=min(workers, config.repetitions)) as pool:
            outcomes = list(pool.map(execute_run, [config] * len(indices), indices))
    else:
        outcomes = [execute_run(config, i) for i in indices]
    if not any(o.ok for o in outcomes):
        details = outcomes[0].error or "unknown error"
        raise RunError(f"all {config.repetitions} repetitions failed; first:\n{details}")
    agg = aggregate_outcomes(outcomes)
    result = ExperimentResult(config=config, outcomes=outcomes, aggregate=agg)
    if write:
        _write_outputs(result)
    return result


def _write_outputs(result: ExperimentResult) -> None:
    config = result.config
    bench = get_benchmark(config.benchmark)
    out = Path(config.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        for o in result.outcomes:
            if not o.ok:
                continue
            path = out / f"{config.stem}_run{o.index:03d}.csv"
            path.write_text(trace_csv(o, bench.space.d, config.record_timing))
            result.trace_paths.append(path)
        agg_path = out / f"{config.stem}_aggregate.csv"
        agg_path.write_text(aggregate_csv(result.aggregate))
        result.aggregate_path = agg_path
    except OSError as exc:
        raise OSError(f"cannot write results under {out}: {exc}") from exc


@dataclass
class SweepResult:
    betas: list[float]
    results: list[ExperimentResult]
    sweep_path: Path | None = None


def beta_sweep(
    config: ExperimentConfig, betas: list[float], write: bool = True
) -> SweepResult:
    """Re-run the experiment once per confidence value; emit one long CSV.

    The combined CSV prepends a ``beta`` column to the trace schema and has
    exactly ``len(betas) * repetitions * (m_init + n_iter)`` data rows.
    """
    if config.strategy != "pibo":
        raise ConfigError("a beta sweep only makes sense for the pibo strategy")
    if not betas:
        raise ConfigError("need at least one beta")
    results = []
    for beta in betas:
        sub = replace(config, beta=float(beta), label=f"{config.stem}_b{beta:g}")
        results.append(run_experiment(sub, write=write))
    sweep = SweepResult(betas=[float(b) for b in betas], results=results)
    if write:
        bench = get_benchmark(config.benchmark)
        lines = ["beta," + trace_header(bench.space.d)]
        for beta, res in zip(sweep.betas, results):
            for o in res.outcomes:
                if not o.ok:
                    continue
                body = trace_csv(o, bench.space.d, config.record_timing)
                for row in body.splitlines()[1:]:
                    lines.append(f"{_fmt(beta)},{row}")
        path = Path(config.output_dir) / f"{config.stem}_beta_sweep.csv"
        path.write_text("\n".join(lines) + "\n")
        sweep.sweep_path = path
    return sweep
