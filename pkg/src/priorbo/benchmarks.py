"""Analytic minimization benchmarks with known optima.

Each benchmark bundles its box, a scalar objective, the known minimum, and a
cached empirical *maximizer* (used to build deliberately misleading priors).
The empirical maximizer is computed once per benchmark from a fixed internal
seed — 10^5 uniform probes refined by pattern search — so it is a constant
across processes and runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, DomainError
from .space import Dimension, SearchSpace

STABILIZER = 1e-12  # keeps the log-output slice finite at the minimum

_BRANIN_A = 1.0
_BRANIN_B = 5.1 / (4.0 * np.pi**2)
_BRANIN_C = 5.0 / np.pi
_BRANIN_R = 6.0
_BRANIN_S = 10.0
_BRANIN_T = 1.0 / (8.0 * np.pi)

_HARTMANN6_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
_HARTMANN6_A = np.array(
    [
        [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
        [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
        [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
        [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
    ]
)
_HARTMANN6_P = 1e-4 * np.array(
    [
        [1312, 1696, 5569, 124, 8283, 5886],
        [2329, 4135, 8307, 3736, 1004, 9991],
        [2348, 1451, 3522, 2883, 3047, 6650],
        [4047, 8828, 8732, 5743, 1091, 381],
    ]
)
_HARTMANN6_MINIMIZER = np.array(
    [0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573]
)


def branin(x: np.ndarray) -> float | np.ndarray:
    """Two-dimensional Branin function on [-5, 10] x [0, 15]."""
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    inner = x2 - _BRANIN_B * x1**2 + _BRANIN_C * x1 - _BRANIN_R
    val = (
        _BRANIN_A * inner**2
        + _BRANIN_S * (1.0 - _BRANIN_T) * np.cos(x1)
        + _BRANIN_S
    )
    return float(val) if val.ndim == 0 else val


def branin_slice_log(x: np.ndarray) -> float | np.ndarray:
    """1-D slice of Branin at x2 = 2.275, on log10 output scale.

    The slice passes through a global minimizer, so the raw minimum is the
    Branin minimum; a small stabilizer keeps the log finite there.
    """
    x = np.asarray(x, dtype=float)
    x1 = x[..., 0]
    pts = np.stack([x1, np.full_like(x1, 2.275)], axis=-1)
    val = np.log10(branin(pts) + STABILIZER)
    return float(val) if np.ndim(val) == 0 else val


def hartmann6(x: np.ndarray) -> float | np.ndarray:
    """Six-dimensional Hartmann function on the unit box."""
    x = np.asarray(x, dtype=float)
    pts = np.atleast_2d(x)
    diff = pts[:, None, :] - _HARTMANN6_P[None, :, :]  # (m, 4, 6)
    expo = np.einsum("mij,ij->mi", diff * diff, _HARTMANN6_A)
    val = -np.sum(_HARTMANN6_ALPHA * np.exp(-expo), axis=1)
    return float(val[0]) if x.ndim == 1 else val


@dataclass
class Benchmark:
    """An analytic objective with its box and known optimum."""

    name: str
    space: SearchSpace
    fn: Callable[[np.ndarray], float]
    known_minimum: float
    known_minimizers: np.ndarray
    _empirical_max: tuple[np.ndarray, float] | None = field(default=None, repr=False)

    def __call__(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.space.d,):
            raise DomainError(
                f"{self.name} expects a point of shape ({self.space.d},)"
            )
        if not self.space.contains(x, atol=1e-9):
            raise DomainError(f"{self.name}: point {x} is outside the box")
        return float(self.fn(x))

    def batch(self, X: np.ndarray) -> np.ndarray:
        """Vectorized evaluation of in-box rows (no per-point checks)."""
        return np.asarray(self.fn(np.atleast_2d(np.asarray(X, dtype=float))))

    def regret(self, value: float) -> float:
        return value - self.known_minimum

    @property
    def empirical_maximizer(self) -> np.ndarray:
        return self._ensure_empirical_max()[0]

    @property
    def empirical_maximum(self) -> float:
        return self._ensure_empirical_max()[1]

    def _ensure_empirical_max(self) -> tuple[np.ndarray, float]:
        if self._empirical_max is None:
            self._empirical_max = _EMPIRICAL_MAX_CACHE.setdefault(
                self.name, empirical_max(self)
            )
        return self._empirical_max


_EMPIRICAL_MAX_CACHE: dict[str, tuple[np.ndarray, float]] = {}
_EMPIRICAL_MAX_SEED = 20_000_101
_EMPIRICAL_MAX_SAMPLES = 100_000


def empirical_max(
    benchmark: Benchmark, rng: np.random.Generator | None = None
) -> tuple[np.ndarray, float]:
    """Approximate maximizer of a benchmark: uniform probes plus refinement.

    Deterministic by default (fixed internal seed), so repeated runs build
    identical misleading priors.
    """
    if rng is None:
        rng = np.random.default_rng(_EMPIRICAL_MAX_SEED)
    space = benchmark.space
    probes = space.unwarp(space.sample_uniform(rng, _EMPIRICAL_MAX_SAMPLES))
    vals = benchmark.batch(probes)
    best = int(np.argmax(vals))
    x, fx = probes[best].copy(), float(vals[best])
    lo, hi = space.lower, space.upper
    step = 0.05 * (hi - lo)
    for _ in range(200):
        if np.max(step / (hi - lo)) < 1e-9:
            break
        improved = False
        for i in range(space.d):
            for sign in (1.0, -1.0):
                cand = x.copy()
                cand[i] = np.clip(cand[i] + sign * step[i], lo[i], hi[i])
                if cand[i] == x[i]:
                    continue
                fc = float(benchmark.batch(cand[None, :])[0])
                if fc > fx:
                    x, fx = cand, fc
                    improved = True
        if not improved:
            step *= 0.5
    return x, fx


def _make_branin() -> Benchmark:
    space = SearchSpace(
        [Dimension("x0", -5.0, 10.0), Dimension("x1", 0.0, 15.0)]
    )
    return Benchmark(
        name="branin",
        space=space,
        fn=branin,
        known_minimum=float(10.0 / (8.0 * np.pi)),
        known_minimizers=np.array(
            [
                [np.pi, 2.275],
                [-np.pi, 12.275],
                [3.0 * np.pi, 2.475],
            ]
        ),
    )


def _make_branin_slice_log() -> Benchmark:
    space = SearchSpace([Dimension("x0", -5.0, 10.0)])
    return Benchmark(
        name="branin1d-log",
        space=space,
        fn=branin_slice_log,
        known_minimum=float(np.log10(10.0 / (8.0 * np.pi) + STABILIZER)),
        known_minimizers=np.array([[np.pi]]),
    )


def _make_hartmann6() -> Benchmark:
    space = SearchSpace([Dimension(f"x{i}", 0.0, 1.0) for i in range(6)])
    minimizer = _refine_minimum()
    return Benchmark(
        name="hartmann6",
        space=space,
        fn=hartmann6,
        known_minimum=float(hartmann6(minimizer)),
        known_minimizers=np.array([minimizer]),
    )


def _refine_minimum() -> np.ndarray:
    """Polish the tabulated Hartmann-6 minimizer by local pattern search."""
    x = _HARTMANN6_MINIMIZER.copy()
    fx = float(hartmann6(x))
    step = np.full(6, 1e-3)
    for _ in range(300):
        if float(np.max(step)) < 1e-12:
            break
        improved = False
        for i in range(6):
            for sign in (1.0, -1.0):
                cand = x.copy()
                cand[i] = np.clip(cand[i] + sign * step[i], 0.0, 1.0)
                fc = float(hartmann6(cand))
                if fc < fx:
                    x, fx = cand, fc
                    improved = True
        if not improved:
            step *= 0.5
    return x


_REGISTRY: dict[str, Callable[[], Benchmark]] = {
    "branin": _make_branin,
    "branin1d-log": _make_branin_slice_log,
    "hartmann6": _make_hartmann6,
}

_INSTANCES: dict[str, Benchmark] = {}


def benchmark_names() -> list[str]:
    return sorted(_REGISTRY)


def get_benchmark(name: str) -> Benchmark:
    """Look up a benchmark by registry name (shared instance)."""
    if name not in _REGISTRY:
        raise ConfigError(
            f"unknown benchmark {name!r}; available: {', '.join(benchmark_names())}"
        )
    if name not in _INSTANCES:
        _INSTANCES[name] = _REGISTRY[name]()
    return _INSTANCES[name]
