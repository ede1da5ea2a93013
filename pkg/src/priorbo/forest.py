"""Random-forest regression surrogate.

Each tree is a CART regressor grown on a bootstrap resample: splits minimize
the summed squared error of the children, thresholds sit at midpoints of
sorted unique coordinate values, and leaves may hold a single point.  Nodes
consider every dimension when d <= 3 and a random sqrt(d)-sized subset
otherwise.  The ensemble prediction is the across-tree mean, with the
empirical across-tree variance as the uncertainty; both are piecewise
constant in the input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

DEFAULT_TREES = 10


@dataclass
class _Node:
    dim: int = -1
    threshold: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None
    value: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.left is None


def _best_split(
    X: np.ndarray, y: np.ndarray, dims: np.ndarray
) -> tuple[int, float] | None:
    """Midpoint split minimizing child SSE over the given dimensions."""
    n = y.shape[0]
    best = None
    best_sse = np.inf
    for dim in dims:
        order = np.argsort(X[:, dim], kind="stable")
        xs = X[order, dim]
        ys = y[order]
        cum = np.cumsum(ys)
        cum2 = np.cumsum(ys * ys)
        total, total2 = cum[-1], cum2[-1]
        # Split after position k (1-based count on the left) only where the
        # coordinate actually changes.
        valid = np.nonzero(xs[1:] > xs[:-1])[0] + 1
        if valid.size == 0:
            continue
        k = valid.astype(float)
        sse_left = cum2[valid - 1] - cum[valid - 1] ** 2 / k
        sum_right = total - cum[valid - 1]
        sse_right = (total2 - cum2[valid - 1]) - sum_right**2 / (n - k)
        sse = sse_left + sse_right
        j = int(np.argmin(sse))
        if best is None or sse[j] < best_sse - 1e-15 * max(1.0, abs(best_sse)):
            best_sse = sse[j]
            cut = valid[j]
            best = (int(dim), float(0.5 * (xs[cut - 1] + xs[cut])))
    return best


def _grow(X: np.ndarray, y: np.ndarray, rng: np.random.Generator, n_dims: int) -> _Node:
    node = _Node(value=float(np.mean(y)))
    if y.shape[0] < 2 or np.all(y == y[0]):
        return node
    d = X.shape[1]
    if n_dims >= d:
        dims = np.arange(d)
    else:
        dims = rng.choice(d, size=n_dims, replace=False)
    split = _best_split(X, y, dims)
    if split is None:
        return node
    node.dim, node.threshold = split
    mask = X[:, node.dim] <= node.threshold
    node.left = _grow(X[mask], y[mask], rng, n_dims)
    node.right = _grow(X[~mask], y[~mask], rng, n_dims)
    return node


def _leaf_count(node: _Node) -> int:
    if node.is_leaf:
        return 1
    return _leaf_count(node.left) + _leaf_count(node.right)


def _predict_node(node: _Node, X: np.ndarray, out: np.ndarray, idx: np.ndarray) -> None:
    if node.is_leaf:
        out[idx] = node.value
        return
    mask = X[idx, node.dim] <= node.threshold
    _predict_node(node.left, X, out, idx[mask])
    _predict_node(node.right, X, out, idx[~mask])


class RandomForest:
    """Bootstrap ensemble of CART regression trees.

    Parameters
    ----------
    n_trees : int
        Ensemble size.
    bootstrap : bool
        Train each tree on an n-sized resample with replacement; disable to
        fit every tree on the full data (useful for pinning tree structure).
    """

    def __init__(self, n_trees: int = DEFAULT_TREES, bootstrap: bool = True):
        if n_trees < 1:
            raise ConfigError("need at least one tree")
        self.n_trees = n_trees
        self.bootstrap = bootstrap
        self._trees: list[_Node] = []
        self._d = 0

    def fit(self, X: np.ndarray, y: np.ndarray, rng: np.random.Generator) -> "RandomForest":
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float).ravel()
        if X.shape[0] != y.shape[0]:
            raise ConfigError("X and y row counts differ")
        if X.shape[0] == 0:
            raise ConfigError("cannot fit a forest on zero observations")
        if np.any(~np.isfinite(X)) or np.any(~np.isfinite(y)):
            raise ConfigError("forest training data must be finite")
        n, d = X.shape
        self._d = d
        n_dims = d if d <= 3 else int(np.ceil(np.sqrt(d)))
        self._trees = []
        for _ in range(self.n_trees):
            if self.bootstrap:
                idx = rng.integers(0, n, size=n)
                Xb, yb = X[idx], y[idx]
            else:
                Xb, yb = X, y
            self._trees.append(_grow(Xb, yb, rng, n_dims))
        return self

    def predict(self, Xq: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Across-tree mean and empirical variance at rows of ``Xq``."""
        if not self._trees:
            raise ConfigError("forest is not fitted")
        Xq = np.atleast_2d(np.asarray(Xq, dtype=float))
        if Xq.shape[1] != self._d:
            raise ConfigError(f"expected {self._d}-dimensional queries")
        preds = np.empty((self.n_trees, Xq.shape[0]))
        idx = np.arange(Xq.shape[0])
        for t, tree in enumerate(self._trees):
            _predict_node(tree, Xq, preds[t], idx)
        return preds.mean(axis=0), preds.var(axis=0)

    def total_leaves(self) -> int:
        """Summed leaf count across the ensemble."""
        return sum(_leaf_count(t) for t in self._trees)
