"""CART-style regression tree grown greedily on SSE reduction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from ..data import Dataset, SplitPlan
from ..errors import BadConfig, DimensionMismatch

MIN_GAIN = 1e-12


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int = 4
    min_samples_leaf: int = 3
    min_sse_reduction: float = 1e-9

    def __post_init__(self):
        if self.max_depth < 0 or self.min_samples_leaf < 1 or not self.min_sse_reduction >= 0:
            raise BadConfig("rtree: need max_depth >= 0, min_samples_leaf >= 1, min_sse_reduction >= 0")


@dataclass(frozen=True)
class Leaf:
    prediction: float
    count: int


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[Leaf, Split]


@dataclass(frozen=True)
class SplitCandidate:
    feature: int
    threshold: float
    reduction: float


def _sse(y: np.ndarray) -> float:
    d = y - y.mean()
    return float(d @ d)


def best_split(X: np.ndarray, y: np.ndarray, min_samples_leaf: int = 1) -> SplitCandidate | None:
    """Exhaustive search over features and midpoints of consecutive distinct values.

    Ties go to the lowest feature index, then the lowest threshold. Returns
    None when no admissible split reduces SSE by more than ``MIN_GAIN``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    if n < 2:
        return None
    yc = y - y.mean()
    parent = float(yc @ yc)
    best: SplitCandidate | None = None
    for f in range(X.shape[1]):
        order = np.argsort(X[:, f], kind="stable")
        xs, ys = X[order, f], yc[order]
        csum = np.cumsum(ys)
        csq = np.cumsum(ys * ys)
        total, total_sq = csum[-1], csq[-1]
        for k in range(min_samples_leaf, n - min_samples_leaf + 1):
            # left = first k sorted rows
            if xs[k - 1] == xs[k]:
                continue
            nl, nr = k, n - k
            sl, sr = csum[k - 1], total - csum[k - 1]
            sse_l = csq[k - 1] - sl * sl / nl
            sse_r = (total_sq - csq[k - 1]) - sr * sr / nr
            gain = parent - sse_l - sse_r
            if gain > MIN_GAIN and (best is None or gain > best.reduction):
                best = SplitCandidate(f, float(0.5 * (xs[k - 1] + xs[k])), float(gain))
    return best


def _grow(X: np.ndarray, y: np.ndarray, depth: int, cfg: TreeConfig) -> TreeNode:
    leaf = Leaf(float(y.mean()), int(y.shape[0]))
    if depth >= cfg.max_depth or y.shape[0] < 2 * cfg.min_samples_leaf:
        return leaf
    cand = best_split(X, y, cfg.min_samples_leaf)
    if cand is None or cand.reduction <= cfg.min_sse_reduction:
        return leaf
    go_left = X[:, cand.feature] <= cand.threshold
    return Split(
        cand.feature,
        cand.threshold,
        _grow(X[go_left], y[go_left], depth + 1, cfg),
        _grow(X[~go_left], y[~go_left], depth + 1, cfg),
    )


@dataclass(frozen=True, eq=False)
class RegressionTree:
    root: TreeNode
    n_features: int
    names: tuple[str, ...] = ()

    name = "RT"

    @property
    def leaves(self) -> list[Leaf]:
        out, stack = [], [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Leaf):
                out.append(node)
            else:
                stack += [node.right, node.left]
        return out

    def apply(self, X: np.ndarray) -> list[Leaf]:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise DimensionMismatch(f"expected {self.n_features} features, got {X.shape[1]}")
        return [_route(self.root, x) for x in X]

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.array([leaf.prediction for leaf in self.apply(X)])

    def to_record(self) -> str:
        return outline(self.root, self.names)


def _route(node: TreeNode, x: np.ndarray) -> Leaf:
    while isinstance(node, Split):
        node = node.left if x[node.feature] <= node.threshold else node.right
    return node


def fit_tree_arrays(X: np.ndarray, y: np.ndarray, cfg: TreeConfig = TreeConfig(), names=()) -> RegressionTree:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return RegressionTree(_grow(X, np.asarray(y, dtype=float), 0, cfg), X.shape[1], tuple(names))


def fit_tree(ds: Dataset, plan: SplitPlan, cfg: TreeConfig = TreeConfig()) -> RegressionTree:
    X, y = ds.rows(plan.train_idx)
    return fit_tree_arrays(X, y, cfg, ds.names)


def predict_tree(tree: RegressionTree | TreeNode, x) -> float:
    x = np.asarray(x, dtype=float)
    if isinstance(tree, RegressionTree):
        if x.ndim != 1 or x.shape[0] != tree.n_features:
            raise DimensionMismatch(f"expected a vector of {tree.n_features} features, got shape {x.shape}")
        tree = tree.root
    node = tree
    while isinstance(node, Split):
        if node.feature >= x.shape[0]:
            raise DimensionMismatch(f"split on feature {node.feature} but x has {x.shape[0]} entries")
        node = node.left if x[node.feature] <= node.threshold else node.right
    return node.prediction


def outline(node: TreeNode, names=(), indent: int = 0) -> str:
    """Indented one-node-per-line dump."""
    pad = "  " * indent
    if isinstance(node, Leaf):
        return f"{pad}leaf value={node.prediction!r} n={node.count}\n"
    label = names[node.feature] if node.feature < len(names) else f"x{node.feature}"
    return (
        f"{pad}split {label} (#{node.feature}) <= {node.threshold!r}\n"
        + outline(node.left, names, indent + 1)
        + outline(node.right, names, indent + 1)
    )
