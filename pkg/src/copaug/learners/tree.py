"""Exact greedy least-squares regression trees (CART).

Growth works on a presorted index matrix: column ``j`` lists the node's rows
ordered by feature ``j``. Children inherit their columns by stable filtering,
so no node sorts again and boosting can reuse one sort for every stage.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyInput, InvalidParameter, LengthMismatch


@dataclass(frozen=True)
class Leaf:
    value: float


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Leaf | Split


@dataclass(frozen=True)
class TreeLimits:
    max_depth: int = 3
    min_samples_split: int = 2
    min_samples_leaf: int = 1

    def __post_init__(self):
        if self.max_depth < 0:
            raise InvalidParameter("max_depth", self.max_depth, "must be >= 0")
        if self.min_samples_split < 2:
            raise InvalidParameter(
                "min_samples_split", self.min_samples_split, "must be >= 2"
            )
        if self.min_samples_leaf < 1:
            raise InvalidParameter(
                "min_samples_leaf", self.min_samples_leaf, "must be >= 1"
            )


def presort(X: np.ndarray) -> np.ndarray:
    return np.argsort(X, axis=0, kind="stable")


def _best_split(
    X: np.ndarray, r: np.ndarray, idx: np.ndarray, min_samples_leaf: int
) -> tuple[int, float] | None:
    """Lowest-SSE (feature, threshold) over all features, or None.

    Ties go to the lowest feature index, then the lowest threshold.
    """
    m, n_features = idx.shape
    xs = X[idx, np.arange(n_features)]
    rs = r[idx]

    csum = np.cumsum(rs, axis=0)[:-1]
    total = rs[:, 0].sum()
    n_left = np.arange(1, m)[:, None].astype(np.float64)
    n_right = m - n_left
    # maximising sum_l^2/n_l + sum_r^2/n_r minimises the children's SSE
    score = csum**2 / n_left + (total - csum) ** 2 / n_right

    valid = xs[:-1] < xs[1:]
    valid &= (n_left >= min_samples_leaf) & (n_right >= min_samples_leaf)
    if not valid.any():
        return None
    score = np.where(valid, score, -np.inf)

    # feature-major flattening makes argmax's first hit the tie-break winner
    flat = int(np.argmax(score.T.ravel()))
    feature, pos = divmod(flat, m - 1)
    if score[pos, feature] <= total**2 / m:
        return None
    lo, hi = xs[pos, feature], xs[pos + 1, feature]
    threshold = (lo + hi) / 2.0
    if threshold >= hi:
        threshold = lo
    return feature, float(threshold)


def _partition(idx: np.ndarray, mask: np.ndarray, count: int) -> np.ndarray:
    # boolean indexing on the transpose walks feature by feature, keeping each order
    return idx.T[mask.T].reshape(idx.shape[1], count).T


def _grow(
    X: np.ndarray,
    r: np.ndarray,
    idx: np.ndarray,
    depth: int,
    limits: TreeLimits,
    fitted: np.ndarray,
) -> TreeNode:
    rows = idx[:, 0]
    node_r = r[rows]
    value = float(node_r.mean())
    m = rows.size
    if (
        depth >= limits.max_depth
        or m < limits.min_samples_split
        or m < 2 * limits.min_samples_leaf
        or np.all(node_r == node_r[0])
    ):
        fitted[rows] = value
        return Leaf(value)

    split = _best_split(X, r, idx, limits.min_samples_leaf)
    if split is None:
        fitted[rows] = value
        return Leaf(value)
    feature, threshold = split
    go_left = np.zeros(X.shape[0], dtype=bool)
    go_left[rows] = X[rows, feature] <= threshold
    mask = go_left[idx]
    n_left = int(mask[:, 0].sum())
    return Split(
        feature,
        threshold,
        _grow(X, r, _partition(idx, mask, n_left), depth + 1, limits, fitted),
        _grow(X, r, _partition(idx, ~mask, m - n_left), depth + 1, limits, fitted),
    )


def grow_presorted(
    X: np.ndarray, residuals: np.ndarray, order: np.ndarray, limits: TreeLimits
) -> tuple[TreeNode, np.ndarray]:
    """Grow on rows already sorted by ``presort(X)``.

    Returns the tree and its predictions for the training rows.
    """
    fitted = np.empty(X.shape[0])
    return _grow(X, residuals, order, 0, limits, fitted), fitted


def fit_tree(
    X: np.ndarray,
    residuals: np.ndarray,
    max_depth: int = 3,
    min_samples_split: int = 2,
    min_samples_leaf: int = 1,
) -> TreeNode:
    X = np.asarray(X, dtype=np.float64)
    residuals = np.asarray(residuals, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] == 0 or X.shape[1] == 0:
        raise EmptyInput("tree training matrix")
    if X.shape[0] != residuals.size:
        raise LengthMismatch(X.shape[0], residuals.size)
    limits = TreeLimits(max_depth, min_samples_split, min_samples_leaf)
    tree, _ = grow_presorted(X, residuals, presort(X), limits)
    return tree


def predict_tree(node: TreeNode, X: np.ndarray) -> np.ndarray:
    out = np.empty(X.shape[0])
    _route(node, X, np.arange(X.shape[0]), out)
    return out


def _route(node: TreeNode, X: np.ndarray, rows: np.ndarray, out: np.ndarray) -> None:
    if isinstance(node, Leaf):
        out[rows] = node.value
        return
    go_left = X[rows, node.feature] <= node.threshold
    _route(node.left, X, rows[go_left], out)
    _route(node.right, X, rows[~go_left], out)


def tree_depth(node: TreeNode) -> int:
    if isinstance(node, Leaf):
        return 0
    return 1 + max(tree_depth(node.left), tree_depth(node.right))


def max_feature_index(node: TreeNode) -> int:
    if isinstance(node, Leaf):
        return -1
    return max(node.feature, max_feature_index(node.left), max_feature_index(node.right))


def tree_to_list(node: TreeNode) -> list[list]:
    """Pre-order encoding: ``["split", feature, threshold]`` or ``["leaf", value]``."""
    if isinstance(node, Leaf):
        return [["leaf", node.value]]
    return [
        ["split", node.feature, node.threshold],
        *tree_to_list(node.left),
        *tree_to_list(node.right),
    ]


def tree_from_list(items: list[list]) -> TreeNode:
    it = iter(items)

    def build() -> TreeNode:
        kind, *rest = next(it)
        if kind == "leaf":
            return Leaf(float(rest[0]))
        left = build()
        right = build()
        return Split(int(rest[0]), float(rest[1]), left, right)

    return build()
