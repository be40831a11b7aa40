"""Weak learners: CART regression trees, decision stumps and explicit dictionaries.

The gradient-projection step of the training loops needs, per iteration, a
unit-empirical-norm function aligned with the current residual. Trees get
there by least-squares fitting to the residual followed by normalization
(for unit-norm g, minimizing ||r - <r,g> g|| is the same as maximizing
|<r,g>|, so the fit is the tractable stand-in for an argmax over an
implicit tree dictionary). Explicit dictionaries do the argmax literally.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import Dataset, as_feature_matrix, empirical_norm

# Below this empirical norm a fitted learner is useless as a direction.
DEGENERATE_NORM = 1e-12

# A split must reduce node SSE by more than this relative amount, which
# keeps constant-residual nodes unsplit despite summation round-off.
_MIN_GAIN_REL = 1e-12


class DegenerateLearnerError(Exception):
    """Raised when a learner's predictions have ~zero norm on the fitting sample."""


class _Node:
    __slots__ = ("feature", "threshold", "left", "right", "value")

    def __init__(self, value: float):
        self.feature = None
        self.threshold = 0.0
        self.left = None
        self.right = None
        self.value = value

    def is_leaf(self) -> bool:
        return self.feature is None

    def to_dict(self) -> dict:
        if self.is_leaf():
            return {"value": self.value}
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @staticmethod
    def from_dict(spec: dict) -> "_Node":
        if "value" in spec:
            return _Node(float(spec["value"]))
        node = _Node(0.0)
        node.feature = int(spec["feature"])
        node.threshold = float(spec["threshold"])
        node.left = _Node.from_dict(spec["left"])
        node.right = _Node.from_dict(spec["right"])
        return node


class RegressionTree:
    """Axis-aligned binary regression tree; x routes left iff x[feature] <= threshold.

    Leaf values are the means of the fitting targets routed to them. The
    achieved split count can fall short of the budget when the data has no
    further SSE-reducing split.
    """

    def __init__(self, root: _Node, n_splits: int, n_features: int):
        self._root = root
        self.n_splits = n_splits
        self.n_features = n_features

    def predict(self, X) -> np.ndarray:
        X = as_feature_matrix(X)
        if X.shape[1] != self.n_features:
            raise ValueError(f"tree was fit on d={self.n_features}, got d={X.shape[1]}")
        out = np.empty(X.shape[0], dtype=np.float64)
        self._route(self._root, X, np.arange(X.shape[0]), out)
        return out

    def _route(self, node: _Node, X: np.ndarray, rows: np.ndarray, out: np.ndarray):
        if node.is_leaf():
            out[rows] = node.value
            return
        go_left = X[rows, node.feature] <= node.threshold
        self._route(node.left, X, rows[go_left], out)
        self._route(node.right, X, rows[~go_left], out)

    def leaf_values(self) -> list:
        vals = []
        stack = [self._root]
        while stack:
            node = stack.pop()
            if node.is_leaf():
                vals.append(node.value)
            else:
                stack.append(node.right)
                stack.append(node.left)
        return vals

    def to_dict(self) -> dict:
        return {"n_splits": self.n_splits, "n_features": self.n_features, "root": self._root.to_dict()}

    @staticmethod
    def from_dict(spec: dict) -> "RegressionTree":
        return RegressionTree(_Node.from_dict(spec["root"]), int(spec["n_splits"]), int(spec["n_features"]))


def _best_split(X: np.ndarray, r: np.ndarray, rows: np.ndarray):
    """Best SSE-reducing (feature, threshold) over a node's rows, or None.

    Candidate thresholds are midpoints between consecutive distinct sorted
    feature values. Each column's best boundary comes from a vectorized
    prefix-sum scan; the winners are then re-scored from the row partition
    in original row order, which makes gains of identical partitions
    bit-equal across features, so ties genuinely break toward the lower
    feature index (and, within a column, the smaller threshold).
    """
    n = rows.size
    if n < 2:
        return None
    sub = X[rows]
    r_node = r[rows]
    order = np.argsort(sub, axis=0, kind="stable")
    xs = np.take_along_axis(sub, order, axis=0)
    rs = r_node[order]
    csum = np.cumsum(rs, axis=0)
    nl = np.arange(1, n, dtype=np.float64)[:, None]
    sl = csum[:-1]
    sr = csum[-1] - sl
    gain = sl * sl / nl + sr * sr / (n - nl)  # node-constant offset omitted
    gain[xs[1:] == xs[:-1]] = -np.inf
    best_pos = np.argmax(gain, axis=0)  # first max in a column = smallest threshold

    total = float(np.sum(r_node))
    node_sse = float(np.dot(r_node, r_node) - total * total / n)
    min_gain = max(node_sse * _MIN_GAIN_REL, 0.0)
    best = None
    for feat in range(sub.shape[1]):
        pos = int(best_pos[feat])
        if not np.isfinite(gain[pos, feat]):
            continue
        threshold = 0.5 * (xs[pos, feat] + xs[pos + 1, feat])
        if not xs[pos, feat] <= threshold < xs[pos + 1, feat]:
            threshold = float(xs[pos, feat])  # midpoint rounded onto a sample value
        go_left = sub[:, feat] <= threshold
        n_left = int(np.count_nonzero(go_left))
        # Both block sums taken directly (not total - other) so complementary
        # partitions reached from different features tie bit-exactly.
        s_left = float(np.sum(r_node[go_left]))
        s_right = float(np.sum(r_node[~go_left]))
        canonical = s_left * s_left / n_left + s_right * s_right / (n - n_left) - total * total / n
        if canonical <= min_gain:
            continue
        if best is None or canonical > best[0]:
            best = (canonical, feat, float(threshold), go_left)
    if best is None:
        return None
    canonical, feat, threshold, go_left = best
    return canonical, feat, threshold, rows[go_left], rows[~go_left]


def _routed_mean(values: np.ndarray) -> float:
    # Summing in sorted order makes leaf values independent of row order.
    return float(np.mean(np.sort(values)))


def fit_tree(data: Dataset, residual, n_splits: int) -> RegressionTree:
    """Grow a least-squares CART tree on the residual, best-first, up to n_splits.

    Growth order is by SSE reduction; frontier ties fall back to creation
    order. A constant residual yields a single leaf at its mean. Fitting is
    invariant to row permutations when per-column feature values are
    distinct (the generic case for continuous data).
    """
    if n_splits < 1:
        raise ValueError(f"n_splits must be >= 1, got {n_splits}")
    r = np.asarray(residual, dtype=np.float64)
    if r.shape != (data.m,):
        raise ValueError(f"residual must have length m={data.m}, got shape {r.shape}")
    X = data.features
    root = _Node(_routed_mean(r))
    frontier = []
    counter = 0
    cand = _best_split(X, r, np.arange(data.m))
    if cand is not None:
        heapq.heappush(frontier, (-cand[0], counter, root, cand))
        counter += 1
    splits = 0
    while frontier and splits < n_splits:
        _, _, node, (_, feat, threshold, left_rows, right_rows) = heapq.heappop(frontier)
        node.feature = feat
        node.threshold = threshold
        node.left = _Node(_routed_mean(r[left_rows]))
        node.right = _Node(_routed_mean(r[right_rows]))
        splits += 1
        for child, child_rows in ((node.left, left_rows), (node.right, right_rows)):
            cand = _best_split(X, r, child_rows)
            if cand is not None:
                heapq.heappush(frontier, (-cand[0], counter, child, cand))
                counter += 1
    return RegressionTree(root, splits, data.d)


def fit_stump(data: Dataset, residual) -> RegressionTree:
    """One-split regression tree (J = 1)."""
    return fit_tree(data, residual, 1)


@dataclass(frozen=True)
class NormalizedLearner:
    """A learner rescaled to unit empirical norm on its fitting sample."""

    base: object
    scale: float

    def predict(self, X) -> np.ndarray:
        return self.scale * self.base.predict(X)


def normalize_learner(learner, data: Dataset) -> NormalizedLearner:
    """Wrap a learner so its predictions have unit empirical norm on data.

    Raises DegenerateLearnerError when the norm is numerically zero; the
    training loops translate that into an early stop.
    """
    nrm = empirical_norm(learner.predict(data.features))
    if nrm <= DEGENERATE_NORM:
        raise DegenerateLearnerError(f"learner norm {nrm:.3e} on the fitting sample")
    return NormalizedLearner(learner, 1.0 / nrm)


@dataclass(frozen=True)
class DictionaryAtom:
    """A fixed candidate function; fn maps an (n, d) feature matrix to (n,) values."""

    atom_id: int
    fn: Callable[[np.ndarray], np.ndarray]

    def predict(self, X) -> np.ndarray:
        return np.asarray(self.fn(as_feature_matrix(X)), dtype=np.float64)


def select_from_dictionary(atoms: Sequence[DictionaryAtom], data: Dataset, residual):
    """Atom maximizing |<residual, g>_m| plus the signed inner product.

    Atoms are expected to already have unit empirical norm on data. Exact
    ties go to the lowest atom_id.
    """
    if not atoms:
        raise ValueError("dictionary is empty")
    r = np.asarray(residual, dtype=np.float64)
    if r.shape != (data.m,):
        raise ValueError(f"residual must have length m={data.m}, got shape {r.shape}")
    inners = np.array([np.mean(a.predict(data.features) * r) for a in atoms])
    best = min(range(len(atoms)), key=lambda i: (-abs(inners[i]), atoms[i].atom_id))
    return atoms[best], float(inners[best])


@dataclass(frozen=True)
class TreeLearnerSpec:
    """Weak-learner factory: CART trees with a fixed split budget."""

    n_splits: int = 4

    def __post_init__(self):
        if self.n_splits < 1:
            raise ValueError(f"n_splits must be >= 1, got {self.n_splits}")

    def bind(self, data: Dataset) -> "_TreeFitter":
        return _TreeFitter(data, self.n_splits)


class _TreeFitter:
    def __init__(self, data: Dataset, n_splits: int):
        self._data = data
        self._n_splits = n_splits

    def fit_step(self, residual):
        """Fit one unit-norm tree to the residual; None when degenerate."""
        tree = fit_tree(self._data, residual, self._n_splits)
        pred = tree.predict(self._data.features)
        nrm = empirical_norm(pred)
        if nrm <= DEGENERATE_NORM:
            return None
        return NormalizedLearner(tree, 1.0 / nrm), pred / nrm


@dataclass(frozen=True)
class DictionaryLearnerSpec:
    """Weak-learner factory: argmax selection from a fixed set of atoms."""

    atoms: tuple

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("dictionary is empty")

    def bind(self, data: Dataset) -> "_DictionaryFitter":
        return _DictionaryFitter(self.atoms, data)


class _DictionaryFitter:
    def __init__(self, atoms: Sequence[DictionaryAtom], data: Dataset):
        learners = []
        values = []
        ids = []
        for atom in atoms:
            pred = atom.predict(data.features)
            nrm = empirical_norm(pred)
            if nrm <= DEGENERATE_NORM:
                continue  # zero on this sample; can never carry signal
            learners.append(NormalizedLearner(atom, 1.0 / nrm))
            values.append(pred / nrm)
            ids.append(atom.atom_id)
        if not learners:
            raise DegenerateLearnerError("every atom has ~zero norm on the sample")
        self._learners = learners
        self._values = np.asarray(values)
        self._ids = ids
        self._m = data.m

    def fit_step(self, residual):
        """Pick the unit-norm atom most aligned with the residual; None if all orthogonal."""
        r = np.asarray(residual, dtype=np.float64)
        inners = self._values @ r / self._m
        best = min(range(len(self._learners)), key=lambda i: (-abs(inners[i]), self._ids[i]))
        if inners[best] == 0.0:
            return None
        return self._learners[best], self._values[best]
