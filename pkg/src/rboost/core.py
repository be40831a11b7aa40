"""Sample geometry, datasets and the staged additive model.

Everything downstream works in the empirical L2 geometry of a fixed
training sample: norms, inner products and risks are all means over the
sample rows. Models are kept in staged form, i.e. as the sequence of
(alpha_k, beta_k, g_k) updates

    f_k = (1 - alpha_k) * f_{k-1} + beta_k * g_k,

which preserves enough structure to truncate a trained model to any
earlier iteration and to track the l1 norm of the expanded coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

ALGORITHMS = ("boosting", "rboosting", "ddrboosting")


def as_feature_matrix(x) -> np.ndarray:
    """Coerce input to a float (n, d) matrix; a 1-d array is n points in d=1."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"features must be 1-d or 2-d, got shape {arr.shape}")
    return arr


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-d, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty")
    return arr


def empirical_norm(values) -> float:
    """sqrt(mean(v_i^2)) over the sample entries."""
    v = _as_vector(values, "values")
    return float(np.sqrt(np.mean(v * v)))


def empirical_inner(a, b) -> float:
    """mean(a_i * b_i); the inner product matching :func:`empirical_norm`."""
    av = _as_vector(a, "a")
    bv = _as_vector(b, "b")
    if av.shape != bv.shape:
        raise ValueError(f"length mismatch: {av.size} vs {bv.size}")
    return float(np.mean(av * bv))


def empirical_risk(pred, targets) -> float:
    """Mean squared error mean((pred_i - y_i)^2)."""
    pv = _as_vector(pred, "pred")
    yv = _as_vector(targets, "targets")
    if pv.shape != yv.shape:
        raise ValueError(f"length mismatch: {pv.size} vs {yv.size}")
    d = pv - yv
    return float(np.mean(d * d))


def clip(values, bound: float):
    """Truncate to [-bound, bound], i.e. min(bound, |t|) * sign(t).

    Scalars come back as float, arrays as arrays. Clipping a prediction
    never increases its squared error against a target inside the band.
    """
    if bound <= 0:
        raise ValueError(f"clip bound must be > 0, got {bound}")
    if np.ndim(values) == 0:
        return float(min(bound, max(-bound, float(values))))
    return np.clip(np.asarray(values, dtype=np.float64), -bound, bound)


class Dataset:
    """An immutable regression sample: features (m, d) and targets (m,).

    Row order is part of the identity: every empirical quantity is a mean
    over rows in order. Non-finite entries are rejected up front so the
    numeric kernels never have to re-check.
    """

    __slots__ = ("_features", "_targets")

    def __init__(self, features, targets):
        X = as_feature_matrix(features)
        y = np.asarray(targets, dtype=np.float64)
        if y.ndim != 1:
            raise ValueError(f"targets must be 1-d, got shape {y.shape}")
        if X.shape[0] != y.shape[0]:
            raise ValueError(f"row mismatch: {X.shape[0]} feature rows vs {y.shape[0]} targets")
        if X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError("need at least one row and one feature column")
        if not np.all(np.isfinite(X)):
            raise ValueError("features contain non-finite values")
        if not np.all(np.isfinite(y)):
            raise ValueError("targets contain non-finite values")
        X = np.ascontiguousarray(X)
        y = np.ascontiguousarray(y)
        X.setflags(write=False)
        y.setflags(write=False)
        self._features = X
        self._targets = y

    @property
    def features(self) -> np.ndarray:
        return self._features

    @property
    def targets(self) -> np.ndarray:
        return self._targets

    @property
    def m(self) -> int:
        return self._features.shape[0]

    @property
    def d(self) -> int:
        return self._features.shape[1]

    def subset(self, rows) -> "Dataset":
        """New dataset from a row index array, preserving the given order."""
        idx = np.asarray(rows)
        return Dataset(self._features[idx], self._targets[idx])

    def __len__(self) -> int:
        return self.m

    def __repr__(self) -> str:
        return f"Dataset(m={self.m}, d={self.d})"


@dataclass(frozen=True)
class TrainConfig:
    """Settings for one training run.

    algorithm: one of "boosting", "rboosting", "ddrboosting".
    max_iterations: stage budget; training may stop earlier on a
        degenerate step (zero residual or zero-norm learner).
    learner_spec: weak-learner factory, e.g. TreeLearnerSpec(n_splits=4)
        or DictionaryLearnerSpec(atoms).
    u: re-scale factor of the shrinkage schedule alpha_k = 2 / (k + u);
        only read by "rboosting".
    clip_bound: optional prediction clipping bound; never applied inside
        the training recursion, only where a caller asks for it.
    """

    algorithm: str
    max_iterations: int
    learner_spec: object
    u: int = 1
    clip_bound: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}, expected one of {ALGORITHMS}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.algorithm == "rboosting":
            if int(self.u) != self.u or self.u < 1:
                raise ValueError(f"u must be a positive integer for rboosting, got {self.u}")
        if self.clip_bound is not None and self.clip_bound <= 0:
            raise ValueError(f"clip_bound must be > 0 when set, got {self.clip_bound}")
        if self.learner_spec is None:
            raise ValueError("learner_spec is required")


@dataclass(frozen=True)
class Stage:
    """One boosting update: f <- (1 - alpha) * f + beta * learner(x)."""

    alpha: float
    beta: float
    learner: object  # anything with predict(X) -> (n,) array


class Ensemble:
    """Staged additive model with truncation and coefficient bookkeeping.

    The k-stage prediction follows the staged recursion; equivalently it
    expands to sum_j c_j g_j(x) with effective coefficients
    c_j = beta_j * prod_{i>j} (1 - alpha_i), plus the discounted offset.
    Instances are immutable; training code builds a fresh one per run.
    """

    __slots__ = ("_stages", "_offset")

    def __init__(self, stages: Sequence[Stage] = (), offset: float = 0.0):
        self._stages = tuple(stages)
        self._offset = float(offset)

    @property
    def stages(self) -> tuple:
        return self._stages

    @property
    def offset(self) -> float:
        return self._offset

    def __len__(self) -> int:
        return len(self._stages)

    def __repr__(self) -> str:
        return f"Ensemble(stages={len(self._stages)})"

    def predict(self, X, clip_bound: Optional[float] = None) -> np.ndarray:
        """Evaluate the full model on feature rows via the staged recursion."""
        X = as_feature_matrix(X)
        f = np.full(X.shape[0], self._offset, dtype=np.float64)
        for st in self._stages:
            f = (1.0 - st.alpha) * f + st.beta * st.learner.predict(X)
        if clip_bound is not None:
            f = clip(f, clip_bound)
        return f

    def staged_predict(self, X) -> np.ndarray:
        """All intermediate predictions, shape (n_stages, n_rows); row k-1 is f_k."""
        X = as_feature_matrix(X)
        out = np.empty((len(self._stages), X.shape[0]), dtype=np.float64)
        f = np.full(X.shape[0], self._offset, dtype=np.float64)
        for k, st in enumerate(self._stages):
            f = (1.0 - st.alpha) * f + st.beta * st.learner.predict(X)
            out[k] = f
        return out

    def effective_coefficients(self) -> np.ndarray:
        """Net weight of each stage's learner after all later (1 - alpha) discounts."""
        k = len(self._stages)
        if k == 0:
            return np.empty(0, dtype=np.float64)
        alphas = np.array([st.alpha for st in self._stages])
        betas = np.array([st.beta for st in self._stages])
        tail = np.ones(k)
        if k > 1:
            tail[:-1] = np.cumprod((1.0 - alphas)[:0:-1])[::-1]
        return betas * tail

    def offset_discount(self) -> float:
        """prod_k (1 - alpha_k): the weight the offset retains in the full model."""
        out = 1.0
        for st in self._stages:
            out *= 1.0 - st.alpha
        return out

    def expanded_predict(self, X) -> np.ndarray:
        """Prediction via the coefficient expansion; agrees with predict() to fp error."""
        X = as_feature_matrix(X)
        f = np.full(X.shape[0], self._offset * self.offset_discount(), dtype=np.float64)
        for c, st in zip(self.effective_coefficients(), self._stages):
            f += c * st.learner.predict(X)
        return f

    def l1_norm(self) -> float:
        """Sum of |effective coefficient| over stages (offset excluded)."""
        c = self.effective_coefficients()
        return float(np.sum(np.abs(c))) if c.size else 0.0

    def truncate(self, k: int) -> "Ensemble":
        """The model made of the first k stages, as the trainer had it at iteration k."""
        if not 0 <= k <= len(self._stages):
            raise ValueError(f"cannot truncate to {k} stages, model has {len(self._stages)}")
        return Ensemble(self._stages[:k], self._offset)
