"""The three training loops and their step-size searches.

All three share the projection-of-gradient step (fit/select a unit-norm
weak learner against the plain residual y - f_{k-1}) and differ in how the
update f_k = (1 - alpha_k) f_{k-1} + beta_k g_k picks (alpha_k, beta_k):

  boosting      alpha_k = 0,          beta_k = <r_{k-1}, g_k>_m
  rboosting     alpha_k = 2 / (k+u),  beta_k = <y - (1-alpha_k) f_{k-1}, g_k>_m
  ddrboosting   (alpha_k, beta_k) = exact 2-d least-squares over R^2

Selection always uses the plain residual, not the shrinkage residual;
that distinction is what separates re-scaled greedy steps from jointly
re-optimized ones. Training stops early when the residual is numerically
zero or the fitted learner is degenerate, reporting the achieved count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .core import Dataset, Ensemble, Stage, TrainConfig

# Residual below this (relative to the target scale) means the sample is fit.
_RESIDUAL_TOL = 1e-13

# Gram determinants at or below this relative level trigger the 1-d fallback.
_GRAM_TOL = 1e-12


def shrinkage_alpha(k: int, u: int) -> float:
    """Schedule alpha_k = 2 / (k + u) for step k >= 1 and re-scale factor u >= 1."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if u < 1:
        raise ValueError(f"u must be >= 1, got {u}")
    return 2.0 / (k + u)


@dataclass(frozen=True)
class ShrinkageSchedule:
    """The parameterized shrinkage sequence; strictly decreasing, in (0, 1]."""

    u: int

    def __post_init__(self):
        if int(self.u) != self.u or self.u < 1:
            raise ValueError(f"u must be a positive integer, got {self.u}")

    def alpha(self, k: int) -> float:
        return shrinkage_alpha(k, self.u)


class TwoDimResult(NamedTuple):
    alpha: float
    beta: float
    gram_fallback: bool


def two_dim_linear_search(f_prev, g, y) -> TwoDimResult:
    """Jointly optimal (alpha, beta) for f_new = (1 - alpha) f_prev + beta g.

    Solves the 2x2 normal equations of projecting y onto span{f_prev, g}
    in the empirical inner product; the search is over all of R^2, so
    alpha may be negative (or exceed 1). When f_prev and g are near
    linearly dependent the system is ill-posed and we fall back to the
    plain one-dimensional step: alpha = 0, beta = <y - f_prev, g> / ||g||^2.
    """
    f = np.asarray(f_prev, dtype=np.float64)
    gv = np.asarray(g, dtype=np.float64)
    yv = np.asarray(y, dtype=np.float64)
    if not f.shape == gv.shape == yv.shape:
        raise ValueError(f"length mismatch: {f.shape}, {gv.shape}, {yv.shape}")
    gg = float(np.mean(gv * gv))
    if gg <= 0.0:
        raise ValueError("g must have positive empirical norm")
    ff = float(np.mean(f * f))
    fg = float(np.mean(f * gv))
    yf = float(np.mean(yv * f))
    yg = float(np.mean(yv * gv))
    det = ff * gg - fg * fg
    if det <= _GRAM_TOL * ff * gg:
        return TwoDimResult(0.0, (yg - fg) / gg, True)
    a = (yf * gg - yg * fg) / det
    beta = (ff * yg - fg * yf) / det
    return TwoDimResult(1.0 - a, beta, False)


@dataclass(frozen=True)
class TrainingTrace:
    """Per-iteration record of one training run.

    Arrays all have length equal to the achieved iteration count:
    empirical risk after the update, the applied (alpha, beta), the l1
    norm of the effective coefficients, and whether the DDR step hit the
    near-singular Gram fallback. stop_reason is None for a full run, else
    "zero_residual" or "degenerate_learner".
    """

    risk: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    l1_norm: np.ndarray
    gram_fallback: np.ndarray
    stop_reason: Optional[str] = None

    def __len__(self) -> int:
        return self.risk.size


def _train(data: Dataset, config: TrainConfig) -> tuple:
    y = data.targets
    y_scale = max(1.0, float(np.sqrt(np.mean(y * y))))
    fitter = config.learner_spec.bind(data)
    algorithm = config.algorithm
    u = int(config.u)

    f = np.zeros(data.m)
    stages = []
    coeffs = np.empty(config.max_iterations)
    risks, alphas, betas, l1s, fallbacks = [], [], [], [], []
    stop_reason = None

    for k in range(1, config.max_iterations + 1):
        r = y - f
        if np.sqrt(np.mean(r * r)) <= _RESIDUAL_TOL * y_scale:
            stop_reason = "zero_residual"
            break
        step = fitter.fit_step(r)
        if step is None:
            stop_reason = "degenerate_learner"
            break
        learner, g = step
        fallback = False
        if algorithm == "boosting":
            alpha = 0.0
            beta = float(np.mean(r * g))
        elif algorithm == "rboosting":
            alpha = shrinkage_alpha(k, u)
            beta = float(np.mean((y - (1.0 - alpha) * f) * g))
        else:
            alpha, beta, fallback = two_dim_linear_search(f, g, y)
        f = (1.0 - alpha) * f + beta * g

        n = len(stages)
        coeffs[:n] *= 1.0 - alpha
        coeffs[n] = beta
        stages.append(Stage(alpha, beta, learner))
        resid = f - y
        risks.append(float(np.mean(resid * resid)))
        alphas.append(alpha)
        betas.append(beta)
        l1s.append(float(np.sum(np.abs(coeffs[: n + 1]))))
        fallbacks.append(fallback)

    trace = TrainingTrace(
        risk=np.asarray(risks),
        alpha=np.asarray(alphas),
        beta=np.asarray(betas),
        l1_norm=np.asarray(l1s),
        gram_fallback=np.asarray(fallbacks, dtype=bool),
        stop_reason=stop_reason,
    )
    return Ensemble(stages), trace


def _require_algorithm(config: TrainConfig, expected: str):
    if config.algorithm != expected:
        raise ValueError(f"config.algorithm is {config.algorithm!r}, expected {expected!r}")


def train_boosting(data: Dataset, config: TrainConfig):
    """Plain greedy training: unit step on the selected learner each round."""
    _require_algorithm(config, "boosting")
    return _train(data, config)


def train_rboosting(data: Dataset, config: TrainConfig):
    """Re-scaled training with the alpha_k = 2/(k+u) schedule."""
    _require_algorithm(config, "rboosting")
    return _train(data, config)


def train_ddrboosting(data: Dataset, config: TrainConfig):
    """Data-driven re-scaling: exact two-dimensional search each round."""
    _require_algorithm(config, "ddrboosting")
    return _train(data, config)


def train(data: Dataset, config: TrainConfig):
    """Dispatch to the trainer named by config.algorithm; returns (Ensemble, TrainingTrace)."""
    return _train(data, config)
