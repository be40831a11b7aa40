"""Real-dataset protocol: stump learners, half/half split, honest selection.

The sample is shuffled once with a seeded generator and divided into equal
halves (or taken pre-split when the dataset ships that way). Iteration
counts - and the re-scale factor for the re-scaled variant - are chosen on
a validation half of the training half only; the chosen settings are then
retrained on the whole training half and scored once on the test half.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np

from .bench import rmse
from .core import Dataset, TrainConfig
from .boosters import train
from .learners import TreeLearnerSpec
from .selection import adaptive_select, select_k_by_validation, u_grid

_SELECT_SALT = 0xCA11  # separates the selection shuffle stream from the main split


@dataclass(frozen=True)
class MethodOutcome:
    test_rmse: float
    selected: dict  # {"k": ...} and, for the re-scaled variant, {"u": ...}


@dataclass(frozen=True)
class RealDataReport:
    methods: Mapping[str, MethodOutcome]
    train_m: int
    test_m: int


def _half_split(data: Dataset, seed: int) -> Tuple[Dataset, Dataset]:
    rng = np.random.default_rng(seed)
    idx = rng.permutation(data.m)
    half = data.m // 2
    return data.subset(idx[:half]), data.subset(idx[half:])


def realdata_experiment(
    data: Optional[Dataset] = None,
    pre_split: Optional[Tuple[Dataset, Dataset]] = None,
    algorithms: Sequence[str] = ("boosting", "rboosting", "ddrboosting"),
    k_max: int = 500,
    grid: Optional[Sequence[int]] = None,
    n_splits: int = 1,
    seed: int = 0,
    clip_bound: Optional[float] = None,
) -> RealDataReport:
    """Compare the training loops on one tabular dataset.

    Pass either data (shuffled and halved here) or pre_split=(train, test)
    for datasets that come already divided. Weak learners default to
    decision stumps (n_splits=1), matching an additive main-effects model.
    """
    if (data is None) == (pre_split is None):
        raise ValueError("pass exactly one of data or pre_split")
    if pre_split is not None:
        train_ds, test_ds = pre_split
    else:
        if data.m < 4:
            raise ValueError(f"need m >= 4 to split, got {data.m}")
        train_ds, test_ds = _half_split(data, seed)
    grid = list(grid) if grid is not None else u_grid(20, 1, 1e6)
    select_seed = int(np.random.SeedSequence([abs(int(seed)), _SELECT_SALT]).generate_state(1)[0])
    base = TrainConfig(
        algorithm="boosting",
        max_iterations=k_max,
        learner_spec=TreeLearnerSpec(n_splits),
        clip_bound=clip_bound,
    )

    methods = {}
    for algo in algorithms:
        if algo == "rboosting":
            sel = adaptive_select(
                train_ds,
                grid,
                k_max,
                replace(base, algorithm="rboosting"),
                retrain_on_full=True,
                shuffle_seed=select_seed,
            )
            pred = sel.final_model.predict(test_ds.features, clip_bound=clip_bound)
            methods[algo] = MethodOutcome(rmse(pred, test_ds.targets), {"u": sel.chosen_u, "k": sel.chosen_k})
        else:
            cfg = replace(base, algorithm=algo)
            k, _ = select_k_by_validation(train_ds, cfg, k_max, shuffle_seed=select_seed)
            model, _ = train(train_ds, replace(cfg, max_iterations=max(k, 1)))
            pred = model.predict(test_ds.features, clip_bound=clip_bound)
            methods[algo] = MethodOutcome(rmse(pred, test_ds.targets), {"k": k})
    return RealDataReport(methods=methods, train_m=train_ds.m, test_m=test_ds.m)
