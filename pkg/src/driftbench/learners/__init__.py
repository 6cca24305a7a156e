"""Hoeffding-tree learners and prequential evaluation."""

from __future__ import annotations

from driftbench.learners.adaptive import AdaptiveHoeffdingTree, DriftRetrainedTree, node_adwin
from driftbench.learners.hoeffding import HoeffdingTree, hoeffding_bound
from driftbench.learners.prequential import (
    DEFAULT_WINDOW,
    PrequentialResult,
    prequential_run,
    windowed_accuracy,
)

LEARNERS = ("ht", "aht", "ht-dw")


def make_learner(name: str, n_features: int, **params):
    key = name.lower()
    if key == "ht":
        return HoeffdingTree(n_features, **params)
    if key == "aht":
        return AdaptiveHoeffdingTree(n_features, **params)
    if key == "ht-dw":
        return DriftRetrainedTree(n_features, **params)
    raise KeyError(f"unknown learner {name!r}; choose from {', '.join(LEARNERS)}")


__all__ = [
    "DEFAULT_WINDOW", "LEARNERS", "AdaptiveHoeffdingTree", "DriftRetrainedTree", "HoeffdingTree",
    "PrequentialResult", "hoeffding_bound", "make_learner", "node_adwin", "prequential_run",
    "windowed_accuracy",
]
