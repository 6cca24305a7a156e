"""Drift-adaptive variants of the Hoeffding tree."""

from __future__ import annotations

from typing import Callable

from driftbench.detectors import ADWIN, DriftDetector, Status
from driftbench.learners.hoeffding import HoeffdingTree, SplitNode

DetectorFactory = Callable[[], DriftDetector]


def node_adwin() -> DriftDetector:
    return ADWIN(delta=0.002, reset_on_drift=False)


def _error_increased(detector: DriftDetector) -> bool:
    # one-sided detectors only ever report increases
    return getattr(detector, "last_cut_increase", True) is not False


class AdaptiveHoeffdingTree(HoeffdingTree):
    """Hoeffding tree whose decision nodes each watch their own error stream.

    Every split node owns a detector fed the error bit of the instances routed
    through it.  When a node signals Drift with a rising error, its whole
    subtree is replaced by a fresh leaf trained on the current instance; the
    rest of the tree is left alone.  Nodes are checked root first.
    ``detector_factory=None`` disables adaptation.
    """

    def __init__(self, n_features: int, detector_factory: DetectorFactory | None = node_adwin,
                 **tree_params):
        self.detector_factory = detector_factory
        self.n_replacements = 0
        super().__init__(n_features, **tree_params)

    def _new_split(self, feature, threshold, left, right) -> SplitNode:
        detector = None if self.detector_factory is None else self.detector_factory()
        return SplitNode(feature, threshold, left, right, detector)

    def step(self, x, y: int) -> int:
        x = self._check(x)
        y = int(y)
        path, leaf = self.route(x)
        pred = leaf.predict()
        e = int(pred != y)
        for depth, node in enumerate(path):
            if node.detector is None:
                continue
            if node.detector.update(e) is Status.DRIFT and _error_increased(node.detector):
                fresh = self._new_leaf()
                self._replace(path[:depth], node, fresh)
                self.n_replacements += 1
                self._learn_at(path[:depth], fresh, x, y)
                return pred
        self._learn_at(path, leaf, x, y)
        return pred


class DriftRetrainedTree:
    """A Hoeffding tree that is retrained when its error detector fires.

    A Warning starts (or continues) a background tree trained alongside the
    foreground; Drift swaps the background in, or a fresh tree if no warning
    preceded it.  As in the adaptive tree, a Drift caused by a falling error
    rate is ignored.
    """

    def __init__(self, n_features: int, detector: DriftDetector | None = None,
                 enabled: bool = True, **tree_params):
        self.n_features = n_features
        self.tree_params = tree_params
        self.detector = ADWIN() if detector is None else detector
        self.enabled = enabled
        self.foreground = self._new_tree()
        self.background: HoeffdingTree | None = None
        self.n_drifts = 0
        self.n_warnings = 0

    def _new_tree(self) -> HoeffdingTree:
        return HoeffdingTree(self.n_features, **self.tree_params)

    def predict(self, x) -> int:
        return self.foreground.predict(x)

    def step(self, x, y: int) -> int:
        pred = self.foreground.step(x, y)
        if not self.enabled:
            return pred
        if self.background is not None:
            self.background.learn(x, y)
        status = self.detector.update(int(pred != int(y)))
        if status is Status.WARNING:
            self.n_warnings += 1
            if self.background is None:
                self.background = self._new_tree()
                self.background.learn(x, y)
        elif status is Status.DRIFT and _error_increased(self.detector):
            self.n_drifts += 1
            if self.background is None:
                self.foreground = self._new_tree()
                self.foreground.learn(x, y)
            else:
                self.foreground, self.background = self.background, None
        return pred
