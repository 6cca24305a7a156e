"""Hoeffding tree (VFDT) for numeric features with Gaussian split estimators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

GRACE_PERIOD = 200
SPLIT_CONFIDENCE = 1e-7
TIE_THRESHOLD = 0.05
N_CANDIDATES = 10
MIN_BRANCH_FRACTION = 0.01


def hoeffding_bound(value_range: float, confidence: float, n: float) -> float:
    return math.sqrt(value_range * value_range * math.log(1.0 / confidence) / (2.0 * n))


def entropy(counts: np.ndarray, axis: int = -1) -> np.ndarray:
    """Shannon entropy in bits of (unnormalised) count vectors along ``axis``."""
    counts = np.asarray(counts, dtype=float)
    total = counts.sum(axis=axis, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(total > 0, counts / total, 0.0)
        terms = np.where(p > 0, p * np.log2(p), 0.0)
    return -terms.sum(axis=axis)


class LeafNode:
    """A learning leaf: class counts plus per-(class, feature) Gaussian estimators."""

    __slots__ = ("counts", "n", "mean", "m2", "lo", "hi", "weight_at_check")

    def __init__(self, n_features: int, n_classes: int, counts=None):
        self.counts = np.zeros(n_classes)
        if counts is not None:
            self.counts[: len(counts)] = counts
        self.n = np.zeros(n_classes)
        self.mean = np.zeros((n_classes, n_features))
        self.m2 = np.zeros((n_classes, n_features))
        self.lo = np.full((n_classes, n_features), np.inf)
        self.hi = np.full((n_classes, n_features), -np.inf)
        self.weight_at_check = float(self.counts.sum())

    @property
    def weight(self) -> float:
        return float(self.counts.sum())

    def predict(self) -> int:
        # argmax returns the lowest index on ties; an empty leaf gives class 0
        return int(np.argmax(self.counts)) if len(self.counts) else 0

    def _grow(self, n_classes: int) -> None:
        extra = n_classes - len(self.counts)
        d = self.mean.shape[1]
        self.counts = np.concatenate([self.counts, np.zeros(extra)])
        self.n = np.concatenate([self.n, np.zeros(extra)])
        self.mean = np.vstack([self.mean, np.zeros((extra, d))])
        self.m2 = np.vstack([self.m2, np.zeros((extra, d))])
        self.lo = np.vstack([self.lo, np.full((extra, d), np.inf)])
        self.hi = np.vstack([self.hi, np.full((extra, d), -np.inf)])

    def learn(self, x: np.ndarray, y: int) -> None:
        if y >= len(self.counts):
            self._grow(y + 1)
        self.counts[y] += 1.0
        self.n[y] += 1.0
        mean = self.mean[y]
        delta = x - mean
        mean += delta / self.n[y]
        self.m2[y] += delta * (x - mean)
        np.minimum(self.lo[y], x, out=self.lo[y])
        np.maximum(self.hi[y], x, out=self.hi[y])


class SplitNode:
    __slots__ = ("feature", "threshold", "left", "right", "detector")

    def __init__(self, feature: int, threshold: float, left, right, detector=None):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.detector = detector

    def child(self, x: np.ndarray):
        return self.left if x[self.feature] <= self.threshold else self.right


@dataclass(frozen=True)
class SplitCandidate:
    merit: float
    feature: int | None = None
    threshold: float = 0.0
    left: np.ndarray | None = None
    right: np.ndarray | None = None


def split_candidates(leaf: LeafNode, n_candidates: int = N_CANDIDATES) -> list[SplitCandidate]:
    """Best binary split per feature, scored by information gain.

    Thresholds are spread evenly strictly inside the observed [min, max] of
    each feature; per-class mass below a threshold comes from the class's
    Gaussian estimate, truncated to its observed range.
    """
    present = leaf.n > 0
    counts, n = leaf.counts[present], leaf.n[present]
    mean, lo, hi = leaf.mean[present], leaf.lo[present], leaf.hi[present]
    var = np.where(n[:, None] > 1, leaf.m2[present] / np.maximum(n[:, None] - 1, 1), 0.0)
    std = np.sqrt(var)

    f_lo, f_hi = lo.min(axis=0), hi.max(axis=0)                       # (d,)
    steps = np.arange(1, n_candidates + 1) / (n_candidates + 1)
    thresholds = f_lo[:, None] + (f_hi - f_lo)[:, None] * steps       # (d, k)

    t = thresholds[:, :, None]                                         # (d, k, 1)
    m, s = mean.T[:, None, :], std.T[:, None, :]                       # (d, 1, c)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(s > 0, (t - m) / s, np.where(t >= m, np.inf, -np.inf))
    frac = ndtr(z)
    frac = np.where(t < lo.T[:, None, :], 0.0, frac)
    frac = np.where(t >= hi.T[:, None, :], 1.0, frac)
    left = frac * counts                                               # (d, k, c)
    right = counts - left

    total = counts.sum()
    wl, wr = left.sum(axis=2), right.sum(axis=2)
    gain = entropy(counts) - (wl * entropy(left) + wr * entropy(right)) / total
    enough = (wl > MIN_BRANCH_FRACTION * total) & (wr > MIN_BRANCH_FRACTION * total)
    gain = np.where(enough & (f_hi > f_lo)[:, None], gain, -np.inf)

    full = np.zeros(len(leaf.counts))
    out = [SplitCandidate(0.0)]
    for f in range(gain.shape[0]):
        k = int(np.argmax(gain[f]))
        if np.isfinite(gain[f, k]):
            lc, rc = full.copy(), full.copy()
            lc[present], rc[present] = left[f, k], right[f, k]
            out.append(SplitCandidate(float(gain[f, k]), f, float(thresholds[f, k]), lc, rc))
    return out


class HoeffdingTree:
    """Incremental decision tree with majority-class leaves.

    A leaf is re-evaluated every ``grace_period`` instances; it splits when
    the best candidate beats the runner-up by more than the Hoeffding radius,
    or when the radius drops below ``tie_threshold``.
    """

    def __init__(self, n_features: int, grace_period: int = GRACE_PERIOD,
                 split_confidence: float = SPLIT_CONFIDENCE,
                 tie_threshold: float = TIE_THRESHOLD, n_candidates: int = N_CANDIDATES):
        if n_features < 1:
            raise ValueError("n_features must be positive")
        if grace_period < 1:
            raise ValueError("grace_period must be positive")
        self.n_features = n_features
        self.grace_period = grace_period
        self.split_confidence = split_confidence
        self.tie_threshold = tie_threshold
        self.n_candidates = n_candidates
        self.n_classes = 0
        self.root = self._new_leaf()
        self.n_splits = 0

    def _new_leaf(self, counts=None) -> LeafNode:
        return LeafNode(self.n_features, max(self.n_classes, 1), counts)

    def _new_split(self, feature: int, threshold: float, left, right) -> SplitNode:
        return SplitNode(feature, threshold, left, right)

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_features,):
            raise ValueError(f"expected {self.n_features} features, got shape {x.shape}")
        return x

    def route(self, x: np.ndarray) -> tuple[list[SplitNode], LeafNode]:
        path = []
        node = self.root
        while isinstance(node, SplitNode):
            path.append(node)
            node = node.child(x)
        return path, node

    def predict(self, x) -> int:
        return self.route(self._check(x))[1].predict()

    def learn(self, x, y: int) -> None:
        x = self._check(x)
        path, leaf = self.route(x)
        self._learn_at(path, leaf, x, int(y))

    def step(self, x, y: int) -> int:
        """Predict, then train on the same instance."""
        x = self._check(x)
        path, leaf = self.route(x)
        pred = leaf.predict()
        self._learn_at(path, leaf, x, int(y))
        return pred

    def _learn_at(self, path, leaf: LeafNode, x: np.ndarray, y: int) -> None:
        if y < 0:
            raise ValueError("class labels must be non-negative")
        self.n_classes = max(self.n_classes, y + 1)
        leaf.learn(x, y)
        if leaf.weight - leaf.weight_at_check >= self.grace_period:
            self._attempt_split(path, leaf)

    def _attempt_split(self, path, leaf: LeafNode) -> None:
        leaf.weight_at_check = leaf.weight
        if np.count_nonzero(leaf.counts) < 2:
            return
        candidates = sorted(split_candidates(leaf, self.n_candidates), key=lambda c: c.merit)
        best = candidates[-1]
        runner_up = candidates[-2].merit if len(candidates) > 1 else 0.0
        r = math.log2(max(2, np.count_nonzero(leaf.counts)))
        eps = hoeffding_bound(r, self.split_confidence, leaf.weight)
        if best.feature is None or not (best.merit - runner_up > eps or eps < self.tie_threshold):
            return
        node = self._new_split(best.feature, best.threshold,
                               self._new_leaf(best.left), self._new_leaf(best.right))
        self._replace(path, leaf, node)
        self.n_splits += 1

    def _replace(self, path, old, new) -> None:
        if not path:
            self.root = new
            return
        parent = path[-1]
        if parent.left is old:
            parent.left = new
        else:
            parent.right = new

    # introspection ------------------------------------------------------
    def nodes(self):
        stack = [(self.root, 0)]
        while stack:
            node, depth = stack.pop()
            yield node, depth
            if isinstance(node, SplitNode):
                stack.append((node.right, depth + 1))
                stack.append((node.left, depth + 1))

    @property
    def n_leaves(self) -> int:
        return sum(isinstance(n, LeafNode) for n, _ in self.nodes())

    @property
    def depth(self) -> int:
        return max(d for _, d in self.nodes())
