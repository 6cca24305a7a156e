"""Sliding-window two-sample Kolmogorov-Smirnov test."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from driftbench.detectors.base import DriftDetector, Status, check_positive, check_probability


def ks_statistic(a, b) -> float:
    """sup_x |F_a(x) - F_b(x)| for two univariate samples."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if not len(a) or not len(b):
        raise ValueError("both samples must be non-empty")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / len(a)
    fb = np.searchsorted(b, grid, side="right") / len(b)
    return float(np.max(np.abs(fa - fb)))


@dataclass(eq=False)
class KSWIN(DriftDetector):
    """Compares the newest ``stat_size`` values with a random sample of the rest.

    Drift when the KS statistic exceeds ``sqrt(-ln(alpha) / stat_size)``.
    Inputs are bits, so the statistic is the gap between the fractions of ones
    and the subsample only matters through its count of ones, which is
    hypergeometric.  The draw uses the detector's own generator seeded by ``seed``.
    """

    name = "kswin"
    has_warning = False

    alpha: float = 0.005
    window_size: int = 100
    stat_size: int = 30
    seed: int = 0

    def validate(self) -> None:
        check_probability("alpha", self.alpha)
        check_positive("stat_size", self.stat_size)
        if self.window_size < 2 * self.stat_size:
            raise ValueError("window_size must be at least twice stat_size")

    @property
    def threshold(self) -> float:
        return math.sqrt(-math.log(self.alpha) / self.stat_size)

    def reset(self) -> None:
        self._window: deque[int] = deque()
        self._ones_old = 0     # ones among all but the newest stat_size values
        self._ones_recent = 0
        self._rng = np.random.default_rng(self.seed)
        self.statistic = 0.0

    def _step(self, e: int) -> Status:
        window, r = self._window, self.stat_size
        window.append(e)
        self._ones_recent += e
        if len(window) > r:
            moved = window[-r - 1]
            self._ones_recent -= moved
            self._ones_old += moved
        if len(window) > self.window_size:
            self._ones_old -= window.popleft()
        if len(window) < self.window_size:
            return Status.STABLE
        n_old = self.window_size - r
        drawn = int(self._rng.hypergeometric(self._ones_old, n_old - self._ones_old, r))
        self.statistic = abs(drawn - self._ones_recent) / r
        return Status.DRIFT if self.statistic > self.threshold else Status.STABLE
