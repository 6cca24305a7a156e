"""Test of equal proportions between a recent window and everything before it."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from driftbench.detectors.base import DriftDetector, Status, check_positive, check_probability


def proportion_test(r_old: float, n_old: int, r_new: float, n_new: int) -> float:
    """Two-sided p-value of the continuity-corrected two-proportion z-test."""
    pooled = (r_old + r_new) / (n_old + n_new)
    if pooled <= 0.0 or pooled >= 1.0:
        return 1.0
    inv = 1.0 / n_old + 1.0 / n_new
    t = abs(r_old / n_old - r_new / n_new) - 0.5 * inv
    if t <= 0.0:
        return 1.0
    z = t / math.sqrt(pooled * (1.0 - pooled) * inv)
    return math.erfc(z / math.sqrt(2.0))


@dataclass(eq=False)
class STEPD(DriftDetector):
    """Accuracy in the last ``window`` bits against the accuracy before them."""

    name = "stepd"

    window: int = 30
    alpha_warning: float = 0.05
    alpha_drift: float = 0.003

    def validate(self) -> None:
        check_positive("window", self.window)
        check_probability("alpha_warning", self.alpha_warning)
        check_probability("alpha_drift", self.alpha_drift)
        if self.alpha_drift > self.alpha_warning:
            raise ValueError("alpha_drift must not exceed alpha_warning")

    def reset(self) -> None:
        self._recent: deque[int] = deque()
        self.correct_recent = 0
        self.n_old = 0
        self.correct_old = 0
        self.p_value = 1.0

    def _step(self, e: int) -> Status:
        hit = 1 - e
        self._recent.append(hit)
        self.correct_recent += hit
        if len(self._recent) > self.window:
            moved = self._recent.popleft()
            self.correct_recent -= moved
            self.n_old += 1
            self.correct_old += moved
        if self.n_old < self.window:
            self.p_value = 1.0
            return Status.STABLE
        self.p_value = proportion_test(self.correct_old, self.n_old,
                                       self.correct_recent, self.window)
        if self.p_value < self.alpha_drift:
            return Status.DRIFT
        if self.p_value < self.alpha_warning:
            return Status.WARNING
        return Status.STABLE
