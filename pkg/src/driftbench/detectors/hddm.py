"""Hoeffding-bound test on moving averages (A-test, one-sided increase)."""

from __future__ import annotations

import math
from dataclasses import dataclass

from driftbench.detectors.base import DriftDetector, Status, check_probability


@dataclass(eq=False)
class HDDM(DriftDetector):
    """Compares the overall mean with the mean up to a remembered cut point.

    The cut is the prefix whose mean plus Hoeffding radius is smallest.  An
    increase of the overall mean over the cut mean larger than
    ``sqrt((1/n_cut - 1/n) / 2 * ln(1/delta))`` signals Drift (at
    ``drift_confidence``) or Warning (at ``warning_confidence``).
    Decreases in the error rate are never reported.
    """

    name = "hddm"

    drift_confidence: float = 0.001
    warning_confidence: float = 0.005

    def validate(self) -> None:
        check_probability("drift_confidence", self.drift_confidence)
        check_probability("warning_confidence", self.warning_confidence)
        if self.warning_confidence < self.drift_confidence:
            raise ValueError("warning_confidence must be at least drift_confidence")

    def reset(self) -> None:
        self.n = 0
        self.total = 0.0
        self.cut_n = 0
        self.cut_total = 0.0

    def _radius(self, n: int) -> float:
        return math.sqrt(math.log(1.0 / self.drift_confidence) / (2.0 * n))

    def _increased(self, confidence: float) -> bool:
        if self.cut_n == self.n:
            return False
        m = (self.n - self.cut_n) / (self.cut_n * self.n)
        bound = math.sqrt(m / 2.0 * math.log(1.0 / confidence))
        return self.total / self.n - self.cut_total / self.cut_n >= bound

    def _step(self, e: int) -> Status:
        self.n += 1
        self.total += e
        if self.cut_n == 0 or (self.total / self.n + self._radius(self.n)
                               <= self.cut_total / self.cut_n + self._radius(self.cut_n)):
            self.cut_n, self.cut_total = self.n, self.total
        if self._increased(self.drift_confidence):
            return Status.DRIFT
        if self._increased(self.warning_confidence):
            return Status.WARNING
        return Status.STABLE
