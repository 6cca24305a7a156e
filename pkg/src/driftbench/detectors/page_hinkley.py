"""Page-Hinkley cumulative test for an increase in the mean."""

from __future__ import annotations

from dataclasses import dataclass

from driftbench.detectors.base import DriftDetector, Status, check_positive


@dataclass(eq=False)
class PageHinkley(DriftDetector):
    """m_t = sum(e_i - mean_i - delta); Drift when m_t - min(m) > threshold."""

    name = "ph"
    has_warning = False

    delta: float = 0.005
    threshold: float = 50.0
    min_instances: int = 30

    def validate(self) -> None:
        if self.delta < 0 or self.threshold <= 0:
            raise ValueError("need delta >= 0 and threshold > 0")
        check_positive("min_instances", self.min_instances)

    def reset(self) -> None:
        self.n = 0
        self.mean = 0.0
        self.cusum = 0.0
        self.cusum_min = 0.0

    def _step(self, e: int) -> Status:
        self.n += 1
        self.mean += (e - self.mean) / self.n
        self.cusum += e - self.mean - self.delta
        self.cusum_min = min(self.cusum_min, self.cusum)
        if self.n < self.min_instances:
            return Status.STABLE
        if self.cusum - self.cusum_min > self.threshold:
            return Status.DRIFT
        return Status.STABLE
