"""EWMA control chart for a Bernoulli error stream."""

from __future__ import annotations

import math
from dataclasses import dataclass

from driftbench.detectors.base import DriftDetector, Status, check_positive, check_probability


def control_limit(p: float) -> float:
    """Polynomial control limit for an in-control run length of about 400."""
    return 3.97 - 6.56 * p + 48.73 * p**3 - 330.13 * p**5 + 848.18 * p**7


@dataclass(eq=False)
class ECDD(DriftDetector):
    """Z_t = (1 - lam) Z_{t-1} + lam e_t against ``p_hat + L(p_hat) sigma_Z``."""

    name = "ecdd"

    lam: float = 0.2
    min_instances: int = 30
    warning_fraction: float = 0.5

    def validate(self) -> None:
        check_probability("lam", self.lam)
        check_positive("min_instances", self.min_instances)
        check_probability("warning_fraction", self.warning_fraction)

    def reset(self) -> None:
        self.n = 0
        self.p = 0.0
        self.z = 0.0

    def sigma(self) -> float:
        lam, p = self.lam, self.p
        return math.sqrt(p * (1 - p) * lam / (2 - lam) * (1 - (1 - lam) ** (2 * self.n)))

    def _step(self, e: int) -> Status:
        self.n += 1
        self.p += (e - self.p) / self.n
        self.z += self.lam * (e - self.z)
        if self.n < self.min_instances:
            return Status.STABLE
        width = control_limit(self.p) * self.sigma()
        if self.z > self.p + width:
            return Status.DRIFT
        if self.z > self.p + self.warning_fraction * width:
            return Status.WARNING
        return Status.STABLE
