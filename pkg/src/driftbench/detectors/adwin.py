"""Adaptive windowing over an exponential histogram."""

from __future__ import annotations

import math
from dataclasses import dataclass

from driftbench.detectors.base import DriftDetector, Status, check_positive, check_probability


@dataclass(eq=False)
class ADWIN(DriftDetector):
    """Keeps the longest recent window whose two halves never differ significantly.

    The window is stored as an exponential histogram (at most ``max_buckets``
    buckets per power-of-two size).  After every insert all bucket boundaries
    are tested; a cut is significant when

        (mu0 - mu1)^2 >= (1/n0 + 1/n1) / 2 * ln(4 W / delta)

    i.e. ``|mu0 - mu1| >= sqrt(ln(4/delta') / (2m))`` with
    ``m = 1 / (1/n0 + 1/n1)`` and ``delta' = delta / W``.  Sub-windows shorter
    than ``min_window`` are never tested.
    """

    name = "adwin"
    has_warning = False

    delta: float = 0.002
    max_buckets: int = 5
    min_window: int = 5

    def validate(self) -> None:
        check_probability("delta", self.delta)
        check_positive("max_buckets", self.max_buckets)
        check_positive("min_window", self.min_window)

    def reset(self) -> None:
        self._sizes: list[int] = []   # oldest first; non-increasing
        self._sums: list[float] = []
        self._levels: list[int] = []  # number of buckets of size 2**i
        self.width = 0
        self.total = 0.0
        self.last_cut_increase: bool | None = None

    @property
    def mean(self) -> float:
        return self.total / self.width if self.width else 0.0

    @property
    def n_buckets(self) -> int:
        return len(self._sizes)

    def _insert(self, x: float) -> None:
        self._sizes.append(1)
        self._sums.append(x)
        self.width += 1
        self.total += x
        levels = self._levels
        if not levels:
            levels.append(0)
        levels[0] += 1
        level = 0
        while levels[level] > self.max_buckets:
            # the two oldest buckets of this size sit right after all larger ones
            i = len(self._sizes) - sum(levels[: level + 1])
            self._sizes[i : i + 2] = [self._sizes[i] * 2]
            self._sums[i : i + 2] = [self._sums[i] + self._sums[i + 1]]
            levels[level] -= 2
            if len(levels) == level + 1:
                levels.append(0)
            levels[level + 1] += 1
            level += 1

    def _drop_oldest(self) -> None:
        size = self._sizes.pop(0)
        self.total -= self._sums.pop(0)
        self.width -= size
        top = size.bit_length() - 1
        self._levels[top] -= 1
        while self._levels and self._levels[-1] == 0:
            self._levels.pop()

    def _significant_cut(self) -> bool:
        # a plain loop beats numpy for the few dozen buckets a window holds
        if len(self._sizes) < 2 or self.width < 2 * self.min_window:
            return False
        width, total, shortest = self.width, self.total, self.min_window
        log_term = 0.5 * math.log(4.0 * width / self.delta)
        n0, s0 = 0, 0.0
        for size, part in zip(self._sizes[:-1], self._sums):
            n0 += size
            s0 += part
            n1 = width - n0
            if n1 < shortest:
                break
            if n0 < shortest:
                continue
            diff = s0 / n0 - (total - s0) / n1
            if diff * diff >= (1.0 / n0 + 1.0 / n1) * log_term:
                self.last_cut_increase = diff < 0
                return True
        return False

    def _step(self, e: int) -> Status:
        self._insert(float(e))
        if not self._significant_cut():
            return Status.STABLE
        if not self.reset_on_drift:
            self._drop_oldest()
            while self._significant_cut():
                self._drop_oldest()
        return Status.DRIFT
