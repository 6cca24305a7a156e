"""Error-rate detectors built on the binomial standard deviation: DDM, RDDM, EDDM."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from driftbench.detectors.base import DriftDetector, Status, check_positive


@dataclass(eq=False)
class DDM(DriftDetector):
    """Flags when ``p + s`` rises well above its historical minimum.

    ``p`` is the running error rate and ``s = sqrt(p(1-p)/n)``; the minimum of
    ``p + s`` is tracked once ``min_instances`` bits have been seen.
    Comparisons are strict so that an error-free stream stays Stable.
    """

    name = "ddm"

    min_instances: int = 30
    warning_level: float = 2.0
    drift_level: float = 3.0

    def validate(self) -> None:
        check_positive("min_instances", self.min_instances)
        if not 0 < self.warning_level <= self.drift_level:
            raise ValueError("need 0 < warning_level <= drift_level")

    def reset(self) -> None:
        self.n = 0
        self.p = 0.0
        self.s = 0.0
        self.p_min = math.inf
        self.s_min = math.inf

    def _accumulate(self, e: int) -> None:
        self.n += 1
        self.p += (e - self.p) / self.n
        self.s = math.sqrt(self.p * (1.0 - self.p) / self.n)

    def _test(self) -> Status:
        if self.n < self.min_instances:
            return Status.STABLE
        level = self.p + self.s
        if level <= self.p_min + self.s_min:
            self.p_min, self.s_min = self.p, self.s
        if level > self.p_min + self.drift_level * self.s_min:
            return Status.DRIFT
        if level > self.p_min + self.warning_level * self.s_min:
            return Status.WARNING
        return Status.STABLE

    def _step(self, e: int) -> Status:
        self._accumulate(e)
        return self._test()


@dataclass(eq=False)
class RDDM(DDM):
    """DDM with periodic recomputation over the most recent bits.

    A stable concept longer than ``max_concept`` bits, or a warning lasting
    ``warn_limit`` bits, triggers a rebuild of the statistics from the ring of
    the last ``min_stable`` bits.  A warning that runs out forces Drift.
    """

    name = "rddm"

    min_instances: int = 129
    warning_level: float = 1.773
    drift_level: float = 2.258
    max_concept: int = 40_000
    min_stable: int = 5_144
    warn_limit: int = 1_400

    def validate(self) -> None:
        super().validate()
        check_positive("min_stable", self.min_stable)
        check_positive("warn_limit", self.warn_limit)
        if self.max_concept <= self.min_stable:
            raise ValueError("max_concept must exceed min_stable")

    def reset(self) -> None:
        super().reset()
        self._ring: deque[int] = deque(maxlen=self.min_stable)
        self._warnings = 0
        self.n_recomputations = getattr(self, "n_recomputations", 0)

    def _recompute(self) -> None:
        bits = list(self._ring)
        DDM.reset(self)
        for b in bits:
            self._accumulate(b)
        self._warnings = 0
        self.n_recomputations += 1

    def _step(self, e: int) -> Status:
        self._ring.append(e)
        self._accumulate(e)
        status = self._test()
        if status is Status.WARNING:
            self._warnings += 1
            if self._warnings >= self.warn_limit:
                return Status.DRIFT
        else:
            self._warnings = 0
        if status is Status.STABLE and self.n > self.max_concept:
            self._recompute()
        return status


@dataclass(eq=False)
class EDDM(DriftDetector):
    """Monitors the distance between consecutive errors.

    Tracks mean ``m`` and standard deviation ``s`` of the gaps (Welford) and
    the maximum of ``m + 2s`` over every error seen since the last reset; a
    shrinking ratio ``(m + 2s) / max`` signals that errors are getting denser.
    The ratio is only tested once ``min_errors`` errors have been seen.
    """

    name = "eddm"

    min_errors: int = 30
    warning_ratio: float = 0.95
    drift_ratio: float = 0.90

    def validate(self) -> None:
        check_positive("min_errors", self.min_errors)
        if not 0 < self.drift_ratio <= self.warning_ratio < 1:
            raise ValueError("need 0 < drift_ratio <= warning_ratio < 1")

    def reset(self) -> None:
        self.n = 0
        self.n_errors = 0
        self._last_error = 0
        self.mean = 0.0
        self._m2 = 0.0
        self.max_level = 0.0

    @property
    def std(self) -> float:
        return math.sqrt(self._m2 / self.n_errors) if self.n_errors else 0.0

    def _step(self, e: int) -> Status:
        self.n += 1
        if not e:
            return Status.STABLE
        self.n_errors += 1
        gap = self.n - self._last_error
        self._last_error = self.n
        old = self.mean
        self.mean += (gap - old) / self.n_errors
        self._m2 += (gap - old) * (gap - self.mean)
        level = self.mean + 2.0 * self.std
        if level > self.max_level:
            self.max_level = level
            return Status.STABLE
        if self.n_errors < self.min_errors:
            return Status.STABLE
        ratio = level / self.max_level
        if ratio < self.drift_ratio:
            return Status.DRIFT
        if ratio < self.warning_ratio:
            return Status.WARNING
        return Status.STABLE
