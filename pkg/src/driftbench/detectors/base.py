"""Shared contract for change detectors over a binary error signal."""

from __future__ import annotations

import dataclasses
from enum import IntEnum
from typing import Any


class Status(IntEnum):
    STABLE = 0
    WARNING = 1
    DRIFT = 2


@dataclasses.dataclass(eq=False)
class DriftDetector:
    """Base class: subclasses declare hyperparameters as dataclass fields.

    ``update(e)`` consumes one misclassification bit (1 = error).  When
    ``reset_on_drift`` is set, emitting Drift leaves the detector in the same
    state as a freshly constructed one.
    """

    name = "base"
    has_warning = True

    reset_on_drift: bool = True

    def __post_init__(self) -> None:
        self.validate()
        self.reset()

    def validate(self) -> None:
        pass

    def reset(self) -> None:
        raise NotImplementedError

    def _step(self, e: int) -> Status:
        raise NotImplementedError

    def update(self, e: int) -> Status:
        if e not in (0, 1):
            raise ValueError(f"error bit must be 0 or 1, got {e!r}")
        status = self._step(int(e))
        if status is Status.DRIFT and self.reset_on_drift:
            self.reset()
        return status

    def params(self) -> dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}

    def clone(self) -> "DriftDetector":
        """A fresh detector with the same hyperparameters."""
        return type(self)(**self.params())


def check_probability(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise ValueError(f"{name} must lie in (0, 1), got {value}")


def check_positive(name: str, value: int) -> None:
    if value < 1:
        raise ValueError(f"{name} must be at least 1, got {value}")
