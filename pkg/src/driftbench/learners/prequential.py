"""Test-then-train evaluation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_WINDOW = 500


@dataclass(frozen=True)
class PrequentialResult:
    correct: np.ndarray          # 1 where the prediction made before training was right
    window: int
    times: np.ndarray            # window end positions (multiples of ``window``)
    window_accuracy: np.ndarray  # accuracy over each block of ``window`` instances

    @property
    def accuracy(self) -> float:
        return float(self.correct.mean()) if len(self.correct) else 0.0

    @property
    def errors(self) -> np.ndarray:
        return 1 - self.correct

    @property
    def window_std(self) -> float:
        return float(self.window_accuracy.std()) if len(self.window_accuracy) else 0.0


def windowed_accuracy(correct: np.ndarray, window: int) -> tuple[np.ndarray, np.ndarray]:
    k = len(correct) // window
    blocks = np.asarray(correct[: k * window], dtype=float).reshape(k, window)
    return np.arange(1, k + 1) * window, blocks.mean(axis=1)


def prequential_run(X, y, learner, window: int = DEFAULT_WINDOW) -> PrequentialResult:
    """Predict each instance, then learn it, in stream order."""
    if window < 1:
        raise ValueError("window must be at least 1")
    y = np.asarray(y)
    correct = np.empty(len(y), dtype=np.uint8)
    for t in range(len(y)):
        label = int(y[t])
        correct[t] = learner.step(X[t], label) == label
    times, acc = windowed_accuracy(correct, window)
    return PrequentialResult(correct, window, times, acc)
