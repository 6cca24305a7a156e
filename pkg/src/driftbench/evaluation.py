"""Scoring of drift alarms against a known drift position, and metric aggregation."""

from __future__ import annotations

import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

DEFAULT_RANGE = 4_000


@dataclass(frozen=True)
class GroundTruth:
    position: int | None      # None for a stationary stream
    range: int = DEFAULT_RANGE
    length: int | None = None

    def __post_init__(self) -> None:
        if self.range <= 0:
            raise ValueError("detection range must be positive")
        if self.position is not None and self.position < 0:
            raise ValueError("drift position must be non-negative")
        if (self.position is not None and self.length is not None
                and self.position + self.range > self.length):
            warnings.warn("detection range extends past the end of the stream", stacklevel=2)

    @property
    def stationary(self) -> bool:
        return self.position is None


@dataclass(frozen=True)
class DetectionLog:
    alarms: tuple[int, ...] = ()
    warnings: tuple[int, ...] = ()
    stream_id: str = ""
    detector: str = ""

    def __post_init__(self) -> None:
        for name in ("alarms", "warnings"):
            ts = tuple(int(t) for t in getattr(self, name))
            if any(b <= a for a, b in zip(ts, ts[1:])):
                raise ValueError(f"{name} must be strictly increasing")
            if ts and ts[0] < 0:
                raise ValueError(f"{name} must be non-negative")
            object.__setattr__(self, name, ts)


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0
    delay_sum: int = 0

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn,
                               self.tn + other.tn, self.delay_sum + other.delay_sum)


def score_detections(log: DetectionLog | Iterable[int], truth: GroundTruth) -> ConfusionCounts:
    """Count one true positive at most: the first alarm in ``[i_d, i_d + R]``.

    Later alarms inside the range are ignored; alarms outside it are false
    positives.  On a stationary stream every alarm is a false positive and
    the stream is a true negative iff it raised none.
    """
    alarms = log.alarms if isinstance(log, DetectionLog) else tuple(log)
    if truth.stationary:
        return ConfusionCounts(fp=len(alarms), tn=int(not alarms))
    lo, hi = truth.position, truth.position + truth.range
    inside = [a for a in alarms if lo <= a <= hi]
    fp = len(alarms) - len(inside)
    if not inside:
        return ConfusionCounts(fp=fp, fn=1)
    return ConfusionCounts(tp=1, fp=fp, delay_sum=inside[0] - lo)


def precision(c: ConfusionCounts) -> float:
    return c.tp / (c.tp + c.fp) if c.tp + c.fp else 0.0


def recall(c: ConfusionCounts) -> float:
    return c.tp / (c.tp + c.fn) if c.tp + c.fn else 0.0


def f1_from(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r else 0.0


def f1(c: ConfusionCounts) -> float:
    return f1_from(precision(c), recall(c))


def mean_delay(c: ConfusionCounts) -> float | None:
    return c.delay_sum / c.tp if c.tp else None


@dataclass(frozen=True)
class MetricRow:
    key: tuple
    counts: ConfusionCounts
    n_streams: int
    precision: float = field(init=False)
    recall: float = field(init=False)
    f1: float = field(init=False)
    mean_delay: float | None = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "precision", precision(self.counts))
        object.__setattr__(self, "recall", recall(self.counts))
        object.__setattr__(self, "f1", f1(self.counts))
        object.__setattr__(self, "mean_delay", mean_delay(self.counts))


def aggregate(records: Iterable, key: Callable | str | Iterable[str]) -> list[MetricRow]:
    """Micro-average: pool the counts of each group, then compute the metrics.

    ``records`` are ``(row, ConfusionCounts)`` pairs or mappings carrying tp,
    fp, fn, tn and delay_sum.  ``key`` is a callable on the row, a field name
    or a sequence of field names.  Groups keep first-appearance order.
    """
    if isinstance(key, str):
        names = (key,)
        key_fn = lambda row: tuple(row[n] for n in names)  # noqa: E731
    elif callable(key):
        key_fn = lambda row: _as_tuple(key(row))  # noqa: E731
    else:
        names = tuple(key)
        key_fn = lambda row: tuple(row[n] for n in names)  # noqa: E731
    totals: dict[tuple, ConfusionCounts] = {}
    sizes: dict[tuple, int] = defaultdict(int)
    for rec in records:
        row, counts = rec if isinstance(rec, tuple) else (rec, counts_of(rec))
        k = key_fn(row)
        totals[k] = totals.get(k, ConfusionCounts()) + counts
        sizes[k] += 1
    return [MetricRow(k, c, sizes[k]) for k, c in totals.items()]


def counts_of(row: Mapping) -> ConfusionCounts:
    return ConfusionCounts(*(int(row[f]) for f in ("tp", "fp", "fn", "tn", "delay_sum")))


def _as_tuple(value) -> tuple:
    return value if isinstance(value, tuple) else (value,)
