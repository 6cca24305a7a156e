"""Batch execution of detector and learner experiments over generated streams."""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from driftbench.bench import io
from driftbench.bench.manifest import Manifest, ManifestEntry
from driftbench.detectors import REGISTRY, Status, make_detector
from driftbench.evaluation import DetectionLog, GroundTruth, score_detections
from driftbench.learners import DEFAULT_WINDOW, LEARNERS, make_learner, prequential_run
from driftbench.learners.hoeffding import HoeffdingTree
from driftbench.stream import generate as generate_arrays

RESULT_COLUMNS = (
    "stream_id", "generator", "detector", "category", "difficulty", "speed", "n_classes",
    "n_features", "n_affected", "drift_position", "range", "tp", "fp", "fn", "tn", "delay_sum",
    "first_alarm", "n_alarms", "n_warnings", "config_hash", "wall_time",
)
ACCURACY_COLUMNS = (
    "stream_id", "generator", "learner", "category", "difficulty", "speed", "n_classes",
    "n_features", "n_affected", "accuracy", "window_mean", "window_std", "n_windows",
    "config_hash", "wall_time",
)
SERIES_COLUMNS = ("t", "accuracy")


def worker_count() -> int:
    limit = os.environ.get("DRIFTBENCH_THREADS")
    cpus = os.cpu_count() or 1
    if limit:
        try:
            return max(1, min(cpus, int(limit)))
        except ValueError:
            raise ValueError("DRIFTBENCH_THREADS must be an integer") from None
    return cpus


def parallel_map(fn: Callable, items: Sequence, workers: int | None = None) -> list:
    """Map in a process pool; results come back in input order."""
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


def config_hash(payload: dict) -> str:
    text = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def describe(entry: ManifestEntry) -> dict:
    c = entry.config
    d = c.drift
    return {
        "stream_id": entry.id,
        "generator": c.generator,
        "category": "stationary" if d is None else d.category.value,
        "difficulty": "stationary" if d is None else d.difficulty,
        "speed": "" if d is None else d.speed.value,
        "n_classes": c.n_classes,
        "n_features": c.n_features,
        "n_affected": 0 if d is None else len(d.affected_classes),
        "drift_position": None if d is None else d.position,
    }


# ----------------------------------------------------------------------------- generate

def generate_streams(manifest: Manifest, out_dir: str | Path, force: bool = False,
                     workers: int | None = None) -> list[str]:
    out = Path(out_dir)
    if out.exists() and any(out.iterdir()) and not force:
        raise FileExistsError(f"{out} is not empty; pass --force to overwrite")
    out.mkdir(parents=True, exist_ok=True)
    manifest.write(out / "manifest.json")
    jobs = [(entry, str(out)) for entry in manifest.entries]
    return parallel_map(_generate_one, jobs, workers)


def _generate_one(job) -> str:
    entry, out = job
    try:
        X, y = generate_arrays(entry.config)
        io.write_stream_csv(Path(out) / f"{entry.id}.csv", X, y)
        io.write_sidecar(Path(out) / f"{entry.id}.json", entry)
    except Exception as exc:
        raise RuntimeError(f"failed to generate {entry.id}: {exc}") from exc
    return entry.id


def stream_entries(stream_dir: str | Path) -> list[ManifestEntry]:
    """Streams of a generated directory, in manifest order when a manifest is present."""
    root = Path(stream_dir)
    manifest = root / "manifest.json"
    if manifest.exists():
        return list(Manifest.read(manifest).entries)
    return [io.read_sidecar(p) for p in sorted(root.glob("*.json"))]


def _load(stream_dir: str | Path, entry: ManifestEntry):
    root = Path(stream_dir)
    csv_path = root / f"{entry.id}.csv"
    sidecar = root / f"{entry.id}.json"
    if sidecar.exists():
        entry = io.read_sidecar(sidecar)
    if csv_path.exists():
        return entry, io.read_stream_csv(csv_path)
    return entry, generate_arrays(entry.config)


# ----------------------------------------------------------------------------- detect

def check_names(names: Iterable[str], valid: Iterable[str], kind: str) -> list[str]:
    names = [n.strip().lower() for n in names if n.strip()]
    valid = list(valid)
    unknown = [n for n in names if n not in valid]
    if unknown or not names:
        raise KeyError(f"unknown {kind} {', '.join(unknown) or '(none)'}; valid: {', '.join(valid)}")
    return names


@dataclass(frozen=True)
class DetectionRun:
    alarms: tuple[int, ...]
    warnings: tuple[int, ...]
    seconds: float


def run_detector(detector, errors: np.ndarray) -> DetectionRun:
    start = time.perf_counter()
    alarms, warns = [], []
    update = detector.update
    for t, e in enumerate(errors.tolist()):
        status = update(e)
        if status is Status.DRIFT:
            alarms.append(t)
        elif status is Status.WARNING:
            warns.append(t)
    return DetectionRun(tuple(alarms), tuple(warns), time.perf_counter() - start)


def error_bits(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Misclassification bits of a fresh Hoeffding tree under test-then-train."""
    return prequential_run(X, y, HoeffdingTree(X.shape[1])).errors.astype(np.int64)


def detect_entry(entry: ManifestEntry, X, y, detectors: Sequence[str],
                 range_: int | None = None, params: dict | None = None) -> list[dict]:
    params = params or {}
    range_ = entry.range if range_ is None else range_
    errors = error_bits(X, y)
    base = describe(entry)
    position = entry.config.drift.position if entry.config.drift else None
    truth = GroundTruth(position, range_)
    rows = []
    for name in detectors:
        detector = make_detector(name, **params.get(name, {}))
        run = run_detector(detector, errors)
        counts = score_detections(DetectionLog(run.alarms, run.warnings, entry.id, name), truth)
        rows.append({
            **base,
            "detector": name,
            "range": range_,
            "tp": counts.tp, "fp": counts.fp, "fn": counts.fn, "tn": counts.tn,
            "delay_sum": counts.delay_sum,
            "first_alarm": run.alarms[0] if run.alarms else None,
            "n_alarms": len(run.alarms),
            "n_warnings": len(run.warnings),
            "config_hash": config_hash({"stream": entry.config.to_dict(), "detector": name,
                                        "params": detector.params(), "learner": "ht",
                                        "range": range_}),
            "wall_time": run.seconds,
        })
    return rows


def _detect_job(job) -> list[dict]:
    stream_dir, entry, detectors, range_, params = job
    entry, (X, y) = _load(stream_dir, entry)
    return detect_entry(entry, X, y, detectors, range_, params)


def detect(stream_dir: str | Path, detectors: Sequence[str], range_: int | None = None,
           out: str | Path | None = None, params: dict | None = None,
           workers: int | None = None) -> list[dict]:
    detectors = check_names(detectors, REGISTRY, "detector")
    jobs = [(str(stream_dir), e, detectors, range_, params) for e in stream_entries(stream_dir)]
    rows = [row for chunk in parallel_map(_detect_job, jobs, workers) for row in chunk]
    if out is not None:
        io.write_table(out, RESULT_COLUMNS, rows)
    return rows


# ----------------------------------------------------------------------------- learn

def learn_entry(entry: ManifestEntry, X, y, learner: str, window: int = DEFAULT_WINDOW,
                params: dict | None = None):
    start = time.perf_counter()
    result = prequential_run(X, y, make_learner(learner, X.shape[1], **(params or {})), window)
    row = {
        **describe(entry),
        "learner": learner,
        "accuracy": result.accuracy,
        "window_mean": float(result.window_accuracy.mean()) if len(result.window_accuracy) else None,
        "window_std": result.window_std,
        "n_windows": len(result.window_accuracy),
        "config_hash": config_hash({"stream": entry.config.to_dict(), "learner": learner,
                                    "params": params or {}, "window": window}),
        "wall_time": time.perf_counter() - start,
    }
    return row, result


def _learn_job(job):
    stream_dir, entry, learners, window, out = job
    entry, (X, y) = _load(stream_dir, entry)
    rows = []
    for name in learners:
        row, result = learn_entry(entry, X, y, name, window)
        if out is not None:
            series = [{"t": int(t), "accuracy": float(a)}
                      for t, a in zip(result.times, result.window_accuracy)]
            io.write_table(Path(out) / "series" / f"{entry.id}__{name}.csv", SERIES_COLUMNS, series)
        rows.append(row)
    return rows


def learn(stream_dir: str | Path, learners: Sequence[str], window: int = DEFAULT_WINDOW,
          out: str | Path | None = None, workers: int | None = None) -> list[dict]:
    learners = check_names(learners, LEARNERS, "learner")
    if window < 1:
        raise ValueError("window must be at least 1")
    if out is not None:
        (Path(out) / "series").mkdir(parents=True, exist_ok=True)
    jobs = [(str(stream_dir), e, learners, window, None if out is None else str(out))
            for e in stream_entries(stream_dir)]
    rows = [row for chunk in parallel_map(_learn_job, jobs, workers) for row in chunk]
    if out is not None:
        io.write_table(Path(out) / "accuracy.csv", ACCURACY_COLUMNS, rows)
    return rows
