"""Summary tables over result and accuracy rows."""

from __future__ import annotations

import statistics
from collections import defaultdict
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from driftbench.bench import io
from driftbench.evaluation import aggregate
from driftbench.stream import DriftCategory

GROUP_KEYS = ("detector", "category", "difficulty", "speed", "n_classes", "n_features",
              "n_affected", "generator")
METRIC_COLUMNS = ("streams", "tp", "fp", "fn", "tn", "precision", "recall", "f1", "mean_delay")


def _drifting(rows: Iterable[Mapping]) -> list[Mapping]:
    return [r for r in rows if r["category"] != "stationary"]


def metric_table(rows: Iterable[Mapping], keys: Sequence[str]) -> list[dict]:
    out = []
    for m in aggregate(list(rows), tuple(keys)):
        c = m.counts
        out.append({**dict(zip(keys, m.key)), "streams": m.n_streams, "tp": c.tp, "fp": c.fp,
                    "fn": c.fn, "tn": c.tn, "precision": m.precision, "recall": m.recall,
                    "f1": m.f1, "mean_delay": m.mean_delay})
    return out


def stationary_table(rows: Iterable[Mapping]) -> list[dict]:
    groups: dict[str, list[Mapping]] = defaultdict(list)
    for r in rows:
        if r["category"] == "stationary":
            groups[r["detector"]].append(r)
    return [{"detector": det, "streams": len(g),
             "mean_tn": sum(int(r["tn"]) for r in g) / len(g),
             "mean_fp": sum(int(r["fp"]) for r in g) / len(g)}
            for det, g in groups.items()]


def learner_table(rows: Iterable[Mapping]) -> list[dict]:
    """Mean accuracy per (category, learner); spread over streams and within streams."""
    groups: dict[tuple, list[Mapping]] = defaultdict(list)
    for r in rows:
        groups[(r["category"], r["learner"])].append(r)
    out = []
    for (cat, learner), g in groups.items():
        acc = [float(r["accuracy"]) for r in g]
        within = [float(r["window_std"]) for r in g if r.get("window_std") not in (None, "")]
        out.append({"category": cat, "learner": learner, "streams": len(g),
                    "mean_accuracy": statistics.fmean(acc),
                    "std_over_streams": statistics.pstdev(acc),
                    "mean_window_std": statistics.fmean(within) if within else None})
    return out


def format_text(columns: Sequence[str], rows: Sequence[Mapping]) -> str:
    cells = [[io._cell(r.get(c)) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def _emit(out: Path, name: str, columns: Sequence[str], rows: Sequence[Mapping]) -> None:
    io.write_table(out / f"{name}.csv", columns, rows)
    (out / f"{name}.txt").write_text(format_text(columns, rows), encoding="utf-8", newline="\n")


def report(results: Sequence[Mapping], group_by: str, out_dir: str | Path,
           accuracy: Sequence[Mapping] | None = None) -> dict[str, list[dict]]:
    if group_by not in GROUP_KEYS:
        raise KeyError(f"unknown group key {group_by!r}; valid: {', '.join(GROUP_KEYS)}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    drifting = _drifting(results)
    tables: dict[str, tuple[Sequence[str], list[dict]]] = {
        f"by_{group_by}": ((group_by, *METRIC_COLUMNS), metric_table(drifting, (group_by,))),
        "detectors": (("detector", *METRIC_COLUMNS), metric_table(drifting, ("detector",))),
        "difficulties": (("detector", "category", "difficulty", *METRIC_COLUMNS),
                         metric_table(drifting, ("detector", "category", "difficulty"))),
        "stationary": (("detector", "streams", "mean_tn", "mean_fp"), stationary_table(results)),
    }
    for cat in DriftCategory:
        subset = [r for r in drifting if r["category"] == cat.value]
        if subset:
            tables[f"category_{cat.value}"] = (("detector", *METRIC_COLUMNS),
                                               metric_table(subset, ("detector",)))
    if accuracy:
        tables["learners"] = (("category", "learner", "streams", "mean_accuracy",
                               "std_over_streams", "mean_window_std"), learner_table(accuracy))
    for name, (columns, rows) in tables.items():
        _emit(out, name, columns, rows)
    return {name: rows for name, (_, rows) in tables.items()}
