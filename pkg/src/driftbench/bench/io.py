"""On-disk formats: stream CSV, ground-truth sidecar JSON and versioned result tables."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from driftbench.bench.manifest import FORMAT_VERSION, ManifestEntry
from driftbench.stream import StreamConfig

VERSION_LINE = f"#format_version={FORMAT_VERSION}"


class FormatError(ValueError):
    """Raised when a file does not carry the expected format version."""


def write_stream_csv(path: str | Path, X: np.ndarray, y: np.ndarray) -> None:
    d = X.shape[1]
    header = ",".join([f"f{i}" for i in range(d)] + ["class"])
    buf = io.StringIO()
    np.savetxt(buf, np.column_stack([X, y]), fmt=["%.6f"] * d + ["%d"], delimiter=",",
               header=header, comments="")
    Path(path).write_text(buf.getvalue(), encoding="utf-8", newline="\n")


def read_stream_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if not header or header[-1] != "class":
            raise FormatError(f"{path}: unexpected stream header")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return data[:, :-1], data[:, -1].astype(np.int64)


def sidecar(entry: ManifestEntry) -> dict:
    doc = {"id": entry.id, **entry.config.to_dict(), "range": entry.range,
           "format_version": FORMAT_VERSION}
    return doc


def write_sidecar(path: str | Path, entry: ManifestEntry) -> None:
    Path(path).write_text(json.dumps(sidecar(entry), indent=1) + "\n", encoding="utf-8",
                          newline="\n")


def read_sidecar(path: str | Path) -> ManifestEntry:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported format version {doc.get('format_version')!r}")
    return ManifestEntry(doc["id"], StreamConfig.from_dict(doc), int(doc.get("range", 4000)))


def write_table(path: str | Path, columns: Sequence[str], rows: Iterable[Mapping]) -> None:
    buf = io.StringIO()
    buf.write(VERSION_LINE + "\n")
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n",
                            extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(row.get(k)) for k in columns})
    Path(path).write_text(buf.getvalue(), encoding="utf-8", newline="\n")


def read_table(path: str | Path) -> list[dict[str, str]]:
    with open(path, encoding="utf-8", newline="") as fh:
        first = fh.readline().rstrip("\n")
        if first != VERSION_LINE:
            raise FormatError(f"{path}: expected {VERSION_LINE!r}, found {first!r}")
        return list(csv.DictReader(fh))


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)
