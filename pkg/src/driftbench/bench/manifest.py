"""Enumeration of the benchmark grid into an ordered, id-addressed manifest."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from driftbench import __version__
from driftbench.generators import CATALOG, Difficulty
from driftbench.stream import (
    DEFAULT_LENGTH,
    DEFAULT_LOCAL_FRACTION,
    DEFAULT_POSITION,
    DEFAULT_REAPPEAR_WIDTH,
    DEFAULT_WIDTH,
    ConfigurationError,
    DriftCategory,
    DriftSpec,
    Speed,
    StreamConfig,
)

FORMAT_VERSION = 1
AFFECTED_COUNTS = (2, 3, 5, 10)
CATEGORY_CODES = {
    DriftCategory.SINGLE_CLASS_LOCAL: "scl",
    DriftCategory.SINGLE_CLASS_GLOBAL: "scg",
    DriftCategory.MULTI_CLASS_LOCAL: "mcl",
    DriftCategory.MULTI_CLASS_GLOBAL: "mcg",
}


@dataclass(frozen=True)
class ManifestParams:
    generators: tuple[str, ...] = ("rbf", "rt")
    classes: tuple[int, ...] = (2, 3, 5, 10)
    features: tuple[int, ...] = (2, 5, 10)
    categories: tuple[str, ...] | None = None   # None keeps every category
    difficulties: tuple[str, ...] | None = None  # None keeps every difficulty
    speeds: tuple[str, ...] = ("sudden", "gradual", "incremental")
    affected_counts: tuple[int, ...] = AFFECTED_COUNTS
    seeds: int = 1
    base_seed: int = 0
    length: int = DEFAULT_LENGTH
    position: int = DEFAULT_POSITION
    width: int = DEFAULT_WIDTH
    reappear_width: int = DEFAULT_REAPPEAR_WIDTH
    local_fraction: float = DEFAULT_LOCAL_FRACTION
    range: int = 4_000
    stationary: bool = False

    def __post_init__(self) -> None:
        for name in ("generators", "classes", "features", "speeds", "affected_counts"):
            if not getattr(self, name):
                raise ConfigurationError(f"{name} must not be empty")
        for name in ("categories", "difficulties"):
            value = getattr(self, name)
            if value is not None and not value:
                raise ConfigurationError(f"{name} must not be empty")
        if self.seeds < 1:
            raise ConfigurationError("seeds must be at least 1")
        object.__setattr__(self, "speeds", tuple(Speed.from_code(s).value for s in self.speeds))

    def rows(self) -> list[Difficulty]:
        cats = None if self.categories is None else {DriftCategory(c) for c in self.categories}
        rows = [
            r for r in CATALOG
            if r.generator in self.generators
            and (cats is None or r.category in cats)
            and (self.difficulties is None or r.name in self.difficulties)
        ]
        if not rows:
            raise ConfigurationError("the parameters select no difficulty")
        return rows


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    config: StreamConfig
    range: int

    def to_dict(self) -> dict:
        return {"id": self.id, "range": self.range, "config": self.config.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "ManifestEntry":
        return cls(data["id"], StreamConfig.from_dict(data["config"]), int(data["range"]))


@dataclass(frozen=True)
class Manifest:
    params: ManifestParams
    entries: tuple[ManifestEntry, ...]
    version: str = __version__
    counts: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def to_json(self) -> str:
        doc = {
            "format_version": FORMAT_VERSION,
            "toolkit_version": self.version,
            "parameters": asdict(self.params),
            "counts": self.counts,
            "streams": [e.to_dict() for e in self.entries],
        }
        return json.dumps(doc, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Manifest":
        doc = json.loads(text)
        if doc.get("format_version") != FORMAT_VERSION:
            raise ConfigurationError(f"unsupported manifest format {doc.get('format_version')!r}")
        raw = doc["parameters"]
        params = ManifestParams(**{k: tuple(v) if isinstance(v, list) else v for k, v in raw.items()})
        entries = tuple(ManifestEntry.from_dict(e) for e in doc["streams"])
        return cls(params, entries, doc["toolkit_version"], doc.get("counts", {}))

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8", newline="\n")

    @classmethod
    def read(cls, path: str | Path) -> "Manifest":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def derive_seed(base_seed: int, generator: str, n_classes: int, n_features: int,
                replicate: int) -> int:
    """64-bit seed shared by every difficulty with the same stream shape."""
    key = f"{base_seed}:{generator}:{n_classes}:{n_features}:{replicate}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


def affected_options(row: Difficulty, n: int, counts=AFFECTED_COUNTS) -> list[tuple[int, ...]]:
    if row.name == "class_emerging":
        return [(n,)]
    if not row.category.is_multi:
        return [(0,)]
    return [tuple(range(k)) for k in counts if 2 <= k <= n]


def feasible(row: Difficulty, n: int, affected: tuple[int, ...]) -> bool:
    """False for configs that cannot be sampled: a global disappearance of every class."""
    return not (row.generator == "rbf" and row.name == "reappearing_cluster"
                and row.category.is_global and len(affected) >= n)


def stream_id(row: Difficulty, speed: Speed, n: int, d: int, n_affected: int, rep: int) -> str:
    cat = CATEGORY_CODES[row.category]
    return f"{row.generator}_{cat}_{row.name}_{speed.code}_c{n}_f{d}_a{n_affected}_s{rep}"


def stationary_id(generator: str, n: int, d: int, rep: int) -> str:
    return f"{generator}_stationary_c{n}_f{d}_s{rep}"


def enumerate_manifest(params: ManifestParams) -> Manifest:
    """Cartesian product of catalogue rows, class counts, feature counts,
    permitted speeds, affected-class counts and replicates."""
    wanted = [Speed(s) for s in params.speeds]
    entries: list[ManifestEntry] = []
    twins: dict[str, ManifestEntry] = {}
    excluded = 0
    for row in params.rows():
        speeds = [s for s in wanted if s in row.speeds]
        for n in params.classes:
            for d in params.features:
                for speed in speeds:
                    for affected in affected_options(row, n, params.affected_counts):
                        if not feasible(row, n, affected):
                            excluded += params.seeds
                            continue
                        for rep in range(params.seeds):
                            seed = derive_seed(params.base_seed, row.generator, n, d, rep)
                            spec = DriftSpec(
                                category=row.category,
                                difficulty=row.name,
                                speed=speed,
                                position=params.position,
                                width=0 if speed is Speed.SUDDEN else params.width,
                                affected_classes=affected,
                                scope_fraction=1.0 if row.category.is_global else params.local_fraction,
                                reappear_width=params.reappear_width,
                            )
                            config = StreamConfig(row.generator, n, d, params.length, seed, spec)
                            n_affected = len(affected)
                            entries.append(ManifestEntry(
                                stream_id(row, speed, n, d, n_affected, rep), config, params.range))
                            if params.stationary:
                                sid = stationary_id(row.generator, n, d, rep)
                                twins.setdefault(sid, ManifestEntry(
                                    sid, StreamConfig(row.generator, n, d, params.length, seed),
                                    params.range))
    ids = [e.id for e in entries]
    if len(set(ids)) != len(ids):
        raise ConfigurationError("manifest parameters produce duplicate stream ids")
    counts = {"drifting": len(entries), "stationary": len(twins), "excluded": excluded}
    counts["total"] = counts["drifting"] + counts["stationary"]
    return Manifest(params, tuple(entries) + tuple(twins.values()), counts=counts)
