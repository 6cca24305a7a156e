"""Stream data model, drift specifications and time-indexed concept mixing.

A benchmark stream is a sequence of instances drawn from a *pre* concept,
a *post* concept, and (for recurrent difficulties) an intermediate concept
that is active for a while before the pre concept returns.  The schedule
that decides which concept is realised at time ``t`` depends only on the
drift speed, so every generator shares it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Protocol

import numpy as np


class ConfigurationError(ValueError):
    """Raised for invalid stream, drift or generator parameters."""


class GenerationError(RuntimeError):
    """Raised when a concept cannot produce a requested instance."""


class DriftCategory(str, Enum):
    SINGLE_CLASS_LOCAL = "single_class_local"
    SINGLE_CLASS_GLOBAL = "single_class_global"
    MULTI_CLASS_LOCAL = "multi_class_local"
    MULTI_CLASS_GLOBAL = "multi_class_global"

    @property
    def is_multi(self) -> bool:
        return self in (DriftCategory.MULTI_CLASS_LOCAL, DriftCategory.MULTI_CLASS_GLOBAL)

    @property
    def is_global(self) -> bool:
        return self in (DriftCategory.SINGLE_CLASS_GLOBAL, DriftCategory.MULTI_CLASS_GLOBAL)

    @classmethod
    def of(cls, multi: bool, global_: bool) -> "DriftCategory":
        if multi:
            return cls.MULTI_CLASS_GLOBAL if global_ else cls.MULTI_CLASS_LOCAL
        return cls.SINGLE_CLASS_GLOBAL if global_ else cls.SINGLE_CLASS_LOCAL


class Speed(str, Enum):
    SUDDEN = "sudden"
    GRADUAL = "gradual"
    INCREMENTAL = "incremental"

    @property
    def code(self) -> str:
        return self.value[0].upper()

    @classmethod
    def from_code(cls, code: str) -> "Speed":
        for speed in cls:
            if speed.code == code.upper() or speed.value == code.lower():
                return speed
        raise ConfigurationError(f"unknown drift speed {code!r}")


DEFAULT_LENGTH = 20_000
DEFAULT_POSITION = 10_000
DEFAULT_WIDTH = 2_000
DEFAULT_REAPPEAR_WIDTH = 2_000
DEFAULT_LOCAL_FRACTION = 0.5


@dataclass(frozen=True)
class Instance:
    features: np.ndarray
    label: int


@dataclass(frozen=True)
class DriftSpec:
    """One drift event: what changes, how fast and where.

    ``width`` is 0 for sudden drifts.  ``reappear_width`` is only used by the
    recurrent difficulties, whose intermediate concept is active on
    ``[position, position + reappear_width)``.
    """

    category: DriftCategory
    difficulty: str
    speed: Speed
    position: int = DEFAULT_POSITION
    width: int = 0
    affected_classes: tuple[int, ...] = (0,)
    scope_fraction: float = 1.0
    reappear_width: int = DEFAULT_REAPPEAR_WIDTH

    def __post_init__(self) -> None:
        object.__setattr__(self, "category", DriftCategory(self.category))
        object.__setattr__(self, "speed", Speed(self.speed))
        object.__setattr__(self, "affected_classes", tuple(int(c) for c in self.affected_classes))
        affected = self.affected_classes
        if len(set(affected)) != len(affected):
            raise ConfigurationError(f"duplicate affected classes {affected}")
        if self.category.is_multi and len(affected) < 2:
            raise ConfigurationError("multi-class drift needs at least two affected classes")
        if not self.category.is_multi and len(affected) != 1:
            raise ConfigurationError("single-class drift needs exactly one affected class")
        if not 0.0 < self.scope_fraction <= 1.0:
            raise ConfigurationError(f"scope_fraction must lie in (0, 1], got {self.scope_fraction}")
        if self.category.is_global != (self.scope_fraction == 1.0):
            raise ConfigurationError("global drift requires scope_fraction == 1.0 and local drift < 1.0")
        if self.position < 0:
            raise ConfigurationError("drift position must be non-negative")
        if self.speed is Speed.SUDDEN and self.width != 0:
            raise ConfigurationError("sudden drift has width 0")
        if self.speed is not Speed.SUDDEN and self.width <= 0:
            raise ConfigurationError(f"{self.speed.value} drift needs a positive width")
        if self.reappear_width <= 0:
            raise ConfigurationError("reappear_width must be positive")

    def to_dict(self) -> dict[str, Any]:
        return {
            "category": self.category.value,
            "difficulty": self.difficulty,
            "speed": self.speed.value,
            "position": self.position,
            "width": self.width,
            "affected_classes": list(self.affected_classes),
            "scope_fraction": self.scope_fraction,
            "reappear_width": self.reappear_width,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DriftSpec":
        return cls(
            category=DriftCategory(data["category"]),
            difficulty=data["difficulty"],
            speed=Speed(data["speed"]),
            position=int(data["position"]),
            width=int(data["width"]),
            affected_classes=tuple(data["affected_classes"]),
            scope_fraction=float(data["scope_fraction"]),
            reappear_width=int(data.get("reappear_width", DEFAULT_REAPPEAR_WIDTH)),
        )


@dataclass(frozen=True)
class StreamConfig:
    generator: str
    n_classes: int
    n_features: int
    length: int = DEFAULT_LENGTH
    seed: int = 0
    drift: DriftSpec | None = None
    # generator-specific knobs; None selects the generator default
    k_per_class: int | None = None
    max_depth: int | None = None

    def __post_init__(self) -> None:
        if self.generator not in ("rbf", "rt"):
            raise ConfigurationError(f"unknown generator {self.generator!r}")
        if self.n_classes < 2:
            raise ConfigurationError("a stream needs at least two classes")
        if self.n_features < 1:
            raise ConfigurationError("a stream needs at least one feature")
        if self.length < 1:
            raise ConfigurationError("stream length must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")
        if self.drift is not None:
            d = self.drift
            if d.position + d.width / 2 > self.length:
                raise ConfigurationError("drift window extends past the end of the stream")
            limit = self.n_classes + (1 if d.difficulty == "class_emerging" else 0)
            if any(c >= limit for c in d.affected_classes):
                raise ConfigurationError(f"affected classes {d.affected_classes} out of range")

    def to_dict(self) -> dict[str, Any]:
        params = {}
        if self.k_per_class is not None:
            params["k_per_class"] = self.k_per_class
        if self.max_depth is not None:
            params["max_depth"] = self.max_depth
        out: dict[str, Any] = {
            "generator": self.generator,
            "n_classes": self.n_classes,
            "n_features": self.n_features,
            "length": self.length,
            "seed": self.seed,
            "drift": None if self.drift is None else self.drift.to_dict(),
        }
        if params:
            out["generator_params"] = params
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "StreamConfig":
        params = data.get("generator_params") or {}
        drift = data.get("drift")
        return cls(
            generator=data["generator"],
            n_classes=int(data["n_classes"]),
            n_features=int(data["n_features"]),
            length=int(data["length"]),
            seed=int(data["seed"]),
            drift=None if drift is None else DriftSpec.from_dict(drift),
            k_per_class=params.get("k_per_class"),
            max_depth=params.get("max_depth"),
        )


class Concept(Protocol):
    """A frozen snapshot of a generating distribution."""

    n_classes: int

    @property
    def classes(self) -> tuple[int, ...]: ...

    def sample(self, label: int, rng: np.random.Generator) -> np.ndarray: ...


@dataclass(frozen=True)
class ConceptTransition:
    """Pre/post concepts plus the machinery to move between them.

    ``touched`` maps each affected class to the components (centroid indices
    or leaf paths of the pre concept) that the transform modified; it is the
    hook used by the structural locality checks.
    """

    pre: Any
    post: Any
    interpolate: Callable[[float], Any] | None = None
    intermediate: Any = None
    reappear_window: tuple[int, int] | None = None
    touched: dict[int, tuple] = field(default_factory=dict)

    def at(self, alpha: float) -> Any:
        if alpha <= 0.0:
            return self.pre
        if alpha >= 1.0 or self.interpolate is None:
            return self.post
        return self.interpolate(alpha)


def _require(spec: DriftSpec | None, speed: Speed, op: str) -> DriftSpec:
    if spec is None or spec.speed is not speed:
        got = None if spec is None else spec.speed.value
        raise ValueError(f"{op} requires a {speed.value} drift spec, got {got}")
    return spec


def mixing_probability(t: int, spec: DriftSpec) -> float:
    """Probability of drawing from the new concept at time ``t`` (gradual drift).

    Sigmoid centred on the drift position with slope ``4 / width``, truncated
    to the drift window ``[p - w/2, p + w/2)``: exactly 0 before it and 1 after.
    """
    spec = _require(spec, Speed.GRADUAL, "mixing_probability")
    p, w = spec.position, spec.width
    if t < p - w / 2:
        return 0.0
    if t >= p + w / 2:
        return 1.0
    return 1.0 / (1.0 + math.exp(-4.0 * (t - p) / w))


def interpolation_coefficient(t: int, spec: DriftSpec) -> float:
    """Linear ramp from 0 at ``p - w/2`` to 1 at ``p + w/2`` (incremental drift)."""
    spec = _require(spec, Speed.INCREMENTAL, "interpolation_coefficient")
    p, w = spec.position, spec.width
    start = p - w / 2
    if t <= start:
        return 0.0
    if t >= p + w / 2:
        return 1.0
    return (t - start) / w


class BalancedLabels:
    """Class requests in shuffled round-robin blocks.

    Every block of ``len(classes)`` consecutive requests contains each class
    exactly once.  Streams do not use it: a strict schedule makes the next
    label predictable from the current block, which majority-vote learners
    pick up as a systematic bias.
    """

    def __init__(self, classes, rng: np.random.Generator):
        self.classes = tuple(classes)
        self._rng = rng
        self._block: list[int] = []

    def __call__(self) -> int:
        if not self._block:
            self._block = [int(c) for c in self._rng.permutation(self.classes)][::-1]
        return self._block.pop()


class StreamRng:
    """Independent random sub-streams used while sampling a stream.

    Features, gradual-mixing coins and class schedules draw from separate
    PCG64 generators so that the pre-drift prefix of a stream never depends
    on what happens after the drift starts.
    """

    def __init__(self, features: np.random.Generator, mixing: np.random.Generator,
                 classes: np.random.Generator):
        self.features = features
        self.mixing = mixing
        self.classes = classes

    @classmethod
    def from_seed(cls, seed: np.random.SeedSequence | int) -> "StreamRng":
        ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        f, m, c = (np.random.Generator(np.random.PCG64(s)) for s in ss.spawn(3))
        return cls(f, m, c)

    def next_label(self, classes: tuple[int, ...]) -> int:
        """Uniform draw over the classes present in the active concept."""
        return classes[int(self.classes.integers(len(classes)))]


def active_concept(transition: ConceptTransition, spec: DriftSpec | None, t: int,
                   coin: np.random.Generator) -> Any:
    """The concept realised at time ``t``."""
    if spec is None:
        return transition.pre
    if transition.reappear_window is not None:
        start, end = transition.reappear_window
        if start <= t < end:
            return transition.intermediate
        if t >= end:
            return transition.post
        if spec.speed is Speed.GRADUAL:
            prob = mixing_probability(t, spec)
            if prob > 0.0 and coin.random() < prob:
                return transition.intermediate
        return transition.pre
    if spec.speed is Speed.SUDDEN:
        return transition.pre if t < spec.position else transition.post
    if spec.speed is Speed.GRADUAL:
        prob = mixing_probability(t, spec)
        if prob <= 0.0:
            return transition.pre
        if prob >= 1.0:
            return transition.post
        return transition.post if coin.random() < prob else transition.pre
    return transition.at(interpolation_coefficient(t, spec))


def sample_at(config: StreamConfig, transition: ConceptTransition, t: int,
              rng: StreamRng) -> Instance:
    """Draw the instance at time ``t``.

    Calls must be made in increasing ``t`` order with the same ``rng`` for the
    result to be reproducible.
    """
    if not 0 <= t < config.length:
        raise IndexError(f"t={t} outside stream of length {config.length}")
    concept = active_concept(transition, config.drift, t, rng.mixing)
    label = rng.next_label(concept.classes)
    return Instance(concept.sample(label, rng.features), label)


class DriftStream:
    """A fully specified benchmark stream.

    The base concept, the drift transform and the sampling noise come from
    separate children of the config seed (PCG64 via ``SeedSequence``).
    """

    def __init__(self, config: StreamConfig):
        from driftbench.generators import base_concept, make_transition

        self.config = config
        concept_ss, transform_ss, sample_ss = np.random.SeedSequence(config.seed).spawn(3)
        base = base_concept(config, np.random.Generator(np.random.PCG64(concept_ss)))
        if config.drift is None:
            self.transition = ConceptTransition(pre=base, post=base)
        else:
            self.transition = make_transition(
                config.generator, base, config.drift,
                np.random.Generator(np.random.PCG64(transform_ss)),
            )
        self._sample_ss = sample_ss

    def __len__(self) -> int:
        return self.config.length

    def __iter__(self):
        rng = StreamRng.from_seed(self._sample_ss)
        for t in range(self.config.length):
            yield sample_at(self.config, self.transition, t, rng)

    def to_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        X = np.empty((self.config.length, self.config.n_features))
        y = np.empty(self.config.length, dtype=np.int64)
        for t, inst in enumerate(self):
            X[t] = inst.features
            y[t] = inst.label
        return X, y


def generate(config: StreamConfig) -> tuple[np.ndarray, np.ndarray]:
    return DriftStream(config).to_arrays()
