"""Random RBF concepts and their drift transforms.

Each class owns a handful of Gaussian centroids in the unit hypercube.
Transforms act on a subset of the centroids of each affected class (all of
them for global drift) and return a :class:`ConceptTransition`.

Component ordering convention for a transformed class: the untouched
centroids come first, in their original order, followed by the transformed
ones.  The locality checks rely on it.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from functools import cached_property
from itertools import accumulate

import numpy as np

from driftbench.stream import (
    ConceptTransition,
    ConfigurationError,
    DriftSpec,
    GenerationError,
    Instance,
    Speed,
)

STDDEV_RANGE = (0.02, 0.08)
WEIGHT_RANGE = (0.5, 1.5)
SPLIT_SEPARATION = 0.3
DEFAULT_K_PER_CLASS = 4

DIFFICULTIES = {
    "emerging_cluster": {Speed.SUDDEN, Speed.GRADUAL},
    "reappearing_cluster": {Speed.SUDDEN, Speed.GRADUAL},
    "splitting_cluster": {Speed.SUDDEN, Speed.GRADUAL, Speed.INCREMENTAL},
    "merging_cluster": {Speed.SUDDEN, Speed.GRADUAL, Speed.INCREMENTAL},
    "moving_cluster": {Speed.SUDDEN, Speed.GRADUAL, Speed.INCREMENTAL},
    "swap_cluster": {Speed.SUDDEN, Speed.GRADUAL},
    "class_emerging": {Speed.SUDDEN, Speed.GRADUAL},
}


@dataclass(frozen=True)
class Centroid:
    center: tuple[float, ...]
    stddev: float
    weight: float


@dataclass(frozen=True)
class RbfConcept:
    """Per-class Gaussian mixtures; ``centroids[c]`` is empty when class c is absent."""

    n_features: int
    centroids: tuple[tuple[Centroid, ...], ...]

    @property
    def n_classes(self) -> int:
        return len(self.centroids)

    @cached_property
    def classes(self) -> tuple[int, ...]:
        return tuple(c for c, cs in enumerate(self.centroids) if cs)

    @cached_property
    def _tables(self):
        tables = []
        for cs in self.centroids:
            if not cs:
                tables.append(None)
                continue
            cum = list(accumulate(c.weight for c in cs))
            centers = np.array([c.center for c in cs])
            stds = np.array([c.stddev for c in cs])
            tables.append((cum, centers, stds))
        return tables

    def sample(self, label: int, rng: np.random.Generator) -> np.ndarray:
        table = self._tables[label] if 0 <= label < len(self._tables) else None
        if table is None:
            raise GenerationError(f"class {label} is not present in this RBF concept")
        cum, centers, stds = table
        i = bisect_right(cum, rng.random() * cum[-1]) if len(cum) > 1 else 0
        x = centers[i] + rng.normal(0.0, stds[i], self.n_features)
        np.clip(x, 0.0, 1.0, out=x)
        return x

    def replace(self, label: int, centroids) -> "RbfConcept":
        cs = list(self.centroids)
        while len(cs) <= label:
            cs.append(())
        cs[label] = tuple(centroids)
        return RbfConcept(self.n_features, tuple(cs))


def _fresh_centroid(n_features: int, rng: np.random.Generator) -> Centroid:
    center = tuple(float(v) for v in rng.uniform(0.0, 1.0, n_features))
    return Centroid(center, float(rng.uniform(*STDDEV_RANGE)), float(rng.uniform(*WEIGHT_RANGE)))


def rbf_base(n_classes: int, n_features: int, k_per_class: int,
             rng: np.random.Generator) -> RbfConcept:
    if k_per_class < 2:
        raise ConfigurationError("k_per_class must be at least 2")
    return RbfConcept(n_features, tuple(
        tuple(_fresh_centroid(n_features, rng) for _ in range(k_per_class))
        for _ in range(n_classes)
    ))


def rbf_sample(concept: RbfConcept, class_id: int, rng: np.random.Generator) -> Instance:
    return Instance(concept.sample(class_id, rng), class_id)


def _lerp(a, b, alpha: float) -> tuple[float, ...]:
    return tuple(x + alpha * (y - x) for x, y in zip(a, b))


def _select(n_components: int, spec: DriftSpec, rng: np.random.Generator,
            minimum: int = 1) -> tuple[int, ...]:
    if spec.scope_fraction >= 1.0:
        return tuple(range(n_components))
    m = min(n_components, max(minimum, math.ceil(spec.scope_fraction * n_components)))
    return tuple(sorted(int(i) for i in rng.choice(n_components, m, replace=False)))


def _split(cs, selected):
    keep = tuple(c for i, c in enumerate(cs) if i not in selected)
    return keep, tuple(cs[i] for i in selected)


class _Morph:
    """Per-class linear morph between centroid lists (used for incremental drift)."""

    def __init__(self, pre: RbfConcept, post: RbfConcept, paths):
        # paths: {class: (keep, [(start Centroid, end Centroid)])}
        self.pre, self.post, self.paths = pre, post, paths

    def __call__(self, alpha: float) -> RbfConcept:
        if alpha <= 0.0:
            return self.pre
        if alpha >= 1.0:
            return self.post
        concept = self.pre
        for label, (keep, moves) in self.paths.items():
            moved = tuple(
                Centroid(_lerp(a.center, b.center, alpha),
                         a.stddev + alpha * (b.stddev - a.stddev), a.weight)
                for a, b in moves
            )
            concept = concept.replace(label, keep + moved)
        return concept


def rbf_transform(concept: RbfConcept, difficulty: str, spec: DriftSpec,
                  rng: np.random.Generator) -> ConceptTransition:
    speeds = DIFFICULTIES.get(difficulty)
    if speeds is None:
        raise ConfigurationError(f"unknown RBF difficulty {difficulty!r}")
    if spec.speed not in speeds:
        raise ConfigurationError(f"{difficulty} does not support {spec.speed.value} drift")
    affected = spec.affected_classes
    d = concept.n_features

    if difficulty == "class_emerging":
        if not spec.category.is_global:
            raise ConfigurationError("class_emerging requires global scope")
        new = concept.n_classes
        if affected != (new,):
            raise ConfigurationError(f"class_emerging must affect the new class {new}")
        k = len(concept.centroids[concept.classes[0]])
        post = concept.replace(new, [_fresh_centroid(d, rng) for _ in range(k)])
        return ConceptTransition(concept, post, touched={new: ()})

    for a in affected:
        if a not in concept.classes:
            raise ConfigurationError(f"affected class {a} is not present")

    if difficulty == "swap_cluster":
        if len(affected) < 2:
            raise ConfigurationError("swap_cluster requires at least two affected classes")
        picks = {a: _select(len(concept.centroids[a]), spec, rng) for a in affected}
        m = min(len(p) for p in picks.values())
        picks = {a: p[:m] for a, p in picks.items()}
        post = concept
        for i, a in enumerate(affected):
            donor = affected[(i + 1) % len(affected)]
            keep, chosen = _split(concept.centroids[a], picks[a])
            donor_centers = [concept.centroids[donor][j].center for j in picks[donor]]
            swapped = tuple(Centroid(dc, c.stddev, c.weight) for c, dc in zip(chosen, donor_centers))
            post = post.replace(a, keep + swapped)
        return ConceptTransition(concept, post, touched=picks)

    if difficulty == "emerging_cluster":
        post = concept
        for a in affected:
            cs = concept.centroids[a]
            fresh = _fresh_centroid(d, rng)
            fresh = Centroid(fresh.center, fresh.stddev, sum(c.weight for c in cs) / len(cs))
            post = post.replace(a, cs + (fresh,))
        return ConceptTransition(concept, post, touched={a: () for a in affected})

    if difficulty == "reappearing_cluster":
        mid = concept
        picks = {}
        for a in affected:
            cs = concept.centroids[a]
            picks[a] = _select(len(cs), spec, rng)
            keep, _ = _split(cs, picks[a])
            mid = mid.replace(a, keep)
        if not mid.classes:
            raise ConfigurationError("reappearing_cluster would remove every class")
        start = spec.position
        return ConceptTransition(concept, concept, intermediate=mid,
                                 reappear_window=(start, start + spec.reappear_width),
                                 touched=picks)

    post = concept
    paths = {}
    picks = {}
    for a in affected:
        cs = concept.centroids[a]
        if difficulty == "merging_cluster":
            sel = _select(len(cs), spec, rng, minimum=2)
            keep, chosen = _split(cs, sel)
            center = tuple(float(v) for v in np.mean([c.center for c in chosen], axis=0))
            stddev = sum(c.stddev for c in chosen) / len(chosen)
            fused = Centroid(center, stddev, sum(c.weight for c in chosen))
            post = post.replace(a, keep + (fused,))
            paths[a] = (keep, [(c, Centroid(center, stddev, c.weight)) for c in chosen])
        elif difficulty == "splitting_cluster":
            sel = _select(len(cs), spec, rng)
            keep, chosen = _split(cs, sel)
            halves, moves = [], []
            for c in chosen:
                u = rng.normal(size=d)
                u /= np.linalg.norm(u)
                origin = np.asarray(c.center)
                ends = (np.clip(origin + 0.5 * SPLIT_SEPARATION * u, 0.0, 1.0),
                        np.clip(origin - 0.5 * SPLIT_SEPARATION * u, 0.0, 1.0))
                for end in ends:
                    half = Centroid(tuple(float(v) for v in end), c.stddev, c.weight / 2)
                    halves.append(half)
                    moves.append((Centroid(c.center, c.stddev, c.weight / 2), half))
            post = post.replace(a, keep + tuple(halves))
            paths[a] = (keep, moves)
        elif difficulty == "moving_cluster":
            sel = _select(len(cs), spec, rng)
            keep, chosen = _split(cs, sel)
            moved = tuple(
                Centroid(tuple(float(v) for v in rng.uniform(0.0, 1.0, d)), c.stddev, c.weight)
                for c in chosen
            )
            post = post.replace(a, keep + moved)
            paths[a] = (keep, list(zip(chosen, moved)))
        else:
            raise ConfigurationError(f"unhandled RBF difficulty {difficulty!r}")
        picks[a] = sel
    morph = _Morph(concept, post, paths)
    return ConceptTransition(concept, post, interpolate=morph, touched=picks)
