"""Random Tree concepts and their drift transforms.

Features are uniform on the unit hypercube and the label is read off a
random axis-aligned binary tree.  Leaves are addressed by their path from
the root (0 = ``x[f] <= threshold`` branch, 1 = the other one); transforms
only relabel or split leaves, so untouched paths survive unchanged.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np

from driftbench.stream import (
    ConceptTransition,
    ConfigurationError,
    DriftSpec,
    GenerationError,
    Instance,
    Speed,
)

STOP_PROBABILITY = 0.15
MAX_ATTEMPTS = 100
# new thresholds are drawn from the middle of the leaf interval so that no
# region created by a transform is vanishingly thin
SPLIT_MARGIN = 0.25

DIFFICULTIES = {
    "emerging_branch": {Speed.SUDDEN, Speed.GRADUAL},
    "prune_regrowth_branch": {Speed.SUDDEN, Speed.GRADUAL},
    "prune_growth_new_branch": {Speed.SUDDEN, Speed.GRADUAL},
    "split_node": {Speed.SUDDEN, Speed.GRADUAL},
    "swap_leaves": {Speed.SUDDEN, Speed.GRADUAL},
    "class_emerging": {Speed.SUDDEN, Speed.GRADUAL},
}


@dataclass(frozen=True)
class Leaf:
    label: int


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    left: "Node"
    right: "Node"


Node = Union[Leaf, Split]
Path = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class LeafInfo:
    path: Path
    label: int
    lower: np.ndarray
    upper: np.ndarray

    @property
    def volume(self) -> float:
        return float(np.prod(self.upper - self.lower))


def default_max_depth(n_classes: int) -> int:
    return math.ceil(math.log2(n_classes)) + 3


@dataclass(frozen=True)
class RtConcept:
    n_features: int
    n_classes: int
    root: Node

    @cached_property
    def leaves(self) -> tuple[LeafInfo, ...]:
        out: list[LeafInfo] = []
        stack = [(self.root, (), np.zeros(self.n_features), np.ones(self.n_features))]
        while stack:
            node, path, lo, hi = stack.pop()
            if isinstance(node, Leaf):
                out.append(LeafInfo(path, node.label, lo, hi))
                continue
            left_hi = hi.copy()
            left_hi[node.feature] = node.threshold
            right_lo = lo.copy()
            right_lo[node.feature] = node.threshold
            stack.append((node.right, path + (1,), right_lo, hi))
            stack.append((node.left, path + (0,), lo, left_hi))
        return tuple(out)

    @cached_property
    def classes(self) -> tuple[int, ...]:
        return tuple(sorted({leaf.label for leaf in self.leaves}))

    @cached_property
    def _by_class(self):
        table = {}
        for c in self.classes:
            members = [leaf for leaf in self.leaves if leaf.label == c]
            cum, total = [], 0.0
            for leaf in members:
                total += leaf.volume
                cum.append(total)
            table[c] = (members, cum)
        return table

    def depth(self) -> int:
        return max(len(leaf.path) for leaf in self.leaves)

    def label_of(self, x) -> int:
        node = self.root
        while isinstance(node, Split):
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node.label

    def leaf_at(self, path: Path) -> Node:
        node = self.root
        for step in path:
            node = node.right if step else node.left
        return node

    def sample(self, label: int, rng: np.random.Generator) -> np.ndarray:
        """Uniform draw from the region of feature space the tree labels ``label``.

        Equivalent to rejection sampling against the tree, but exact and O(d):
        pick a leaf of the class with probability proportional to its volume,
        then draw uniformly inside its box.
        """
        entry = self._by_class.get(label)
        if entry is None:
            raise GenerationError(f"class {label} is unreachable in this random tree")
        members, cum = entry
        i = bisect_right(cum, rng.random() * cum[-1]) if len(cum) > 1 else 0
        i = min(i, len(members) - 1)
        leaf = members[i]
        return rng.uniform(leaf.lower, leaf.upper)


def rt_base(n_classes: int, n_features: int, max_depth: int | None,
            rng: np.random.Generator) -> RtConcept:
    min_depth = math.ceil(math.log2(n_classes))
    if max_depth is None:
        max_depth = default_max_depth(n_classes)
    if max_depth < min_depth:
        raise ConfigurationError(
            f"max_depth={max_depth} cannot hold {n_classes} classes (needs >= {min_depth})")

    def grow(depth: int, lo: np.ndarray, hi: np.ndarray):
        if depth >= max_depth or (depth >= min_depth and rng.random() < STOP_PROBABILITY):
            return None
        f = int(rng.integers(n_features))
        thr = float(rng.uniform(lo[f], hi[f]))
        if not lo[f] < thr < hi[f]:
            return None
        left_hi, right_lo = hi.copy(), lo.copy()
        left_hi[f] = right_lo[f] = thr
        return (f, thr, grow(depth + 1, lo, left_hi), grow(depth + 1, right_lo, hi))

    for _ in range(MAX_ATTEMPTS):
        shape = grow(0, np.zeros(n_features), np.ones(n_features))
        n_leaves = _count(shape)
        if n_leaves < n_classes:
            continue
        order = rng.permutation(n_leaves)
        labels = [0] * n_leaves
        for rank, leaf_index in enumerate(order):
            labels[leaf_index] = rank if rank < n_classes else int(rng.integers(n_classes))
        it = iter(labels)
        return RtConcept(n_features, n_classes, _build(shape, it))
    raise ConfigurationError(f"could not place {n_classes} classes in a tree of depth {max_depth}")


def _count(shape) -> int:
    return 1 if shape is None else _count(shape[2]) + _count(shape[3])


def _build(shape, labels) -> Node:
    if shape is None:
        return Leaf(next(labels))
    f, thr, left, right = shape
    return Split(f, thr, _build(left, labels), _build(right, labels))


def rt_sample(concept: RtConcept, rng: np.random.Generator, class_id: int | None = None) -> Instance:
    """Uniform features labelled by the tree, or a draw conditioned on ``class_id``."""
    if class_id is None:
        x = rng.uniform(0.0, 1.0, concept.n_features)
        return Instance(x, concept.label_of(x))
    return Instance(concept.sample(class_id, rng), class_id)


# --- tree surgery -----------------------------------------------------------

def _replace(node: Node, path: Path, new: Node) -> Node:
    if not path:
        return new
    if path[0] == 0:
        return Split(node.feature, node.threshold, _replace(node.left, path[1:], new), node.right)
    return Split(node.feature, node.threshold, node.left, _replace(node.right, path[1:], new))


def _relabel(concept: RtConcept, changes: dict[Path, int], n_classes: int | None = None) -> RtConcept:
    root = concept.root
    for path, label in changes.items():
        root = _replace(root, path, Leaf(label))
    return RtConcept(concept.n_features, n_classes or concept.n_classes, root)


def _split_leaf(leaf: LeafInfo, rng: np.random.Generator, labels: tuple[int, int]) -> Split:
    f = int(rng.integers(len(leaf.lower)))
    lo, hi = leaf.lower[f], leaf.upper[f]
    thr = float(lo + (hi - lo) * rng.uniform(SPLIT_MARGIN, 1.0 - SPLIT_MARGIN))
    return Split(f, thr, Leaf(labels[0]), Leaf(labels[1]))


def _grow(concept: RtConcept, splits: dict[Path, Split], n_classes: int | None = None) -> RtConcept:
    root = concept.root
    for path, node in splits.items():
        root = _replace(root, path, node)
    return RtConcept(concept.n_features, n_classes or concept.n_classes, root)


def _subtree_labels(node: Node) -> list[int]:
    if isinstance(node, Leaf):
        return [node.label]
    return _subtree_labels(node.left) + _subtree_labels(node.right)


def _prune_label(concept: RtConcept, path: Path, label: int, excluded: set[int]) -> int:
    """Label a pruned leaf takes: majority of the nearest sibling subtree not in ``excluded``."""
    for cut in range(len(path), 0, -1):
        prefix = path[:cut - 1]
        sibling = concept.leaf_at(prefix + (1 - path[cut - 1],))
        counts = Counter(c for c in _subtree_labels(sibling) if c not in excluded)
        if counts:
            best = max(counts.values())
            return min(c for c, n in counts.items() if n == best)
    # every class is being pruned: hand the region to the next class in cyclic order
    others = [c for c in concept.classes if c != label]
    return min(others, key=lambda c: (c - label) % concept.n_classes) if others else label


def _select(paths: list[Path], spec: DriftSpec, rng: np.random.Generator) -> list[Path]:
    if spec.scope_fraction >= 1.0 or not paths:
        return list(paths)
    m = min(len(paths), max(1, math.ceil(spec.scope_fraction * len(paths))))
    idx = sorted(int(i) for i in rng.choice(len(paths), m, replace=False))
    return [paths[i] for i in idx]


def _pick(pool: list[LeafInfo], m: int, rng: np.random.Generator) -> list[LeafInfo]:
    if not pool:
        return []
    idx = sorted(int(i) for i in rng.choice(len(pool), min(m, len(pool)), replace=False))
    return [pool[i] for i in idx]


def _labels_with(rng: np.random.Generator, new: int, old: int) -> tuple[int, int]:
    return (new, old) if rng.random() < 0.5 else (old, new)


def rt_transform(concept: RtConcept, difficulty: str, spec: DriftSpec,
                 rng: np.random.Generator) -> ConceptTransition:
    speeds = DIFFICULTIES.get(difficulty)
    if speeds is None:
        raise ConfigurationError(f"unknown random-tree difficulty {difficulty!r}")
    if spec.speed is Speed.INCREMENTAL or spec.speed not in speeds:
        raise ConfigurationError(f"{difficulty} does not support {spec.speed.value} drift")
    affected = spec.affected_classes
    by_path = {leaf.path: leaf for leaf in concept.leaves}

    if difficulty == "class_emerging":
        if not spec.category.is_global:
            raise ConfigurationError("class_emerging requires global scope")
        new = concept.n_classes
        if affected != (new,):
            raise ConfigurationError(f"class_emerging must affect the new class {new}")
        m = max(1, round(len(concept.leaves) / (new + 1)))
        chosen = _pick(list(concept.leaves), m, rng)
        splits = {leaf.path: _split_leaf(leaf, rng, _labels_with(rng, new, leaf.label))
                  for leaf in chosen}
        post = _grow(concept, splits, n_classes=new + 1)
        return ConceptTransition(concept, post, touched={new: tuple(splits)})

    for a in affected:
        if a not in concept.classes:
            raise ConfigurationError(f"affected class {a} is not present")
    own = {a: [leaf.path for leaf in concept.leaves if leaf.label == a] for a in affected}

    if difficulty == "emerging_branch":
        used: set[Path] = set()
        splits, touched = {}, {}
        for a in affected:
            pool = [leaf for leaf in concept.leaves if leaf.label != a and leaf.path not in used]
            chosen = _pick(pool, 1, rng)
            for leaf in chosen:
                used.add(leaf.path)
                splits[leaf.path] = _split_leaf(leaf, rng, _labels_with(rng, a, leaf.label))
            touched[a] = tuple(leaf.path for leaf in chosen)
        return ConceptTransition(concept, _grow(concept, splits), touched=touched)

    if difficulty == "swap_leaves":
        if len(affected) < 2:
            raise ConfigurationError("swap_leaves requires at least two affected classes")
        changes, touched = {}, {}
        for i, a in enumerate(affected):
            target = affected[(i + 1) % len(affected)]
            sel = _select(own[a], spec, rng)
            for path in sel:
                changes[path] = target
            touched[a] = tuple(sel)
        return ConceptTransition(concept, _relabel(concept, changes), touched=touched)

    if difficulty == "split_node":
        splits, touched = {}, {}
        for a in affected:
            sel = _select(own[a], spec, rng)
            for path in sel:
                others = [c for c in concept.classes if c != a]
                other = others[int(rng.integers(len(others)))]
                splits[path] = _split_leaf(by_path[path], rng, _labels_with(rng, other, a))
            touched[a] = tuple(sel)
        return ConceptTransition(concept, _grow(concept, splits), touched=touched)

    # prune_* difficulties
    excluded = set(affected)
    changes, touched = {}, {}
    for a in affected:
        sel = _select(own[a], spec, rng)
        for path in sel:
            changes[path] = _prune_label(concept, path, a, excluded)
        touched[a] = tuple(sel)
    pruned = _relabel(concept, changes)

    if difficulty == "prune_regrowth_branch":
        start = spec.position
        return ConceptTransition(concept, concept, intermediate=pruned,
                                 reappear_window=(start, start + spec.reappear_width),
                                 touched=touched)

    if difficulty == "prune_growth_new_branch":
        taken = set(changes)
        splits = {}
        for a in affected:
            pool = [leaf for leaf in concept.leaves
                    if leaf.label not in excluded and leaf.path not in taken]
            chosen = _pick(pool, len(touched[a]), rng)
            for leaf in chosen:
                taken.add(leaf.path)
                splits[leaf.path] = _split_leaf(leaf, rng, _labels_with(rng, a, leaf.label))
            touched[a] = touched[a] + tuple(leaf.path for leaf in chosen)
        return ConceptTransition(concept, _grow(pruned, splits), touched=touched)

    raise ConfigurationError(f"unhandled random-tree difficulty {difficulty!r}")
