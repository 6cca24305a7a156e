"""Random RBF / Random Tree generators and the benchmark difficulty catalogue."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from driftbench.generators import rbf, rt
from driftbench.generators.rbf import RbfConcept, rbf_base, rbf_sample, rbf_transform
from driftbench.generators.rt import RtConcept, rt_base, rt_sample, rt_transform
from driftbench.stream import (
    ConceptTransition,
    ConfigurationError,
    DriftCategory,
    DriftSpec,
    Speed,
    StreamConfig,
)

S, G, I = Speed.SUDDEN, Speed.GRADUAL, Speed.INCREMENTAL
SCL, SCG = DriftCategory.SINGLE_CLASS_LOCAL, DriftCategory.SINGLE_CLASS_GLOBAL
MCL, MCG = DriftCategory.MULTI_CLASS_LOCAL, DriftCategory.MULTI_CLASS_GLOBAL


@dataclass(frozen=True)
class Difficulty:
    generator: str
    category: DriftCategory
    name: str
    speeds: tuple[Speed, ...]


# Every (generator, category, transform) combination the benchmark uses, with
# its permitted speeds.  Splitting a subcluster of a single class globally is
# covered by splitting_cluster.
CATALOG: tuple[Difficulty, ...] = (
    Difficulty("rbf", SCL, "emerging_cluster", (S, G)),
    Difficulty("rbf", SCL, "reappearing_cluster", (S, G)),
    Difficulty("rbf", SCL, "splitting_cluster", (S, G, I)),
    Difficulty("rbf", SCL, "merging_cluster", (S, G, I)),
    Difficulty("rbf", SCL, "moving_cluster", (S, G, I)),
    Difficulty("rbf", SCG, "reappearing_cluster", (S, G)),
    Difficulty("rbf", SCG, "splitting_cluster", (S, G, I)),
    Difficulty("rbf", SCG, "merging_cluster", (S, G, I)),
    Difficulty("rbf", SCG, "moving_cluster", (S, G, I)),
    Difficulty("rbf", SCG, "class_emerging", (S, G)),
    Difficulty("rbf", MCL, "emerging_cluster", (S, G)),
    Difficulty("rbf", MCL, "reappearing_cluster", (S, G)),
    Difficulty("rbf", MCL, "splitting_cluster", (S, G, I)),
    Difficulty("rbf", MCL, "merging_cluster", (S, G, I)),
    Difficulty("rbf", MCL, "moving_cluster", (S, G, I)),
    Difficulty("rbf", MCL, "swap_cluster", (S, G)),
    Difficulty("rbf", MCG, "reappearing_cluster", (S, G)),
    Difficulty("rbf", MCG, "splitting_cluster", (S, G, I)),
    Difficulty("rbf", MCG, "merging_cluster", (S, G, I)),
    Difficulty("rbf", MCG, "moving_cluster", (S, G, I)),
    Difficulty("rbf", MCG, "swap_cluster", (S, G)),
    Difficulty("rt", SCL, "emerging_branch", (S, G)),
    Difficulty("rt", SCL, "prune_regrowth_branch", (S, G)),
    Difficulty("rt", SCL, "prune_growth_new_branch", (S, G)),
    Difficulty("rt", SCG, "prune_regrowth_branch", (S, G)),
    Difficulty("rt", SCG, "prune_growth_new_branch", (S, G)),
    Difficulty("rt", SCG, "class_emerging", (S, G)),
    Difficulty("rt", MCL, "emerging_branch", (S, G)),
    Difficulty("rt", MCL, "prune_regrowth_branch", (S, G)),
    Difficulty("rt", MCL, "prune_growth_new_branch", (S, G)),
    Difficulty("rt", MCL, "split_node", (S, G)),
    Difficulty("rt", MCL, "swap_leaves", (S, G)),
    Difficulty("rt", MCG, "prune_regrowth_branch", (S, G)),
    Difficulty("rt", MCG, "prune_growth_new_branch", (S, G)),
    Difficulty("rt", MCG, "split_node", (S, G)),
    Difficulty("rt", MCG, "swap_leaves", (S, G)),
)


def lookup(generator: str, category: DriftCategory, name: str) -> Difficulty:
    for row in CATALOG:
        if row.generator == generator and row.category is category and row.name == name:
            return row
    raise ConfigurationError(
        f"{name!r} is not a {category.value} difficulty of the {generator} generator")


def base_concept(config: StreamConfig, rng: np.random.Generator):
    if config.generator == "rbf":
        k = config.k_per_class or rbf.DEFAULT_K_PER_CLASS
        return rbf_base(config.n_classes, config.n_features, k, rng)
    return rt_base(config.n_classes, config.n_features, config.max_depth, rng)


def make_transition(generator: str, concept, spec: DriftSpec,
                    rng: np.random.Generator) -> ConceptTransition:
    row = lookup(generator, spec.category, spec.difficulty)
    if spec.speed not in row.speeds:
        raise ConfigurationError(
            f"{spec.difficulty} ({spec.category.value}) does not support {spec.speed.value} drift")
    if generator == "rbf":
        return rbf_transform(concept, spec.difficulty, spec, rng)
    return rt_transform(concept, spec.difficulty, spec, rng)


__all__ = [
    "CATALOG", "Difficulty", "RbfConcept", "RtConcept", "base_concept", "lookup",
    "make_transition", "rbf_base", "rbf_sample", "rbf_transform", "rt_base", "rt_sample",
    "rt_transform",
]
