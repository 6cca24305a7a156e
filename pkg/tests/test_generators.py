import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import norm

from driftbench.generators import CATALOG, base_concept, make_transition
from driftbench.generators.rbf import Centroid, RbfConcept, rbf_base, rbf_sample, rbf_transform
from driftbench.generators.rt import (
    Leaf,
    RtConcept,
    Split,
    default_max_depth,
    rt_base,
    rt_sample,
    rt_transform,
)
from driftbench.stream import ConfigurationError, DriftSpec, DriftStream, GenerationError, StreamConfig

from invariants import check_prefix, check_transition, random_config


def rng(seed=0):
    return np.random.default_rng(seed)


def spec(category, difficulty, speed="sudden", affected=(0,), **kw):
    kw.setdefault("scope_fraction", 1.0 if category.endswith("global") else 0.5)
    kw.setdefault("width", 0 if speed == "sudden" else 1_000)
    return DriftSpec(category, difficulty, speed, affected_classes=affected, **kw)


class TestRbfBase:
    def test_counts(self):
        c = rbf_base(2, 2, 3, rng())
        assert [len(cs) for cs in c.centroids] == [3, 3]

    def test_deterministic(self):
        assert rbf_base(3, 5, 4, rng(7)) == rbf_base(3, 5, 4, rng(7))

    def test_ranges(self):
        c = rbf_base(10, 10, 4, rng(1))
        cs = [x for per in c.centroids for x in per]
        assert len(cs) == 40
        assert all(0 <= v <= 1 for x in cs for v in x.center)
        assert all(0.02 <= x.stddev <= 0.08 and 0.5 <= x.weight <= 1.5 for x in cs)

    def test_needs_two_per_class(self):
        with pytest.raises(ConfigurationError):
            rbf_base(3, 2, 1, rng())


class TestRbfSample:
    def test_zero_spread_returns_centre(self):
        c = RbfConcept(2, ((Centroid((0.3, 0.7), 1e-300, 1.0),), (Centroid((0.5, 0.5), 0.05, 1.0),)))
        assert np.array_equal(rbf_sample(c, 0, rng()).features, [0.3, 0.7])

    def test_weighted_choice(self):
        c = RbfConcept(1, ((Centroid((0.1,), 1e-300, 1.0), Centroid((0.9,), 1e-300, 3.0)),))
        g = rng(3)
        xs = np.array([c.sample(0, g)[0] for _ in range(8_000)])
        assert abs(np.mean(xs == 0.9) - 0.75) < 0.02

    def test_mean_of_clipped_gaussian(self):
        mu, sigma = np.array([0.03, 0.5]), 0.05
        c = RbfConcept(2, ((Centroid(tuple(mu), sigma, 1.0),),))
        g = rng(5)
        xs = np.array([c.sample(0, g) for _ in range(10_000)])
        a, b = (0 - mu) / sigma, (1 - mu) / sigma
        expected = mu * (norm.cdf(b) - norm.cdf(a)) + sigma * (norm.pdf(a) - norm.pdf(b)) + norm.sf(b)
        assert np.all(np.abs(xs.mean(axis=0) - expected) < 3 * sigma / math.sqrt(10_000))
        assert xs.min() >= 0 and xs.max() <= 1

    def test_absent_class(self):
        with pytest.raises(GenerationError):
            rbf_base(2, 2, 2, rng()).sample(5, rng())


class TestRbfTransforms:
    def test_moving_global_changes_exactly_k_centres(self):
        base = rbf_base(3, 2, 3, rng(1))
        tr = rbf_transform(base, "moving_cluster", spec("single_class_global", "moving_cluster"), rng(2))
        diff = sum(a.center != b.center for a, b in zip(base.centroids[0], tr.post.centroids[0]))
        assert diff == 3
        assert tr.post.centroids[1:] == base.centroids[1:]

    def test_swap_global_exchanges_positions(self):
        base = rbf_base(3, 2, 4, rng(1))
        s = spec("multi_class_global", "swap_cluster", affected=(0, 1))
        tr = rbf_transform(base, "swap_cluster", s, rng(2))
        centres = lambda c, k: {x.center for x in c.centroids[k]}  # noqa: E731
        assert centres(tr.post, 0) == centres(base, 1)
        assert centres(tr.post, 1) == centres(base, 0)
        assert tr.post.centroids[2] == base.centroids[2]

    def test_split_interpolation_is_linear(self):
        base = rbf_base(2, 3, 2, rng(4))
        s = spec("single_class_global", "splitting_cluster", "incremental")
        tr = rbf_transform(base, "splitting_cluster", s, rng(5))
        mid = tr.at(0.5)
        ends = tr.post.centroids[0]
        origin = [c for c in base.centroids[0] for _ in range(2)]
        for m, o, e in zip(mid.centroids[0], origin, ends):
            assert np.allclose(m.center, (np.array(o.center) + np.array(e.center)) / 2, atol=1e-12)
        for o, pair in zip(base.centroids[0], zip(ends[::2], ends[1::2])):
            gap = np.linalg.norm(np.subtract(pair[0].center, pair[1].center))
            assert gap <= 0.3 + 1e-12
            assert sum(p.weight for p in pair) == pytest.approx(o.weight)

    def test_merge_fuses_at_midpoint(self):
        base = rbf_base(2, 2, 2, rng(6))
        tr = rbf_transform(base, "merging_cluster", spec("single_class_global", "merging_cluster"), rng(7))
        (fused,) = tr.post.centroids[0]
        assert np.allclose(fused.center, np.mean([c.center for c in base.centroids[0]], axis=0))

    def test_emerging_adds_one_centroid(self):
        base = rbf_base(3, 2, 4, rng(1))
        s = spec("multi_class_local", "emerging_cluster", affected=(0, 2))
        tr = rbf_transform(base, "emerging_cluster", s, rng(2))
        assert [len(c) for c in tr.post.centroids] == [5, 4, 5]

    def test_reappearing_restores_pre(self):
        base = rbf_base(3, 2, 4, rng(1))
        tr = rbf_transform(base, "reappearing_cluster",
                           spec("single_class_local", "reappearing_cluster"), rng(2))
        assert tr.post is base
        assert len(tr.intermediate.centroids[0]) == 2
        assert tr.reappear_window == (10_000, 12_000)

    def test_class_emerging(self):
        base = rbf_base(3, 2, 4, rng(1))
        tr = rbf_transform(base, "class_emerging",
                           spec("single_class_global", "class_emerging", affected=(3,)), rng(2))
        assert tr.post.n_classes == 4 and tr.post.classes == (0, 1, 2, 3)
        assert len(tr.post.centroids[3]) == 4

    def test_class_emerging_requires_global(self):
        with pytest.raises(ConfigurationError):
            rbf_transform(rbf_base(3, 2, 4, rng()), "class_emerging",
                          spec("single_class_local", "class_emerging", affected=(3,)), rng())

    def test_speed_table_enforced(self):
        with pytest.raises(ConfigurationError):
            rbf_transform(rbf_base(3, 2, 4, rng()), "swap_cluster",
                          spec("multi_class_local", "swap_cluster", "incremental", affected=(0, 1)),
                          rng())

    def test_global_disappearance_of_every_class_rejected(self):
        s = spec("multi_class_global", "reappearing_cluster", affected=(0, 1))
        with pytest.raises(ConfigurationError):
            rbf_transform(rbf_base(2, 2, 3, rng()), "reappearing_cluster", s, rng())


def stump():
    return RtConcept(2, 2, Split(0, 0.5, Leaf(0), Leaf(1)))


class TestRtBase:
    def test_minimal_tree(self):
        c = rt_base(2, 3, 1, rng())
        assert isinstance(c.root, Split)
        assert {c.root.left.label, c.root.right.label} == {0, 1}

    @settings(max_examples=40, deadline=None)
    @given(n=st.sampled_from([2, 3, 5, 10]), d=st.sampled_from([2, 5, 10]), seed=st.integers(0, 2**32))
    def test_invariants(self, n, d, seed):
        c = rt_base(n, d, None, rng(seed))
        assert c.classes == tuple(range(n))
        assert c.depth() <= default_max_depth(n)
        for leaf in c.leaves:
            assert np.all(leaf.lower < leaf.upper)

    def test_every_class_reachable_by_uniform_sampling(self):
        c = rt_base(10, 2, None, rng(3))
        g = rng(4)
        labels = [rt_sample(c, g).label for _ in range(50_000)]
        assert set(labels) == set(range(10))

    def test_depth_bound_too_small(self):
        with pytest.raises(ConfigurationError):
            rt_base(5, 2, 2, rng())


class TestRtSample:
    def test_traversal(self):
        assert stump().label_of([0.2, 0.9]) == 0
        assert stump().label_of([0.7, 0.1]) == 1

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**32), cls=st.integers(0, 4))
    def test_label_matches_retraversal(self, seed, cls):
        c = rt_base(5, 3, None, rng(seed))
        g = rng(seed + 1)
        for _ in range(20):
            free = rt_sample(c, g)
            assert free.label == c.label_of(free.features)
            cond = rt_sample(c, g, cls)
            assert cond.label == cls == c.label_of(cond.features)

    def test_unreachable_class(self):
        with pytest.raises(GenerationError):
            rt_sample(stump(), rng(), 7)

    def test_conditional_is_uniform_within_class_region(self):
        # class 0 owns [0, 0.25] x [0, 1] and [0.25, 1] x [0, 0.5]: volumes 0.25 and 0.375
        c = RtConcept(2, 2, Split(0, 0.25, Leaf(0), Split(1, 0.5, Leaf(0), Leaf(1))))
        g = rng(2)
        xs = np.array([c.sample(0, g) for _ in range(20_000)])
        assert abs(np.mean(xs[:, 0] <= 0.25) - 0.4) < 0.015


class TestRtTransforms:
    def test_swap_global_relabels_regions(self):
        base = rt_base(3, 2, None, rng(8))
        tr = rt_transform(base, "swap_leaves", spec("multi_class_global", "swap_leaves", affected=(0, 1)), rng(9))
        g = rng(10)
        swap = {0: 1, 1: 0, 2: 2}
        for x in g.uniform(size=(2_000, 2)):
            assert tr.post.label_of(x) == swap[base.label_of(x)]

    def test_prune_regrowth_recurrence(self):
        base = rt_base(3, 2, None, rng(8))
        tr = rt_transform(base, "prune_regrowth_branch",
                          spec("single_class_global", "prune_regrowth_branch"), rng(9))
        assert tr.post == base
        assert 0 not in tr.intermediate.classes

    @pytest.mark.parametrize("affected", [(0,), (0, 1), (0, 1, 2)])
    def test_emerging_branch_adds_one_leaf_per_class(self, affected):
        base = rt_base(5, 2, None, rng(2))
        cat = "single_class_local" if len(affected) == 1 else "multi_class_local"
        tr = rt_transform(base, "emerging_branch", spec(cat, "emerging_branch", affected=affected), rng(3))
        assert len(tr.post.leaves) == len(base.leaves) + len(affected)

    def test_split_node_gives_two_classes(self):
        base = rt_base(3, 2, None, rng(2))
        tr = rt_transform(base, "split_node", spec("multi_class_global", "split_node", affected=(0, 1)), rng(3))
        for a, paths in tr.touched.items():
            for p in paths:
                node = tr.post.leaf_at(p)
                assert isinstance(node, Split) and a in (node.left.label, node.right.label)
                assert node.left.label != node.right.label

    def test_class_emerging(self):
        base = rt_base(3, 2, None, rng(2))
        tr = rt_transform(base, "class_emerging",
                          spec("single_class_global", "class_emerging", affected=(3,)), rng(3))
        assert tr.post.n_classes == 4 and 3 in tr.post.classes

    def test_incremental_rejected(self):
        with pytest.raises(ConfigurationError):
            rt_transform(rt_base(3, 2, None, rng()), "swap_leaves",
                         spec("multi_class_global", "swap_leaves", "incremental", affected=(0, 1)), rng())


def test_catalogue_covers_both_generators():
    assert {r.generator for r in CATALOG} == {"rbf", "rt"}
    assert all(r.speeds for r in CATALOG)
    with pytest.raises(ConfigurationError):
        make_transition("rt", None, spec("single_class_local", "moving_cluster"), rng())


def test_base_concept_honours_generator_params():
    cfg = StreamConfig("rbf", 3, 2, seed=1, k_per_class=6)
    assert len(base_concept(cfg, rng()).centroids[0]) == 6


def test_emerging_class_labels_appear_after_drift():
    s = spec("single_class_global", "class_emerging", affected=(3,), position=500)
    X, y = DriftStream(StreamConfig("rt", 3, 2, length=1_000, seed=4, drift=s)).to_arrays()
    assert y[:500].max() <= 2 and 3 in y[500:]


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_random_transitions_satisfy_structural_invariants(seed):
    check_transition(random_config(rng(seed)))


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_random_streams_are_prefix_invariant(seed):
    check_prefix(random_config(rng(seed)))
