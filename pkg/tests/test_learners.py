import copy
import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from driftbench.detectors import DriftDetector, Status
from driftbench.learners import (
    AdaptiveHoeffdingTree,
    DriftRetrainedTree,
    HoeffdingTree,
    hoeffding_bound,
    make_learner,
    prequential_run,
    windowed_accuracy,
)
from driftbench.learners.hoeffding import LeafNode, SplitNode, entropy, split_candidates
from driftbench.stream import StreamConfig, generate


@dataclasses.dataclass(eq=False)
class Scripted(DriftDetector):
    """Emits a fixed status at chosen update indices, Stable otherwise."""

    name = "scripted"
    script: dict = dataclasses.field(default_factory=dict)

    def reset(self) -> None:
        self.n = 0

    def _step(self, e):
        self.n += 1
        return self.script.get(self.n, Status.STABLE)


def quadrants(n, seed, cuts=(0.5,)):
    rng = np.random.default_rng(seed)
    X = rng.uniform(size=(n, 2))
    y = (np.searchsorted(cuts, X[:, 0]) * (len(cuts) + 1) + np.searchsorted(cuts, X[:, 1]))
    return X, y.astype(int)


def leaf(counts, n_features=1):
    node = LeafNode(n_features, len(counts))
    node.counts[:] = counts
    return node


def test_hoeffding_bound_example():
    assert hoeffding_bound(1.0, 1e-7, 200) == pytest.approx(math.sqrt(math.log(1e7) / 400))
    assert hoeffding_bound(1.0, 1e-7, 200) == pytest.approx(0.20074, abs=1e-5)


def test_entropy():
    assert entropy(np.array([5.0, 5.0])) == pytest.approx(1.0)
    assert entropy(np.array([4.0, 0.0])) == 0.0


class TestPredict:
    def test_fresh_model_predicts_zero(self):
        assert HoeffdingTree(3).predict([0.1, 0.2, 0.3]) == 0

    def test_argmax(self):
        assert leaf([3, 7]).predict() == 1

    def test_ties_go_to_lowest_class(self):
        assert leaf([5, 5]).predict() == 0

    def test_wrong_feature_count(self):
        with pytest.raises(ValueError):
            HoeffdingTree(3).predict([0.1, 0.2])


class TestLearn:
    def test_no_check_before_grace_period(self):
        X, y = quadrants(199, 0)
        t = HoeffdingTree(2)
        for xi, yi in zip(X, y):
            t.learn(xi, yi)
        assert isinstance(t.root, LeafNode) and t.root.weight_at_check == 0

    def test_separable_split(self):
        rng = np.random.default_rng(1)
        X = rng.uniform(size=(5_000, 2))
        y = (X[:, 0] >= 0.5).astype(int)
        t = HoeffdingTree(2)
        for xi, yi in zip(X, y):
            t.learn(xi, yi)
        assert isinstance(t.root, SplitNode) and t.root.feature == 0
        assert 0.4 < t.root.threshold < 0.6

    def test_candidates_include_null_split(self):
        X, y = quadrants(300, 2)
        node = LeafNode(2, 4)
        for xi, yi in zip(X, y):
            node.learn(xi, yi)
        cands = split_candidates(node)
        assert any(c.feature is None and c.merit == 0 for c in cands)
        for c in cands:
            if c.feature is not None:
                assert c.left.sum() + c.right.sum() == pytest.approx(node.counts.sum())

    def test_gaussian_estimator_matches_numpy(self):
        X, y = quadrants(400, 3)
        node = LeafNode(2, 4)
        for xi, yi in zip(X, y):
            node.learn(xi, yi)
        for c in range(4):
            rows = X[y == c]
            assert node.mean[c] == pytest.approx(rows.mean(axis=0))
            assert node.m2[c] / node.counts[c] == pytest.approx(rows.var(axis=0))
            assert np.allclose(node.lo[c], rows.min(axis=0)) and np.allclose(node.hi[c], rows.max(axis=0))

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**32))
    def test_tree_only_grows(self, seed):
        X, y = quadrants(1_500, seed, cuts=(0.3, 0.7))
        t = HoeffdingTree(2, grace_period=50)
        leaves = 1
        for xi, yi in zip(X, y):
            t.learn(xi, yi)
            assert t.n_leaves >= leaves
            leaves = t.n_leaves
        assert all((n.counts >= 0).all() for n, _ in t.nodes() if isinstance(n, LeafNode))


def test_prequential_is_test_then_train():
    X, y = quadrants(2_000, 4)
    res = prequential_run(X, y, HoeffdingTree(2), window=100)
    shadow, bits = HoeffdingTree(2), []
    for xi, yi in zip(X, y):
        bits.append(shadow.predict(xi) == yi)
        shadow.learn(xi, yi)
    assert res.correct.tolist() == [int(b) for b in bits]
    assert res.accuracy == pytest.approx(np.mean(bits))
    assert np.array_equal(res.errors, 1 - res.correct)
    assert res.times.tolist() == list(range(100, 2_001, 100))


class ConstantZero:
    def step(self, x, y):
        return 0


def test_constant_learner_on_constant_stream():
    assert prequential_run(np.zeros((50, 2)), np.zeros(50), ConstantZero(), window=7).accuracy == 1.0


@settings(max_examples=50, deadline=None)
@given(bits=st.lists(st.integers(0, 1), max_size=300), window=st.integers(1, 50))
def test_windowed_accuracy(bits, window):
    times, acc = windowed_accuracy(np.array(bits, dtype=np.uint8), window)
    assert len(times) == len(bits) // window
    for t, a in zip(times, acc):
        assert a == pytest.approx(np.mean(bits[t - window : t]))


def test_window_must_be_positive():
    with pytest.raises(ValueError):
        prequential_run(np.zeros((3, 1)), np.zeros(3), ConstantZero(), window=0)


def test_stationary_rbf_accuracy():
    accs = []
    for seed in range(10):
        X, y = generate(StreamConfig("rbf", 3, 5, length=20_000, seed=seed))
        accs.append(prequential_run(X, y, HoeffdingTree(5)).accuracy)
    assert min(accs) > 1 / 3 and np.mean(accs) >= 1 / 3 + 0.3


def test_prequential_determinism():
    X, y = generate(StreamConfig("rt", 3, 2, length=3_000, seed=2))
    a = prequential_run(X, y, make_learner("aht", 2))
    b = prequential_run(X, y, make_learner("aht", 2))
    assert np.array_equal(a.window_accuracy, b.window_accuracy)


@settings(max_examples=8, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_wrappers_transparent_when_disabled(seed):
    X, y = quadrants(2_500, seed, cuts=(0.3, 0.7))
    runs = [prequential_run(X, y, m).correct for m in (
        HoeffdingTree(2, grace_period=50),
        AdaptiveHoeffdingTree(2, detector_factory=None, grace_period=50),
        DriftRetrainedTree(2, enabled=False, grace_period=50),
        DriftRetrainedTree(2, detector=Scripted(), grace_period=50),
        AdaptiveHoeffdingTree(2, detector_factory=Scripted, grace_period=50),
    )]
    assert all(np.array_equal(runs[0], r) for r in runs[1:])


class TestDriftRetrained:
    def test_drift_swaps_in_background(self):
        X, y = quadrants(3_000, 5)
        warn, drift = 1_000, 1_500
        script = {warn: Status.WARNING, drift: Status.DRIFT}
        model = DriftRetrainedTree(2, detector=Scripted(script=script), grace_period=50)
        for xi, yi in zip(X[:drift], y[:drift]):
            model.step(xi, yi)
        oracle = HoeffdingTree(2, grace_period=50)
        for xi, yi in zip(X[warn - 1 : drift], y[warn - 1 : drift]):
            oracle.learn(xi, yi)
        probe = np.random.default_rng(0).uniform(size=(500, 2))
        assert [model.predict(p) for p in probe] == [oracle.predict(p) for p in probe]
        assert model.background is None and model.n_drifts == 1 and model.n_warnings == 1

    def test_drift_without_warning_gives_fresh_tree(self):
        X = np.random.default_rng(6).uniform(size=(1_000, 2))
        y = (X[:, 0] > 0.5).astype(int)
        model = DriftRetrainedTree(2, detector=Scripted(script={900: Status.DRIFT}), grace_period=50)
        for xi, yi in zip(X[:899], y[:899]):
            model.step(xi, yi)
        assert model.foreground.n_splits > 0
        model.step(X[899], y[899])
        assert model.foreground.n_leaves == 1 and model.foreground.root.weight == 1

    def test_default_detector_is_adwin(self):
        assert make_learner("ht-dw", 2).detector.name == "adwin"


def walk(node, path=""):
    yield path, node
    if isinstance(node, SplitNode):
        yield from walk(node.left, path + "L")
        yield from walk(node.right, path + "R")


def grown_aht(seed=7):
    X = np.random.default_rng(seed).uniform(size=(6_000, 2))
    y = (8 * X[:, 0]).astype(int)
    tree = AdaptiveHoeffdingTree(2, detector_factory=Scripted, grace_period=50)
    for xi, yi in zip(X, y):
        tree.step(xi, yi)
    return tree


class TestAdaptive:
    def test_root_drift_resets_to_leaf(self):
        tree = grown_aht()
        assert isinstance(tree.root, SplitNode)
        tree.root.detector.script = {tree.root.detector.n + 1: Status.DRIFT}
        tree.step([0.3, 0.9], 2)
        assert isinstance(tree.root, LeafNode)
        assert tree.root.counts[2] == 1 and tree.root.weight == 1
        assert tree.n_replacements == 1

    def test_depth_two_replacement_leaves_the_rest_intact(self):
        tree = grown_aht()
        target_path, target = next((p, n) for p, n in walk(tree.root)
                                   if len(p) == 2 and isinstance(n, SplitNode))
        # pick a point routed through the target
        rng = np.random.default_rng(1)
        x = next(p for p in rng.uniform(size=(10_000, 2))
                 if target in tree.route(p)[0])
        target.detector.script = {target.detector.n + 1: Status.DRIFT}
        before = dict(walk(copy.deepcopy(tree).root))
        tree.step(x, 1)
        after = dict(walk(tree.root))
        assert isinstance(after[target_path], LeafNode) and after[target_path].weight == 1
        for path, old in before.items():
            if path.startswith(target_path) or target_path.startswith(path):
                continue
            new = after[path]
            assert type(new) is type(old)
            if isinstance(old, LeafNode):
                for attr in ("counts", "mean", "m2", "lo", "hi"):
                    assert np.array_equal(getattr(old, attr), getattr(new, attr))
                assert old.weight_at_check == new.weight_at_check
            else:
                assert (old.feature, old.threshold, old.detector.n) == (new.feature, new.threshold, new.detector.n)

    def test_decrease_in_error_does_not_prune(self):
        tree = AdaptiveHoeffdingTree(2, grace_period=50)
        X, y = quadrants(4_000, 8)
        for xi, yi in zip(X, y):
            tree.step(xi, yi)
        assert tree.n_replacements == 0


def test_make_learner():
    assert isinstance(make_learner("HT", 2), HoeffdingTree)
    assert isinstance(make_learner("aht", 2), AdaptiveHoeffdingTree)
    with pytest.raises(KeyError):
        make_learner("svm", 2)
