import numpy as np
import pytest

from orgclust.clustering import Partition
from orgclust.costs import CostMatrix
from orgclust.histogram import build_histogram
from orgclust.learn import (
    AnnealConfig,
    LabeledDataset,
    anneal_pqap,
    classify_pairs,
    f1_of_joins,
    grid_search_threshold,
)
from orgclust.pqap import PqapParams, SolverConfig
from orgclust.synth import SyntheticSpec, generate_models

_FAST = SolverConfig(rotation_steps=8)


def small_dataset(seed=0, color_noise=0.0, position_noise=0.0):
    spec = SyntheticSpec(
        num_classes=2,
        images_per_class=3,
        points_min=4,
        points_max=6,
        color_noise_std=color_noise,
        position_noise_std=position_noise,
        rotation_grid_steps=8,
        rng_seed=seed,
    )
    models, labels = generate_models(spec)
    return LabeledDataset(tuple(models), Partition.from_labels(labels))


class TestClassifyPairs:
    def test_boundary_is_join(self):
        costs = CostMatrix(["a", "b", "c"], {("a", "b"): 0.0, ("a", "c"): -1e-9, ("b", "c"): 0.2})
        labels = classify_pairs(costs)
        assert labels[("a", "b")] is True
        assert labels[("a", "c")] is False
        assert labels[("b", "c")] is True


class TestF1OfJoins:
    def test_perfect(self):
        truth = Partition.from_sets([{"a", "b"}, {"c"}])
        labels = {("a", "b"): True, ("a", "c"): False, ("b", "c"): False}
        assert f1_of_joins(truth, labels) == pytest.approx(1.0)

    def test_undefined_maps_to_zero(self):
        truth = Partition.from_sets([{"a", "b"}, {"c"}])
        labels = {("a", "b"): False, ("a", "c"): False, ("b", "c"): False}
        assert f1_of_joins(truth, labels) == 0.0


class TestAnneal:
    def test_zero_spread_returns_init(self):
        data = small_dataset()
        init = PqapParams()
        cfg = AnnealConfig(kappa=0.0, t_max=10)
        result = anneal_pqap(data, init, cfg, _FAST)
        assert result.params == init
        assert len(result.trace) == 11

    def test_deterministic(self):
        data = small_dataset()
        cfg = AnnealConfig(t_max=15, rng_seed=3)
        a = anneal_pqap(data, PqapParams(), cfg, _FAST)
        b = anneal_pqap(data, PqapParams(), cfg, _FAST)
        assert a.params == b.params
        assert a.trace == b.trace

    def test_best_is_at_least_init(self):
        data = small_dataset(seed=5, color_noise=0.05, position_noise=0.02)
        init = PqapParams(delta=0.01, delta_p=0.01, delta_pp=0.01, delta_ppp=0.99)
        cfg = AnnealConfig(t_max=25, rng_seed=1)
        result = anneal_pqap(data, init, cfg, _FAST)
        evaluator_init = anneal_pqap(data, init, AnnealConfig(kappa=0.0, t_max=1), _FAST)
        assert result.best_f1 >= evaluator_init.best_f1 - 1e-12

    def test_noiseless_data_reaches_perfect_f1(self):
        data = small_dataset(seed=2)
        result = anneal_pqap(data, PqapParams(), AnnealConfig(t_max=5), _FAST)
        assert result.best_f1 == pytest.approx(1.0)

    def test_single_cluster_truth_rejected(self):
        spec = SyntheticSpec(num_classes=1, images_per_class=3, rotation_grid_steps=8)
        models, labels = generate_models(spec)
        data = LabeledDataset(tuple(models), Partition.from_labels(labels))
        with pytest.raises(ValueError, match="two clusters"):
            anneal_pqap(data, PqapParams(), AnnealConfig(t_max=2), _FAST)

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            AnnealConfig(beta=1.0)
        with pytest.raises(ValueError):
            AnnealConfig(t0=0.0)

    def test_save(self, tmp_path):
        data = small_dataset()
        result = anneal_pqap(data, PqapParams(), AnnealConfig(kappa=0.0, t_max=3), _FAST)
        out = tmp_path / "anneal.json"
        result.save(out)
        import json

        payload = json.loads(out.read_text())
        assert payload["best_f1"] == result.best_f1
        assert len(payload["trace"]) == 4
        assert payload["lambda"] == result.params.lam


class TestGridSearchThreshold:
    def test_separable_histograms(self):
        rng = np.random.default_rng(7)
        # Two tight color clusters: within-class distances far below
        # cross-class ones, so some threshold classifies perfectly.
        hists = {}
        labels = {}
        for c, base in enumerate(((0.2, 0.2, 0.2), (0.8, 0.8, 0.8))):
            for i in range(3):
                colors = np.clip(
                    np.array(base) + rng.normal(0, 0.01, size=(50, 3)), 0, 1
                )
                image_id = f"c{c}_i{i}"
                hists[image_id] = build_histogram(colors)
                labels[image_id] = f"c{c}"
        truth = Partition.from_labels(labels)
        threshold, f1 = grid_search_threshold(hists, truth)
        assert f1 == pytest.approx(1.0)
        assert 0.0 < threshold < 1.0

    def test_tie_prefers_smallest(self):
        # Identical histograms: every threshold <= some point yields the
        # same labeling, so the winner must be the smallest threshold.
        h = build_histogram([[0.5, 0.5, 0.5]])
        hists = {"a": h, "b": h}
        truth = Partition.from_sets([{"a", "b"}])
        threshold, f1 = grid_search_threshold(hists, truth)
        assert threshold == 0.0
        assert f1 == pytest.approx(1.0)

    def test_needs_two(self):
        with pytest.raises(ValueError):
            grid_search_threshold({"a": build_histogram([[0.5, 0.5, 0.5]])},
                                  Partition.from_sets([{"a"}]))
