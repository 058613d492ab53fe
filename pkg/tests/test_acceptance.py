"""Acceptance suite: one test (and one pass/fail line) per criterion.

Every criterion prints "[criterion N] PASS" on success; a failing
criterion fails its test, which pytest reports as the corresponding FAIL
line.  Runtime budgets are asserted inside the tests.
"""

import math
import time

import numpy as np
import pytest

from helpers import (
    brute_force_clustering,
    random_cost_matrix,
    random_partition,
    rand_index_oracle,
    vi_oracle,
    consistent_pair,
)
from orgclust.clustering import Partition, partition_to_cuts, solve_exact, solve_heuristic
from orgclust.costs import pair_key
from orgclust.geometry import inter_point_angle, relative_radius
from orgclust.histogram import build_histogram, hellinger, hellinger_cost_matrix
from orgclust.learn import (
    AnnealConfig,
    LabeledDataset,
    anneal_pqap,
    classify_pairs,
    f1_of_joins,
)
from orgclust.metrics import (
    pair_confusion,
    scores,
    variation_of_information,
)
from orgclust.pipeline import build_costs, cluster_costs, run_pipeline, shift_sweep
from orgclust.pqap import (
    Assignment,
    PqapInstance,
    PqapParams,
    SolverConfig,
    normalize,
    solve_local,
)
from orgclust.synth import SyntheticSpec, generate_models, generate_synthetic


def _report(number: int) -> None:
    print(f"[criterion {number}] PASS")


def test_criterion_01_consistent_pairs_full_assignment_phi_one():
    """100 geometrically consistent pairs: full assignment, d'/d'' < 1e-9, phi = 1."""
    rng = np.random.default_rng(42)
    params = PqapParams()
    grid = 15
    cfg = SolverConfig(rotation_steps=grid)
    start = time.monotonic()
    for _ in range(100):
        num_points = int(rng.integers(5, 11))
        src, tgt = consistent_pair(rng, num_points, grid_steps=grid)
        x_fwd, cost_fwd = solve_local(PqapInstance(src, tgt, params), cfg)
        x_bwd, cost_bwd = solve_local(PqapInstance(tgt, src, params), cfg)
        assert len(x_fwd.pairs) == num_points

        for v, w in x_fwd.pairs:
            d_p = abs(
                relative_radius(src.points[v], src) - relative_radius(tgt.points[w], tgt)
            )
            assert d_p < 1e-9
        for v, w in x_fwd.pairs:
            for v2, w2 in x_fwd.pairs:
                if v < v2:
                    d_pp = abs(
                        inter_point_angle(src.points[v], src.points[v2], src)
                        - inter_point_angle(tgt.points[w], tgt.points[w2], tgt)
                    )
                    assert d_pp < 1e-9

        phi = normalize(cost_fwd, cost_bwd, params)
        assert phi == pytest.approx(1.0, abs=1e-6)
    assert time.monotonic() - start < 10.0
    _report(1)


def test_criterion_02_cost_bound_on_random_instances():
    """1,000 random instances: objective in [-denominator, 0], phi in [0, 1]."""
    rng = np.random.default_rng(43)
    cfg = SolverConfig(rotation_steps=6)
    start = time.monotonic()
    for _ in range(1000):
        params = PqapParams(
            delta=float(rng.uniform(0.0, 2.0)),
            delta_p=float(rng.uniform(0.0, 2.0)),
            delta_pp=float(rng.uniform(0.0, 2.0)),
            theta=float(rng.uniform(0.01, 0.99)),
            lam=float(rng.uniform(0.01, 0.99)),
        )
        if params.normalization() <= 0.0:
            continue
        nj, nk = int(rng.integers(3, 31)), int(rng.integers(3, 31))
        positions = rng.uniform(0.0, 500.0, size=(nj + nk, 2))
        colors = rng.uniform(0.0, 1.0, size=(nj + nk, 3))
        from orgclust.geometry import KeyPoint, OrganoidModel

        src = OrganoidModel(
            "j",
            tuple(KeyPoint(positions[i], colors[i]) for i in range(nj)),
            rng.uniform(100, 400, 2),
            float(rng.uniform(50, 300)),
        )
        tgt = OrganoidModel(
            "k",
            tuple(KeyPoint(positions[nj + i], colors[nj + i]) for i in range(nk)),
            rng.uniform(100, 400, 2),
            float(rng.uniform(50, 300)),
        )
        inst = PqapInstance(src, tgt, params)
        assert inst.objective(Assignment(frozenset(), nj, nk)) == 0.0
        x_fwd, cost_fwd = solve_local(inst, cfg)
        x_bwd, cost_bwd = solve_local(PqapInstance(tgt, src, params), cfg)
        bound = params.normalization()
        assert -bound - 1e-9 <= cost_fwd <= 0.0
        assert -bound - 1e-9 <= cost_bwd <= 0.0
        phi = normalize(cost_fwd, cost_bwd, params)
        assert -1e-9 <= phi <= 1.0 + 1e-9
    assert time.monotonic() - start < 60.0
    _report(2)


def test_criterion_03_clustering_oracle_equivalence():
    """200 random instances |J| <= 8: exact == brute force; heuristic >= 95% match."""
    rng = np.random.default_rng(44)
    start = time.monotonic()
    matches = 0
    total = 200
    for _ in range(total):
        q = random_cost_matrix(rng, int(rng.integers(3, 9)))
        _, exact_obj = solve_exact(q)
        _, brute_obj = brute_force_clustering(q)
        assert exact_obj == brute_obj or abs(exact_obj - brute_obj) == 0.0
        _, heur_obj = solve_heuristic(q)
        assert heur_obj >= exact_obj
        if heur_obj == exact_obj:
            matches += 1
    assert matches / total >= 0.95
    assert time.monotonic() - start < 120.0
    _report(3)


def test_criterion_04_transitivity_of_all_outputs():
    """Every output partition satisfies all triangle inequalities, |J| <= 20."""
    rng = np.random.default_rng(45)
    for n in range(3, 21):
        q = random_cost_matrix(rng, n)
        partition, _ = solve_heuristic(q)
        assert partition_to_cuts(partition).is_transitive()
        if n <= 10:
            partition, _ = solve_exact(q)
            assert partition_to_cuts(partition).is_transitive()
    _report(4)


def test_criterion_05_metrics_oracle():
    """VI = VI_C + VI_J; VI and RI match oracles; RI = ACC; '-' for no-join truth."""
    rng = np.random.default_rng(46)
    for _ in range(100):
        n = int(rng.integers(4, 12))
        truth = random_partition(rng, n)
        pred = random_partition(rng, n)
        vi = variation_of_information(truth, pred)
        assert vi["VI"] == pytest.approx(vi["VI_C"] + vi["VI_J"], abs=1e-12)
        want = vi_oracle(truth, pred)
        assert vi["VI"] == pytest.approx(want["VI"], abs=1e-12)
        assert vi["VI_C"] == pytest.approx(want["VI_C"], abs=1e-12)
        assert vi["VI_J"] == pytest.approx(want["VI_J"], abs=1e-12)
        s = scores(pair_confusion(truth, pred))
        assert s["RI"] == s["ACC"]
        assert s["RI"] == pytest.approx(rand_index_oracle(truth, pred), abs=1e-12)
    no_joins = Partition.singletons(["a", "b", "c"])
    s = scores(pair_confusion(no_joins, no_joins))
    assert s["RJ"] is None
    _report(5)


def test_criterion_06_planted_partition_end_to_end(tmp_path):
    """5 classes x 8 images with noise: costs + annealing + exact -> RI >= 0.95."""
    start = time.monotonic()
    spec = SyntheticSpec(
        num_classes=5,
        images_per_class=8,
        points_min=5,
        points_max=10,
        color_noise_std=0.05,
        position_noise_std=0.02,
        rotation_grid_steps=8,
        rng_seed=42,
    )
    manifest = generate_synthetic(spec, tmp_path / "planted")
    truth = manifest.truth_partition()
    solver = SolverConfig(rotation_steps=8)

    data = LabeledDataset(tuple(manifest.load_models()), truth)
    result = anneal_pqap(
        data, PqapParams(), AnnealConfig(t_max=40, rng_seed=7), solver
    )
    costs = build_costs(manifest, "pqap", result.params, solver)
    partition, _ = cluster_costs(costs, "exact", exact_limit=40)
    ri = scores(pair_confusion(truth, partition))["RI"]
    assert ri >= 0.95
    assert time.monotonic() - start < 600.0
    _report(6)


def test_criterion_07_annealing_contract():
    """Best-F1 non-decreasing, bit-identical reruns, kappa=0 degenerate case."""
    spec = SyntheticSpec(
        num_classes=2,
        images_per_class=3,
        points_min=4,
        points_max=6,
        color_noise_std=0.08,
        position_noise_std=0.03,
        rotation_grid_steps=8,
        rng_seed=1,
    )
    models, labels = generate_models(spec)
    data = LabeledDataset(tuple(models), Partition.from_labels(labels))
    solver = SolverConfig(rotation_steps=8)
    cfg = AnnealConfig(t_max=30, rng_seed=5)

    a = anneal_pqap(data, PqapParams(), cfg, solver)
    best_so_far = -1.0
    running = []
    for _, current_f1, _ in a.trace:
        best_so_far = max(best_so_far, current_f1)
        running.append(best_so_far)
    assert all(x <= y for x, y in zip(running, running[1:]))
    assert running[-1] == a.best_f1

    b = anneal_pqap(data, PqapParams(), cfg, solver)
    assert a.params == b.params
    assert a.trace == b.trace

    init = PqapParams(delta=0.3, delta_p=0.1, delta_pp=0.4, theta=0.6, lam=0.4)
    frozen = anneal_pqap(data, init, AnnealConfig(kappa=0.0, t_max=10), solver)
    assert frozen.params == init
    _report(7)


def test_criterion_08_hellinger_metric_and_grid_search():
    """Metric properties on 100 triples; verified global grid maximum; boundary."""
    rng = np.random.default_rng(47)
    for _ in range(100):
        a = build_histogram(rng.uniform(0, 1, size=(40, 3)))
        b = build_histogram(rng.uniform(0, 1, size=(40, 3)))
        c = build_histogram(rng.uniform(0, 1, size=(40, 3)))
        assert hellinger(a, b) == hellinger(b, a)
        assert hellinger(a, c) <= hellinger(a, b) + hellinger(b, c) + 1e-9

    hists = {}
    labels = {}
    for cls, base in enumerate(((0.2, 0.3, 0.4), (0.7, 0.8, 0.6))):
        for i in range(4):
            colors = np.clip(np.array(base) + rng.normal(0, 0.03, size=(60, 3)), 0, 1)
            image_id = f"c{cls}_i{i}"
            hists[image_id] = build_histogram(colors)
            labels[image_id] = f"c{cls}"
    truth = Partition.from_labels(labels)

    from orgclust.learn import grid_search_threshold

    threshold, best_f1 = grid_search_threshold(hists, truth, grid_steps=100)
    ids = sorted(hists)
    distances = {
        pair_key(x, y): hellinger(hists[x], hists[y])
        for i, x in enumerate(ids)
        for y in ids[i + 1 :]
    }
    for n in range(101):
        candidate = n / 100
        labels_at = {key: d <= 1.0 - candidate for key, d in distances.items()}
        assert f1_of_joins(truth, labels_at) <= best_f1 + 1e-12

    for delta_ppp in (0.1, threshold, 0.9):
        cm = hellinger_cost_matrix(hists, delta_ppp)
        for key, join in classify_pairs(cm).items():
            assert join == (distances[key] <= 1.0 - delta_ppp)
    _report(8)


def test_criterion_09_shift_sweep_endpoints(tmp_path):
    """chi = 0 matches run_pipeline; extreme chi gives one cluster / singletons."""
    spec = SyntheticSpec(
        num_classes=2,
        images_per_class=3,
        points_min=4,
        points_max=6,
        rotation_grid_steps=8,
        rng_seed=19,
    )
    manifest = generate_synthetic(spec, tmp_path / "sweep")
    truth = manifest.truth_partition()
    solver = SolverConfig(rotation_steps=8)
    result = run_pipeline(manifest, solver_config=solver, solver="exact")

    scaled = result.costs.scaled_to_unit()
    at_zero, _ = cluster_costs(scaled, "exact")
    assert at_zero == result.partition

    single, _ = cluster_costs(scaled.shifted(2.5), "exact")
    assert single == Partition.from_sets([set(result.costs.ids)])
    singles, _ = cluster_costs(scaled.shifted(-2.5), "exact")
    assert singles == Partition.singletons(result.costs.ids)

    table = dict(shift_sweep(result.costs, truth, [-2.5, 0.0, 2.5], solver="exact"))
    h_truth = variation_of_information(truth, Partition.from_sets([truth.ground_set]))[
        "VI"
    ]
    assert table[0.0] == pytest.approx(
        variation_of_information(truth, result.partition)["VI"], abs=1e-12
    )
    assert table[2.5] == pytest.approx(h_truth, abs=1e-12)
    assert table[-2.5] == pytest.approx(
        variation_of_information(truth, singles)["VI"], abs=1e-12
    )
    _report(9)
