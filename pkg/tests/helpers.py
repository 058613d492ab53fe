"""Shared oracles and generators for the test suite.

Everything here is deliberately naive: brute-force enumerations and
direct-formula evaluations that the fast implementations are checked
against.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from orgclust.clustering import Partition
from orgclust.costs import CostMatrix, pair_key
from orgclust.geometry import KeyPoint, OrganoidModel, SimilarityTransform, apply_transform
from orgclust.pqap import Assignment, PqapInstance


def random_model(rng, image_id, num_points=None, low=3, high=10):
    n = num_points if num_points is not None else int(rng.integers(low, high + 1))
    positions = rng.uniform(0.0, 500.0, size=(n, 2))
    colors = rng.uniform(0.0, 1.0, size=(n, 3))
    points = tuple(KeyPoint(positions[i], colors[i]) for i in range(n))
    return OrganoidModel(
        image_id,
        points,
        barycenter=rng.uniform(100.0, 400.0, size=2),
        extent=float(rng.uniform(50.0, 300.0)),
    )


def consistent_pair(rng, num_points, grid_steps, image_ids=("src", "tgt")):
    """Two models related by an exact similarity transform with a grid angle."""
    radii = rng.uniform(0.25, 1.0, size=num_points) * 100.0
    phis = rng.uniform(0.0, 2 * math.pi, size=num_points)
    proto = np.stack([radii * np.cos(phis), radii * np.sin(phis)], axis=1)
    colors = rng.uniform(0.0, 1.0, size=(num_points, 3))

    def instance(image_id):
        n = int(rng.integers(0, grid_steps))
        gamma = 2 * math.pi * n / grid_steps
        scale = float(rng.uniform(0.6, 1.5))
        center = rng.uniform(200.0, 800.0, size=2)
        t = SimilarityTransform(center, scale, gamma, np.zeros(2))
        points = tuple(
            KeyPoint(apply_transform(t, proto[i]), colors[i]) for i in range(num_points)
        )
        return OrganoidModel(image_id, points, center, scale * 100.0)

    return instance(image_ids[0]), instance(image_ids[1])


def naive_objective(instance: PqapInstance, x: Assignment) -> float:
    """Literal quadruple-loop evaluation: ordered quadratic sum halved."""
    p = instance.params
    x_map = {v: w for v, w in x.pairs}
    unary = sum(instance.unary_cost(v, w) for v, w in x.pairs)
    quad = 0.0
    for v, w in x.pairs:
        for v2, w2 in x.pairs:
            if v != v2 and w != w2:
                quad += instance.pairwise_cost(v, v2, w, w2)
    total = (1 - p.lam) / instance.n1 * unary
    if instance.n2 > 0:
        total += p.lam / instance.n2 * quad / 2.0
    return total


def brute_force_pqap(instance: PqapInstance):
    """Optimal assignment by enumerating every feasible partial assignment."""
    nj = len(instance.source.points)
    nk = len(instance.target.points)
    best_cost, best = 0.0, Assignment(frozenset(), nj, nk)
    for size in range(1, min(nj, nk) + 1):
        for sources in itertools.combinations(range(nj), size):
            for targets in itertools.permutations(range(nk), size):
                x = Assignment(frozenset(zip(sources, targets)), nj, nk)
                cost = instance.objective(x)
                if cost < best_cost:
                    best_cost, best = cost, x
    return best, best_cost


def all_partitions(items):
    """Every set partition of `items` (Bell-number many)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partial in all_partitions(rest):
        for i in range(len(partial)):
            yield partial[:i] + [partial[i] + [first]] + partial[i + 1 :]
        yield partial + [[first]]


def brute_force_clustering(q: CostMatrix):
    """Optimal partition by enumerating all partitions of the id set."""
    ids = sorted(q.ids)
    best_cost, best = math.inf, None
    for clusters in all_partitions(ids):
        label = {}
        for idx, cluster in enumerate(clusters):
            for e in cluster:
                label[e] = idx
        cost = sum(c for (a, b), c in sorted(q.costs.items()) if label[a] != label[b])
        if cost < best_cost:
            best_cost, best = cost, clusters
    return Partition.from_sets([set(c) for c in best]), best_cost


def random_cost_matrix(rng, n, low=-1.0, high=1.0) -> CostMatrix:
    ids = [f"i{k:02d}" for k in range(n)]
    costs = {
        pair_key(a, b): float(rng.uniform(low, high))
        for i, a in enumerate(ids)
        for b in ids[i + 1 :]
    }
    return CostMatrix(ids, costs)


def random_partition(rng, n, max_clusters=4) -> Partition:
    ids = [f"e{k:02d}" for k in range(n)]
    labels = rng.integers(0, max_clusters, size=n)
    return Partition.from_labels({ids[k]: f"c{labels[k]}" for k in range(n)})


def vi_oracle(truth: Partition, pred: Partition):
    """Joint-distribution entropies computed element by element."""
    elements = sorted(truth.ground_set)
    n = len(elements)
    t_label = truth.label_of()
    p_label = pred.label_of()
    joint: dict[tuple[int, int], int] = {}
    for e in elements:
        key = (t_label[e], p_label[e])
        joint[key] = joint.get(key, 0) + 1
    t_marginal: dict[int, int] = {}
    p_marginal: dict[int, int] = {}
    for (t, p), c in joint.items():
        t_marginal[t] = t_marginal.get(t, 0) + c
        p_marginal[p] = p_marginal.get(p, 0) + c
    h_joint = -sum(c / n * math.log2(c / n) for c in joint.values())
    h_t = -sum(c / n * math.log2(c / n) for c in t_marginal.values())
    h_p = -sum(c / n * math.log2(c / n) for c in p_marginal.values())
    return {"VI": 2 * h_joint - h_t - h_p, "VI_C": h_joint - h_t, "VI_J": h_joint - h_p}


def rand_index_oracle(truth: Partition, pred: Partition) -> float:
    """Agreement fraction over unordered pairs, counted pair by pair."""
    elements = sorted(truth.ground_set)
    t_label = truth.label_of()
    p_label = pred.label_of()
    agree = total = 0
    for a, b in itertools.combinations(elements, 2):
        total += 1
        if (t_label[a] == t_label[b]) == (p_label[a] == p_label[b]):
            agree += 1
    return agree / total
