"""Partitions, cut vectors and correlation clustering solvers.

A partition of the image collection is encoded by a 0/1 cut indicator per
unordered pair (1 = distinct clusters), constrained by the triangle
inequalities y_jl <= y_jk + y_kl.  The objective is the sum of costs over
cut pairs: positive costs reward joining, negative costs reward cutting.
The number of clusters is not constrained; it emerges from the solution.

solve_exact is a branch and bound over per-element cluster assignments with
the bound "cost so far + sum of remaining negative costs", seeded with the
heuristic solution as incumbent.  solve_heuristic is greedy agglomeration
followed by single-element relocation and cluster-merge moves.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from pathlib import Path

from .costs import CostMatrix, pair_key


class SolverSizeError(RuntimeError):
    """Instance exceeds the configured exact-solver limit."""


@dataclass(frozen=True)
class Partition:
    """Disjoint non-empty clusters covering the ground set."""

    clusters: tuple[frozenset[str], ...]

    def __post_init__(self):
        clusters = tuple(frozenset(c) for c in self.clusters)
        if any(not c for c in clusters):
            raise ValueError("empty cluster")
        flat = [e for c in clusters for e in c]
        if len(flat) != len(set(flat)):
            raise ValueError("clusters are not disjoint")
        object.__setattr__(self, "clusters", clusters)

    @classmethod
    def from_sets(cls, clusters) -> "Partition":
        return cls(tuple(frozenset(c) for c in clusters))

    @classmethod
    def from_labels(cls, labels: dict[str, str]) -> "Partition":
        by_label: dict[str, set[str]] = {}
        for element, label in labels.items():
            by_label.setdefault(label, set()).add(element)
        return cls.from_sets(by_label.values())

    @classmethod
    def singletons(cls, ids) -> "Partition":
        return cls.from_sets([{i} for i in ids])

    @property
    def ground_set(self) -> frozenset[str]:
        return frozenset(e for c in self.clusters for e in c)

    def canonical(self) -> list[list[str]]:
        """Clusters sorted by smallest member id, members sorted."""
        return sorted((sorted(c) for c in self.clusters), key=lambda c: c[0])

    def label_of(self) -> dict[str, int]:
        return {e: i for i, c in enumerate(self.canonical()) for e in c}

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and set(self.clusters) == set(other.clusters)

    def __hash__(self) -> int:
        return hash(frozenset(self.clusters))

    def save(self, path: str | Path, objective: float) -> None:
        payload = {"objective": objective, "clusters": self.canonical()}
        Path(path).write_text(json.dumps(payload, indent=1))

    @classmethod
    def load(cls, path: str | Path) -> tuple["Partition", float]:
        data = json.loads(Path(path).read_text())
        return cls.from_sets(data["clusters"]), float(data["objective"])


@dataclass
class CutVector:
    """0/1 indicator per unordered pair; 1 means the pair is cut."""

    ids: list[str]
    cut: dict[tuple[str, str], int]

    def is_transitive(self) -> bool:
        n = len(self.ids)
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    a, b, c = self.ids[i], self.ids[j], self.ids[k]
                    y_ab = self.cut[pair_key(a, b)]
                    y_ac = self.cut[pair_key(a, c)]
                    y_bc = self.cut[pair_key(b, c)]
                    if y_ac > y_ab + y_bc or y_ab > y_ac + y_bc or y_bc > y_ab + y_ac:
                        return False
        return True


def partition_to_cuts(p: Partition) -> CutVector:
    """1 exactly for cross-cluster pairs; transitive by construction."""
    label = {}
    for idx, cluster in enumerate(p.clusters):
        for e in cluster:
            label[e] = idx
    ids = sorted(p.ground_set)
    cut = {}
    for i, a in enumerate(ids):
        for b in ids[i + 1 :]:
            cut[pair_key(a, b)] = 0 if label[a] == label[b] else 1
    return CutVector(ids, cut)


def cuts_to_partition(y: CutVector) -> Partition:
    """Connected components of the join (y=0) graph; fails if y is not transitive."""
    parent = {i: i for i in y.ids}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for (a, b), v in y.cut.items():
        if v == 0:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    clusters: dict[str, set[str]] = {}
    for i in y.ids:
        clusters.setdefault(find(i), set()).add(i)
    partition = Partition.from_sets(clusters.values())
    if partition_to_cuts(partition).cut != y.cut:
        raise ValueError("not a partition encoding")
    return partition


def cc_objective(q: CostMatrix, p: Partition) -> float:
    """Sum of costs over pairs in distinct clusters."""
    if p.ground_set != frozenset(q.ids):
        raise ValueError("partition ground set does not match cost matrix ids")
    label = p.label_of()
    return sum(c for (a, b), c in q.costs.items() if label[a] != label[b])


def _tie_break_key(clusters: list[list[int]], ids: list[str]) -> tuple:
    """Prefer lexicographically largest sorted size sequence, then smallest canonical form."""
    sizes = tuple(sorted((len(c) for c in clusters), reverse=True))
    canonical = tuple(
        tuple(sorted(ids[e] for e in c)) for c in sorted(clusters, key=lambda c: min(c))
    )
    return (tuple(-s for s in sizes), canonical)


def solve_exact(q: CostMatrix, exact_limit: int = 16) -> tuple[Partition, float]:
    """Globally optimal partition by branch and bound.

    Ties are broken toward the partition whose sorted cluster-size sequence
    is lexicographically largest, then by smallest canonical representation.
    """
    ids = sorted(q.ids)
    n = len(ids)
    if n > exact_limit:
        raise SolverSizeError(
            f"{n} ids exceed the exact limit {exact_limit}; use solve_heuristic"
        )
    qm = [[0.0] * n for _ in range(n)]
    for i, a in enumerate(ids):
        for j in range(i + 1, n):
            qm[i][j] = qm[j][i] = q.get(a, ids[j])

    # Remaining-cost bound: for every pair whose second element is not yet
    # placed, the best case is min(q, 0).
    suffix_neg = [0.0] * (n + 1)
    for b in range(n - 1, -1, -1):
        suffix_neg[b] = suffix_neg[b + 1] + sum(min(qm[a][b], 0.0) for a in range(b))

    heuristic_partition, heuristic_cost = solve_heuristic(q)
    label = heuristic_partition.label_of()
    index = {e: i for i, e in enumerate(ids)}
    best_clusters: list[list[int]] = []
    for cluster in heuristic_partition.canonical():
        best_clusters.append(sorted(index[e] for e in cluster))
    best = [heuristic_cost, best_clusters, _tie_break_key(best_clusters, ids)]

    clusters: list[list[int]] = []

    def recurse(elem: int, cost: float) -> None:
        if cost + suffix_neg[elem] > best[0]:
            return
        if elem == n:
            key = _tie_break_key(clusters, ids)
            if cost < best[0] - 1e-12 or (
                abs(cost - best[0]) <= 1e-12 and key < best[2]
            ):
                best[0] = min(cost, best[0])
                best[1] = [list(c) for c in clusters]
                best[2] = key
            return
        total = sum(qm[u][elem] for c in clusters for u in c)
        options = []
        for ci, c in enumerate(clusters):
            inside = sum(qm[u][elem] for u in c)
            options.append((total - inside, ci))
        options.append((total, -1))
        options.sort(key=lambda t: (t[0], t[1]))
        for added, ci in options:
            if ci == -1:
                clusters.append([elem])
                recurse(elem + 1, cost + added)
                clusters.pop()
            else:
                clusters[ci].append(elem)
                recurse(elem + 1, cost + added)
                clusters[ci].pop()

    recurse(0, 0.0)
    partition = Partition.from_sets([{ids[e] for e in c} for c in best[1]])
    return partition, cc_objective(q, partition)


_NUM_RESTARTS = 8


def solve_heuristic(q: CostMatrix) -> tuple[Partition, float]:
    """Greedy agglomeration plus local relocation / merge moves.

    Runs from the all-singleton start, the single-cluster start and a few
    seeded random starts, keeping the best local optimum.  Deterministic;
    never worse than either trivial baseline.
    """
    ids = sorted(q.ids)
    n = len(ids)
    if n == 0:
        raise ValueError("empty cost matrix")
    qm = [[0.0] * n for _ in range(n)]
    for i, a in enumerate(ids):
        for j in range(i + 1, n):
            qm[i][j] = qm[j][i] = q.get(a, ids[j])

    starts = [list(range(n)), [0] * n]
    rng = random.Random(0)
    for _ in range(_NUM_RESTARTS):
        width = rng.randrange(1, n + 1)
        starts.append([rng.randrange(width) for _ in range(n)])

    labels, cost = None, math.inf
    for start in starts:
        candidate = _improve(qm, start)
        candidate_cost = _labels_cost(qm, candidate)
        if candidate_cost < cost - 1e-12:
            labels, cost = candidate, candidate_cost

    clusters: dict[int, set[str]] = {}
    for e, lab in enumerate(labels):
        clusters.setdefault(lab, set()).add(ids[e])
    partition = Partition.from_sets(clusters.values())
    return partition, cc_objective(q, partition)


def _labels_cost(qm: list[list[float]], labels: list[int]) -> float:
    n = len(labels)
    return sum(
        qm[i][j]
        for i in range(n)
        for j in range(i + 1, n)
        if labels[i] != labels[j]
    )


def _improve(qm: list[list[float]], labels: list[int]) -> list[int]:
    n = len(labels)
    labels = list(labels)

    def members(lab: int) -> list[int]:
        return [i for i in range(n) if labels[i] == lab]

    # Agglomeration: merge the cluster pair with largest positive
    # inter-cluster cost sum (cutting it would pay that sum).
    while True:
        labs = sorted(set(labels))
        best_gain, best_pair = 0.0, None
        for i, la in enumerate(labs):
            ma = members(la)
            for lb in labs[i + 1 :]:
                inter = sum(qm[u][v] for u in ma for v in members(lb))
                if inter > best_gain + 1e-12:
                    best_gain, best_pair = inter, (la, lb)
        if best_pair is None:
            break
        la, lb = best_pair
        for i in range(n):
            if labels[i] == lb:
                labels[i] = la

    # Local moves: relocate single elements (including into a fresh
    # singleton) and merge cluster pairs while the objective decreases.
    improved = True
    while improved:
        improved = False
        for e in range(n):
            current = labels[e]
            own = sum(qm[e][u] for u in range(n) if u != e and labels[u] == current)
            best_delta, best_lab = -1e-12, None
            for lab in sorted(set(labels) | {max(labels) + 1}):
                if lab == current:
                    continue
                gain = sum(qm[e][u] for u in range(n) if labels[u] == lab)
                delta = own - gain
                if delta < best_delta:
                    best_delta, best_lab = delta, lab
            if best_lab is not None:
                labels[e] = best_lab
                improved = True
        labs = sorted(set(labels))
        for i, la in enumerate(labs):
            ma = members(la)
            for lb in labs[i + 1 :]:
                inter = sum(qm[u][v] for u in ma for v in members(lb))
                if inter > 1e-12:
                    for u in range(n):
                        if labels[u] == lb:
                            labels[u] = la
                    improved = True
                    break
            if improved:
                break
    return labels
