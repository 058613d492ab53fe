"""Partial quadratic assignment between two key-point models.

A feasible assignment relates each point of the source model to at most one
point of the target model and vice versa.  Its cost combines unary terms
(color and relative-radius differences against thresholds) with quadratic
terms (differences of barycenter-relative angles), normalized so that the
optimal cost of any instance lies in [-D, 0] with D depending only on the
model parameters.  Dividing by -D yields a correlation score in [0, 1] that
is comparable across instances.

The solver is a rotation-sweep local search: for every angle on a regular
grid, the similarity transform implied by the barycenters and extents is
used to prune assignment candidates to nearest neighbors, and pairs are
added greedily while the objective decreases.

Note on the quadratic term: each unordered pair of assigned point pairs is
counted once and weighted by lambda / C(n1, 2).  This is the convention under
which a full geometrically consistent assignment attains the lower bound
exactly and the normalized score reaches 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .costs import CostMatrix, pair_key
from .geometry import (
    OrganoidModel,
    color_distance,
    inter_point_angle,
    relative_radius,
)


@dataclass(frozen=True)
class PqapParams:
    """The five matching parameters plus the clustering cut threshold.

    delta, delta_p, delta_pp are the color / radius / angle thresholds,
    theta mixes the two unary distances, lam mixes unary against quadratic
    terms, and delta_ppp is the cut threshold applied to the normalized
    correlation score.
    """

    delta: float = 0.2
    delta_p: float = 0.2
    delta_pp: float = 0.2
    theta: float = 0.5
    lam: float = 0.5
    delta_ppp: float = 0.5

    def __post_init__(self):
        if self.delta < 0 or self.delta_p < 0 or self.delta_pp < 0:
            raise ValueError("thresholds must be non-negative")
        if not 0 < self.theta < 1:
            raise ValueError("theta must be in (0, 1)")
        if not 0 < self.lam < 1:
            raise ValueError("lam must be in (0, 1)")
        if not 0 <= self.delta_ppp <= 1:
            raise ValueError("delta_ppp must be in [0, 1]")

    def normalization(self) -> float:
        """The constant D = (1-lam)(theta*delta + (1-theta)*delta_p) + lam*delta_pp."""
        return (1 - self.lam) * (
            self.theta * self.delta + (1 - self.theta) * self.delta_p
        ) + self.lam * self.delta_pp


@dataclass(frozen=True)
class Assignment:
    """Sparse encoding of a feasible partial assignment."""

    pairs: frozenset[tuple[int, int]]
    source_size: int
    target_size: int

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset(self.pairs))
        sources = [v for v, _ in self.pairs]
        targets = [w for _, w in self.pairs]
        if len(set(sources)) != len(sources) or len(set(targets)) != len(targets):
            raise ValueError("infeasible assignment")
        for v, w in self.pairs:
            if not (0 <= v < self.source_size and 0 <= w < self.target_size):
                raise ValueError("infeasible assignment")


@dataclass(frozen=True)
class SolverConfig:
    """Rotation-sweep configuration: grid resolution and candidate pruning."""

    rotation_steps: int = 75
    candidate_divisor: int = 10
    step_seed: int = 0

    def __post_init__(self):
        if self.rotation_steps < 1 or self.candidate_divisor < 1:
            raise ValueError("rotation_steps and candidate_divisor must be >= 1")


class PqapInstance:
    """One ordered matching instance between a source and a target model."""

    def __init__(self, source: OrganoidModel, target: OrganoidModel, params: PqapParams):
        if not source.points or not target.points:
            raise ValueError("both models must have at least one key point")
        self.source = source
        self.target = target
        self.params = params
        self.n1 = min(len(source.points), len(target.points))
        self.n2 = self.n1 * (self.n1 - 1) // 2

    def _radius(self, model: OrganoidModel, idx: int) -> float:
        return relative_radius(model.points[idx], model)

    def _at_center(self, model: OrganoidModel, idx: int) -> bool:
        return np.array_equal(model.points[idx].position, model.barycenter)

    def unary_cost(self, v: int, w: int) -> float:
        """theta * (d - delta) + (1 - theta) * (d' - delta_p)."""
        p = self.params
        d = color_distance(self.source.points[v], self.target.points[w])
        dp = abs(self._radius(self.source, v) - self._radius(self.target, w))
        return p.theta * (d - p.delta) + (1 - p.theta) * (dp - p.delta_p)

    def pairwise_cost(self, v: int, v2: int, w: int, w2: int) -> float:
        """|angle difference| - delta_pp; zero if any involved point sits at its barycenter."""
        if v == v2 or w == w2:
            raise ValueError("pairwise cost requires distinct points on each side")
        if (
            self._at_center(self.source, v)
            or self._at_center(self.source, v2)
            or self._at_center(self.target, w)
            or self._at_center(self.target, w2)
        ):
            return 0.0
        aj = inter_point_angle(self.source.points[v], self.source.points[v2], self.source)
        ak = inter_point_angle(self.target.points[w], self.target.points[w2], self.target)
        return abs(aj - ak) - self.params.delta_pp

    def objective(self, x: Assignment) -> float:
        """Scaled sum of unary costs plus scaled sum over unordered pairs of quadratic costs."""
        if x.source_size != len(self.source.points) or x.target_size != len(self.target.points):
            raise ValueError("infeasible assignment")
        p = self.params
        pairs = sorted(x.pairs)
        total = sum(self.unary_cost(v, w) for v, w in pairs) * (1 - p.lam) / self.n1
        if self.n2 > 0:
            quad = 0.0
            for i, (v, w) in enumerate(pairs):
                for v2, w2 in pairs[i + 1 :]:
                    quad += self.pairwise_cost(v, v2, w, w2)
            total += quad * p.lam / self.n2
        return total


class PreparedInstance:
    """Geometry-only precomputation for one ordered pair under one solver config.

    Candidate sets, color / radius distances and angle tables do not depend
    on the model parameters, so instances prepared once can be re-solved
    cheaply for many parameter vectors (as the annealing loop does).
    """

    def __init__(self, source: OrganoidModel, target: OrganoidModel, config: SolverConfig):
        if not source.points or not target.points:
            raise ValueError("both models must have at least one key point")
        self.source = source
        self.target = target
        self.config = config
        nj, nk = len(source.points), len(target.points)
        self.nj, self.nk = nj, nk
        self.n1 = min(nj, nk)
        self.n2 = self.n1 * (self.n1 - 1) // 2

        src_pos = np.array([kp.position for kp in source.points])
        tgt_pos = np.array([kp.position for kp in target.points])
        src_col = np.array([kp.color for kp in source.points])
        tgt_col = np.array([kp.color for kp in target.points])

        rel_src = src_pos - source.barycenter
        rel_tgt = tgt_pos - target.barycenter
        rad_src = np.linalg.norm(rel_src, axis=1)
        rad_tgt = np.linalg.norm(rel_tgt, axis=1)
        self.center_src = [r == 0.0 for r in rad_src]
        self.center_tgt = [r == 0.0 for r in rad_tgt]
        sigma_src = rad_src / source.extent
        sigma_tgt = rad_tgt / target.extent

        self.d_color = np.linalg.norm(src_col[:, None, :] - tgt_col[None, :, :], axis=2)
        self.d_radius = np.abs(sigma_src[:, None] - sigma_tgt[None, :])

        self.alpha_src = _angle_table(rel_src, rad_src)
        self.alpha_tgt = _angle_table(rel_tgt, rad_tgt)

        # Candidate moves per grid angle: for each source point, the
        # floor(nk / M) targets (at least one) nearest to its transformed
        # location, as sorted (v, w) pairs with their unary distances.
        m = max(1, nk // config.candidate_divisor)
        scale = target.extent / source.extent
        self.moves_by_angle: list[list[tuple[int, int, float, float]]] = []
        for n in range(config.rotation_steps):
            gamma = 2 * math.pi * n / config.rotation_steps
            c, s = math.cos(gamma), math.sin(gamma)
            rot = np.array([[c, -s], [s, c]])
            mapped = target.barycenter + scale * (rel_src @ rot.T)
            dists = np.linalg.norm(mapped[:, None, :] - tgt_pos[None, :, :], axis=2)
            moves = []
            for v in range(nj):
                order = np.argsort(dists[v], kind="stable")[:m]
                for w in sorted(int(w) for w in order):
                    moves.append(
                        (v, w, float(self.d_color[v, w]), float(self.d_radius[v, w]))
                    )
            self.moves_by_angle.append(moves)

    def solve(self, params: PqapParams) -> tuple[Assignment, float]:
        """Best greedy assignment over all grid angles; cost is always <= 0."""
        best_pairs: list[tuple[int, int]] = []
        best_cost = 0.0
        for moves in self.moves_by_angle:
            pairs, cost = self._greedy(moves, params)
            if cost < best_cost:
                best_cost, best_pairs = cost, pairs
        return (
            Assignment(frozenset(best_pairs), self.nj, self.nk),
            best_cost,
        )

    def _greedy(
        self, moves: list[tuple[int, int, float, float]], params: PqapParams
    ) -> tuple[list[tuple[int, int]], float]:
        u_scale = (1 - params.lam) / self.n1
        p_scale = params.lam / self.n2 if self.n2 > 0 else 0.0
        theta, delta, delta_p, delta_pp = (
            params.theta,
            params.delta,
            params.delta_p,
            params.delta_pp,
        )
        # Marginal objective change per candidate move, updated incrementally
        # as pairs get assigned.  Ties go to the lexicographically smallest
        # (v, w), which is the first one encountered in move order.
        deltas = [
            u_scale * (theta * (d - delta) + (1 - theta) * (dp - delta_p))
            for (_, _, d, dp) in moves
        ]
        src_used = [False] * self.nj
        tgt_used = [False] * self.nk
        alive = list(range(len(moves)))
        assigned: list[tuple[int, int]] = []
        total = 0.0
        while True:
            best_i = -1
            best_delta = 0.0
            for i in alive:
                if deltas[i] < best_delta:
                    best_delta = deltas[i]
                    best_i = i
            if best_i < 0:
                break
            v0, w0, _, _ = moves[best_i]
            assigned.append((v0, w0))
            total += best_delta
            src_used[v0] = True
            tgt_used[w0] = True
            next_alive = []
            v0_center = self.center_src[v0] or self.center_tgt[w0]
            a_src_row = self.alpha_src[v0]
            a_tgt_row = self.alpha_tgt[w0]
            for i in alive:
                v, w, _, _ = moves[i]
                if src_used[v] or tgt_used[w]:
                    continue
                next_alive.append(i)
                if p_scale and not v0_center:
                    if self.center_src[v] or self.center_tgt[w]:
                        continue
                    diff = a_src_row[v] - a_tgt_row[w]
                    if diff < 0:
                        diff = -diff
                    deltas[i] += p_scale * (diff - delta_pp)
            alive = next_alive
        return assigned, total


def _angle_table(rel: np.ndarray, radii: np.ndarray) -> list[list[float]]:
    """Pairwise unsigned angles between barycenter-relative vectors; 0 where undefined."""
    safe = np.where(radii == 0.0, 1.0, radii)
    unit = rel / safe[:, None]
    cos = np.clip(unit @ unit.T, -1.0, 1.0)
    table = np.arccos(cos)
    np.fill_diagonal(table, 0.0)
    table[radii == 0.0, :] = 0.0
    table[:, radii == 0.0] = 0.0
    return table.tolist()


def unary_cost(instance: PqapInstance, v: int, w: int) -> float:
    return instance.unary_cost(v, w)


def pairwise_cost(instance: PqapInstance, v: int, v2: int, w: int, w2: int) -> float:
    return instance.pairwise_cost(v, v2, w, w2)


def objective(instance: PqapInstance, x: Assignment) -> float:
    return instance.objective(x)


def solve_local(
    instance: PqapInstance, config: SolverConfig = SolverConfig()
) -> tuple[Assignment, float]:
    prepared = PreparedInstance(instance.source, instance.target, config)
    return prepared.solve(instance.params)


def normalize(instance_jk_cost: float, instance_kj_cost: float, params: PqapParams) -> float:
    """Correlation score in [0, 1]: -min(cost_jk, cost_kj) / normalization constant."""
    if instance_jk_cost > 1e-12 or instance_kj_cost > 1e-12:
        raise ValueError("solver costs must be non-positive")
    denom = params.normalization()
    if denom <= 0.0:
        raise ValueError("degenerate normalization")
    return -min(instance_jk_cost, instance_kj_cost) / denom


def pqap_cost_matrix(
    models: list[OrganoidModel],
    params: PqapParams,
    config: SolverConfig = SolverConfig(),
) -> CostMatrix:
    """Correlation score minus the cut threshold, for every unordered pair of models.

    Both matching directions are solved; the local search breaks the
    theoretical symmetry of the problem, the more negative cost wins.
    """
    if len(models) < 2:
        raise ValueError("need at least two models")
    ids = [m.image_id for m in models]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate image ids")
    costs: dict[tuple[str, str], float] = {}
    for i, mj in enumerate(models):
        for mk in models[i + 1 :]:
            try:
                _, cost_jk = PreparedInstance(mj, mk, config).solve(params)
                _, cost_kj = PreparedInstance(mk, mj, config).solve(params)
                phi = normalize(cost_jk, cost_kj, params)
            except ValueError as exc:
                raise ValueError(
                    f"pair ({mj.image_id}, {mk.image_id}): {exc}"
                ) from exc
            costs[pair_key(mj.image_id, mk.image_id)] = phi - params.delta_ppp
    return CostMatrix(ids, costs)
