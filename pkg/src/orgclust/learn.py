"""Parameter learning: simulated annealing for the matching model, grid
search for the histogram threshold.

Both procedures score a candidate parameter vector by classifying every
pair of training images independently (join iff the pairwise cost is
non-negative) and computing the F1 score of the join class against the
reference clustering.  Annealing perturbs all six matching parameters
jointly with zero-mean normal noise, accepts improvements, and accepts
worsenings with the Metropolis probability under a geometric cooling
schedule; the best parameters seen across all iterations are returned.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .clustering import Partition
from .costs import CostMatrix, pair_key
from .geometry import OrganoidModel
from .metrics import PairLabeling, pair_confusion, scores
from .pqap import PqapParams, PreparedInstance, SolverConfig, normalize

# Clamp ranges applied after each perturbation, keeping type invariants.
_THRESHOLD_MAX = 2.0
_MIX_MIN, _MIX_MAX = 0.01, 0.99


@dataclass(frozen=True)
class AnnealConfig:
    """Proposal spread, initial temperature, cooling factor and iteration limit."""

    kappa: float = 0.1
    t0: float = 0.3
    beta: float = 0.99
    t_max: int = 140
    rng_seed: int = 0

    def __post_init__(self):
        if self.kappa < 0 or self.t0 <= 0 or not 0 < self.beta < 1 or self.t_max < 1:
            raise ValueError("invalid annealing configuration")


@dataclass(frozen=True)
class LabeledDataset:
    """Key-point models together with their reference clustering."""

    models: tuple[OrganoidModel, ...]
    truth: Partition

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(self.models))
        ids = {m.image_id for m in self.models}
        if self.truth.ground_set != frozenset(ids):
            raise ValueError("truth partition must cover exactly the model ids")


@dataclass
class AnnealResult:
    params: PqapParams
    best_f1: float
    trace: list[tuple[int, float, bool]]  # (iteration, current F1, accepted)

    def save(self, path: str | Path) -> None:
        p = self.params
        payload = {
            "delta": p.delta,
            "delta_p": p.delta_p,
            "delta_pp": p.delta_pp,
            "theta": p.theta,
            "lambda": p.lam,
            "delta_ppp": p.delta_ppp,
            "best_f1": self.best_f1,
            "trace": [
                {"t": t, "f1": f1, "accepted": accepted} for t, f1, accepted in self.trace
            ],
        }
        Path(path).write_text(json.dumps(payload, indent=1))


def classify_pairs(costs: CostMatrix) -> PairLabeling:
    """Join iff the stored cost is non-negative (the threshold is already subtracted)."""
    return {key: cost >= 0.0 for key, cost in costs.costs.items()}


def f1_of_joins(truth: Partition, labels: PairLabeling) -> float:
    value = scores(pair_confusion(truth, labels))["F1J"]
    return 0.0 if value is None else value


def _params_to_vector(p: PqapParams) -> np.ndarray:
    return np.array([p.delta, p.delta_p, p.delta_pp, p.theta, p.lam, p.delta_ppp])


def _vector_to_params(v: np.ndarray) -> PqapParams:
    return PqapParams(
        delta=float(np.clip(v[0], 0.0, _THRESHOLD_MAX)),
        delta_p=float(np.clip(v[1], 0.0, _THRESHOLD_MAX)),
        delta_pp=float(np.clip(v[2], 0.0, _THRESHOLD_MAX)),
        theta=float(np.clip(v[3], _MIX_MIN, _MIX_MAX)),
        lam=float(np.clip(v[4], _MIX_MIN, _MIX_MAX)),
        delta_ppp=float(np.clip(v[5], 0.0, 1.0)),
    )


class _PairEvaluator:
    """Prepares every ordered matching instance once, then scores parameter vectors."""

    def __init__(self, data: LabeledDataset, solver: SolverConfig):
        self.truth = data.truth
        models = sorted(data.models, key=lambda m: m.image_id)
        self.prepared: list[tuple[tuple[str, str], PreparedInstance, PreparedInstance]] = []
        for i, mj in enumerate(models):
            for mk in models[i + 1 :]:
                self.prepared.append(
                    (
                        pair_key(mj.image_id, mk.image_id),
                        PreparedInstance(mj, mk, solver),
                        PreparedInstance(mk, mj, solver),
                    )
                )

    def correlations(self, params: PqapParams) -> dict[tuple[str, str], float]:
        out = {}
        for key, fwd, bwd in self.prepared:
            _, cost_jk = fwd.solve(params)
            _, cost_kj = bwd.solve(params)
            out[key] = normalize(cost_jk, cost_kj, params)
        return out

    def f1(self, params: PqapParams) -> float:
        phi = self.correlations(params)
        labels = {key: value >= params.delta_ppp for key, value in phi.items()}
        return f1_of_joins(self.truth, labels)


def anneal_pqap(
    data: LabeledDataset,
    init: PqapParams,
    cfg: AnnealConfig = AnnealConfig(),
    solver: SolverConfig = SolverConfig(),
) -> AnnealResult:
    """Simulated annealing over the six matching parameters, maximizing join F1."""
    if len(data.truth.clusters) < 2:
        raise ValueError("need at least two clusters in the reference partition")
    rng = np.random.default_rng(cfg.rng_seed)
    evaluator = _PairEvaluator(data, solver)

    current = _params_to_vector(init)
    current_f1 = evaluator.f1(init)
    best_params, best_f1 = _vector_to_params(current), current_f1
    trace = [(0, current_f1, True)]
    temperature = cfg.t0
    for t in range(1, cfg.t_max + 1):
        temperature *= cfg.beta
        proposal = current + rng.normal(0.0, cfg.kappa, size=6)
        params = _vector_to_params(proposal)
        f1 = evaluator.f1(params)
        if f1 > current_f1:
            accepted = True
        else:
            accepted = rng.random() < math.exp((f1 - current_f1) / temperature)
        if accepted:
            current, current_f1 = proposal, f1
            if f1 > best_f1:
                best_params, best_f1 = params, f1
        trace.append((t, current_f1, accepted))
    return AnnealResult(best_params, best_f1, trace)


def grid_search_threshold(
    histograms: dict, truth: Partition, grid_steps: int = 100
) -> tuple[float, float]:
    """Exhaustive search for the cut threshold on the Hellinger distance.

    Evaluates all thresholds n / grid_steps and returns the join-F1
    maximizer; ties go to the smallest threshold.
    """
    from .histogram import hellinger

    ids = sorted(histograms)
    if len(ids) < 2:
        raise ValueError("need at least two histograms")
    distances = {
        pair_key(a, b): hellinger(histograms[a], histograms[b])
        for i, a in enumerate(ids)
        for b in ids[i + 1 :]
    }
    best_threshold, best_f1 = 0.0, -1.0
    for n in range(grid_steps + 1):
        threshold = n / grid_steps
        labels = {key: d <= 1.0 - threshold for key, d in distances.items()}
        f1 = f1_of_joins(truth, labels)
        if f1 > best_f1:
            best_threshold, best_f1 = threshold, f1
    return best_threshold, best_f1
