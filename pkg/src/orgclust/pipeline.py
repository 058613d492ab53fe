"""Orchestration: cost provider -> clustering -> evaluation.

The pipeline reads a dataset manifest, obtains a cost matrix from one of
the providers (key-point matching, histogram baseline, or an external
cost file produced by any other model), solves the clustering problem
and, for labeled datasets, evaluates both the independent pair
classification and the final clustering against the reference partition.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .clustering import Partition, cc_objective, solve_exact, solve_heuristic
from .costs import CostMatrix
from .files import DatasetManifest, ValidationError
from .histogram import hellinger_cost_matrix
from .learn import classify_pairs
from .metrics import metrics_report, save_report, variation_of_information
from .pqap import PqapParams, SolverConfig, pqap_cost_matrix

PROVIDERS = ("pqap", "hellinger", "external-file")
SOLVERS = ("exact", "heuristic")


@dataclass
class PipelineResult:
    costs: CostMatrix
    partition: Partition
    objective: float
    report: dict | None


def build_costs(
    manifest: DatasetManifest,
    provider: str,
    params: PqapParams = PqapParams(),
    solver_config: SolverConfig = SolverConfig(),
    cost_file: str | Path | None = None,
) -> CostMatrix:
    if provider == "pqap":
        return pqap_cost_matrix(manifest.load_models(), params, solver_config)
    if provider == "hellinger":
        return hellinger_cost_matrix(manifest.load_histograms(), params.delta_ppp)
    if provider == "external-file":
        if cost_file is None:
            raise ValidationError("external-file provider requires a cost file")
        costs = CostMatrix.load(cost_file)
        if set(costs.ids) != set(manifest.ids):
            raise ValidationError("cost file ids do not match the manifest")
        return costs
    raise ValidationError(f"unknown cost provider {provider!r}")


def cluster_costs(
    costs: CostMatrix, solver: str, exact_limit: int = 16
) -> tuple[Partition, float]:
    if solver == "exact":
        return solve_exact(costs, exact_limit=exact_limit)
    if solver == "heuristic":
        return solve_heuristic(costs)
    raise ValidationError(f"unknown solver {solver!r}")


def run_pipeline(
    manifest: DatasetManifest,
    provider: str = "pqap",
    params: PqapParams = PqapParams(),
    solver_config: SolverConfig = SolverConfig(),
    solver: str = "exact",
    exact_limit: int = 16,
    cost_file: str | Path | None = None,
    out_dir: str | Path | None = None,
    evaluate: bool | None = None,
) -> PipelineResult:
    """Cost matrix -> partition -> (optional) metrics report, all persisted.

    `evaluate` defaults to whether the manifest is labeled; requesting
    evaluation on an unlabeled manifest is an error.
    """
    costs = build_costs(manifest, provider, params, solver_config, cost_file)
    partition, objective = cluster_costs(costs, solver, exact_limit)

    if evaluate is None:
        evaluate = manifest.labeled
    report = None
    if evaluate:
        if not manifest.labeled:
            raise ValidationError("metrics requested but the manifest carries no labels")
        truth = manifest.truth_partition()
        report = metrics_report(
            truth, pred_partition=partition, pred_labels=classify_pairs(costs)
        )

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        costs.save(out_dir / "costs.json")
        partition.save(out_dir / "partition.json", objective)
        if report is not None:
            save_report(report, out_dir / "metrics.json")
    return PipelineResult(costs, partition, objective, report)


def shift_sweep(
    costs: CostMatrix,
    truth: Partition,
    chi_grid: list[float],
    solver: str = "exact",
    exact_limit: int = 16,
) -> list[tuple[float, float]]:
    """VI against the truth after adding a constant to all (globally scaled) costs."""
    scaled = costs.scaled_to_unit()
    table = []
    for chi in chi_grid:
        partition, _ = cluster_costs(scaled.shifted(chi), solver, exact_limit)
        vi = variation_of_information(truth, partition)["VI"]
        table.append((chi, vi))
    return table
