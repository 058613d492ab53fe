"""Command line interface.

Subcommands cover the full pipeline: synthetic data generation, model
recomputation from masks, both cost providers, clustering, independent
pair classification, evaluation, parameter learning and the cost-shift
sweep.  Model parameters come from a JSON config file plus per-flag
overrides.  Exit codes: 0 success, 2 validation error, 3 solver-size
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .clustering import Partition, SolverSizeError, cc_objective
from .costs import CostMatrix
from .files import DatasetManifest, ValidationError, load_mask, load_model, save_model
from .geometry import OrganoidModel, estimate_barycenter, estimate_extent
from .learn import AnnealConfig, LabeledDataset, anneal_pqap, classify_pairs, grid_search_threshold
from .metrics import metrics_report, save_report
from .pipeline import cluster_costs, run_pipeline, shift_sweep
from .pqap import PqapParams, SolverConfig
from .synth import SyntheticSpec, generate_synthetic

_PARAM_FIELDS = {
    "delta": "delta",
    "delta_p": "delta_p",
    "delta_pp": "delta_pp",
    "theta": "theta",
    "lambda": "lam",
    "delta_ppp": "delta_ppp",
}


def _load_params(args) -> PqapParams:
    values = {}
    if getattr(args, "config", None):
        data = json.loads(Path(args.config).read_text())
        for key, attr in _PARAM_FIELDS.items():
            if key in data:
                values[attr] = float(data[key])
    for key, attr in _PARAM_FIELDS.items():
        flag = key.replace("-", "_")
        override = getattr(args, flag, None)
        if override is not None:
            values[attr] = override
    return PqapParams(**values)


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        rotation_steps=args.rotation_steps, candidate_divisor=args.candidate_divisor
    )


def _add_param_flags(parser) -> None:
    parser.add_argument("--config", help="JSON file with model parameters")
    for key in _PARAM_FIELDS:
        parser.add_argument(f"--{key.replace('_', '-')}", type=float, default=None)


def _add_solver_flags(parser) -> None:
    parser.add_argument("--rotation-steps", type=int, default=75)
    parser.add_argument("--candidate-divisor", type=int, default=10)


def _cmd_model(args) -> None:
    manifest = DatasetManifest.load(args.manifest)
    for img in manifest.images:
        if img.mask_file is None:
            continue
        model = load_model(manifest.resolve(img.keypoints_file))
        mask = load_mask(manifest.resolve(img.mask_file))
        barycenter = estimate_barycenter(mask)
        extent = estimate_extent(mask, list(model.points), barycenter)
        updated = OrganoidModel(
            image_id=model.image_id,
            points=model.points,
            barycenter=barycenter,
            extent=extent,
        )
        save_model(updated, manifest.resolve(img.keypoints_file))
        print(f"{img.image_id}: barycenter {barycenter.tolist()}, extent {extent:.4f}")


def _cmd_synth(args) -> None:
    spec = SyntheticSpec(
        num_classes=args.classes,
        images_per_class=args.images_per_class,
        points_min=args.points_min,
        points_max=args.points_max,
        color_noise_std=args.color_noise,
        position_noise_std=args.position_noise,
        rotation_on_grid=not args.rotation_off_grid,
        rotation_grid_steps=args.rotation_steps,
        rng_seed=args.seed,
    )
    manifest = generate_synthetic(spec, args.out)
    print(f"wrote {len(manifest.images)} images to {args.out}")


def _cmd_pqap_costs(args) -> None:
    manifest = DatasetManifest.load(args.manifest)
    models = manifest.load_models()
    from .pqap import pqap_cost_matrix

    costs = pqap_cost_matrix(models, _load_params(args), _solver_config(args))
    costs.save(args.out)
    print(f"wrote {len(costs.costs)} pair costs to {args.out}")


def _cmd_hellinger_costs(args) -> None:
    manifest = DatasetManifest.load(args.manifest)
    from .histogram import hellinger_cost_matrix

    costs = hellinger_cost_matrix(manifest.load_histograms(), _load_params(args).delta_ppp)
    costs.save(args.out)
    print(f"wrote {len(costs.costs)} pair costs to {args.out}")


def _cmd_cluster(args) -> None:
    costs = CostMatrix.load(args.costs)
    solver = "exact" if args.exact else "heuristic"
    partition, objective = cluster_costs(costs, solver, exact_limit=args.exact_limit)
    partition.save(args.out, objective)
    print(f"{len(partition.clusters)} clusters, objective {objective:.6f}")


def _cmd_classify(args) -> None:
    costs = CostMatrix.load(args.costs)
    labels = classify_pairs(costs)
    payload = [
        {"a": a, "b": b, "join": bool(labels[(a, b)])} for a, b in sorted(labels)
    ]
    Path(args.out).write_text(json.dumps(payload, indent=1))
    joins = sum(1 for v in labels.values() if v)
    print(f"{joins} joins / {len(labels)} pairs")


def _cmd_evaluate(args) -> None:
    manifest = DatasetManifest.load(args.manifest)
    truth = manifest.truth_partition()
    partition, _ = Partition.load(args.partition)
    labels = classify_pairs(CostMatrix.load(args.costs)) if args.costs else None
    report = metrics_report(truth, pred_partition=partition, pred_labels=labels)
    save_report(report, args.out)
    print(json.dumps(report["clustering"], indent=1))


def _cmd_learn_anneal(args) -> None:
    manifest = DatasetManifest.load(args.manifest)
    data = LabeledDataset(tuple(manifest.load_models()), manifest.truth_partition())
    cfg = AnnealConfig(
        kappa=args.kappa,
        t0=args.t0,
        beta=args.beta,
        t_max=args.iterations,
        rng_seed=args.seed,
    )
    result = anneal_pqap(data, _load_params(args), cfg, _solver_config(args))
    result.save(args.out)
    print(f"best F1 {result.best_f1:.4f} -> {args.out}")


def _cmd_learn_threshold(args) -> None:
    manifest = DatasetManifest.load(args.manifest)
    threshold, f1 = grid_search_threshold(
        manifest.load_histograms(), manifest.truth_partition()
    )
    Path(args.out).write_text(json.dumps({"delta_ppp": threshold, "f1": f1}, indent=1))
    print(f"delta_ppp {threshold:.2f}, F1 {f1:.4f}")


def _cmd_sweep(args) -> None:
    manifest = DatasetManifest.load(args.manifest)
    costs = CostMatrix.load(args.costs)
    solver = "exact" if args.exact else "heuristic"
    table = shift_sweep(
        costs, manifest.truth_partition(), args.chi, solver, exact_limit=args.exact_limit
    )
    Path(args.out).write_text(
        json.dumps([{"chi": chi, "VI": vi} for chi, vi in table], indent=1)
    )
    for chi, vi in table:
        print(f"chi {chi:+.3f} -> VI {vi:.4f}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orgclust", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("model", help="recompute barycenter/extent from masks")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=_cmd_model)

    p = sub.add_parser("synth", help="generate a planted-partition dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--classes", type=int, default=2)
    p.add_argument("--images-per-class", type=int, default=3)
    p.add_argument("--points-min", type=int, default=5)
    p.add_argument("--points-max", type=int, default=10)
    p.add_argument("--color-noise", type=float, default=0.0)
    p.add_argument("--position-noise", type=float, default=0.0)
    p.add_argument("--rotation-off-grid", action="store_true")
    p.add_argument("--rotation-steps", type=int, default=75)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("pqap-costs", help="pair costs from key-point matching")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    _add_param_flags(p)
    _add_solver_flags(p)
    p.set_defaults(func=_cmd_pqap_costs)

    p = sub.add_parser("hellinger-costs", help="pair costs from histogram distances")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    _add_param_flags(p)
    p.set_defaults(func=_cmd_hellinger_costs)

    p = sub.add_parser("cluster", help="solve the clustering problem on a cost file")
    p.add_argument("--costs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--exact-limit", type=int, default=16)
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("classify", help="independent join/cut labels from a cost file")
    p.add_argument("--costs", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("evaluate", help="score a partition (and optional costs) against labels")
    p.add_argument("--manifest", required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--costs")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("learn-anneal", help="simulated annealing over matching parameters")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--iterations", type=int, default=140)
    p.add_argument("--kappa", type=float, default=0.1)
    p.add_argument("--t0", type=float, default=0.3)
    p.add_argument("--beta", type=float, default=0.99)
    p.add_argument("--seed", type=int, default=0)
    _add_param_flags(p)
    _add_solver_flags(p)
    p.set_defaults(func=_cmd_learn_anneal)

    p = sub.add_parser("learn-threshold", help="grid search for the histogram threshold")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_learn_threshold)

    p = sub.add_parser("sweep", help="VI as a function of a constant cost shift")
    p.add_argument("--manifest", required=True)
    p.add_argument("--costs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--chi", type=float, nargs="+", required=True)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--exact-limit", type=int, default=16)
    p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except SolverSizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
