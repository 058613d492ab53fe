"""Command line interface: render, train, export.

`train` persists the model weights plus the configuration; `export`
reloads them and writes the cost matrix consumed by the clustering
pipeline's external-file provider.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import torch

from .config import TwinConfig
from .data import load_dataset
from .export import save_costs
from .model import TwinNetwork
from .render import render_manifest
from .train import train


def _config_from_args(args) -> TwinConfig:
    return TwinConfig(
        kind=args.kind,
        image_side=args.side,
        learning_rate=args.learning_rate,
        iterations=args.iterations,
        augment_prob=args.augment_prob,
        accuracy_target=args.accuracy_target,
        rng_seed=args.seed,
    )


def save_model(model: TwinNetwork, path: str | Path) -> None:
    torch.save(
        {"config": dataclasses.asdict(model.cfg), "state": model.state_dict()}, path
    )


def load_model(path: str | Path) -> TwinNetwork:
    payload = torch.load(path, map_location="cpu", weights_only=True)
    model = TwinNetwork(TwinConfig(**payload["config"]))
    model.load_state_dict(payload["state"])
    model.eval()
    return model


def _cmd_render(args) -> None:
    render_manifest(args.manifest, side=args.side)
    print(f"rendered images for {args.manifest}")


def _cmd_train(args) -> None:
    cfg = _config_from_args(args)
    data = load_dataset(args.manifest, cfg)
    result = train(data, cfg)
    save_model(result.model, args.out_model)
    if args.trace:
        Path(args.trace).write_text(
            json.dumps(
                {
                    "loss": result.loss_trace,
                    "final_accuracy": result.final_accuracy,
                    "iterations_run": result.iterations_run,
                },
                indent=1,
            )
        )
    print(
        f"accuracy {result.final_accuracy:.4f} after {result.iterations_run} iterations"
    )


def _cmd_export(args) -> None:
    model = load_model(args.model)
    data = load_dataset(args.manifest, model.cfg)
    save_costs(model, data, args.out)
    print(f"wrote costs to {args.out}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orgtwin", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="rasterize key-point files into images")
    p.add_argument("--manifest", required=True)
    p.add_argument("--side", type=int, default=256)
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("train", help="train a twin network on a labeled manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-model", required=True)
    p.add_argument("--trace")
    p.add_argument("--kind", choices=("image", "histogram"), default="image")
    p.add_argument("--side", type=int, default=256)
    p.add_argument("--learning-rate", type=float, default=1e-4)
    p.add_argument("--iterations", type=int, default=2000)
    p.add_argument("--augment-prob", type=float, default=0.2)
    p.add_argument("--accuracy-target", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("export", help="write the pairwise cost matrix")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
