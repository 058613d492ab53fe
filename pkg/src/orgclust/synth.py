"""Planted-partition synthetic datasets.

Each class is a prototype point set with class-specific colors and
geometry.  Each image of the class is the prototype mapped by a random
similarity transform (rotation optionally restricted to the solver's
angle grid, so that noiseless within-class pairs are geometrically
consistent and recoverable exactly), plus independent color and position
noise.  Key-point files, histogram files and a labeled manifest are
written to disk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .files import DatasetManifest, ManifestImage, save_model
from .geometry import Channel, KeyPoint, OrganoidModel, SimilarityTransform, apply_transform
from .histogram import build_histogram

_PROTOTYPE_EXTENT = 100.0
_CHANNELS = (Channel.GREEN, Channel.BLUE, Channel.RED)


@dataclass(frozen=True)
class SyntheticSpec:
    num_classes: int = 2
    images_per_class: int = 3
    points_min: int = 5
    points_max: int = 10
    color_noise_std: float = 0.0
    position_noise_std: float = 0.0  # fraction of the image extent
    rotation_on_grid: bool = True
    rotation_grid_steps: int = 75
    rng_seed: int = 0

    def __post_init__(self):
        if self.num_classes < 1 or self.images_per_class < 1:
            raise ValueError("need at least one class and one image per class")
        if not 1 <= self.points_min <= self.points_max:
            raise ValueError("invalid points_per_image range")
        if self.color_noise_std < 0 or self.position_noise_std < 0:
            raise ValueError("noise levels must be non-negative")
        if self.rotation_grid_steps < 1:
            raise ValueError("rotation_grid_steps must be >= 1")


def _prototype(rng: np.random.Generator, num_points: int):
    """Class prototype: points in an annulus around the origin, random colors."""
    radii = rng.uniform(0.25, 1.0, size=num_points) * _PROTOTYPE_EXTENT
    angles = rng.uniform(0.0, 2 * math.pi, size=num_points)
    positions = np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=1)
    colors = rng.uniform(0.0, 1.0, size=(num_points, 3))
    return positions, colors


def generate_models(spec: SyntheticSpec) -> tuple[list[OrganoidModel], dict[str, str]]:
    """In-memory generation; returns models and image_id -> class label."""
    rng = np.random.default_rng(spec.rng_seed)
    models: list[OrganoidModel] = []
    labels: dict[str, str] = {}
    for c in range(spec.num_classes):
        num_points = int(rng.integers(spec.points_min, spec.points_max + 1))
        proto_pos, proto_col = _prototype(rng, num_points)
        label = f"class{c:02d}"
        for i in range(spec.images_per_class):
            if spec.rotation_on_grid:
                n = int(rng.integers(0, spec.rotation_grid_steps))
                gamma = 2 * math.pi * n / spec.rotation_grid_steps
            else:
                gamma = float(rng.uniform(0.0, 2 * math.pi))
            scale = float(rng.uniform(0.6, 1.5))
            center = rng.uniform(200.0, 800.0, size=2)
            transform = SimilarityTransform(
                translation_target=center,
                scale=scale,
                angle=gamma,
                source_center=np.zeros(2),
            )
            extent = scale * _PROTOTYPE_EXTENT
            positions = np.array([apply_transform(transform, p) for p in proto_pos])
            if spec.position_noise_std > 0:
                positions = positions + rng.normal(
                    0.0, spec.position_noise_std * extent, size=positions.shape
                )
            colors = proto_col
            if spec.color_noise_std > 0:
                colors = np.clip(
                    colors + rng.normal(0.0, spec.color_noise_std, size=colors.shape),
                    0.0,
                    1.0,
                )
            image_id = f"{label}_img{i:03d}"
            points = tuple(
                KeyPoint(
                    position=positions[p],
                    color=colors[p],
                    channel=_CHANNELS[p % len(_CHANNELS)],
                )
                for p in range(num_points)
            )
            models.append(
                OrganoidModel(
                    image_id=image_id, points=points, barycenter=center, extent=extent
                )
            )
            labels[image_id] = label
    return models, labels


def generate_synthetic(spec: SyntheticSpec, out_dir: str | Path) -> DatasetManifest:
    """Generate the dataset and write key-point files, histograms and the manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    models, labels = generate_models(spec)
    images = []
    for model in models:
        kp_file = f"{model.image_id}.keypoints.json"
        hist_file = f"{model.image_id}.histogram.json"
        save_model(model, out_dir / kp_file)
        hist = build_histogram([kp.color for kp in model.points])
        hist.save(out_dir / hist_file, model.image_id)
        images.append(
            ManifestImage(
                image_id=model.image_id,
                keypoints_file=kp_file,
                histogram_file=hist_file,
                cluster_label=labels[model.image_id],
            )
        )
    manifest = DatasetManifest(name="synthetic", images=images, base_dir=out_dir)
    manifest.save(out_dir / "manifest.json")
    return manifest
