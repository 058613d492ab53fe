"""On-disk formats: key-point files, masks, dataset manifests.

Key-point file, one per image:
``{"image_id": str, "barycenter": [x, y], "extent": float,
   "points": [{"x": .., "y": .., "channel": "green"|"blue"|"red",
               "color": [r, g, b]}, ...]}``

Mask file: ``{"pixels": [[x, y], ...]}``.  When a mask is present,
barycenter and extent are recomputed and compared against the stored
values; mismatches beyond 1e-6 emit a warning.

Manifest: ``{"name": str, "images": [{"image_id": str,
"keypoints_file": str, "mask_file"?: str, "histogram_file"?: str,
"cluster_label"?: str}, ...]}``.  Either all images carry a cluster label
(labeled dataset) or none do.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .clustering import Partition
from .geometry import (
    Channel,
    KeyPoint,
    OrganoidModel,
    SegmentMask,
    validate_against_mask,
)
from .histogram import ColorHistogram


class ValidationError(ValueError):
    """Input file or manifest violates the expected schema."""


def save_model(model: OrganoidModel, path: str | Path) -> None:
    payload = {
        "image_id": model.image_id,
        "barycenter": model.barycenter.tolist(),
        "extent": model.extent,
        "points": [
            {
                "x": kp.position[0],
                "y": kp.position[1],
                "channel": kp.channel.value,
                "color": kp.color.tolist(),
            }
            for kp in model.points
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=1))


def load_model(path: str | Path) -> OrganoidModel:
    try:
        data = json.loads(Path(path).read_text())
        points = tuple(
            KeyPoint(
                position=np.array([p["x"], p["y"]], dtype=float),
                color=np.array(p["color"], dtype=float),
                channel=Channel(p["channel"]),
            )
            for p in data["points"]
        )
        return OrganoidModel(
            image_id=data["image_id"],
            points=points,
            barycenter=np.array(data["barycenter"], dtype=float),
            extent=float(data["extent"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"invalid key-point file {path}: {exc}") from exc


def save_mask(mask: SegmentMask, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps({"pixels": [list(p) for p in sorted(mask.pixels)]})
    )


def load_mask(path: str | Path) -> SegmentMask:
    try:
        data = json.loads(Path(path).read_text())
        return SegmentMask(frozenset((int(x), int(y)) for x, y in data["pixels"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"invalid mask file {path}: {exc}") from exc


@dataclass
class ManifestImage:
    image_id: str
    keypoints_file: str
    mask_file: str | None = None
    histogram_file: str | None = None
    cluster_label: str | None = None
    image_file: str | None = None  # used by external cost providers


@dataclass
class DatasetManifest:
    name: str
    images: list[ManifestImage]
    base_dir: Path = field(default_factory=Path)

    def __post_init__(self):
        ids = [img.image_id for img in self.images]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate image ids in manifest")
        labeled = [img.cluster_label is not None for img in self.images]
        if any(labeled) and not all(labeled):
            raise ValidationError("either all images carry a cluster label or none")

    @property
    def ids(self) -> list[str]:
        return [img.image_id for img in self.images]

    @property
    def labeled(self) -> bool:
        return bool(self.images) and self.images[0].cluster_label is not None

    def resolve(self, relative: str) -> Path:
        path = Path(relative)
        return path if path.is_absolute() else self.base_dir / path

    def truth_partition(self) -> Partition:
        if not self.labeled:
            raise ValidationError("manifest carries no cluster labels")
        return Partition.from_labels(
            {img.image_id: img.cluster_label for img in self.images}
        )

    def load_models(self, check_masks: bool = True) -> list[OrganoidModel]:
        models = []
        for img in self.images:
            model = load_model(self.resolve(img.keypoints_file))
            if model.image_id != img.image_id:
                raise ValidationError(
                    f"manifest id {img.image_id!r} does not match key-point file id "
                    f"{model.image_id!r}"
                )
            if check_masks and img.mask_file is not None:
                validate_against_mask(model, load_mask(self.resolve(img.mask_file)))
            models.append(model)
        return models

    def load_histograms(self) -> dict[str, ColorHistogram]:
        histograms = {}
        for img in self.images:
            if img.histogram_file is None:
                raise ValidationError(f"image {img.image_id} has no histogram file")
            image_id, hist = ColorHistogram.load(self.resolve(img.histogram_file))
            if image_id != img.image_id:
                raise ValidationError(
                    f"manifest id {img.image_id!r} does not match histogram id {image_id!r}"
                )
            histograms[img.image_id] = hist
        return histograms

    def to_json(self) -> dict:
        images = []
        for img in self.images:
            entry = {"image_id": img.image_id, "keypoints_file": img.keypoints_file}
            for key in ("mask_file", "histogram_file", "cluster_label", "image_file"):
                value = getattr(img, key)
                if value is not None:
                    entry[key] = value
            images.append(entry)
        return {"name": self.name, "images": images}

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1))

    @classmethod
    def load(cls, path: str | Path, check_files: bool = True) -> "DatasetManifest":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
            images = [ManifestImage(**entry) for entry in data["images"]]
            manifest = cls(data["name"], images, base_dir=path.parent)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"invalid manifest {path}: {exc}") from exc
        if check_files:
            for img in manifest.images:
                for name in ("keypoints_file", "mask_file", "histogram_file", "image_file"):
                    value = getattr(img, name)
                    if value is not None and not manifest.resolve(value).exists():
                        raise ValidationError(
                            f"{img.image_id}: referenced file {value} does not exist"
                        )
        return manifest
