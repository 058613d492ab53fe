"""Dataset loading from the clustering pipeline's manifest format.

The manifest is consumed as plain JSON (the exchange format of the
clustering package); image inputs come from the optional `image_file`
field, histogram inputs from `histogram_file`.  Cluster labels are
required for training.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .config import TwinConfig
from .preprocess import load_image


@dataclass
class TwinDataset:
    """Per-image input tensors plus the reference cluster labels."""

    ids: list[str]
    tensors: dict[str, torch.Tensor]
    labels: dict[str, str]

    def __post_init__(self):
        if sorted(self.tensors) != sorted(self.ids) or sorted(self.labels) != sorted(
            self.ids
        ):
            raise ValueError("ids, tensors and labels must cover the same images")

    @property
    def num_clusters(self) -> int:
        return len(set(self.labels.values()))

    def pair_lists(self) -> tuple[list[tuple[str, str]], list[tuple[str, str]]]:
        """All unordered pairs, split into same-cluster and cross-cluster."""
        same, diff = [], []
        for a, b in itertools.combinations(sorted(self.ids), 2):
            (same if self.labels[a] == self.labels[b] else diff).append((a, b))
        return same, diff


def load_dataset(manifest_path: str | Path, cfg: TwinConfig) -> TwinDataset:
    manifest_path = Path(manifest_path)
    data = json.loads(manifest_path.read_text())
    base_dir = manifest_path.parent

    ids: list[str] = []
    tensors: dict[str, torch.Tensor] = {}
    labels: dict[str, str] = {}
    for entry in data["images"]:
        image_id = entry["image_id"]
        if "cluster_label" not in entry:
            raise ValueError(f"image {image_id} carries no cluster label")
        if cfg.kind == "image":
            if "image_file" not in entry:
                raise ValueError(f"image {image_id} has no image_file")
            tensor = load_image(base_dir / entry["image_file"], cfg.image_side)
        else:
            if "histogram_file" not in entry:
                raise ValueError(f"image {image_id} has no histogram_file")
            hist = json.loads((base_dir / entry["histogram_file"]).read_text())
            bins = np.asarray(hist["bins"], dtype=np.float32)
            if bins.shape != (3, 256):
                raise ValueError(f"histogram of {image_id} must have shape (3, 256)")
            tensor = torch.from_numpy(bins)
        ids.append(image_id)
        tensors[image_id] = tensor
        labels[image_id] = entry["cluster_label"]
    return TwinDataset(ids, tensors, labels)
