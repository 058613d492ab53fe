"""Color histograms and the Hellinger-distance baseline.

Each image gets three 256-bin channel histograms, normalized per channel.
The distance between two images is the mean over channels of the Hellinger
distance sqrt(1 - sum_b sqrt(p_b q_b)), which stays in [0, 1] and is a
metric.  Costs for clustering are 1 - d_H - delta_ppp, so a pair is
classified as a join exactly when d_H <= 1 - delta_ppp.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

NUM_BINS = 256


@dataclass(frozen=True)
class ColorHistogram:
    """Per-channel normalized 256-bin histograms, shape (3, 256)."""

    bins: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.bins, dtype=float)
        if arr.shape != (3, NUM_BINS):
            raise ValueError(f"histogram must have shape (3, {NUM_BINS})")
        if np.any(arr < 0):
            raise ValueError("histogram bins must be non-negative")
        object.__setattr__(self, "bins", arr)

    def is_normalized(self, tolerance: float = 1e-9) -> bool:
        return bool(np.all(np.abs(self.bins.sum(axis=1) - 1.0) <= tolerance))

    def to_json(self, image_id: str) -> dict:
        return {"image_id": image_id, "bins": self.bins.tolist()}

    def save(self, path: str | Path, image_id: str) -> None:
        Path(path).write_text(json.dumps(self.to_json(image_id)))

    @classmethod
    def load(cls, path: str | Path) -> tuple[str, "ColorHistogram"]:
        data = json.loads(Path(path).read_text())
        return data["image_id"], cls(np.array(data["bins"], dtype=float))


def build_histogram(pixels) -> ColorHistogram:
    """Histogram of a list of [0,1]^3 colors; empty input falls back to uniform."""
    pixels = np.asarray(pixels, dtype=float).reshape(-1, 3)
    if pixels.shape[0] == 0:
        return ColorHistogram(np.full((3, NUM_BINS), 1.0 / NUM_BINS))
    indices = np.minimum((pixels * NUM_BINS).astype(int), NUM_BINS - 1)
    bins = np.zeros((3, NUM_BINS))
    for c in range(3):
        np.add.at(bins[c], indices[:, c], 1.0)
    return ColorHistogram(bins / bins.sum(axis=1, keepdims=True))


def hellinger(h1: ColorHistogram, h2: ColorHistogram) -> float:
    """Mean over channels of the per-channel Hellinger distance; in [0, 1]."""
    if not h1.is_normalized() or not h2.is_normalized():
        raise ValueError("histograms must be normalized")
    bhattacharyya = np.sqrt(h1.bins * h2.bins).sum(axis=1)
    per_channel = np.sqrt(np.maximum(0.0, 1.0 - bhattacharyya))
    return float(per_channel.mean())


def hellinger_cost_matrix(histograms: dict[str, ColorHistogram], delta_ppp: float):
    """Cost 1 - d_H - delta_ppp per unordered pair."""
    from .costs import CostMatrix, pair_key

    if not 0 <= delta_ppp <= 1:
        raise ValueError("delta_ppp must be in [0, 1]")
    ids = sorted(histograms)
    if len(ids) < 2:
        raise ValueError("need at least two histograms")
    costs = {}
    for i, a in enumerate(ids):
        for b in ids[i + 1 :]:
            costs[pair_key(a, b)] = 1.0 - hellinger(histograms[a], histograms[b]) - delta_ppp
    return CostMatrix(ids, costs)
