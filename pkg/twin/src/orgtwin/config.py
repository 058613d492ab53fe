"""Training configuration for the twin networks."""

from __future__ import annotations

from dataclasses import dataclass

KINDS = ("image", "histogram")


@dataclass(frozen=True)
class TwinConfig:
    """Architecture and optimization settings.

    The base (the fully connected head consuming both embeddings) has one
    hidden layer of width `base_hidden`; with the defaults its parameter
    count is 2*128*128 + 128 + 128 + 1 = 33,025.  Batches are balanced:
    `batch_same` pairs from the same cluster and `batch_diff` pairs from
    distinct clusters.  Augmentation applies to images only; histograms
    are never augmented.
    """

    kind: str = "image"
    image_side: int = 256
    embedding_dim: int = 128
    base_hidden: int = 128
    learning_rate: float = 1e-4
    iterations: int = 2000
    batch_same: int = 32
    batch_diff: int = 32
    augment_prob: float = 0.2
    accuracy_target: float | None = None
    eval_every: int = 25
    rng_seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.image_side < 8:
            raise ValueError("image_side too small")
        if self.embedding_dim < 1 or self.base_hidden < 1:
            raise ValueError("layer widths must be positive")
        if self.batch_same < 1 or self.batch_diff < 1:
            raise ValueError("batch split must be positive")
        if self.learning_rate <= 0 or self.iterations < 1:
            raise ValueError("invalid optimization settings")
        if not 0.0 <= self.augment_prob <= 1.0:
            raise ValueError("augment_prob must be in [0, 1]")
        if self.accuracy_target is not None and not 0.0 < self.accuracy_target <= 1.0:
            raise ValueError("accuracy_target must be in (0, 1]")

    @property
    def batch_size(self) -> int:
        return self.batch_same + self.batch_diff
