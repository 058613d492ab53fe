"""Training loop: balanced pair batches, logistic loss, decoupled weight decay.

Each iteration samples `batch_same` same-cluster pairs and `batch_diff`
cross-cluster pairs, optionally augments image inputs (horizontal flip,
vertical flip, uniform rotation, each applied independently with the
configured probability), and minimizes the logistic loss on the raw pair
scores (join = positive class).  Training stops early once the pair
accuracy over the whole training set reaches `accuracy_target`, if set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
import torch.nn.functional as F
import torchvision.transforms.functional as TF

from .config import TwinConfig
from .data import TwinDataset
from .model import TwinNetwork


@dataclass
class TrainResult:
    model: TwinNetwork
    loss_trace: list[float]
    final_accuracy: float
    iterations_run: int


def _augment(batch: torch.Tensor, rng: np.random.Generator, prob: float) -> torch.Tensor:
    out = []
    for image in batch:
        if rng.random() < prob:
            image = torch.flip(image, dims=[2])
        if rng.random() < prob:
            image = torch.flip(image, dims=[1])
        if rng.random() < prob:
            angle = float(rng.uniform(0.0, 360.0))
            image = TF.rotate(image, angle)
        out.append(image)
    return torch.stack(out)


@torch.no_grad()
def pair_accuracy(model: TwinNetwork, data: TwinDataset) -> float:
    """Fraction of all training pairs classified correctly (score >= 0 = join)."""
    model.eval()
    same, diff = data.pair_lists()
    if not same and not diff:
        raise ValueError("dataset has no pairs")
    correct = 0
    for pairs, is_join in ((same, True), (diff, False)):
        for a, b in pairs:
            score = model.symmetric_cost(data.tensors[a], data.tensors[b])
            correct += (score >= 0.0) == is_join
    return correct / (len(same) + len(diff))


def train(data: TwinDataset, cfg: TwinConfig) -> TrainResult:
    if data.num_clusters < 2:
        raise ValueError("need at least two clusters to form training pairs")
    same, diff = data.pair_lists()
    if not same or not diff:
        raise ValueError("need both same-cluster and cross-cluster pairs")

    torch.manual_seed(cfg.rng_seed)
    rng = np.random.default_rng(cfg.rng_seed)
    model = TwinNetwork(cfg)
    optimizer = torch.optim.AdamW(model.parameters(), lr=cfg.learning_rate)

    loss_trace: list[float] = []
    accuracy = 0.0
    iterations_run = 0
    for t in range(1, cfg.iterations + 1):
        model.train()
        batch_pairs = [same[i] for i in rng.integers(0, len(same), cfg.batch_same)]
        batch_pairs += [diff[i] for i in rng.integers(0, len(diff), cfg.batch_diff)]
        targets = torch.tensor(
            [1.0] * cfg.batch_same + [-1.0] * cfg.batch_diff
        )

        left = torch.stack([data.tensors[a] for a, _ in batch_pairs])
        right = torch.stack([data.tensors[b] for _, b in batch_pairs])
        if cfg.kind == "image" and cfg.augment_prob > 0.0:
            left = _augment(left, rng, cfg.augment_prob)
            right = _augment(right, rng, cfg.augment_prob)

        scores = model(left, right)
        loss = F.softplus(-targets * scores).mean()
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        loss_trace.append(loss.item())
        iterations_run = t

        if cfg.accuracy_target is not None and t % cfg.eval_every == 0:
            accuracy = pair_accuracy(model, data)
            if accuracy >= cfg.accuracy_target:
                break

    accuracy = pair_accuracy(model, data)
    return TrainResult(model, loss_trace, accuracy, iterations_run)
