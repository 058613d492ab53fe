"""Shared-weight twin network.

Both inputs pass through the same head `embed` (an 18-layer residual
image backbone with its classifier replaced by a linear projection to
dimension d, or a 1-D convolutional analogue for histograms).  The base
consumes the concatenation of the two d-dimensional embeddings through
one rectified hidden layer and emits a scalar score: positive means the
pair should be joined.
"""

from __future__ import annotations

import torch
import torch.nn as nn
from torchvision.models import resnet18

from .config import TwinConfig


class _Residual1d(nn.Module):
    """Two 1-D convolutions with an identity skip connection."""

    def __init__(self, channels: int):
        super().__init__()
        self.conv1 = nn.Conv1d(channels, channels, kernel_size=3, padding=1, bias=False)
        self.bn1 = nn.BatchNorm1d(channels)
        self.conv2 = nn.Conv1d(channels, channels, kernel_size=3, padding=1, bias=False)
        self.bn2 = nn.BatchNorm1d(channels)
        self.relu = nn.ReLU(inplace=True)

    def forward(self, x):
        out = self.relu(self.bn1(self.conv1(x)))
        out = self.bn2(self.conv2(out))
        return self.relu(out + x)


def _histogram_head(embedding_dim: int) -> nn.Module:
    """1-D convolutional head for 3 x 256 channel histograms."""
    return nn.Sequential(
        nn.Conv1d(3, 32, kernel_size=7, stride=2, padding=3, bias=False),
        nn.BatchNorm1d(32),
        nn.ReLU(inplace=True),
        _Residual1d(32),
        nn.Conv1d(32, 64, kernel_size=3, stride=2, padding=1, bias=False),
        nn.BatchNorm1d(64),
        nn.ReLU(inplace=True),
        _Residual1d(64),
        nn.AdaptiveAvgPool1d(1),
        nn.Flatten(),
        nn.Linear(64, embedding_dim),
    )


def _image_head(embedding_dim: int) -> nn.Module:
    backbone = resnet18(weights=None)
    backbone.fc = nn.Linear(backbone.fc.in_features, embedding_dim)
    return backbone


class TwinNetwork(nn.Module):
    def __init__(self, cfg: TwinConfig):
        super().__init__()
        self.cfg = cfg
        if cfg.kind == "image":
            self.embed = _image_head(cfg.embedding_dim)
        else:
            self.embed = _histogram_head(cfg.embedding_dim)
        self.base = nn.Sequential(
            nn.Linear(2 * cfg.embedding_dim, cfg.base_hidden),
            nn.ReLU(inplace=True),
            nn.Linear(cfg.base_hidden, 1),
        )

    def forward(self, a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
        """Batched ordered pair score, shape (batch,)."""
        za = self.embed(a)
        zb = self.embed(b)
        return self.base(torch.cat([za, zb], dim=1)).squeeze(1)

    @torch.no_grad()
    def score_pair(self, a: torch.Tensor, b: torch.Tensor) -> float:
        """Ordered score for one pair (concatenation order matters)."""
        self.eval()
        return float(self.forward(a.unsqueeze(0), b.unsqueeze(0))[0])

    @torch.no_grad()
    def symmetric_cost(self, a: torch.Tensor, b: torch.Tensor) -> float:
        """Mean of the two ordered scores; symmetric by construction."""
        return 0.5 * (self.score_pair(a, b) + self.score_pair(b, a))


def base_parameter_count(model: TwinNetwork) -> int:
    return sum(p.numel() for p in model.base.parameters())
