"""Image loading and normalization.

Every image becomes a 3 x side x side tensor in [0, 1]: the longest side
is scaled to `side` (aspect ratio preserved), and the result is centered
on a zero background.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F
from PIL import Image


def preprocess(image, side: int = 256) -> torch.Tensor:
    """Scale to fit, center and zero-pad a H x W x 3 array (values in [0, 1])."""
    array = np.asarray(image, dtype=np.float32)
    if array.ndim == 2:
        array = np.stack([array] * 3, axis=-1)
    if array.ndim != 3 or array.shape[2] != 3:
        raise ValueError("expected an H x W x 3 image")
    h, w = array.shape[:2]
    if h == 0 or w == 0:
        raise ValueError("empty image")
    if np.min(array) < 0.0 or np.max(array) > 1.0:
        raise ValueError("image values must be in [0, 1]")

    tensor = torch.from_numpy(array).permute(2, 0, 1).unsqueeze(0)
    scale = side / max(h, w)
    new_h = max(1, round(h * scale))
    new_w = max(1, round(w * scale))
    if (new_h, new_w) != (h, w):
        tensor = F.interpolate(
            tensor, size=(new_h, new_w), mode="bilinear", align_corners=False
        )
    tensor = tensor.clamp(0.0, 1.0).squeeze(0)

    out = torch.zeros(3, side, side)
    top = (side - new_h) // 2
    left = (side - new_w) // 2
    out[:, top : top + new_h, left : left + new_w] = tensor
    return out


def load_image(path: str | Path, side: int = 256) -> torch.Tensor:
    """Read an image file and preprocess it."""
    with Image.open(path) as img:
        array = np.asarray(img.convert("RGB"), dtype=np.float32) / 255.0
    return preprocess(array, side)
