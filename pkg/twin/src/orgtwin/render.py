"""Rasterization of key-point files into images.

Turns the clustering pipeline's key-point JSON (positions, colors,
barycenter, extent) into an RGB image: the model is centered and scaled
so its extent fills most of the frame, and each key point is drawn as a
filled disc in its own color on a black background.  The manifest is
rewritten with `image_file` entries so the image twin can train on it.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

_FILL_FRACTION = 0.42  # extent maps to this fraction of the image side
_DISC_FRACTION = 0.04  # key-point disc radius as a fraction of the side


def render_keypoints(keypoint_payload: dict, side: int) -> Image.Image:
    barycenter = np.asarray(keypoint_payload["barycenter"], dtype=float)
    extent = float(keypoint_payload["extent"])
    if extent <= 0:
        raise ValueError("extent must be positive")
    image = Image.new("RGB", (side, side))
    draw = ImageDraw.Draw(image)
    scale = _FILL_FRACTION * side / extent
    radius = max(1, int(_DISC_FRACTION * side))
    for point in keypoint_payload["points"]:
        position = (np.array([point["x"], point["y"]]) - barycenter) * scale
        cx = side / 2 + position[0]
        cy = side / 2 + position[1]
        color = tuple(int(round(255 * c)) for c in point["color"])
        draw.ellipse([cx - radius, cy - radius, cx + radius, cy + radius], fill=color)
    return image


def render_manifest(manifest_path: str | Path, side: int = 256) -> Path:
    """Render every image of a manifest and record the files in the manifest."""
    manifest_path = Path(manifest_path)
    data = json.loads(manifest_path.read_text())
    base_dir = manifest_path.parent
    for entry in data["images"]:
        payload = json.loads((base_dir / entry["keypoints_file"]).read_text())
        image = render_keypoints(payload, side)
        image_file = f"{entry['image_id']}.png"
        image.save(base_dir / image_file)
        entry["image_file"] = image_file
    manifest_path.write_text(json.dumps(data, indent=1))
    return manifest_path
