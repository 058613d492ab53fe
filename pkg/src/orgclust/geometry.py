"""Domain types and geometric primitives for images-as-point-sets.

An image is represented by a set of key points (position + color), the
barycenter of the depicted object and its extent (the furthest reachable
distance from the barycenter inside the object's segment).  All pairwise
matching costs are built from the quantities computed here: the radius of a
key point relative to the extent, the angle between two key points as seen
from the barycenter, and the Euclidean distance between key-point colors.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

EXTENT_RAY_STEP = 0.01


class Channel(enum.Enum):
    """Provenance tag of a key point; does not influence matching."""

    GREEN = "green"
    BLUE = "blue"
    RED = "red"


@dataclass(frozen=True)
class KeyPoint:
    """A distinguished image location with an associated color.

    position is given in image-plane pixel coordinates, color as three
    channel intensities normalized to [0, 1].
    """

    position: np.ndarray
    color: np.ndarray
    channel: Channel = Channel.GREEN

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float)
        col = np.asarray(self.color, dtype=float)
        if pos.shape != (2,) or not np.all(np.isfinite(pos)):
            raise ValueError("key point position must be a finite 2-vector")
        if col.shape != (3,) or np.any(col < 0.0) or np.any(col > 1.0):
            raise ValueError("key point color must be a 3-vector in [0, 1]")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "color", col)


@dataclass(frozen=True)
class OrganoidModel:
    """Per-image bundle of key points, barycenter and extent."""

    image_id: str
    points: tuple[KeyPoint, ...]
    barycenter: np.ndarray
    extent: float

    def __post_init__(self):
        bc = np.asarray(self.barycenter, dtype=float)
        if bc.shape != (2,) or not np.all(np.isfinite(bc)):
            raise ValueError("barycenter must be a finite 2-vector")
        if not self.extent > 0:
            raise ValueError("extent must be positive")
        object.__setattr__(self, "barycenter", bc)
        object.__setattr__(self, "points", tuple(self.points))


@dataclass(frozen=True)
class SegmentMask:
    """Set of integer pixel coordinates belonging to the object's segment."""

    pixels: frozenset[tuple[int, int]]

    def __post_init__(self):
        if not self.pixels:
            raise ValueError("empty segment")
        object.__setattr__(
            self, "pixels", frozenset((int(x), int(y)) for x, y in self.pixels)
        )


@dataclass(frozen=True)
class SimilarityTransform:
    """Rotation by `angle`, scaling by `scale`, mapping source_center to translation_target."""

    translation_target: np.ndarray
    scale: float
    angle: float
    source_center: np.ndarray

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        object.__setattr__(
            self, "translation_target", np.asarray(self.translation_target, dtype=float)
        )
        object.__setattr__(
            self, "source_center", np.asarray(self.source_center, dtype=float)
        )

    @property
    def rotation_matrix(self) -> np.ndarray:
        c, s = math.cos(self.angle), math.sin(self.angle)
        return np.array([[c, -s], [s, c]])


def estimate_barycenter(mask: SegmentMask) -> np.ndarray:
    """Arithmetic mean of the segment's pixel coordinates."""
    arr = np.array(sorted(mask.pixels), dtype=float)
    return arr.mean(axis=0)


def estimate_extent(
    mask: SegmentMask,
    model_points: list[KeyPoint],
    barycenter: np.ndarray,
    step: float = EXTENT_RAY_STEP,
) -> float:
    """Furthest reachable distance from the barycenter inside the segment.

    For every key point, a ray from the barycenter through the point is
    stepped in increments of `step` (in units of the barycenter-to-point
    distance); the largest multiple whose floored coordinate lies inside the
    mask approximates the supremum.  The result is the maximum over key
    points of distance * supremum.
    """
    barycenter = np.asarray(barycenter, dtype=float)
    pts = np.array(sorted(mask.pixels), dtype=float)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    diagonal = float(np.linalg.norm(hi - lo)) + 1.0

    best = 0.0
    any_direction = False
    for kp in model_points:
        direction = kp.position - barycenter
        dist = float(np.linalg.norm(direction))
        if dist == 0.0:
            continue
        any_direction = True
        lam_max = diagonal / dist
        lam = 0.0
        lam_in = 0.0
        while lam <= lam_max:
            p = barycenter + lam * direction
            if (math.floor(p[0]), math.floor(p[1])) in mask.pixels:
                lam_in = lam
            lam += step
        best = max(best, dist * lam_in)
    if not any_direction:
        raise ValueError("degenerate model")
    if best <= 0.0:
        raise ValueError("degenerate model")
    return best


def relative_radius(point: KeyPoint, model: OrganoidModel) -> float:
    """Distance of the point to the barycenter, divided by the extent."""
    return float(np.linalg.norm(point.position - model.barycenter)) / model.extent


def inter_point_angle(v: KeyPoint, v2: KeyPoint, model: OrganoidModel) -> float:
    """Unsigned angle in [0, pi] between the two barycenter-relative vectors."""
    a = v.position - model.barycenter
    b = v2.position - model.barycenter
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("point at barycenter")
    cos = float(np.dot(a, b) / (na * nb))
    return math.acos(min(1.0, max(-1.0, cos)))


def color_distance(v: KeyPoint, w: KeyPoint) -> float:
    """Euclidean norm of the color difference."""
    return float(np.linalg.norm(v.color - w.color))


def apply_transform(t: SimilarityTransform, r: np.ndarray) -> np.ndarray:
    """Rotate, scale and translate `r`; maps t.source_center onto t.translation_target."""
    r = np.asarray(r, dtype=float)
    return t.translation_target + t.scale * (t.rotation_matrix @ (r - t.source_center))


def validate_against_mask(
    model: OrganoidModel, mask: SegmentMask, tolerance: float = 1e-6
) -> bool:
    """Recompute barycenter/extent from the mask; warn on mismatch with stored values."""
    bc = estimate_barycenter(mask)
    ext = estimate_extent(mask, list(model.points), bc)
    ok = True
    if np.linalg.norm(bc - model.barycenter) > tolerance:
        warnings.warn(
            f"{model.image_id}: stored barycenter {model.barycenter.tolist()} "
            f"differs from mask estimate {bc.tolist()}"
        )
        ok = False
    if abs(ext - model.extent) > tolerance:
        warnings.warn(
            f"{model.image_id}: stored extent {model.extent} differs from mask estimate {ext}"
        )
        ok = False
    return ok
