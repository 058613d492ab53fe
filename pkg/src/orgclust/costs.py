"""Symmetric pairwise cost matrices over an image collection.

This is the exchange format between cost providers (key-point matching,
histogram baseline, external trained models) and the clustering solver.
On disk: ``{"ids": [...], "entries": [{"a": ..., "b": ..., "cost": ...}]}``
with ``a < b`` lexicographically and one entry per unordered pair.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator


def pair_key(a: str, b: str) -> tuple[str, str]:
    if a == b:
        raise ValueError(f"self-pair {a!r} has no cost")
    return (a, b) if a < b else (b, a)


@dataclass
class CostMatrix:
    """Complete set of finite costs over all unordered pairs of ids."""

    ids: list[str]
    costs: dict[tuple[str, str], float]

    def __post_init__(self):
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("duplicate ids in cost matrix")
        expected = {pair_key(a, b) for i, a in enumerate(self.ids) for b in self.ids[i + 1 :]}
        if set(self.costs) != expected:
            raise ValueError("cost matrix is not complete over all unordered pairs")
        for key, value in self.costs.items():
            if not math.isfinite(value):
                raise ValueError(f"non-finite cost for pair {key}")

    def get(self, a: str, b: str) -> float:
        return self.costs[pair_key(a, b)]

    def pairs(self) -> Iterator[tuple[str, str, float]]:
        for (a, b), cost in sorted(self.costs.items()):
            yield a, b, cost

    def shifted(self, chi: float) -> "CostMatrix":
        return CostMatrix(list(self.ids), {k: v + chi for k, v in self.costs.items()})

    def scaled_to_unit(self) -> "CostMatrix":
        """Divide all entries by max |cost| so that the range fits [-1, 1].

        Positive scaling does not alter optimal partitions.
        """
        peak = max((abs(v) for v in self.costs.values()), default=0.0)
        if peak == 0.0:
            return CostMatrix(list(self.ids), dict(self.costs))
        return CostMatrix(list(self.ids), {k: v / peak for k, v in self.costs.items()})

    def to_json(self) -> dict:
        return {
            "ids": sorted(self.ids),
            "entries": [{"a": a, "b": b, "cost": c} for a, b, c in self.pairs()],
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1))

    @classmethod
    def from_json(cls, data: dict) -> "CostMatrix":
        costs = {pair_key(e["a"], e["b"]): float(e["cost"]) for e in data["entries"]}
        return cls(list(data["ids"]), costs)

    @classmethod
    def load(cls, path: str | Path) -> "CostMatrix":
        return cls.from_json(json.loads(Path(path).read_text()))
