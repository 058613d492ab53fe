"""Cost-matrix export in the clustering pipeline's exchange format.

One entry per unordered pair, cost = mean of the two ordered pair scores,
written as ``{"ids": [...], "entries": [{"a", "b", "cost"}, ...]}`` with
a < b.  The file feeds the pipeline's external-file cost provider.
"""

from __future__ import annotations

import itertools
import json
from pathlib import Path

from .data import TwinDataset
from .model import TwinNetwork


def export_costs(model: TwinNetwork, data: TwinDataset) -> dict:
    ids = sorted(data.ids)
    if len(ids) < 2:
        raise ValueError("need at least two images")
    entries = []
    for a, b in itertools.combinations(ids, 2):
        cost = model.symmetric_cost(data.tensors[a], data.tensors[b])
        entries.append({"a": a, "b": b, "cost": cost})
    return {"ids": ids, "entries": entries}


def save_costs(model: TwinNetwork, data: TwinDataset, path: str | Path) -> None:
    Path(path).write_text(json.dumps(export_costs(model, data), indent=1))
