"""Pair-classification and partition-comparison metrics.

Predictions are compared to a reference partition pair-by-pair (join =
same cluster, cut = distinct clusters).  Predictions may be an arbitrary
pair labeling, not necessarily transitive, so pre-clustering classifiers
can be scored with the same machinery.  Ratios that are undefined (0/0)
are reported as None, mirroring the "-" convention of result tables.

The variation of information splits into VI_C = H(pred | truth), charging
false cuts that fragment true clusters, and VI_J = H(truth | pred),
charging false joins; logarithms are base 2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .clustering import Partition
from .costs import pair_key

PairLabeling = dict[tuple[str, str], bool]


@dataclass(frozen=True)
class PairConfusion:
    """Counts over unordered pairs: joins/cuts in truth crossed with prediction."""

    true_join_pred_join: int
    true_join_pred_cut: int
    true_cut_pred_cut: int
    true_cut_pred_join: int

    @property
    def total(self) -> int:
        return (
            self.true_join_pred_join
            + self.true_join_pred_cut
            + self.true_cut_pred_cut
            + self.true_cut_pred_join
        )


def partition_labeling(p: Partition) -> PairLabeling:
    """Join/cut labels over all unordered pairs of the partition's ground set."""
    label = p.label_of()
    ids = sorted(p.ground_set)
    return {
        pair_key(a, b): label[a] == label[b]
        for i, a in enumerate(ids)
        for b in ids[i + 1 :]
    }


def pair_confusion(truth: Partition, pred: Partition | PairLabeling) -> PairConfusion:
    """Pairwise confusion counts; `pred` may be a partition or a raw pair labeling."""
    truth_labels = partition_labeling(truth)
    if isinstance(pred, Partition):
        if pred.ground_set != truth.ground_set:
            raise ValueError("ground sets differ")
        pred_labels = partition_labeling(pred)
    else:
        pred_labels = pred
        if set(pred_labels) != set(truth_labels):
            raise ValueError("ground sets differ")
    tj = fc = tc = fj = 0
    for key, is_join in truth_labels.items():
        pred_join = pred_labels[key]
        if is_join and pred_join:
            tj += 1
        elif is_join:
            fc += 1
        elif pred_join:
            fj += 1
        else:
            tc += 1
    return PairConfusion(tj, fc, tc, fj)


def _ratio(num: int, den: int) -> float | None:
    return None if den == 0 else num / den


def _f1(p: float | None, r: float | None) -> float | None:
    if p is None or r is None or p + r == 0:
        return None
    return 2 * p * r / (p + r)


def scores(c: PairConfusion) -> dict[str, float | None]:
    """ACC, precision/recall of cuts and joins, their F1 scores, and Rand's index."""
    tj, fc, tc, fj = (
        c.true_join_pred_join,
        c.true_join_pred_cut,
        c.true_cut_pred_cut,
        c.true_cut_pred_join,
    )
    acc = _ratio(tj + tc, c.total)
    pj = _ratio(tj, tj + fj)
    rj = _ratio(tj, tj + fc)
    pc = _ratio(tc, tc + fc)
    rc = _ratio(tc, tc + fj)
    return {
        "ACC": acc,
        "PC": pc,
        "RC": rc,
        "PJ": pj,
        "RJ": rj,
        "F1C": _f1(pc, rc),
        "F1J": _f1(pj, rj),
        "RI": acc,
    }


def variation_of_information(truth: Partition, pred: Partition) -> dict[str, float]:
    """VI = H(pred|truth) + H(truth|pred) in bits, with its two conditional halves."""
    if truth.ground_set != pred.ground_set:
        raise ValueError("ground sets differ")
    n = len(truth.ground_set)
    vi_c = 0.0  # H(pred | truth)
    vi_j = 0.0  # H(truth | pred)
    for a in truth.clusters:
        pa = len(a) / n
        for b in pred.clusters:
            pb = len(b) / n
            joint = len(a & b) / n
            if joint > 0.0:
                vi_c -= joint * math.log2(joint / pa)
                vi_j -= joint * math.log2(joint / pb)
    return {"VI": vi_c + vi_j, "VI_C": vi_c, "VI_J": vi_j}


def metrics_report(
    truth: Partition,
    pred_partition: Partition | None = None,
    pred_labels: PairLabeling | None = None,
) -> dict:
    """JSON-ready report with a classification block and/or a clustering block."""
    report: dict = {}
    if pred_labels is not None:
        report["classification"] = scores(pair_confusion(truth, pred_labels))
    if pred_partition is not None:
        block = scores(pair_confusion(truth, pred_partition))
        block.update(variation_of_information(truth, pred_partition))
        report["clustering"] = block
    return report


def save_report(report: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report, indent=1))
