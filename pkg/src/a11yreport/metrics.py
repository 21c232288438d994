"""Evaluation arithmetic for element correspondences and screen groupings."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .grouping import Storyboard


@dataclass(frozen=True)
class CorrespondenceJudgment:
    template: str
    predicted: str | None
    gold: str | None


def _rates(tp: int, fp: int, fn: int, tn: int) -> dict[str, float]:
    total = tp + fp + fn + tn
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    accuracy = (tp + tn) / total if total else 0.0
    return {
        "precision": precision,
        "recall": recall,
        "f1": f1,
        "accuracy": accuracy,
        "tp": tp,
        "fp": fp,
        "fn": fn,
        "tn": tn,
    }


def matching_metrics(judgments: list[CorrespondenceJudgment]) -> dict[str, float]:
    """Precision/recall/F1/accuracy of predicted element correspondences.

    A prediction counts as correct only when it names the same element the
    annotation does; predicting anything for an unmatched template, or the
    wrong element for a matched one, is a false positive.
    """
    tp = fp = fn = tn = 0
    for j in judgments:
        if j.predicted is None and j.gold is None:
            tn += 1
        elif j.predicted is None:
            fn += 1
        elif j.gold is None or j.predicted != j.gold:
            fp += 1
        else:
            tp += 1
    return _rates(tp, fp, fn, tn)


def pairwise_grouping_metrics(
    predicted: Storyboard, gold: dict[str, object]
) -> dict[str, float]:
    """Same-screen metrics over all unordered capture pairs.

    `gold` maps capture_id to any group label. A pair is positive when both
    captures share a group.
    """
    pred_label: dict[str, int] = {}
    for group in predicted.groups:
        for capture_id in group.member_ids:
            pred_label[capture_id] = group.group_id
    if set(pred_label) != set(gold):
        missing = set(gold) ^ set(pred_label)
        raise ValueError(f"capture sets differ between prediction and gold: {sorted(missing)[:5]}")

    tp = fp = fn = tn = 0
    for a, b in combinations(sorted(gold), 2):
        same_pred = pred_label[a] == pred_label[b]
        same_gold = gold[a] == gold[b]
        if same_pred and same_gold:
            tp += 1
        elif same_pred:
            fp += 1
        elif same_gold:
            fn += 1
        else:
            tn += 1
    return _rates(tp, fp, fn, tn)


def confusion_union(parts: list[dict[str, float]]) -> dict[str, float]:
    """Pool confusion counts from several evaluations into one metric set."""
    tp = sum(int(p["tp"]) for p in parts)
    fp = sum(int(p["fp"]) for p in parts)
    fn = sum(int(p["fn"]) for p in parts)
    tn = sum(int(p["tn"]) for p in parts)
    return _rates(tp, fp, fn, tn)
