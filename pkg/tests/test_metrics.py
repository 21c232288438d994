import random

import pytest

from a11yreport.grouping import ScreenGroup, Storyboard
from a11yreport.metrics import (
    CorrespondenceJudgment,
    confusion_union,
    matching_metrics,
    pairwise_grouping_metrics,
)


def J(template, predicted, gold):
    return CorrespondenceJudgment(template, predicted, gold)


def test_matching_all_correct():
    judgments = [J(f"t{i}", f"d{i}", f"d{i}") for i in range(5)]
    metrics = matching_metrics(judgments)
    assert metrics["precision"] == metrics["recall"] == metrics["f1"] == 1.0
    assert metrics["accuracy"] == 1.0


def test_matching_hand_computed_confusion():
    judgments = [
        J("a", "x", "x"),  # TP
        J("b", "y", "y"),  # TP
        J("c", "z", "w"),  # FP (wrong element)
        J("d", None, "v"),  # FN
    ]
    metrics = matching_metrics(judgments)
    assert metrics["precision"] == pytest.approx(2 / 3)
    assert metrics["recall"] == pytest.approx(2 / 3)
    assert metrics["f1"] == pytest.approx(2 / 3)
    assert (metrics["tp"], metrics["fp"], metrics["fn"], metrics["tn"]) == (2, 1, 1, 0)


def test_matching_prediction_for_unmatched_template_is_fp():
    metrics = matching_metrics([J("a", "x", None)])
    assert metrics["fp"] == 1
    assert metrics["precision"] == 0.0


def test_matching_both_none_is_tn():
    metrics = matching_metrics([J("a", None, None)])
    assert metrics["tn"] == 1
    assert metrics["accuracy"] == 1.0


def test_matching_empty_input_all_zero():
    metrics = matching_metrics([])
    for key in ("precision", "recall", "f1", "accuracy"):
        assert metrics[key] == 0.0


def test_matching_permutation_invariant():
    rng = random.Random(11)
    judgments = [J(f"t{i}", rng.choice(["a", "b", None]), rng.choice(["a", "b", None]))
                 for i in range(30)]
    baseline = matching_metrics(judgments)
    for _ in range(5):
        shuffled = judgments[:]
        rng.shuffle(shuffled)
        assert matching_metrics(shuffled) == baseline


def _storyboard(groups: dict[int, list[str]]) -> Storyboard:
    sb = Storyboard()
    for gid, members in sorted(groups.items()):
        sb.groups.append(ScreenGroup(gid, members, members[0]))
    return sb


def test_grouping_identical_prediction():
    gold = {"a": 0, "b": 0, "c": 1}
    sb = _storyboard({0: ["a", "b"], 1: ["c"]})
    metrics = pairwise_grouping_metrics(sb, gold)
    assert metrics["accuracy"] == 1.0
    assert metrics["f1"] == 1.0


def test_grouping_split_pair_hand_enumerated():
    # gold {AB}{C}, predicted all singletons: pairs AB(FN), AC(TN), BC(TN)
    gold = {"a": "g1", "b": "g1", "c": "g2"}
    sb = _storyboard({0: ["a"], 1: ["b"], 2: ["c"]})
    metrics = pairwise_grouping_metrics(sb, gold)
    assert (metrics["tp"], metrics["fp"], metrics["fn"], metrics["tn"]) == (0, 0, 1, 2)
    assert metrics["recall"] == 0.0
    assert metrics["precision"] == 0.0
    assert metrics["accuracy"] == pytest.approx(2 / 3)


def test_grouping_everything_merged_hand_enumerated():
    # gold singletons, predicted one group of three: all 3 pairs are FP
    gold = {"a": 0, "b": 1, "c": 2}
    sb = _storyboard({0: ["a", "b", "c"]})
    metrics = pairwise_grouping_metrics(sb, gold)
    assert (metrics["tp"], metrics["fp"], metrics["fn"], metrics["tn"]) == (0, 3, 0, 0)
    assert metrics["precision"] == 0.0
    assert metrics["accuracy"] == 0.0


def test_grouping_capture_set_mismatch_raises():
    gold = {"a": 0, "b": 0}
    sb = _storyboard({0: ["a", "x"]})
    with pytest.raises(ValueError, match="capture sets differ"):
        pairwise_grouping_metrics(sb, gold)


def test_f1_is_harmonic_mean_when_nonzero():
    rng = random.Random(23)
    for _ in range(50):
        judgments = [
            J(f"t{i}", rng.choice(["a", "b", "c", None]), rng.choice(["a", "b", "c", None]))
            for i in range(40)
        ]
        metrics = matching_metrics(judgments)
        p, r = metrics["precision"], metrics["recall"]
        if p > 0 and r > 0:
            assert metrics["f1"] == pytest.approx(2 * p * r / (p + r), abs=1e-9)


def test_confusion_union_pools_counts():
    parts = [
        matching_metrics([J("a", "x", "x"), J("b", None, "y")]),
        matching_metrics([J("c", "z", "z")]),
    ]
    pooled = confusion_union(parts)
    assert (pooled["tp"], pooled["fn"]) == (2, 1)
    assert pooled["recall"] == pytest.approx(2 / 3)
