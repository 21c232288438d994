import json
import random

import numpy as np
import pytest

from a11yreport.capture import BundleError, associate_issue, load_bundle, write_bundle
from a11yreport.geometry import Rect
from a11yreport.synth import SynthSpec, generate_app

from conftest import blank_screen, bundle_of, det, issue, make_capture


def test_load_write_round_trip(tmp_path, plain_app):
    bundle = plain_app.bundle
    root = write_bundle(bundle, tmp_path / "bundle")
    loaded = load_bundle(root)

    assert loaded.app_id == bundle.app_id
    assert loaded.run_id == bundle.run_id
    assert [c.capture_id for c in loaded.captures] == [c.capture_id for c in bundle.captures]
    for a, b in zip(loaded.captures, bundle.captures):
        assert np.array_equal(a.screenshot, b.screenshot)
        assert a.issues == b.issues
        assert a.detections == b.detections
        assert np.allclose(a.embedding, b.embedding)


def test_write_load_write_is_stable(tmp_path, plain_app):
    first = write_bundle(plain_app.bundle, tmp_path / "one")
    second = write_bundle(load_bundle(first), tmp_path / "two")
    for name in ("manifest.json", "000.png", "000.issues.json", "000.detections.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_three_capture_bundle_ordinals(tmp_path):
    captures = [make_capture(f"c{i}", ordinal=i) for i in (2, 0, 1)]
    root = write_bundle(bundle_of(*captures), tmp_path / "b")
    loaded = load_bundle(root)
    assert [c.ordinal for c in loaded.captures] == [0, 1, 2]


def test_missing_manifest(tmp_path):
    with pytest.raises(BundleError, match="manifest"):
        load_bundle(tmp_path)


def test_missing_screenshot_names_file(tmp_path):
    root = write_bundle(bundle_of(make_capture()), tmp_path / "b")
    (root / "000.png").unlink()
    with pytest.raises(BundleError, match="000.png"):
        load_bundle(root)


def test_unknown_category_names_field(tmp_path):
    root = write_bundle(bundle_of(make_capture()), tmp_path / "b")
    (root / "000.issues.json").write_text(json.dumps(
        [{"category": "Nonsense", "check_name": "x", "message": "", "bbox": {"x": 0, "y": 0, "w": 1, "h": 1}}]
    ))
    with pytest.raises(BundleError, match="Nonsense"):
        load_bundle(root)


def test_duplicate_ordinal_rejected(tmp_path):
    root = write_bundle(bundle_of(make_capture("a", 0), make_capture("b", 1)), tmp_path / "b")
    manifest = json.loads((root / "manifest.json").read_text())
    manifest["captures"][1]["ordinal"] = 0
    (root / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises(BundleError, match="ordinal"):
        load_bundle(root)


def test_embedding_length_mismatch_rejected(tmp_path):
    caps = [
        make_capture("a", 0, embedding=np.zeros(4)),
        make_capture("b", 1, embedding=np.zeros(5)),
    ]
    root = write_bundle(bundle_of(*caps), tmp_path / "b")
    with pytest.raises(BundleError, match="embedding length"):
        load_bundle(root)


def test_issue_bbox_clamped_to_screenshot(tmp_path):
    # screenshot is 200 wide; the issue spills 5px past the right edge
    cap = make_capture(issues=[issue("i0", 150, 10, 55, 20)])
    root = write_bundle(bundle_of(cap), tmp_path / "b")
    loaded = load_bundle(root)
    bbox = loaded.captures[0].issues[0].bbox
    assert bbox.right == 200
    assert bbox == Rect(150, 10, 50, 20)


# -- associate_issue --------------------------------------------------------


def test_associate_identical_bbox():
    d = det("d0", "Text", 10, 10, 50, 20, text="hello")
    assert associate_issue(issue("i", 10, 10, 50, 20), [d]) == "d0"


def test_associate_empty_detections_is_none():
    assert associate_issue(issue("i", 10, 10, 50, 20), []) is None


def test_associate_center_in_empty_space_is_none():
    detections = [det("d0", "Text", 0, 0, 20, 20)]
    assert associate_issue(issue("i", 100, 100, 10, 10), detections) is None


def test_associate_low_iou_center_containment():
    # IoU is exactly 0.25 (< 0.3) but the issue center sits inside the detection
    a = det("a", "Container", 0, 0, 100, 100)
    got = associate_issue(issue("i", 0, 0, 100, 25), [a])
    assert got == "a"


def test_associate_prefers_higher_iou():
    a = det("a", "Text", 0, 0, 100, 100)
    b = det("b", "Text", 0, 0, 50, 50)  # IoU with the issue is higher
    assert associate_issue(issue("i", 0, 0, 50, 50), [a, b]) == "b"


def test_associate_tie_breaks_on_smaller_area_then_id():
    probe = issue("i", 40, 40, 20, 20)
    big = det("big", "Container", 0, 0, 200, 200)
    small = det("small", "Container", 20, 20, 100, 100)
    assert associate_issue(probe, [big, small]) == "small"

    twin_a = det("aa", "Container", 20, 20, 100, 100)
    twin_b = det("bb", "Container", 20, 20, 100, 100)
    assert associate_issue(probe, [twin_b, twin_a]) == "aa"


def test_associate_permutation_invariant(plain_app):
    rng = random.Random(5)
    for cap in plain_app.bundle.captures[:4]:
        for iss in cap.issues:
            baseline = associate_issue(iss, cap.detections)
            for _ in range(5):
                shuffled = list(cap.detections)
                rng.shuffle(shuffled)
                assert associate_issue(iss, shuffled) == baseline


def test_generated_bundles_validate_on_load(tmp_path):
    app = generate_app(SynthSpec(seed=3, screens_per_app=4,
                                 variation_weights={"scrolled": 1.0}))
    root = write_bundle(app.bundle, tmp_path / "b")
    loaded = load_bundle(root)
    assert len(loaded.captures) == 4
    assert loaded.has_embeddings
