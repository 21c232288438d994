"""Capture bundle data model: screenshots, audit issues, element detections.

A bundle directory holds a ``manifest.json`` plus per-capture assets:
``NNN.png`` (screenshot), ``NNN.issues.json``, ``NNN.detections.json`` and an
optional ``NNN.embedding.json``. All boxes are integer pixels; boxes that
spill past the screenshot are clamped at load, not rejected.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .geometry import Rect, iou

ISSUE_CATEGORIES = (
    "ElementDescription",
    "Contrast",
    "HitRegion",
    "ElementDetection",
    "ClippedText",
    "Traits",
    "LargeText",
)

DETECTION_KINDS = (
    "Text",
    "Icon",
    "Picture",
    "TabButton",
    "Toggle",
    "Checkbox",
    "SegmentedControl",
    "TextField",
    "Slider",
    "Container",
    "PageControl",
    "Dialog",
)

# Detections whose maximal-overlap box wins the issue; below this we fall back
# to center containment.
ISSUE_ASSOCIATION_IOU = 0.30


class BundleError(ValueError):
    """A bundle directory is missing assets or violates the schema."""


@dataclass(frozen=True)
class AccessibilityIssue:
    issue_id: str
    category: str
    check_name: str
    message: str
    bbox: Rect

    def to_json(self) -> dict:
        return {
            "id": self.issue_id,
            "category": self.category,
            "check_name": self.check_name,
            "message": self.message,
            "bbox": self.bbox.to_json(),
        }


@dataclass(frozen=True)
class ElementDetection:
    detection_id: str
    kind: str
    bbox: Rect
    text: str | None = None
    confidence: float = 1.0

    def to_json(self) -> dict:
        return {
            "id": self.detection_id,
            "kind": self.kind,
            "bbox": self.bbox.to_json(),
            "text": self.text,
            "confidence": self.confidence,
        }

    @classmethod
    def from_json(cls, doc: dict, detection_id: str | None = None) -> "ElementDetection":
        return cls(
            detection_id=str(doc.get("id") or detection_id),
            kind=doc["kind"],
            bbox=Rect.from_json(doc["bbox"]),
            text=doc.get("text"),
            confidence=float(doc.get("confidence", 1.0)),
        )


@dataclass(eq=False)
class ScreenCapture:
    capture_id: str
    ordinal: int
    screenshot: np.ndarray  # H x W x 3 uint8
    issues: list[AccessibilityIssue] = field(default_factory=list)
    detections: list[ElementDetection] = field(default_factory=list)
    embedding: np.ndarray | None = None
    device_scale: float = 1.0

    @property
    def width(self) -> int:
        return self.screenshot.shape[1]

    @property
    def height(self) -> int:
        return self.screenshot.shape[0]

    def detection(self, detection_id: str) -> ElementDetection:
        for det in self.detections:
            if det.detection_id == detection_id:
                return det
        raise KeyError(detection_id)


@dataclass(eq=False)
class CaptureBundle:
    app_id: str
    run_id: str
    captures: list[ScreenCapture]
    similarity_mode_hint: str | None = None

    def capture(self, capture_id: str) -> ScreenCapture:
        for cap in self.captures:
            if cap.capture_id == capture_id:
                return cap
        raise KeyError(capture_id)

    @property
    def has_embeddings(self) -> bool:
        return all(cap.embedding is not None for cap in self.captures)


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise BundleError(f"{where}: missing field '{key}'")
    return doc[key]


def _load_rect(doc: dict, where: str) -> Rect:
    bbox = _require(doc, "bbox", where)
    try:
        rect = Rect.from_json(bbox)
    except (KeyError, TypeError, ValueError) as exc:
        raise BundleError(f"{where}: malformed bbox {bbox!r}") from exc
    if rect.w < 0 or rect.h < 0:
        raise BundleError(f"{where}: bbox has negative extent {bbox!r}")
    return rect


def _load_issues(path: Path, capture_id: str, width: int, height: int) -> list[AccessibilityIssue]:
    docs = json.loads(path.read_text(encoding="utf-8"))
    issues = []
    for idx, doc in enumerate(docs):
        where = f"{path.name}[{idx}]"
        category = _require(doc, "category", where)
        if category not in ISSUE_CATEGORIES:
            raise BundleError(f"{where}: unknown category '{category}'")
        rect = _load_rect(doc, where).clamped(width, height)
        issues.append(
            AccessibilityIssue(
                issue_id=str(doc.get("id") or f"{capture_id}:i{idx}"),
                category=category,
                check_name=str(_require(doc, "check_name", where)),
                message=str(doc.get("message", "")),
                bbox=rect,
            )
        )
    return issues


def _load_detections(path: Path, capture_id: str, width: int, height: int) -> list[ElementDetection]:
    docs = json.loads(path.read_text(encoding="utf-8"))
    detections = []
    for idx, doc in enumerate(docs):
        where = f"{path.name}[{idx}]"
        kind = _require(doc, "kind", where)
        if kind not in DETECTION_KINDS:
            raise BundleError(f"{where}: unknown detection kind '{kind}'")
        confidence = float(doc.get("confidence", 1.0))
        if not 0.0 <= confidence <= 1.0:
            raise BundleError(f"{where}: confidence {confidence} outside [0, 1]")
        rect = _load_rect(doc, where).clamped(width, height)
        detections.append(
            ElementDetection(
                detection_id=str(doc.get("id") or f"{capture_id}:d{idx}"),
                kind=kind,
                bbox=rect,
                text=doc.get("text"),
                confidence=confidence,
            )
        )
    return detections


def load_bundle(path: str | Path) -> CaptureBundle:
    """Load and validate a capture bundle directory."""
    root = Path(path)
    manifest_path = root / "manifest.json"
    if not manifest_path.is_file():
        raise BundleError(f"missing manifest: {manifest_path}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))

    entries = _require(manifest, "captures", "manifest.json")
    if not entries:
        raise BundleError("manifest.json: bundle has no captures")

    captures: list[ScreenCapture] = []
    seen_ordinals: set[int] = set()
    embedding_len: int | None = None
    for idx, entry in enumerate(entries):
        where = f"manifest.json captures[{idx}]"
        ordinal = int(_require(entry, "ordinal", where))
        if ordinal in seen_ordinals:
            raise BundleError(f"{where}: duplicate ordinal {ordinal}")
        seen_ordinals.add(ordinal)

        shot_name = _require(entry, "screenshot", where)
        shot_path = root / shot_name
        if not shot_path.is_file():
            raise BundleError(f"{where}: missing screenshot file {shot_path}")
        try:
            with Image.open(shot_path) as img:
                screenshot = np.asarray(img.convert("RGB"), dtype=np.uint8)
        except Exception as exc:
            raise BundleError(f"{where}: unreadable raster {shot_path}: {exc}") from exc
        height, width = screenshot.shape[:2]

        capture_id = str(entry.get("capture_id") or Path(shot_name).stem)
        issues_path = root / _require(entry, "issues", where)
        if not issues_path.is_file():
            raise BundleError(f"{where}: missing issues file {issues_path}")
        detections_path = root / _require(entry, "detections", where)
        if not detections_path.is_file():
            raise BundleError(f"{where}: missing detections file {detections_path}")

        embedding = None
        if entry.get("embedding"):
            emb_path = root / entry["embedding"]
            if not emb_path.is_file():
                raise BundleError(f"{where}: missing embedding file {emb_path}")
            embedding = np.asarray(json.loads(emb_path.read_text(encoding="utf-8")), dtype=np.float64)
            if embedding.ndim != 1:
                raise BundleError(f"{where}: embedding must be a flat vector")
            if embedding_len is None:
                embedding_len = embedding.size
            elif embedding.size != embedding_len:
                raise BundleError(
                    f"{where}: embedding length {embedding.size} != {embedding_len} used elsewhere"
                )

        captures.append(
            ScreenCapture(
                capture_id=capture_id,
                ordinal=ordinal,
                screenshot=screenshot,
                issues=_load_issues(issues_path, capture_id, width, height),
                detections=_load_detections(detections_path, capture_id, width, height),
                embedding=embedding,
                device_scale=float(entry.get("device_scale", 1.0)),
            )
        )

    captures.sort(key=lambda cap: cap.ordinal)
    return CaptureBundle(
        app_id=str(manifest.get("app_id", "")),
        run_id=str(manifest.get("run_id", "")),
        captures=captures,
        similarity_mode_hint=manifest.get("similarity_mode_hint"),
    )


def write_bundle(bundle: CaptureBundle, path: str | Path) -> Path:
    """Write a bundle directory in the layout `load_bundle` reads back."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    entries = []
    for cap in bundle.captures:
        stem = f"{cap.ordinal:03d}"
        Image.fromarray(cap.screenshot).save(root / f"{stem}.png")
        (root / f"{stem}.issues.json").write_text(
            json.dumps([issue.to_json() for issue in cap.issues], indent=1), encoding="utf-8"
        )
        (root / f"{stem}.detections.json").write_text(
            json.dumps([det.to_json() for det in cap.detections], indent=1), encoding="utf-8"
        )
        entry = {
            "capture_id": cap.capture_id,
            "ordinal": cap.ordinal,
            "device_scale": cap.device_scale,
            "screenshot": f"{stem}.png",
            "issues": f"{stem}.issues.json",
            "detections": f"{stem}.detections.json",
            "embedding": None,
        }
        if cap.embedding is not None:
            entry["embedding"] = f"{stem}.embedding.json"
            (root / f"{stem}.embedding.json").write_text(
                json.dumps([float(v) for v in cap.embedding]), encoding="utf-8"
            )
        entries.append(entry)
    manifest = {
        "app_id": bundle.app_id,
        "run_id": bundle.run_id,
        "similarity_mode_hint": bundle.similarity_mode_hint,
        "captures": entries,
    }
    (root / "manifest.json").write_text(json.dumps(manifest, indent=1), encoding="utf-8")
    return root


def associate_issue(
    issue: AccessibilityIssue,
    detections: list[ElementDetection],
    iou_threshold: float = ISSUE_ASSOCIATION_IOU,
) -> str | None:
    """Pick the detection an audit issue refers to, or None.

    Maximal IoU wins when it reaches `iou_threshold`; otherwise any detection
    containing the issue center. Ties: larger IoU, smaller detection area,
    lexicographic id.
    """
    scored = [(iou(issue.bbox, det.bbox), det) for det in detections]

    def rank(item):
        overlap, det = item
        return (-overlap, det.bbox.area, det.detection_id)

    overlapping = [item for item in scored if item[0] >= iou_threshold]
    if overlapping:
        return min(overlapping, key=rank)[1].detection_id

    cx, cy = issue.bbox.center
    containing = [item for item in scored if item[1].bbox.contains_point(cx, cy)]
    if containing:
        return min(containing, key=rank)[1].detection_id
    return None
