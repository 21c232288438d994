"""Persisted ignore decisions, re-identified on later report runs.

Records live in one JSON-lines file per app; later lines with the same id
supersede earlier ones, so removal appends rather than rewriting. Issue-scope
records carry a full element fingerprint (crop embedded as base64 PNG) and a
screen snapshot whose raster is content-addressed into a sibling
``snapshots/`` directory.
"""
from __future__ import annotations

import hashlib
import io
import json
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from PIL import Image

from .capture import CaptureBundle, ElementDetection, ScreenCapture
from .config import ConfigurationError, PipelineConfig
from .grouping import SimilarityScorer, Storyboard, score_pair
from .matching import TemplateRecord, find_best_match, preprocess_template

SCOPES = ("issue", "check_name", "category", "screen")


@dataclass
class ScreenSnapshot:
    capture_id: str
    detections: list[ElementDetection]
    screenshot: np.ndarray | None = None
    screenshot_sha256: str | None = None
    embedding: np.ndarray | None = None

    def to_json(self) -> dict:
        return {
            "capture_id": self.capture_id,
            "screenshot_sha256": self.screenshot_sha256,
            "detections": [d.to_json() for d in self.detections],
            "embedding": None if self.embedding is None else [float(v) for v in self.embedding],
        }

    @classmethod
    def from_json(cls, doc: dict, snapshots_dir: Path) -> "ScreenSnapshot":
        screenshot = None
        sha = doc.get("screenshot_sha256")
        if sha:
            path = snapshots_dir / f"{sha}.png"
            if path.is_file():
                with Image.open(path) as img:
                    screenshot = np.asarray(img.convert("RGB"), dtype=np.uint8)
        embedding = doc.get("embedding")
        return cls(
            capture_id=doc["capture_id"],
            detections=[ElementDetection.from_json(d) for d in doc["detections"]],
            screenshot=screenshot,
            screenshot_sha256=sha,
            embedding=None if embedding is None else np.asarray(embedding, dtype=np.float64),
        )

    def as_capture(self) -> ScreenCapture:
        screenshot = self.screenshot
        if screenshot is None:
            screenshot = np.zeros((1, 1, 3), dtype=np.uint8)
        return ScreenCapture(
            capture_id=f"snapshot-{self.capture_id}",
            ordinal=0,
            screenshot=screenshot,
            issues=[],
            detections=list(self.detections),
            embedding=self.embedding,
        )


def snapshot_of(capture: ScreenCapture) -> ScreenSnapshot:
    return ScreenSnapshot(
        capture_id=capture.capture_id,
        detections=list(capture.detections),
        screenshot=capture.screenshot.copy(),
        embedding=None if capture.embedding is None else capture.embedding.copy(),
    )


@dataclass
class IgnoreRecord:
    ignore_id: str
    app_id: str
    scope: str
    check_name: str | None = None
    category: str | None = None
    fingerprint: TemplateRecord | None = None
    snapshot: ScreenSnapshot | None = None
    active: bool = True
    created_at: str = ""

    def validate(self) -> None:
        if self.scope not in SCOPES:
            raise ValueError(f"unknown ignore scope '{self.scope}'")
        if self.scope == "issue" and (self.fingerprint is None or self.snapshot is None):
            raise ValueError("issue-scope ignore needs a fingerprint and a screen snapshot")
        if self.scope == "issue" and not self.check_name:
            raise ValueError("issue-scope ignore needs the issue's check_name")
        if self.scope == "screen" and self.snapshot is None:
            raise ValueError("screen-scope ignore needs a screen snapshot")
        if self.scope == "check_name" and not self.check_name:
            raise ValueError("check_name-scope ignore needs a check_name")
        if self.scope == "category" and not self.category:
            raise ValueError("category-scope ignore needs a category")

    def to_json(self) -> dict:
        return {
            "ignore_id": self.ignore_id,
            "app_id": self.app_id,
            "scope": self.scope,
            "check_name": self.check_name,
            "category": self.category,
            "fingerprint": None if self.fingerprint is None else self.fingerprint.to_json(),
            "snapshot": None if self.snapshot is None else self.snapshot.to_json(),
            "active": self.active,
            "created_at": self.created_at,
        }

    @classmethod
    def from_json(cls, doc: dict, snapshots_dir: Path) -> "IgnoreRecord":
        fingerprint = doc.get("fingerprint")
        snapshot = doc.get("snapshot")
        return cls(
            ignore_id=doc["ignore_id"],
            app_id=doc["app_id"],
            scope=doc["scope"],
            check_name=doc.get("check_name"),
            category=doc.get("category"),
            fingerprint=None if fingerprint is None else TemplateRecord.from_json(fingerprint),
            snapshot=None if snapshot is None else ScreenSnapshot.from_json(snapshot, snapshots_dir),
            active=bool(doc.get("active", True)),
            created_at=doc.get("created_at", ""),
        )


def issue_ignore(
    app_id: str,
    capture: ScreenCapture,
    detection: ElementDetection,
    check_name: str,
    category: str | None = None,
) -> IgnoreRecord:
    """Fingerprint one flagged element so the same issue can be re-ignored."""
    return IgnoreRecord(
        ignore_id="",
        app_id=app_id,
        scope="issue",
        check_name=check_name,
        category=category,
        fingerprint=preprocess_template(capture, detection),
        snapshot=snapshot_of(capture),
    )


def screen_ignore(app_id: str, capture: ScreenCapture) -> IgnoreRecord:
    return IgnoreRecord(ignore_id="", app_id=app_id, scope="screen", snapshot=snapshot_of(capture))


def check_ignore(app_id: str, check_name: str, category: str | None = None) -> IgnoreRecord:
    return IgnoreRecord(ignore_id="", app_id=app_id, scope="check_name",
                        check_name=check_name, category=category)


def category_ignore(app_id: str, category: str) -> IgnoreRecord:
    return IgnoreRecord(ignore_id="", app_id=app_id, scope="category", category=category)


class IgnoreStore:
    """Single-writer JSON-lines persistence for ignore records."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.snapshots_dir = self.path.parent / "snapshots"
        self._records: dict[str, IgnoreRecord] = {}
        self._order: list[str] = []
        if self.path.is_file():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                record = IgnoreRecord.from_json(json.loads(line), self.snapshots_dir)
                if record.ignore_id not in self._records:
                    self._order.append(record.ignore_id)
                self._records[record.ignore_id] = record

    def _append(self, record: IgnoreRecord) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if record.snapshot is not None and record.snapshot.screenshot is not None:
            self.snapshots_dir.mkdir(parents=True, exist_ok=True)
            buf = io.BytesIO()
            Image.fromarray(record.snapshot.screenshot).save(buf, format="PNG")
            data = buf.getvalue()
            sha = hashlib.sha256(data).hexdigest()
            target = self.snapshots_dir / f"{sha}.png"
            if not target.exists():
                target.write_bytes(data)
            record.snapshot.screenshot_sha256 = sha
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record.to_json()) + "\n")

    def add_ignore(self, record: IgnoreRecord) -> str:
        record.validate()
        if not record.ignore_id:
            record.ignore_id = uuid.uuid4().hex[:12]
        if not record.created_at:
            record.created_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
        self._append(record)
        if record.ignore_id not in self._records:
            self._order.append(record.ignore_id)
        self._records[record.ignore_id] = record
        return record.ignore_id

    def remove_ignore(self, ignore_id: str) -> None:
        record = self._records.get(ignore_id)
        if record is None:
            raise KeyError(f"unknown ignore id '{ignore_id}'")
        record.active = False
        self._append(record)

    def list_ignores(self, app_id: str | None = None) -> list[IgnoreRecord]:
        records = [self._records[i] for i in self._order]
        if app_id is not None:
            records = [r for r in records if r.app_id == app_id]
        return records

    def active_records(self, app_id: str | None = None) -> list[IgnoreRecord]:
        return [r for r in self.list_ignores(app_id) if r.active]


def _best_group_for_snapshot(
    snapshot: ScreenSnapshot,
    storyboard: Storyboard,
    bundle: CaptureBundle,
    scorer: SimilarityScorer,
):
    reference = snapshot.as_capture()
    best = None
    best_score = 0.0
    for group in storyboard.groups:
        representative = bundle.capture(group.representative_id)
        try:
            value = score_pair(scorer, representative, reference)
        except ConfigurationError:
            return None
        if value > 0 and (best is None or value > best_score):
            best = group
            best_score = value
    return best


def apply_ignores(
    uniques: list,
    storyboard: Storyboard,
    bundle: CaptureBundle,
    store: IgnoreStore,
    scorer: SimilarityScorer,
    config: PipelineConfig = PipelineConfig(),
) -> tuple[list, list]:
    """Move unique issues matched by active ignore records to the ignored set.

    Issues are never dropped: the return value partitions the input into
    (still_active, ignored). Category and check scopes match by name, screen
    scopes by same-screen scoring against the stored snapshot, and issue
    scopes by re-finding the fingerprinted element on the matching group's
    representative.
    """
    ignored_ids: set[str] = set()

    for record in store.active_records(bundle.app_id):
        if record.scope == "category":
            for issue in uniques:
                if issue.category == record.category:
                    ignored_ids.add(issue.unique_id)
        elif record.scope == "check_name":
            for issue in uniques:
                if issue.check_name == record.check_name:
                    ignored_ids.add(issue.unique_id)
        elif record.scope == "screen":
            reference = record.snapshot.as_capture()
            for group in storyboard.groups:
                representative = bundle.capture(group.representative_id)
                try:
                    value = score_pair(scorer, representative, reference)
                except ConfigurationError:
                    break
                if value > 0:
                    for issue in uniques:
                        if issue.group_id == group.group_id:
                            ignored_ids.add(issue.unique_id)
        elif record.scope == "issue":
            group = _best_group_for_snapshot(record.snapshot, storyboard, bundle, scorer)
            if group is None:
                continue
            representative = bundle.capture(group.representative_id)
            result = find_best_match(record.fingerprint, representative, config)
            if result.matched_id is None:
                continue
            for issue in uniques:
                if (
                    issue.group_id == group.group_id
                    and issue.anchor_capture_id == representative.capture_id
                    and issue.anchor_detection_id == result.matched_id
                    and issue.check_name == record.check_name
                ):
                    ignored_ids.add(issue.unique_id)

    still_active = []
    ignored = []
    for issue in uniques:
        if issue.unique_id in ignored_ids:
            issue.status = "ignored"
            ignored.append(issue)
        else:
            still_active.append(issue)
    return still_active, ignored
