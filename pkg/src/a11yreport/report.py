"""Report assembly: de-duplicate issues per screen group, re-apply stored
ignore decisions, hide false positives, and summarize what remains."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .capture import CaptureBundle, ScreenCapture, associate_issue
from .config import PipelineConfig
from .geometry import Rect, iou
from .grouping import ScreenGroup, SimilarityScorer, Storyboard
from .matching import build_element_groups, find_best_match, preprocess_template

STATUS_ACTIVE = "active"
STATUS_IGNORED = "ignored"
STATUS_HIDDEN = "hidden_false_positive"

FIX_INFO = {
    "Element has no description": (
        "Give the element an accessibility label that states its purpose."
    ),
    "Description duplicates element type": (
        "Drop the control type from the label; assistive tech announces it already."
    ),
    "Text contrast below required ratio": (
        "Raise the foreground/background contrast of the text to at least 4.5:1."
    ),
    "Control contrast below required ratio": (
        "Raise the contrast between the control and its background."
    ),
    "Hit area is too small": (
        "Extend the tappable area to at least 44x44 points."
    ),
    "Element not exposed to assistive technologies": (
        "Expose the element in the accessibility hierarchy so it can be focused."
    ),
    "Text is clipped at current size": (
        "Allow the text container to grow or wrap instead of clipping."
    ),
    "Interactive element missing button trait": (
        "Add the button trait so the element announces as actionable."
    ),
    "Dynamic Type sizes not supported": (
        "Use scalable fonts so the text follows the user's preferred size."
    ),
}
FIX_INFO_DEFAULT = "Inspect the flagged element and consult the platform accessibility guidance."


def fix_info_for(check_name: str) -> str:
    return FIX_INFO.get(check_name, FIX_INFO_DEFAULT)


@dataclass
class Occurrence:
    capture_id: str
    issue_id: str
    bbox: Rect

    def to_json(self) -> dict:
        return {"capture_id": self.capture_id, "issue_id": self.issue_id,
                "bbox": self.bbox.to_json()}


@dataclass
class UniqueIssue:
    unique_id: str
    group_id: int
    category: str
    check_name: str
    message: str
    anchor_capture_id: str
    anchor_detection_id: str | None
    anchor_bbox: Rect
    occurrences: list[Occurrence] = field(default_factory=list)
    status: str = STATUS_ACTIVE

    def to_json(self) -> dict:
        return {
            "unique_id": self.unique_id,
            "group_id": self.group_id,
            "category": self.category,
            "check_name": self.check_name,
            "message": self.message,
            "status": self.status,
            "anchor": {
                "capture_id": self.anchor_capture_id,
                "detection_id": self.anchor_detection_id,
                "bbox": self.anchor_bbox.to_json(),
            },
            "occurrences": [o.to_json() for o in self.occurrences],
        }


def _unique_issue_id(group_id: int, check_name: str, capture_id: str, anchor: str) -> str:
    key = f"{group_id}|{check_name}|{capture_id}|{anchor}"
    return "u" + hashlib.sha1(key.encode("utf-8")).hexdigest()[:10]


def dedupe_group_issues(
    group: ScreenGroup,
    bundle: CaptureBundle,
    config: PipelineConfig = PipelineConfig(),
) -> list[UniqueIssue]:
    """Collapse one screen group's audit issues into unique issues.

    The representative capture seeds the unique set. Every other member's
    issue is re-anchored by matching its element onto the representative; a
    hit on an element that already carries the same check becomes another
    occurrence, anything else opens a new unique issue. Issues with no
    associated element fall back to bbox-overlap de-duplication.
    """
    rep = bundle.capture(group.representative_id)
    rep_groups = build_element_groups(rep.detections)

    uniques: list[UniqueIssue] = []
    by_anchor: dict[tuple[str, str, str], UniqueIssue] = {}
    raw_uniques: list[UniqueIssue] = []

    def open_unique(capture: ScreenCapture, issue, detection_id: str | None) -> UniqueIssue:
        if detection_id is not None:
            anchor_bbox = capture.detection(detection_id).bbox
            anchor_key = detection_id
        else:
            anchor_bbox = issue.bbox
            anchor_key = f"bbox:{issue.bbox.to_json()}"
        unique = UniqueIssue(
            unique_id=_unique_issue_id(group.group_id, issue.check_name,
                                       capture.capture_id, anchor_key),
            group_id=group.group_id,
            category=issue.category,
            check_name=issue.check_name,
            message=issue.message,
            anchor_capture_id=capture.capture_id,
            anchor_detection_id=detection_id,
            anchor_bbox=anchor_bbox,
            occurrences=[Occurrence(capture.capture_id, issue.issue_id, issue.bbox)],
        )
        uniques.append(unique)
        if detection_id is not None:
            by_anchor[(capture.capture_id, detection_id, issue.check_name)] = unique
        else:
            raw_uniques.append(unique)
        return unique

    for issue in rep.issues:
        det_id = associate_issue(issue, rep.detections, config.issue_iou_threshold)
        if det_id is not None:
            key = (rep.capture_id, det_id, issue.check_name)
            if key in by_anchor:
                by_anchor[key].occurrences.append(
                    Occurrence(rep.capture_id, issue.issue_id, issue.bbox)
                )
            else:
                open_unique(rep, issue, det_id)
        else:
            target = _raw_match(raw_uniques, issue, config.raw_issue_iou_threshold)
            if target is not None:
                target.occurrences.append(Occurrence(rep.capture_id, issue.issue_id, issue.bbox))
            else:
                open_unique(rep, issue, None)

    for member_id in group.member_ids:
        if member_id == group.representative_id:
            continue
        capture = bundle.capture(member_id)
        for issue in capture.issues:
            det_id = associate_issue(issue, capture.detections, config.issue_iou_threshold)
            if det_id is None:
                target = _raw_match(raw_uniques, issue, config.raw_issue_iou_threshold)
                if target is not None:
                    target.occurrences.append(
                        Occurrence(capture.capture_id, issue.issue_id, issue.bbox)
                    )
                else:
                    open_unique(capture, issue, None)
                continue

            detection = capture.detection(det_id)
            matched_key = None
            if detection.bbox.area > 0:
                template = preprocess_template(capture, detection)
                result = find_best_match(template, rep, config, new_groups=rep_groups)
                if result.matched_id is not None:
                    matched_key = (rep.capture_id, result.matched_id, issue.check_name)
            if matched_key is not None and matched_key in by_anchor:
                by_anchor[matched_key].occurrences.append(
                    Occurrence(capture.capture_id, issue.issue_id, issue.bbox)
                )
            else:
                key = (capture.capture_id, det_id, issue.check_name)
                if key in by_anchor:
                    by_anchor[key].occurrences.append(
                        Occurrence(capture.capture_id, issue.issue_id, issue.bbox)
                    )
                else:
                    open_unique(capture, issue, det_id)

    return uniques


def _raw_match(raw_uniques: list[UniqueIssue], issue, threshold: float) -> UniqueIssue | None:
    best = None
    best_overlap = 0.0
    for unique in raw_uniques:
        if unique.check_name != issue.check_name:
            continue
        overlap = iou(unique.anchor_bbox, issue.bbox)
        if overlap >= threshold and overlap > best_overlap:
            best = unique
            best_overlap = overlap
    return best


def filter_false_positives(
    issues: list[UniqueIssue], bundle: CaptureBundle
) -> tuple[list[UniqueIssue], list[UniqueIssue]]:
    """Partition unique issues into (kept, hidden). An issue whose anchor has
    no associated element detection is assumed to be audit-tool noise."""
    kept: list[UniqueIssue] = []
    hidden: list[UniqueIssue] = []
    for issue in issues:
        if issue.anchor_detection_id is None:
            issue.status = STATUS_HIDDEN
            hidden.append(issue)
        else:
            kept.append(issue)
    return kept, hidden


def _count_block(issues: list[UniqueIssue]) -> dict:
    by_category: dict[str, int] = {}
    by_check: dict[str, dict[str, int]] = {}
    for issue in issues:
        by_category[issue.category] = by_category.get(issue.category, 0) + 1
        checks = by_check.setdefault(issue.category, {})
        checks[issue.check_name] = checks.get(issue.check_name, 0) + 1
    return {
        "total": len(issues),
        "by_category": dict(sorted(by_category.items())),
        "by_check": {cat: dict(sorted(by_check[cat].items())) for cat in sorted(by_check)},
    }


@dataclass
class Report:
    app_id: str
    run_id: str
    storyboard: Storyboard
    active: list[UniqueIssue]
    ignored: list[UniqueIssue]
    hidden: list[UniqueIssue]
    screens: list[dict]
    summary: dict = field(default_factory=dict)
    generated_at: str = ""
    similarity: dict = field(default_factory=dict)
    bundle_dir: str | None = None

    def all_issues(self) -> list[UniqueIssue]:
        return self.active + self.ignored + self.hidden

    def find_issue(self, unique_id: str) -> UniqueIssue:
        for issue in self.all_issues():
            if issue.unique_id == unique_id:
                return issue
        raise KeyError(unique_id)

    def issues_tree(self) -> list[dict]:
        tree: list[dict] = []
        for group in self.storyboard.groups:
            members = [i for i in self.active if i.group_id == group.group_id]
            categories: dict[str, dict[str, list[dict]]] = {}
            for issue in sorted(members, key=lambda i: (i.category, i.check_name, i.unique_id)):
                categories.setdefault(issue.category, {}).setdefault(
                    issue.check_name, []
                ).append(issue.to_json())
            tree.append({"group_id": group.group_id, "issues": categories})
        return tree

    def to_json(self) -> dict:
        checks = sorted({i.check_name for i in self.all_issues()})
        return {
            "app_id": self.app_id,
            "run_id": self.run_id,
            "generated_at": self.generated_at,
            "similarity": self.similarity,
            "bundle_dir": self.bundle_dir,
            "storyboard": self.storyboard.to_json(),
            "screens": self.screens,
            "groups": self.issues_tree(),
            "summary": self.summary,
            "ignored": [i.to_json() for i in sorted(self.ignored, key=lambda i: i.unique_id)],
            "hidden": [i.to_json() for i in sorted(self.hidden, key=lambda i: i.unique_id)],
            "fix_info": {check: fix_info_for(check) for check in checks},
        }


def summarize(report: Report) -> Report:
    """Fill app-level and per-group counts over the active unique issues."""
    per_group = {}
    for group in report.storyboard.groups:
        per_group[str(group.group_id)] = _count_block(
            [i for i in report.active if i.group_id == group.group_id]
        )
    report.summary = {"app": _count_block(report.active), "per_group": per_group}
    return report


def assemble_report(
    bundle: CaptureBundle,
    storyboard: Storyboard,
    ignore_store=None,
    config: PipelineConfig = PipelineConfig(),
    scorer: SimilarityScorer | None = None,
    bundle_dir: str | None = None,
    generated_at: str | None = None,
) -> Report:
    """Run stages 3-5 over a built storyboard and emit the report."""
    uniques: list[UniqueIssue] = []
    for group in storyboard.groups:
        uniques.extend(dedupe_group_issues(group, bundle, config))

    if scorer is None:
        scorer = SimilarityScorer.from_config(config)

    ignored: list[UniqueIssue] = []
    if ignore_store is not None:
        from .ignores import apply_ignores

        uniques, ignored = apply_ignores(
            uniques, storyboard, bundle, ignore_store, scorer, config
        )

    active, hidden = filter_false_positives(uniques, bundle)

    group_of = {}
    for group in storyboard.groups:
        for capture_id in group.member_ids:
            group_of[capture_id] = group.group_id
    screens = [
        {
            "capture_id": cap.capture_id,
            "ordinal": cap.ordinal,
            "width": cap.width,
            "height": cap.height,
            "group_id": group_of.get(cap.capture_id),
            "file": f"screens/{cap.capture_id}.png",
        }
        for cap in bundle.captures
    ]

    report = Report(
        app_id=bundle.app_id,
        run_id=bundle.run_id,
        storyboard=storyboard,
        active=active,
        ignored=ignored,
        hidden=hidden,
        screens=screens,
        generated_at=generated_at
        or datetime.now(timezone.utc).isoformat(timespec="seconds"),
        similarity={"mode": scorer.mode, "threshold": scorer.threshold},
        bundle_dir=bundle_dir,
    )
    return summarize(report)
