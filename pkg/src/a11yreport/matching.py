"""Find the same UI element across two instances of one screen.

The matcher dispatches on the element kind: recognized text is compared with
a normalized indel ratio, icons and pictures with multi-scale normalized
cross-correlation inside a window around each candidate, composite controls
(tab buttons, toggles, text fields, ...) through the text or icon of their
element group, and singleton widgets (page controls, dialogs) by position.
"""
from __future__ import annotations

import base64
import io
from dataclasses import dataclass

import numpy as np
from PIL import Image
from scipy.signal import fftconvolve

from .capture import ElementDetection, ScreenCapture
from .config import PipelineConfig
from .geometry import Rect

GROUP_KINDS = (
    "TabButton",
    "Toggle",
    "Checkbox",
    "SegmentedControl",
    "TextField",
    "Slider",
    "Container",
)

_TEXT_KINDS = {"Text"}
_ICON_KINDS = {"Icon", "Picture"}
_POSITION_KINDS = {"PageControl", "Dialog"}

_DEFAULT_CONFIG = PipelineConfig()


# ---------------------------------------------------------------------------
# text similarity


def normalize_text(s: str) -> str:
    """Lowercase, strip everything but alphanumerics and spaces, squeeze runs."""
    kept = [c if c.isalnum() else " " if c == " " else "" for c in s.lower()]
    return " ".join("".join(kept).split())


def indel_distance(a: str, b: str) -> int:
    """Insert/delete edit distance (no substitutions)."""
    if a == b:
        return 0
    # common affixes contribute no edits
    lo = 0
    while lo < len(a) and lo < len(b) and a[lo] == b[lo]:
        lo += 1
    hi = 0
    while hi < len(a) - lo and hi < len(b) - lo and a[len(a) - 1 - hi] == b[len(b) - 1 - hi]:
        hi += 1
    a = a[lo : len(a) - hi]
    b = b[lo : len(b) - hi]
    if not a or not b:
        return len(a) + len(b)
    # Two-row LCS table; distance = len(a) + len(b) - 2 * LCS.
    prev = [0] * (len(b) + 1)
    for ca in a:
        curr = [0]
        for j, cb in enumerate(b, start=1):
            if ca == cb:
                curr.append(prev[j - 1] + 1)
            else:
                curr.append(max(prev[j], curr[j - 1]))
        prev = curr
    return len(a) + len(b) - 2 * prev[-1]


def text_similarity(a: str, b: str) -> float:
    """Normalized indel ratio over normalized text, in [0, 1]."""
    na, nb = normalize_text(a), normalize_text(b)
    total = len(na) + len(nb)
    if total == 0:
        return 1.0
    return 1.0 - indel_distance(na, nb) / total


# ---------------------------------------------------------------------------
# image template matching


def _to_gray(rgb: np.ndarray) -> np.ndarray:
    arr = rgb.astype(np.float64)
    return 0.299 * arr[..., 0] + 0.587 * arr[..., 1] + 0.114 * arr[..., 2]


class _WindowStats:
    """Integral-image sums of a search window, shared across template scales.

    Cumulative sums of uint8 values stay exact in float64, so zero-variance
    patches are detected exactly rather than through an epsilon.
    """

    def __init__(self, window: np.ndarray):
        self.gray = _to_gray(window) if window.ndim == 3 else window.astype(np.float64)
        self.integral = self._integral(self.gray)
        self.integral_sq = self._integral(self.gray * self.gray)

    @staticmethod
    def _integral(img: np.ndarray) -> np.ndarray:
        ii = np.zeros((img.shape[0] + 1, img.shape[1] + 1))
        ii[1:, 1:] = img.cumsum(axis=0).cumsum(axis=1)
        return ii

    def local_sums(self, th: int, tw: int) -> tuple[np.ndarray, np.ndarray]:
        def sums(ii: np.ndarray) -> np.ndarray:
            return (
                ii[th:, tw:] - ii[:-th, tw:] - ii[th:, :-tw] + ii[:-th, :-tw]
            )

        return sums(self.integral), sums(self.integral_sq)


def _ncc_max(tpl: np.ndarray, stats: _WindowStats) -> float:
    th, tw = tpl.shape
    wh, ww = stats.gray.shape
    if th > wh or tw > ww:
        raise ValueError(f"template {tpl.shape} larger than window {stats.gray.shape}")

    tpl_zm = tpl - tpl.mean()
    tpl_ss = float(np.sum(tpl_zm * tpl_zm))
    if tpl_ss <= 1e-12:
        return 0.0

    kernel = tpl_zm[::-1, ::-1]
    numer = fftconvolve(stats.gray, kernel, mode="valid")
    win_sum, win_sq_sum = stats.local_sums(th, tw)
    win_ss = np.maximum(win_sq_sum - win_sum * win_sum / (th * tw), 0.0)

    valid = win_ss > 1e-3
    if not np.any(valid):
        return 0.0
    denom = np.sqrt(win_ss * tpl_ss)
    scores = np.where(valid, numer / np.where(valid, denom, 1.0), 0.0)
    return float(np.clip(scores, -1.0, 1.0).max())


def ncc(template: np.ndarray, window: np.ndarray) -> float:
    """Max zero-mean normalized cross-correlation of template over window.

    Inputs are RGB or grayscale rasters; correlation runs on luma. Placements
    where either signal has zero variance contribute 0.
    """
    tpl = _to_gray(template) if template.ndim == 3 else template.astype(np.float64)
    return _ncc_max(tpl, _WindowStats(window))


def compute_scales(template_width: int, new_width: int, steps=None) -> tuple[float, ...]:
    """Relative scales to try when resizing a template crop onto a new screen."""
    steps = steps if steps is not None else _DEFAULT_CONFIG.scale_steps
    s = template_width / new_width
    return tuple(step * s for step in steps)


def _crop(raster: np.ndarray, rect: Rect) -> np.ndarray:
    return raster[rect.y : rect.bottom, rect.x : rect.right]


def _windowed_template_score(
    crop: np.ndarray,
    source_width: int,
    candidate_bbox: Rect,
    capture: ScreenCapture,
    config: PipelineConfig,
) -> float:
    """Multi-scale NCC of a saved crop inside the padded candidate window,
    mapped to [0, 1]."""
    if crop.size == 0 or crop.shape[0] == 0 or crop.shape[1] == 0:
        return 0.0
    window_rect = candidate_bbox.expanded(config.search_padding).clamped(
        capture.width, capture.height
    )
    if window_rect.area == 0:
        return 0.0
    stats = _WindowStats(_crop(capture.screenshot, window_rect))
    best = None
    seen_sizes: set[tuple[int, int]] = set()
    for scale in compute_scales(source_width, capture.width, config.scale_steps):
        tw = max(1, int(round(crop.shape[1] / scale)))
        th = max(1, int(round(crop.shape[0] / scale)))
        if (tw, th) in seen_sizes or th > stats.gray.shape[0] or tw > stats.gray.shape[1]:
            continue
        seen_sizes.add((tw, th))
        if (tw, th) == (crop.shape[1], crop.shape[0]):
            resized = crop
        else:
            resized = np.asarray(
                Image.fromarray(crop).resize((tw, th), Image.BILINEAR), dtype=np.uint8
            )
        value = _ncc_max(_to_gray(resized), stats)
        if best is None or value > best:
            best = value
    if best is None:
        return 0.0
    return (best + 1.0) / 2.0


# ---------------------------------------------------------------------------
# element groups


@dataclass
class ElementGroupRecord:
    kind: str
    seed_id: str
    member_ids: list[str]
    anchor_text_id: str | None = None


def _same_row(control: ElementDetection, other: ElementDetection) -> bool:
    _, cy = control.bbox.center
    _, oy = other.bbox.center
    return abs(cy - oy) <= control.bbox.h / 2.0


def _center_distance(a: ElementDetection, b: ElementDetection) -> float:
    ax, ay = a.bbox.center
    bx, by = b.bbox.center
    return float(np.hypot(ax - bx, ay - by))


def build_element_groups(detections: list[ElementDetection]) -> list[ElementGroupRecord]:
    """Group detections into the composite controls matching operates on.

    Each detection joins at most one group; bordered controls claim the
    detections whose centers they contain, row controls claim their closest
    text on the same row, sliders additionally take the closest text above.
    Containers are processed last so specific controls win their members.
    """
    claimed: set[str] = set()
    by_id = {det.detection_id: det for det in detections}
    groups: list[ElementGroupRecord] = []

    def free(det: ElementDetection) -> bool:
        return det.detection_id not in claimed

    def claim(group: ElementGroupRecord):
        claimed.update(group.member_ids)
        groups.append(group)

    def seeds(kind: str) -> list[ElementDetection]:
        found = [d for d in detections if d.kind == kind and free(d)]
        return sorted(found, key=lambda d: (d.bbox.area, d.detection_id))

    def contained(seed: ElementDetection, kinds=None) -> list[ElementDetection]:
        members = [
            d
            for d in detections
            if d is not seed and free(d) and seed.bbox.contains_center_of(d.bbox)
        ]
        if kinds is not None:
            members = [d for d in members if d.kind in kinds]
        return sorted(members, key=lambda d: (d.bbox.y, d.bbox.x, d.detection_id))

    for seed in seeds("TabButton"):
        icons = contained(seed, kinds={"Icon"})
        if not icons:
            continue
        texts = contained(seed, kinds={"Text"})
        anchor = min(texts, key=lambda t: (_center_distance(icons[0], t), t.detection_id)) if texts else None
        member_ids = [seed.detection_id] + [d.detection_id for d in icons + texts]
        claim(ElementGroupRecord("TabButton", seed.detection_id, member_ids,
                                 anchor.detection_id if anchor else None))

    for kind in ("Toggle", "Checkbox"):
        for seed in seeds(kind):
            row_texts = [
                d for d in detections if d.kind == "Text" and free(d) and _same_row(seed, d)
            ]
            if not row_texts:
                continue
            anchor = min(row_texts, key=lambda t: (_center_distance(seed, t), t.detection_id))
            claim(ElementGroupRecord(kind, seed.detection_id,
                                     [seed.detection_id, anchor.detection_id],
                                     anchor.detection_id))

    for seed in seeds("SegmentedControl"):
        texts = contained(seed, kinds={"Text"})
        if not texts:
            continue
        claim(ElementGroupRecord("SegmentedControl", seed.detection_id,
                                 [seed.detection_id] + [d.detection_id for d in texts]))

    for seed in seeds("TextField"):
        members = contained(seed)
        if not members:
            continue
        claim(ElementGroupRecord("TextField", seed.detection_id,
                                 [seed.detection_id] + [d.detection_id for d in members]))

    for seed in seeds("Slider"):
        row_texts = [d for d in detections if d.kind == "Text" and free(d) and _same_row(seed, d)]
        _, seed_cy = seed.bbox.center
        above = [
            d
            for d in detections
            if d.kind == "Text" and free(d) and d.bbox.center[1] < seed_cy and not _same_row(seed, d)
        ]
        closest_above = (
            min(above, key=lambda t: (seed_cy - t.bbox.center[1], t.detection_id)) if above else None
        )
        members = list(row_texts)
        if closest_above is not None:
            members.append(closest_above)
        if not members:
            continue
        anchor = closest_above if closest_above is not None else min(
            row_texts, key=lambda t: (_center_distance(seed, t), t.detection_id)
        )
        claim(ElementGroupRecord("Slider", seed.detection_id,
                                 [seed.detection_id] + [d.detection_id for d in members],
                                 anchor.detection_id))

    for seed in seeds("Container"):
        members = contained(seed)
        if not members:
            continue
        claim(ElementGroupRecord("Container", seed.detection_id,
                                 [seed.detection_id] + [d.detection_id for d in members]))

    # deterministic output order regardless of processing order above
    groups.sort(key=lambda g: g.seed_id)
    return groups


def _group_of(groups: list[ElementGroupRecord], detection_id: str) -> ElementGroupRecord | None:
    for group in groups:
        if detection_id in group.member_ids:
            return group
    return None


def _group_texts(group: ElementGroupRecord, by_id: dict[str, ElementDetection]) -> list[str]:
    """Text strings a composite group can be matched by.

    The anchor text leads, followed by the reading-order join and individual
    member texts; the extra variants keep matching robust when one side of a
    screen pair has part of the group scrolled or covered out of view.
    """
    members = [
        by_id[mid]
        for mid in group.member_ids
        if mid != group.seed_id and by_id[mid].kind == "Text" and by_id[mid].text
    ]
    members.sort(key=lambda d: (d.bbox.y, d.bbox.x, d.detection_id))
    variants: list[str] = []
    if group.anchor_text_id is not None:
        anchor = by_id[group.anchor_text_id].text or ""
        if anchor:
            variants.append(anchor)
    joined = " ".join(d.text or "" for d in members)
    if joined and joined not in variants:
        variants.append(joined)
    for det in members:
        if det.text not in variants:
            variants.append(det.text or "")
    return variants


def _grouped_text_score(tpl_variants: list[str], cand_variants: list[str]) -> float:
    best = 0.0
    for a in tpl_variants:
        for b in cand_variants:
            value = text_similarity(a, b)
            if value > best:
                best = value
    return best


def _group_icon(group: ElementGroupRecord, by_id: dict[str, ElementDetection]) -> ElementDetection | None:
    icons = [by_id[mid] for mid in group.member_ids if by_id[mid].kind == "Icon"]
    icons.sort(key=lambda d: (d.bbox.y, d.bbox.x, d.detection_id))
    return icons[0] if icons else None


def _group_is_icon_only(group: ElementGroupRecord, by_id: dict[str, ElementDetection]) -> bool:
    members = [by_id[mid] for mid in group.member_ids if mid != group.seed_id]
    return bool(members) and all(d.kind in _ICON_KINDS for d in members)


# ---------------------------------------------------------------------------
# templates and matching


@dataclass
class TemplateRecord:
    source_capture_id: str
    template_element: ElementDetection
    all_detections: list[ElementDetection]
    groups: list[ElementGroupRecord]
    crop: np.ndarray
    source_width: int

    def to_json(self) -> dict:
        buf = io.BytesIO()
        Image.fromarray(self.crop).save(buf, format="PNG")
        return {
            "source_capture_id": self.source_capture_id,
            "template_element": self.template_element.to_json(),
            "all_detections": [d.to_json() for d in self.all_detections],
            "groups": [
                {
                    "kind": g.kind,
                    "seed_id": g.seed_id,
                    "member_ids": g.member_ids,
                    "anchor_text_id": g.anchor_text_id,
                }
                for g in self.groups
            ],
            "crop_png": base64.b64encode(buf.getvalue()).decode("ascii"),
            "source_width": self.source_width,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "TemplateRecord":
        crop = np.asarray(
            Image.open(io.BytesIO(base64.b64decode(doc["crop_png"]))).convert("RGB"),
            dtype=np.uint8,
        )
        return cls(
            source_capture_id=doc["source_capture_id"],
            template_element=ElementDetection.from_json(doc["template_element"]),
            all_detections=[ElementDetection.from_json(d) for d in doc["all_detections"]],
            groups=[
                ElementGroupRecord(g["kind"], g["seed_id"], list(g["member_ids"]), g["anchor_text_id"])
                for g in doc["groups"]
            ],
            crop=crop,
            source_width=int(doc["source_width"]),
        )


@dataclass(frozen=True)
class MatchResult:
    matched_id: str | None
    score: float
    method: str  # text | icon_template | position | grouped_text | none

    @classmethod
    def none(cls) -> "MatchResult":
        return cls(matched_id=None, score=0.0, method="none")


def preprocess_template(capture: ScreenCapture, target: ElementDetection) -> TemplateRecord:
    """Snapshot everything needed to re-find `target` on another screen."""
    if target not in capture.detections:
        raise ValueError(f"target {target.detection_id} not among capture detections")
    if target.bbox.area == 0:
        raise ValueError(f"target {target.detection_id} has a zero-area bbox")
    return TemplateRecord(
        source_capture_id=capture.capture_id,
        template_element=target,
        all_detections=list(capture.detections),
        groups=build_element_groups(capture.detections),
        crop=_crop(capture.screenshot, target.bbox).copy(),
        source_width=capture.width,
    )


def icon_match(
    template: TemplateRecord,
    candidate: ElementDetection,
    new_capture: ScreenCapture,
    config: PipelineConfig = _DEFAULT_CONFIG,
) -> float:
    """Template-match an Icon/Picture crop around a candidate detection."""
    if candidate.kind not in _ICON_KINDS:
        raise ValueError(f"icon_match candidate must be Icon or Picture, got {candidate.kind}")
    return _windowed_template_score(
        template.crop, template.source_width, candidate.bbox, new_capture, config
    )


def _position_score(template: TemplateRecord, candidate: ElementDetection, new_capture: ScreenCapture) -> float:
    tx, ty = template.template_element.bbox.center
    cx, cy = candidate.bbox.center
    dist = float(
        np.hypot(
            tx / template.source_width - cx / new_capture.width,
            ty / template.source_width - cy / new_capture.width,
        )
    )
    return max(0.0, 1.0 - dist)


@dataclass
class _Scored:
    candidate: ElementDetection
    score: float
    method: str
    threshold: float
    in_matched_group: bool = False


def _score_candidate(
    template: TemplateRecord,
    template_group: ElementGroupRecord | None,
    candidate: ElementDetection,
    new_capture: ScreenCapture,
    new_groups: list[ElementGroupRecord],
    config: PipelineConfig,
    tpl_by_id: dict[str, ElementDetection],
    new_by_id: dict[str, ElementDetection],
) -> _Scored | None:
    kind = template.template_element.kind

    if kind in _TEXT_KINDS:
        score = text_similarity(template.template_element.text or "", candidate.text or "")
        return _Scored(candidate, score, "text", config.text_threshold)

    if kind in _ICON_KINDS:
        threshold = config.icon_threshold if kind == "Icon" else config.picture_threshold
        score = _windowed_template_score(
            template.crop, template.source_width, candidate.bbox, new_capture, config
        )
        return _Scored(candidate, score, "icon_template", threshold)

    if kind in _POSITION_KINDS:
        return _Scored(candidate, _position_score(template, candidate, new_capture),
                       "position", config.position_threshold)

    if kind in GROUP_KINDS:
        candidate_group = _group_of(new_groups, candidate.detection_id)
        use_icon = False
        if kind == "TabButton":
            use_icon = template_group is None or _group_is_icon_only(template_group, tpl_by_id)
        elif kind == "Container":
            use_icon = template_group is not None and _group_is_icon_only(template_group, tpl_by_id)
        if template_group is None and kind != "TabButton":
            # no grouped text to compare; fall back to pixels of the control itself
            score = _windowed_template_score(
                template.crop, template.source_width, candidate.bbox, new_capture, config
            )
            return _Scored(candidate, score, "icon_template", config.icon_threshold)

        if use_icon:
            if kind == "Container":
                score = _windowed_template_score(
                    template.crop, template.source_width, candidate.bbox, new_capture, config
                )
                return _Scored(candidate, score, "icon_template", config.icon_threshold)
            tpl_icon = _group_icon(template_group, tpl_by_id) if template_group else None
            cand_icon = _group_icon(candidate_group, new_by_id) if candidate_group else None
            if tpl_icon is None:
                score = _windowed_template_score(
                    template.crop, template.source_width, candidate.bbox, new_capture, config
                )
                return _Scored(candidate, score, "icon_template", config.icon_threshold)
            if cand_icon is None:
                return _Scored(candidate, 0.0, "icon_template", config.icon_threshold)
            icon_crop = _crop_from_template(template, tpl_icon)
            score = _windowed_template_score(
                icon_crop, template.source_width, cand_icon.bbox, new_capture, config
            )
            return _Scored(candidate, score, "icon_template", config.icon_threshold)

        tpl_texts = _group_texts(template_group, tpl_by_id)
        if not tpl_texts:
            score = _windowed_template_score(
                template.crop, template.source_width, candidate.bbox, new_capture, config
            )
            return _Scored(candidate, score, "icon_template", config.icon_threshold)
        cand_texts = _group_texts(candidate_group, new_by_id) if candidate_group else []
        score = _grouped_text_score(tpl_texts, cand_texts)
        return _Scored(candidate, score, "grouped_text", config.text_threshold)

    return None


def _crop_from_template(template: TemplateRecord, element: ElementDetection) -> np.ndarray:
    """Crop any saved detection out of the template crop's source pixels.

    Only the template element's own crop is stored, so sibling crops are read
    relative to it when inside, which holds for group members by construction
    of the synth and audit data; otherwise falls back to the stored crop.
    """
    tpl_box = template.template_element.bbox
    rel = Rect(
        element.bbox.x - tpl_box.x,
        element.bbox.y - tpl_box.y,
        element.bbox.w,
        element.bbox.h,
    )
    if rel.x >= 0 and rel.y >= 0 and rel.right <= tpl_box.w and rel.bottom <= tpl_box.h:
        return _crop(template.crop, rel)
    return template.crop


def _matched_group_members(
    template: TemplateRecord,
    template_group: ElementGroupRecord,
    new_capture: ScreenCapture,
    new_groups: list[ElementGroupRecord],
    config: PipelineConfig,
) -> set[str]:
    """Ids inside the new-screen group that best matches the template's group."""
    tpl_by_id = {d.detection_id: d for d in template.all_detections}
    new_by_id = {d.detection_id: d for d in new_capture.detections}
    candidates = [g for g in new_groups if g.kind == template_group.kind]
    if not candidates:
        return set()

    icon_only = _group_is_icon_only(template_group, tpl_by_id)
    best: tuple[float, str] | None = None
    best_group: ElementGroupRecord | None = None
    for group in candidates:
        if icon_only:
            tpl_icon = _group_icon(template_group, tpl_by_id)
            cand_icon = _group_icon(group, new_by_id)
            if tpl_icon is None or cand_icon is None:
                continue
            icon_crop = _crop_from_template(template, tpl_icon)
            score = _windowed_template_score(
                icon_crop, template.source_width, cand_icon.bbox, new_capture, config
            )
            threshold = config.icon_threshold
        else:
            tpl_texts = _group_texts(template_group, tpl_by_id)
            cand_texts = _group_texts(group, new_by_id)
            if not tpl_texts or not cand_texts:
                continue
            score = _grouped_text_score(tpl_texts, cand_texts)
            threshold = config.text_threshold
        if score < threshold:
            continue
        key = (-score, group.seed_id)
        if best is None or key < best:
            best = key
            best_group = group
    if best_group is None:
        return set()
    return set(best_group.member_ids)


def find_best_match(
    template: TemplateRecord,
    new_capture: ScreenCapture,
    config: PipelineConfig = _DEFAULT_CONFIG,
    new_groups: list[ElementGroupRecord] | None = None,
) -> MatchResult:
    """Best candidate for the template element on a new screen, or no match.

    Candidates of the template's kind are scored by the kind dispatch; the
    winner must clear its method threshold. Candidates inside the matched
    element group win unless an outside candidate beats them by more than the
    configured margin. Ties break on proximity to the template's normalized
    position, then on detection id.
    """
    kind = template.template_element.kind
    candidates = [d for d in new_capture.detections if d.kind == kind]
    if not candidates:
        return MatchResult.none()

    if new_groups is None:
        new_groups = build_element_groups(new_capture.detections)
    template_group = _group_of(template.groups, template.template_element.detection_id)

    if kind in _POSITION_KINDS and len(candidates) == 1:
        return MatchResult(candidates[0].detection_id, 1.0, "position")

    tpl_by_id = {d.detection_id: d for d in template.all_detections}
    new_by_id = {d.detection_id: d for d in new_capture.detections}
    scored: list[_Scored] = []
    for candidate in candidates:
        result = _score_candidate(
            template, template_group, candidate, new_capture, new_groups, config,
            tpl_by_id, new_by_id,
        )
        if result is not None:
            scored.append(result)

    passing = [s for s in scored if s.score >= s.threshold]
    if not passing:
        return MatchResult.none()

    if template_group is not None:
        preferred = _matched_group_members(
            template, template_group, new_capture, new_groups, config
        )
        for s in passing:
            s.in_matched_group = s.candidate.detection_id in preferred

    tx, ty = template.template_element.bbox.center
    ntx, nty = tx / template.source_width, ty / template.source_width

    def proximity(s: _Scored) -> float:
        cx, cy = s.candidate.bbox.center
        return float(np.hypot(cx / new_capture.width - ntx, cy / new_capture.width - nty))

    margin = config.group_preference_margin

    def rank_key(s: _Scored):
        bonus = margin if s.in_matched_group else 0.0
        return (-(s.score + bonus), proximity(s), s.candidate.detection_id)

    best = min(passing, key=rank_key)
    return MatchResult(best.candidate.detection_id, best.score, best.method)


def match_template_only(
    template: TemplateRecord,
    new_capture: ScreenCapture,
    config: PipelineConfig = _DEFAULT_CONFIG,
    threshold: float | None = None,
) -> MatchResult:
    """Baseline matcher: windowed template matching against every detection.

    Ignores kinds, text, and groups; used to measure what the heuristic
    dispatch buys in accuracy and latency.
    """
    bar = config.icon_threshold if threshold is None else threshold
    tx, ty = template.template_element.bbox.center
    ntx, nty = tx / template.source_width, ty / template.source_width

    results = []
    for candidate in new_capture.detections:
        score = _windowed_template_score(
            template.crop, template.source_width, candidate.bbox, new_capture, config
        )
        if score >= bar:
            cx, cy = candidate.bbox.center
            prox = float(np.hypot(cx / new_capture.width - ntx, cy / new_capture.width - nty))
            results.append((-score, prox, candidate.detection_id, score))
    if not results:
        return MatchResult.none()
    results.sort()
    _, _, matched_id, score = results[0]
    return MatchResult(matched_id, score, "icon_template")
