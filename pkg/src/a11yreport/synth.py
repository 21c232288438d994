"""Deterministic synthetic app bundles with full ground truth.

Screens are rendered from solid rectangles and hash-derived glyph-block
bitmaps, so no font stack is involved and identical seeds produce
byte-identical bundles on any platform. Revisited screens are re-rendered
under configurable variations (data changes, scrolling, keyboards, overlay
dialogs, modals over foreign content) and the generator records the true
grouping, true element correspondences, and every planted audit issue.
"""
from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .capture import AccessibilityIssue, CaptureBundle, ElementDetection, ScreenCapture, write_bundle
from .geometry import Rect

VARIATIONS = (
    "same_data_change",
    "scrolled",
    "expanded_collapsed",
    "keyboard",
    "dialog_overlay",
    "modal_over_different_content",
)

SCREEN_W = 360
SCREEN_H = 720
HEADER_H = 56
TABBAR_H = 64
BODY_TOP = HEADER_H + 8
BODY_BOTTOM = SCREEN_H - TABBAR_H - 8
KEYBOARD_TOP = SCREEN_H - 290

GLYPH_ROWS, GLYPH_COLS, BLOCK = 7, 5, 2
CHAR_W = GLYPH_COLS * BLOCK
CHAR_H = GLYPH_ROWS * BLOCK
CHAR_PITCH = CHAR_W + 2

CHECK_CATALOG = {
    "ElementDescription": ("Element has no description", "Description duplicates element type"),
    "Contrast": ("Text contrast below required ratio", "Control contrast below required ratio"),
    "HitRegion": ("Hit area is too small",),
    "ElementDetection": ("Element not exposed to assistive technologies",),
    "ClippedText": ("Text is clipped at current size",),
    "Traits": ("Interactive element missing button trait",),
    "LargeText": ("Dynamic Type sizes not supported",),
}

_WORDS = (
    "alpha bravo charlie delta echo foxtrot golf hotel india juliet kilo lima mike "
    "november oscar papa quebec romeo sierra tango uniform victor whiskey xray yankee "
    "zulu amber birch cedar dune ember fjord grove harbor inlet juniper kelp lagoon "
    "meadow nectar orchid prairie quartz ridge summit tundra umber vale willow zenith"
).split()


@dataclass(frozen=True)
class SynthSpec:
    seed: int = 0
    app_count: int = 1
    screens_per_app: int = 10
    variation_weights: dict[str, float] = field(default_factory=dict)
    planted_issue_rate: float = 0.3
    planted_false_positive_rate: float = 0.1
    emit_embeddings: bool = True

    def __post_init__(self):
        for name, weight in self.variation_weights.items():
            if name not in VARIATIONS:
                raise ValueError(f"unknown variation '{name}'")
            if weight < 0:
                raise ValueError(f"variation weight for '{name}' must be non-negative")
        for rate in (self.planted_issue_rate, self.planted_false_positive_rate):
            if not 0.0 <= rate <= 1.0:
                raise ValueError("planted issue rates must lie in [0, 1]")
        if self.screens_per_app < 1 or self.app_count < 1:
            raise ValueError("need at least one app and one screen")


@dataclass(frozen=True)
class GoldPair:
    template_capture: str
    target_capture: str
    mapping: dict[str, str | None]


@dataclass(frozen=True)
class PlantedIssue:
    group: int
    slot: str
    category: str
    check_name: str
    occurrences: tuple[tuple[str, str], ...]  # (capture_id, issue_id)


@dataclass
class PlantedIssueLedger:
    on_element: list[PlantedIssue] = field(default_factory=list)
    false_positives: list[tuple[str, str]] = field(default_factory=list)


@dataclass
class SynthApp:
    bundle: CaptureBundle
    gold_grouping: dict[str, int]
    gold_correspondences: list[GoldPair]
    ledger: PlantedIssueLedger


# ---------------------------------------------------------------------------
# deterministic drawing primitives


def _bits(key: str, n: int) -> list[int]:
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return [(digest[i // 8] >> (i % 8)) & 1 for i in range(n)]


def _color(key: str, lo: int = 40, hi: int = 200) -> tuple[int, int, int]:
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    span = hi - lo
    return (lo + digest[0] % span, lo + digest[1] % span, lo + digest[2] % span)


_GLYPHS: dict[str, np.ndarray] = {}


def _glyph(ch: str) -> np.ndarray:
    cached = _GLYPHS.get(ch)
    if cached is None:
        if ch == " ":
            grid = np.zeros((GLYPH_ROWS, GLYPH_COLS), dtype=bool)
        else:
            bits = _bits("glyph:" + ch, GLYPH_ROWS * GLYPH_COLS)
            grid = np.array(bits, dtype=bool).reshape(GLYPH_ROWS, GLYPH_COLS)
        cached = np.kron(grid, np.ones((BLOCK, BLOCK), dtype=bool))
        _GLYPHS[ch] = cached
    return cached


def _fill(canvas: np.ndarray, rect: Rect, color) -> None:
    clipped = rect.clamped(canvas.shape[1], canvas.shape[0])
    canvas[clipped.y : clipped.bottom, clipped.x : clipped.right] = color


def _draw_text(canvas: np.ndarray, x: int, y: int, text: str, color=(40, 40, 40)) -> None:
    cx = x
    for ch in text:
        mask = _glyph(ch)
        h, w = mask.shape
        if 0 <= y and y + h <= canvas.shape[0] and 0 <= cx and cx + w <= canvas.shape[1]:
            region = canvas[y : y + h, cx : cx + w]
            region[mask] = color
        cx += CHAR_PITCH


def text_extent(text: str) -> tuple[int, int]:
    width = max(CHAR_W, len(text) * CHAR_PITCH - (CHAR_PITCH - CHAR_W))
    return width, CHAR_H


def _draw_pattern(canvas: np.ndarray, rect: Rect, key: str, cells: int) -> None:
    fg = _color(key + "/fg", 30, 130)
    bg = _color(key + "/bg", 150, 240)
    _fill(canvas, rect, bg)
    bits = _bits("pattern:" + key, cells * cells)
    cw = max(1, rect.w // cells)
    ch = max(1, rect.h // cells)
    for row in range(cells):
        for col in range(cells):
            if bits[row * cells + col]:
                _fill(canvas, Rect(rect.x + col * cw, rect.y + row * ch, cw, ch), fg)


# ---------------------------------------------------------------------------
# archetype construction


@dataclass(frozen=True)
class _El:
    slot: str
    kind: str
    x: int
    y: int  # header/tabbar/overlay: absolute; body: content-flow coordinate
    w: int
    h: int
    region: str  # header | body | tabbar | overlay
    text: str | None = None
    section: bool = False


@dataclass
class _Archetype:
    index: int
    is_modal: bool
    elements: list[_El]
    content_height: int
    data_slot: str | None
    section_span: tuple[int, int] | None  # (flow y start, height) of collapsible rows
    banner: list[_El]


def _text_el(slot: str, x: int, y: int, text: str, region: str = "body", section: bool = False) -> _El:
    w, h = text_extent(text)
    return _El(slot, "Text", x - 2, y - 2, w + 4, h + 4, region, text=text, section=section)


def _unique_words(rng: random.Random, used: set[str], count: int) -> str:
    for _ in range(200):
        text = " ".join(rng.choice(_WORDS) for _ in range(count))
        if text not in used:
            used.add(text)
            return text
    text = f"{rng.choice(_WORDS)} {len(used)}"
    used.add(text)
    return text


def _data_text(minutes: int) -> str:
    # long enough that a one-digit change stays above the fuzzy-match threshold
    return f"updated {minutes} min ago by sync"


def _unique_digits(rng: random.Random, used: set[str]) -> str:
    for _ in range(200):
        text = str(rng.randint(10, 999))
        if text not in used:
            used.add(text)
            return text
    text = str(1000 + len(used))
    used.add(text)
    return text


def _build_tabbar(rng: random.Random, used: set[str]) -> list[_El]:
    els: list[_El] = []
    tab_w = SCREEN_W // 3
    text_tabs = rng.sample(range(3), 2)  # one tab stays icon-only
    for i in range(3):
        x = i * tab_w
        y = SCREEN_H - TABBAR_H
        els.append(_El(f"tab{i}", "TabButton", x, y, tab_w, TABBAR_H, "tabbar"))
        els.append(_El(f"tab{i}.icon", "Icon", x + tab_w // 2 - 14, y + 6, 28, 28, "tabbar"))
        if i in text_tabs:
            label = _unique_words(rng, used, 1)
            w, h = text_extent(label)
            els.append(
                _El(f"tab{i}.label", "Text", x + tab_w // 2 - w // 2, y + 38, w + 2, h + 2,
                    "tabbar", text=label)
            )
    return els


def _build_archetype(
    rng: random.Random, used: set[str], index: int, tabbar: list[_El], is_modal: bool
) -> _Archetype:
    a = f"a{index}"
    if is_modal:
        els = [
            _El(f"{a}.dialog", "Dialog", 60, 230, 240, 220, "overlay"),
            _text_el(f"{a}.title", 80, 252, _unique_words(rng, used, 2), region="overlay"),
            _text_el(f"{a}.opt1", 80, 316, _unique_words(rng, used, 2), region="overlay"),
            _text_el(f"{a}.opt2", 80, 360, _unique_words(rng, used, 2), region="overlay"),
        ]
        return _Archetype(index, True, els, 0, None, None, [])

    els: list[_El] = [_text_el(f"{a}.title", 16, 20, _unique_words(rng, used, 2), region="header")]
    els.extend(tabbar)

    flow = 0
    data_slot = None
    section_span = None
    widget_menu = [
        "text_row", "text_row", "icon_row", "toggle_row", "data_row", "container",
        "text_row", "checkbox_row", "segmented", "textfield", "slider", "picture",
        "pagecontrol", "icon_row", "toggle_row",
    ]
    count = rng.randint(9, 12)
    chosen = [widget_menu[rng.randrange(len(widget_menu))] for _ in range(count)]
    # guarantee the variation hooks exist on every archetype
    chosen[0] = "text_row"
    chosen[rng.randrange(2, count)] = "data_row"
    if "toggle_row" not in chosen:
        chosen[1] = "toggle_row"
    # screens carry at most one page control; position matching assumes that
    seen_page_control = False
    for i, kind in enumerate(chosen):
        if kind == "pagecontrol":
            if seen_page_control:
                chosen[i] = "text_row"
            seen_page_control = True

    section_start = rng.randrange(2, count)
    widget_idx = 0

    def rows_of(kind: str, wid: str, y: int, in_section: bool) -> int:
        nonlocal data_slot
        if kind == "text_row":
            text = _unique_words(rng, used, rng.randint(2, 3))
            els.append(_text_el(f"{wid}.text", 16, y + 8, text, section=in_section))
            return 34
        if kind == "data_row":
            text = _data_text(rng.randint(10, 59))
            els.append(_text_el(f"{wid}.data", 16, y + 8, text, section=in_section))
            data_slot = f"{wid}.data"
            return 34
        if kind == "icon_row":
            els.append(_El(f"{wid}.icon", "Icon", 16, y + 4, 28, 28, "body", section=in_section))
            text = _unique_words(rng, used, 2)
            els.append(_text_el(f"{wid}.text", 56, y + 10, text, section=in_section))
            return 40
        if kind == "toggle_row":
            text = _unique_words(rng, used, 2)
            els.append(_text_el(f"{wid}.text", 16, y + 8, text, section=in_section))
            els.append(_El(f"{wid}.toggle", "Toggle", 298, y + 4, 44, 26, "body", section=in_section))
            return 38
        if kind == "checkbox_row":
            text = _unique_words(rng, used, 2)
            els.append(_El(f"{wid}.box", "Checkbox", 16, y + 6, 22, 22, "body", section=in_section))
            els.append(_text_el(f"{wid}.text", 52, y + 8, text, section=in_section))
            return 38
        if kind == "segmented":
            labels = [_unique_words(rng, used, 1) for _ in range(3)]
            els.append(_El(f"{wid}.seg", "SegmentedControl", 16, y + 4, 328, 34, "body", section=in_section))
            seg_w = 328 // 3
            for i, label in enumerate(labels):
                w, _ = text_extent(label)
                els.append(
                    _text_el(f"{wid}.seg{i}", 16 + i * seg_w + max(4, (seg_w - w) // 2), y + 14,
                             label, section=in_section)
                )
            return 46
        if kind == "textfield":
            els.append(_El(f"{wid}.field", "TextField", 16, y + 4, 328, 40, "body", section=in_section))
            text = _unique_words(rng, used, 2)
            els.append(_text_el(f"{wid}.placeholder", 28, y + 16, text, section=in_section))
            return 52
        if kind == "slider":
            label = _unique_words(rng, used, 2)
            els.append(_text_el(f"{wid}.label", 16, y + 6, label, section=in_section))
            els.append(_El(f"{wid}.slider", "Slider", 16, y + 34, 250, 22, "body", section=in_section))
            value = _unique_digits(rng, used)
            els.append(_text_el(f"{wid}.value", 284, y + 38, value, section=in_section))
            return 68
        if kind == "container":
            lines = [_unique_words(rng, used, rng.randint(2, 3)) for _ in range(2)]
            height = 24 + 30 * len(lines)
            els.append(_El(f"{wid}.box", "Container", 16, y + 4, 328, height, "body", section=in_section))
            for i, line in enumerate(lines):
                els.append(_text_el(f"{wid}.line{i}", 32, y + 16 + 30 * i, line, section=in_section))
            return height + 12
        if kind == "picture":
            els.append(_El(f"{wid}.pic", "Picture", 120, y + 4, 120, 90, "body", section=in_section))
            return 102
        if kind == "pagecontrol":
            els.append(_El(f"{wid}.pages", "PageControl", 150, y + 6, 60, 14, "body", section=in_section))
            return 26
        raise AssertionError(kind)

    section_height = 0
    for kind in chosen:
        wid = f"{a}.w{widget_idx}"
        widget_idx += 1
        in_section = section_start <= widget_idx - 1 < section_start + 2
        advance = rows_of(kind, wid, flow, in_section)
        if in_section:
            if section_span is None:
                section_span = (flow, 0)
            section_height += advance
            section_span = (section_span[0], section_height)
        flow += advance

    # leave room to scroll: pad content well past the viewport
    viewport = BODY_BOTTOM - BODY_TOP
    while flow < viewport + 180:
        wid = f"{a}.w{widget_idx}"
        widget_idx += 1
        flow += rows_of("text_row", wid, flow, False)

    banner = [
        _El(f"{a}.banner", "Container", 48, 180, 264, 88, "overlay"),
        _text_el(f"{a}.banner.text", 64, 214, _unique_words(rng, used, 2), region="overlay"),
    ]
    return _Archetype(index, False, els, flow, data_slot, section_span, banner)


# ---------------------------------------------------------------------------
# realization of one capture


@dataclass(frozen=True)
class _Plan:
    archetype: int
    variation: str = "base"
    scroll: int = 0
    data_text: str | None = None
    collapsed: bool = False
    keyboard: bool = False
    banner: bool = False
    background: int | None = None


@dataclass
class _Placed:
    slot: str
    kind: str
    rect: Rect
    text: str | None


def _place_elements(arch: _Archetype, plan: _Plan) -> list[_Placed]:
    placed: list[_Placed] = []
    collapse_y, collapse_h = arch.section_span if arch.section_span else (0, 0)
    for el in arch.elements:
        if el.region == "body":
            if plan.collapsed and el.section:
                continue
            y = el.y
            if plan.collapsed and y >= collapse_y + collapse_h:
                y -= collapse_h
            y = BODY_TOP + y - plan.scroll
            if y < BODY_TOP or y + el.h > BODY_BOTTOM:
                continue
            rect = Rect(el.x, y, el.w, el.h)
        else:
            rect = Rect(el.x, el.y, el.w, el.h)
        text = el.text
        if plan.data_text is not None and el.slot == arch.data_slot:
            text = plan.data_text
        placed.append(_Placed(el.slot, el.kind, rect, text))

    if plan.keyboard:
        keyboard_rect = Rect(0, KEYBOARD_TOP, SCREEN_W, SCREEN_H - KEYBOARD_TOP)
        placed = [p for p in placed if p.rect.intersect(keyboard_rect) is None]
    if plan.banner:
        banner_box = arch.banner[0]
        banner_rect = Rect(banner_box.x, banner_box.y, banner_box.w, banner_box.h)
        placed = [p for p in placed if p.rect.intersect(banner_rect) is None]
        for el in arch.banner:
            placed.append(_Placed(el.slot, el.kind, Rect(el.x, el.y, el.w, el.h), el.text))
    return placed


def _render(placed: list[_Placed], app_key: str, arch: _Archetype, plan: _Plan,
            background: np.ndarray | None) -> np.ndarray:
    if background is not None:
        canvas = (background.astype(np.float64) * 0.55).astype(np.uint8)
    else:
        canvas = np.empty((SCREEN_H, SCREEN_W, 3), dtype=np.uint8)
        canvas[:] = _color(f"{app_key}/bg{arch.index}", 236, 252)
        _fill(canvas, Rect(0, SCREEN_H - TABBAR_H, SCREEN_W, TABBAR_H), (226, 228, 233))

    for p in placed:
        key = f"{app_key}/{p.slot}"
        if p.kind == "Text":
            _draw_text(canvas, p.rect.x + 2, p.rect.y + 2, p.text or "")
        elif p.kind == "Icon":
            _draw_pattern(canvas, p.rect, key, 6)
        elif p.kind == "Picture":
            _draw_pattern(canvas, p.rect, key, 8)
        elif p.kind == "Toggle":
            _fill(canvas, p.rect, (70, 180, 90))
            knob = Rect(p.rect.right - p.rect.h + 2, p.rect.y + 2, p.rect.h - 4, p.rect.h - 4)
            _fill(canvas, knob, (250, 250, 250))
        elif p.kind == "Checkbox":
            _fill(canvas, p.rect, (90, 90, 110))
            _fill(canvas, Rect(p.rect.x + 3, p.rect.y + 3, p.rect.w - 6, p.rect.h - 6), (240, 240, 245))
        elif p.kind in ("SegmentedControl", "TextField"):
            _fill(canvas, p.rect, (210, 212, 220))
            _fill(canvas, Rect(p.rect.x + 2, p.rect.y + 2, p.rect.w - 4, p.rect.h - 4), (250, 250, 252))
        elif p.kind == "Slider":
            track_y = p.rect.y + p.rect.h // 2 - 3
            _fill(canvas, Rect(p.rect.x, track_y, p.rect.w, 6), (150, 150, 160))
            knob_x = p.rect.x + int(p.rect.w * 0.6)
            _fill(canvas, Rect(knob_x, p.rect.y, 14, p.rect.h), (60, 60, 80))
        elif p.kind == "Container":
            _fill(canvas, p.rect, (221, 224, 231))
        elif p.kind == "PageControl":
            dot_w = p.rect.h - 4
            for i in range(3):
                _fill(canvas, Rect(p.rect.x + i * (dot_w + 8), p.rect.y + 2, dot_w, dot_w),
                      (120, 120, 130) if i else (50, 50, 60))
        elif p.kind == "Dialog":
            _fill(canvas, p.rect, (252, 252, 254))
            _fill(canvas, Rect(p.rect.x, p.rect.y, p.rect.w, 4), (130, 130, 150))
        elif p.kind == "TabButton":
            pass  # tab background is the bar itself

    if plan.keyboard:
        _fill(canvas, Rect(0, KEYBOARD_TOP, SCREEN_W, SCREEN_H - KEYBOARD_TOP), (206, 208, 214))
        for row in range(4):
            for col in range(9):
                _fill(canvas,
                      Rect(6 + col * 39, KEYBOARD_TOP + 12 + row * 52, 33, 40),
                      (245, 246, 248))
    return canvas


# ---------------------------------------------------------------------------
# app generation


def _crawl_plans(
    spec: SynthSpec, rng: random.Random, archetypes: list[_Archetype], force_variation: str | None
) -> list[_Plan]:
    normal_ids = [a.index for a in archetypes if not a.is_modal]
    modal_ids = [a.index for a in archetypes if a.is_modal]
    pool = normal_ids + modal_ids
    weights = {name: float(spec.variation_weights.get(name, 0.0)) for name in VARIATIONS}
    revisit_names = [n for n in VARIATIONS if n != "modal_over_different_content"]

    def sample_variation() -> str:
        total = sum(weights[n] for n in revisit_names)
        if total <= 0:
            return "base"
        pick = rng.random() * total
        for name in revisit_names:
            pick -= weights[name]
            if pick <= 0:
                return name
        return revisit_names[-1]

    def plan_for(arch: _Archetype, variation: str) -> _Plan:
        if arch.is_modal:
            return _Plan(arch.index, "modal_over_different_content",
                         background=rng.choice(normal_ids))
        if variation == "base":
            return _Plan(arch.index)
        if variation == "same_data_change":
            return _Plan(arch.index, variation, data_text=_data_text(rng.randint(10, 59)))
        if variation == "scrolled":
            max_scroll = arch.content_height - (BODY_BOTTOM - BODY_TOP)
            dy = rng.randrange(40, max(48, max_scroll), 8)
            return _Plan(arch.index, variation, scroll=dy)
        if variation == "expanded_collapsed":
            return _Plan(arch.index, variation, collapsed=True)
        if variation == "keyboard":
            return _Plan(arch.index, variation, keyboard=True)
        if variation == "dialog_overlay":
            return _Plan(arch.index, variation, banner=True)
        raise AssertionError(variation)

    plans: list[_Plan] = []
    seen: set[int] = set()
    current = normal_ids[0]
    for _ in range(spec.screens_per_app):
        arch = archetypes[current]
        if force_variation is not None and not arch.is_modal:
            variation = force_variation
        elif current in seen and not arch.is_modal:
            variation = sample_variation()
        else:
            variation = "base"
        seen.add(current)
        plans.append(plan_for(arch, variation))
        current = rng.choice(pool)
    return plans


def _group_embedding(app_key: str, group: int) -> np.ndarray:
    rng = random.Random(f"{app_key}/emb/{group}")
    vec = np.array([rng.gauss(0.0, 1.0) for _ in range(8)])
    return vec / np.linalg.norm(vec)


def generate_app(
    spec: SynthSpec,
    app_index: int = 0,
    run_index: int = 0,
    force_variation: str | None = None,
) -> SynthApp:
    """Generate one app's bundle plus its gold grouping/correspondences/ledger.

    The same (seed, app_index) always yields the same screens; `run_index`
    re-crawls them in a different order with fresh variations, which is what a
    later audit run of the same app looks like.
    """
    app_key = f"{spec.seed}/app{app_index}"
    app_id = f"app-{spec.seed}-{app_index:03d}"
    layout_rng = random.Random(f"{app_key}/layout")
    crawl_rng = random.Random(f"{app_key}/run{run_index}")
    issue_rng = random.Random(f"{app_key}/run{run_index}/issues")

    used_texts: set[str] = set()
    tabbar = _build_tabbar(layout_rng, used_texts)
    n_normal = layout_rng.randint(5, 7)
    archetypes = [
        _build_archetype(layout_rng, used_texts, i, tabbar, is_modal=False)
        for i in range(n_normal)
    ]
    if spec.variation_weights.get("modal_over_different_content", 0.0) > 0:
        archetypes.append(
            _build_archetype(layout_rng, used_texts, n_normal, tabbar, is_modal=True)
        )

    plans = _crawl_plans(spec, crawl_rng, archetypes, force_variation)

    captures: list[ScreenCapture] = []
    gold_grouping: dict[str, int] = {}
    slot_maps: list[dict[str, str]] = []
    placed_by_capture: list[list[_Placed]] = []
    for ordinal, plan in enumerate(plans):
        arch = archetypes[plan.archetype]
        capture_id = f"{app_id}-c{ordinal:03d}"
        placed = _place_elements(arch, plan)
        background = None
        if arch.is_modal:
            bg_arch = archetypes[plan.background]
            background = _render(_place_elements(bg_arch, _Plan(bg_arch.index)),
                                 app_key, bg_arch, _Plan(bg_arch.index), None)
        canvas = _render(placed, app_key, arch, plan, background)

        detections = []
        slot_map: dict[str, str] = {}
        for i, p in enumerate(placed):
            det_id = f"{capture_id}-d{i}"
            slot_map[p.slot] = det_id
            detections.append(
                ElementDetection(det_id, p.kind, p.rect, text=p.text, confidence=1.0)
            )

        embedding = None
        if spec.emit_embeddings:
            jitter_rng = random.Random(f"{app_key}/embjitter/{capture_id}")
            jitter = np.array([jitter_rng.gauss(0.0, 1.0) for _ in range(8)]) * 0.01
            embedding = _group_embedding(app_key, plan.archetype) + jitter

        captures.append(
            ScreenCapture(
                capture_id=capture_id,
                ordinal=ordinal,
                screenshot=canvas,
                issues=[],
                detections=detections,
                embedding=embedding,
            )
        )
        gold_grouping[capture_id] = plan.archetype
        slot_maps.append(slot_map)
        placed_by_capture.append(placed)

    ledger = _plant_issues(spec, app_key, issue_rng, captures, gold_grouping,
                           slot_maps, placed_by_capture)
    correspondences = _gold_correspondences(captures, gold_grouping, slot_maps)

    bundle = CaptureBundle(app_id=app_id, run_id=f"run-{run_index}", captures=captures)
    return SynthApp(bundle, gold_grouping, correspondences, ledger)


def _plant_issues(
    spec: SynthSpec,
    app_key: str,
    rng: random.Random,
    captures: list[ScreenCapture],
    gold_grouping: dict[str, int],
    slot_maps: list[dict[str, str]],
    placed_by_capture: list[list[_Placed]],
) -> PlantedIssueLedger:
    ledger = PlantedIssueLedger()
    by_group: dict[int, list[int]] = {}
    for idx, cap in enumerate(captures):
        by_group.setdefault(gold_grouping[cap.capture_id], []).append(idx)

    issue_lists: dict[int, list[AccessibilityIssue]] = {i: [] for i in range(len(captures))}
    categories = sorted(CHECK_CATALOG)

    placed_maps = [{p.slot: p for p in placed} for placed in placed_by_capture]

    for group in sorted(by_group):
        members = by_group[group]
        stable = set(slot_maps[members[0]])
        for idx in members[1:]:
            stable &= set(slot_maps[idx])
        for slot in sorted(stable):
            # data rows change text between visits; keep planted issues off them
            texts = {placed_maps[idx][slot].text for idx in members}
            if len(texts) > 1:
                continue
            # seed per slot: the same app defects resurface on every audit run
            slot_rng = random.Random(f"{app_key}/issue/{slot}")
            if slot_rng.random() >= spec.planted_issue_rate:
                continue
            category = slot_rng.choice(categories)
            check = slot_rng.choice(CHECK_CATALOG[category])
            occurrences = []
            for idx in members:
                cap = captures[idx]
                issue_id = f"{cap.capture_id}-i{len(issue_lists[idx])}"
                issue_lists[idx].append(
                    AccessibilityIssue(issue_id, category, check,
                                       f"{check} ({slot})", placed_maps[idx][slot].rect)
                )
                occurrences.append((cap.capture_id, issue_id))
            ledger.on_element.append(
                PlantedIssue(group, slot, category, check, tuple(occurrences))
            )

    for idx, cap in enumerate(captures):
        if rng.random() >= spec.planted_false_positive_rate:
            continue
        spot = _free_spot(cap, rng)
        if spot is None:
            continue
        category = rng.choice(categories)
        check = rng.choice(CHECK_CATALOG[category])
        issue_id = f"{cap.capture_id}-i{len(issue_lists[idx])}"
        issue_lists[idx].append(
            AccessibilityIssue(issue_id, category, check, f"{check} (unanchored)", spot)
        )
        ledger.false_positives.append((cap.capture_id, issue_id))

    for idx, cap in enumerate(captures):
        cap.issues = issue_lists[idx]
    return ledger


def _free_spot(cap: ScreenCapture, rng: random.Random, w: int = 40, h: int = 24) -> Rect | None:
    candidates = []
    for y in range(BODY_TOP, BODY_BOTTOM - h, 24):
        for x in range(4, SCREEN_W - w - 4, 24):
            box = Rect(x, y, w, h)
            if all(box.intersect(d.bbox) is None for d in cap.detections):
                candidates.append(box)
    if not candidates:
        return None
    return candidates[rng.randrange(len(candidates))]


def _gold_correspondences(
    captures: list[ScreenCapture],
    gold_grouping: dict[str, int],
    slot_maps: list[dict[str, str]],
) -> list[GoldPair]:
    first_of_group: dict[int, int] = {}
    pairs: list[GoldPair] = []
    for idx, cap in enumerate(captures):
        group = gold_grouping[cap.capture_id]
        if group not in first_of_group:
            first_of_group[group] = idx
            continue
        rep_idx = first_of_group[group]
        rep_map = slot_maps[rep_idx]
        mapping = {
            det_id: rep_map.get(slot)
            for slot, det_id in sorted(slot_maps[idx].items())
        }
        pairs.append(GoldPair(cap.capture_id, captures[rep_idx].capture_id, mapping))
    return pairs


# ---------------------------------------------------------------------------
# corpus level helpers


def generate_corpus(spec: SynthSpec) -> list[SynthApp]:
    return [generate_app(spec, app_index=i) for i in range(spec.app_count)]


def gold_to_json(app: SynthApp) -> dict:
    return {
        "grouping": app.gold_grouping,
        "correspondences": [
            {
                "template_capture": p.template_capture,
                "target_capture": p.target_capture,
                "mapping": p.mapping,
            }
            for p in app.gold_correspondences
        ],
        "planted": {
            "on_element": [
                {
                    "group": p.group,
                    "slot": p.slot,
                    "category": p.category,
                    "check_name": p.check_name,
                    "occurrences": [list(o) for o in p.occurrences],
                }
                for p in app.ledger.on_element
            ],
            "false_positives": [list(o) for o in app.ledger.false_positives],
        },
    }


def write_synth_app(app: SynthApp, path: str | Path) -> Path:
    root = write_bundle(app.bundle, path)
    (root / "gold.json").write_text(json.dumps(gold_to_json(app), indent=1), encoding="utf-8")
    return root


def write_corpus(spec: SynthSpec, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, app in enumerate(generate_corpus(spec)):
        paths.append(write_synth_app(app, out / f"app_{i:03d}"))
    return paths
