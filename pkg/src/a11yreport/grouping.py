"""Same-screen scoring and storyboard construction.

Captures are processed in order; each one joins the existing group with the
highest positive similarity score or starts a new group. A directed edge is
recorded whenever consecutive captures land in different groups.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .capture import CaptureBundle, ScreenCapture
from .config import ConfigurationError, PipelineConfig
from .matching import normalize_text

MODE_THRESHOLDS = {"embedding": 0.2, "pixel": 30.0, "structural": 0.5}


@dataclass
class SimilarityScorer:
    mode: str = "pixel"  # embedding | pixel | structural
    threshold: float | None = None
    resize_width: int = 256

    def __post_init__(self):
        if self.mode not in MODE_THRESHOLDS:
            raise ConfigurationError(f"unknown similarity mode '{self.mode}'")
        if self.threshold is None:
            self.threshold = MODE_THRESHOLDS[self.mode]
        if self.threshold <= 0:
            raise ConfigurationError("similarity threshold must be positive")

    @classmethod
    def from_config(cls, config: PipelineConfig, threshold: float | None = None) -> "SimilarityScorer":
        return cls(
            mode=config.similarity,
            threshold=threshold if threshold is not None else config.similarity_threshold(),
            resize_width=config.pixel_resize_width,
        )


@dataclass
class ScreenGroup:
    group_id: int
    member_ids: list[str]
    representative_id: str
    mean_embedding: np.ndarray | None = None


@dataclass
class Storyboard:
    groups: list[ScreenGroup] = field(default_factory=list)
    edges: set[tuple[int, int]] = field(default_factory=set)

    def group_of(self, capture_id: str) -> ScreenGroup:
        for group in self.groups:
            if capture_id in group.member_ids:
                return group
        raise KeyError(capture_id)

    def to_json(self) -> dict:
        return {
            "groups": [
                {
                    "group_id": g.group_id,
                    "member_ids": list(g.member_ids),
                    "representative_id": g.representative_id,
                }
                for g in self.groups
            ],
            "edges": sorted(list(e) for e in self.edges),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Storyboard":
        return cls(
            groups=[
                ScreenGroup(g["group_id"], list(g["member_ids"]), g["representative_id"])
                for g in doc["groups"]
            ],
            edges={(int(a), int(b)) for a, b in doc["edges"]},
        )


def _small_gray(capture: ScreenCapture, width: int, height: int) -> np.ndarray:
    img = Image.fromarray(capture.screenshot).convert("L").resize((width, height), Image.BILINEAR)
    return np.asarray(img, dtype=np.float64)


def pixel_mse(a: ScreenCapture, b: ScreenCapture, resize_width: int = 256) -> float:
    """Mean squared difference of 8-bit grayscale values on a common raster."""
    target_h = max(1, round(resize_width * (a.height / a.width + b.height / b.width) / 2))
    ga = _small_gray(a, resize_width, target_h)
    gb = _small_gray(b, resize_width, target_h)
    return float(np.mean((ga - gb) ** 2))


def _structural_key(det) -> tuple:
    if det.text is not None:
        return (det.kind, normalize_text(det.text))
    return (det.kind, det.bbox.w // 8, det.bbox.h // 8)


def structural_overlap(a: ScreenCapture, b: ScreenCapture) -> float:
    """F1 overlap of the two captures' detection multisets, in [0, 1]."""
    ca = Counter(_structural_key(d) for d in a.detections)
    cb = Counter(_structural_key(d) for d in b.detections)
    total = sum(ca.values()) + sum(cb.values())
    if total == 0:
        return 1.0
    inter = sum((ca & cb).values())
    return 2.0 * inter / total


def score_pair(
    scorer: SimilarityScorer,
    a: ScreenCapture,
    b: ScreenCapture,
    b_embedding: np.ndarray | None = None,
) -> float:
    """Signed same-screen score between a capture and a reference screen."""
    if scorer.mode == "embedding":
        reference = b_embedding if b_embedding is not None else b.embedding
        if a.embedding is None or reference is None:
            raise ConfigurationError(
                "embedding similarity requested but a capture has no embedding"
            )
        return scorer.threshold - float(np.linalg.norm(a.embedding - reference))
    if scorer.mode == "pixel":
        return scorer.threshold - pixel_mse(a, b, scorer.resize_width)
    return structural_overlap(a, b) - scorer.threshold


def score(
    scorer: SimilarityScorer,
    a: ScreenCapture,
    b_group: ScreenGroup,
    bundle: CaptureBundle,
) -> float:
    """Signed score of a capture against a group (positive means same screen)."""
    representative = bundle.capture(b_group.representative_id)
    return score_pair(scorer, a, representative, b_embedding=b_group.mean_embedding)


def assign_screen(
    storyboard: Storyboard,
    capture: ScreenCapture,
    scorer: SimilarityScorer,
    bundle: CaptureBundle,
    _pair_scorer=None,
) -> int:
    """Append the capture to the best positive-scoring group or a new one."""
    best_gid = None
    best_score = 0.0
    for group in storyboard.groups:
        if _pair_scorer is not None:
            value = _pair_scorer(capture, group)
        else:
            value = score(scorer, capture, group, bundle)
        if value > 0 and (best_gid is None or value > best_score):
            best_gid = group.group_id
            best_score = value

    if best_gid is None:
        gid = len(storyboard.groups)
        storyboard.groups.append(
            ScreenGroup(
                group_id=gid,
                member_ids=[capture.capture_id],
                representative_id=capture.capture_id,
                mean_embedding=None if capture.embedding is None else capture.embedding.astype(np.float64),
            )
        )
        return gid

    group = storyboard.groups[best_gid]
    group.member_ids.append(capture.capture_id)
    if scorer.mode == "embedding" and capture.embedding is not None and group.mean_embedding is not None:
        n = len(group.member_ids)
        group.mean_embedding = group.mean_embedding + (capture.embedding - group.mean_embedding) / n
    return best_gid


def build_storyboard(bundle: CaptureBundle, scorer: SimilarityScorer) -> Storyboard:
    """Partition the bundle's captures into screen groups with transition edges."""
    if not bundle.captures:
        raise ValueError("cannot build a storyboard for an empty bundle")
    if scorer.mode == "embedding" and not bundle.has_embeddings:
        raise ConfigurationError("embedding similarity requested but bundle lacks embeddings")

    storyboard = Storyboard()
    pair_scorer = None
    if scorer.mode == "pixel":
        # representatives never change, so cache their downscaled rasters
        cache: dict[str, tuple[float, np.ndarray]] = {}

        def small(cap: ScreenCapture, target_h: int) -> np.ndarray:
            key = cap.capture_id
            hit = cache.get(key)
            if hit is not None and hit[0] == target_h:
                return hit[1]
            raster = _small_gray(cap, scorer.resize_width, target_h)
            cache[key] = (target_h, raster)
            return raster

        def pair_scorer(cap: ScreenCapture, group: ScreenGroup) -> float:
            rep = bundle.capture(group.representative_id)
            target_h = max(
                1, round(scorer.resize_width * (cap.height / cap.width + rep.height / rep.width) / 2)
            )
            diff = small(cap, target_h) - small(rep, target_h)
            return scorer.threshold - float(np.mean(diff * diff))

    current: int | None = None
    for capture in bundle.captures:
        gid = assign_screen(storyboard, capture, scorer, bundle, _pair_scorer=pair_scorer)
        if current is not None and current != gid:
            storyboard.edges.add((current, gid))
        current = gid
    return storyboard
