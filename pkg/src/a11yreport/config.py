"""Pipeline tuning knobs, overridable from a JSON key-value config file."""
from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from pathlib import Path


class ConfigurationError(ValueError):
    """The requested pipeline configuration cannot run on the given inputs."""


@dataclass(frozen=True)
class PipelineConfig:
    # screen grouping
    similarity: str = "pixel"  # embedding | pixel | structural
    embedding_threshold: float = 0.2
    pixel_mse_threshold: float = 30.0
    structural_threshold: float = 0.5
    pixel_resize_width: int = 256
    # element matching
    text_threshold: float = 0.90
    icon_threshold: float = 0.80
    picture_threshold: float = 0.50
    position_threshold: float = 0.50
    group_preference_margin: float = 0.05
    search_padding: float = 0.25
    scale_steps: tuple[float, ...] = (0.91, 0.94, 0.97, 1.00, 1.03, 1.06, 1.09)
    # issue association / de-dup
    issue_iou_threshold: float = 0.30
    raw_issue_iou_threshold: float = 0.50

    def similarity_threshold(self) -> float:
        """Default grouping threshold for the configured similarity mode."""
        return {
            "embedding": self.embedding_threshold,
            "pixel": self.pixel_mse_threshold,
            "structural": self.structural_threshold,
        }[self.similarity]

    def to_json(self) -> dict:
        doc = {}
        for f in fields(self):
            value = getattr(self, f.name)
            doc[f.name] = list(value) if isinstance(value, tuple) else value
        return doc


def load_config(path: str | Path | None = None, **overrides) -> PipelineConfig:
    """Build a config from defaults, an optional JSON file, then overrides.

    The file is a flat JSON object whose keys are PipelineConfig field names;
    unknown keys are rejected so typos fail loudly.
    """
    cfg = PipelineConfig()
    known = {f.name for f in fields(cfg)}
    if path is not None:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        unknown = set(doc) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys in {path}: {sorted(unknown)}")
        if "scale_steps" in doc:
            doc["scale_steps"] = tuple(float(v) for v in doc["scale_steps"])
        cfg = replace(cfg, **doc)
    overrides = {k: v for k, v in overrides.items() if v is not None}
    unknown = set(overrides) - known
    if unknown:
        raise ConfigurationError(f"unknown config overrides: {sorted(unknown)}")
    if overrides:
        cfg = replace(cfg, **overrides)
    if cfg.similarity not in ("embedding", "pixel", "structural"):
        raise ConfigurationError(f"unknown similarity mode '{cfg.similarity}'")
    return cfg
