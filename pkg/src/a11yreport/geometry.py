"""Axis-aligned integer rectangles in screenshot pixel space."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Rect:
    x: int
    y: int
    w: int
    h: int

    @property
    def area(self) -> int:
        return self.w * self.h

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    @property
    def right(self) -> int:
        return self.x + self.w

    @property
    def bottom(self) -> int:
        return self.y + self.h

    def contains_point(self, px: float, py: float) -> bool:
        return self.x <= px <= self.right and self.y <= py <= self.bottom

    def contains_center_of(self, other: "Rect") -> bool:
        cx, cy = other.center
        return self.contains_point(cx, cy)

    def intersect(self, other: "Rect") -> "Rect | None":
        x0 = max(self.x, other.x)
        y0 = max(self.y, other.y)
        x1 = min(self.right, other.right)
        y1 = min(self.bottom, other.bottom)
        if x1 <= x0 or y1 <= y0:
            return None
        return Rect(x0, y0, x1 - x0, y1 - y0)

    def clamped(self, width: int, height: int) -> "Rect":
        """Clip the rectangle to a (width, height) canvas, never rejecting it."""
        x = min(max(self.x, 0), width)
        y = min(max(self.y, 0), height)
        w = min(max(self.w, 0), width - x)
        h = min(max(self.h, 0), height - y)
        return Rect(x, y, w, h)

    def expanded(self, fraction: float) -> "Rect":
        """Grow the box by `fraction` of its own size on every side."""
        dx = int(round(self.w * fraction))
        dy = int(round(self.h * fraction))
        return Rect(self.x - dx, self.y - dy, self.w + 2 * dx, self.h + 2 * dy)

    def to_json(self) -> dict:
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h}

    @classmethod
    def from_json(cls, doc: dict) -> "Rect":
        return cls(int(doc["x"]), int(doc["y"]), int(doc["w"]), int(doc["h"]))


def iou(a: Rect, b: Rect) -> float:
    """Intersection over union; 0.0 when either box is degenerate."""
    inter = a.intersect(b)
    if inter is None:
        return 0.0
    union = a.area + b.area - inter.area
    if union <= 0:
        return 0.0
    return inter.area / union
