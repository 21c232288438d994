from __future__ import annotations

import numpy as np
import pytest

from a11yreport.capture import AccessibilityIssue, CaptureBundle, ElementDetection, ScreenCapture
from a11yreport.geometry import Rect
from a11yreport.synth import SynthSpec, generate_app


def blank_screen(width=200, height=300, value=240) -> np.ndarray:
    canvas = np.empty((height, width, 3), dtype=np.uint8)
    canvas[:] = value
    return canvas


def make_capture(capture_id="c0", ordinal=0, detections=(), issues=(), screenshot=None,
                 embedding=None) -> ScreenCapture:
    return ScreenCapture(
        capture_id=capture_id,
        ordinal=ordinal,
        screenshot=blank_screen() if screenshot is None else screenshot,
        issues=list(issues),
        detections=list(detections),
        embedding=embedding,
    )


def det(detection_id, kind, x, y, w, h, text=None) -> ElementDetection:
    return ElementDetection(detection_id, kind, Rect(x, y, w, h), text=text)


def issue(issue_id, x, y, w, h, category="Contrast",
          check="Text contrast below required ratio", message="") -> AccessibilityIssue:
    return AccessibilityIssue(issue_id, category, check, message, Rect(x, y, w, h))


def bundle_of(*captures, app_id="app", run_id="run-0") -> CaptureBundle:
    return CaptureBundle(app_id=app_id, run_id=run_id, captures=list(captures))


VARIED_WEIGHTS = {
    "same_data_change": 0.2,
    "scrolled": 0.35,
    "keyboard": 0.15,
    "dialog_overlay": 0.15,
    "modal_over_different_content": 0.15,
}


@pytest.fixture(scope="session")
def plain_app():
    """One synthetic app with byte-identical revisits and planted issues."""
    return generate_app(
        SynthSpec(seed=101, app_count=1, screens_per_app=10,
                  planted_issue_rate=0.25, planted_false_positive_rate=0.3)
    )


@pytest.fixture(scope="session")
def varied_app():
    """One synthetic app exercising every revisit variation."""
    return generate_app(
        SynthSpec(seed=202, app_count=1, screens_per_app=14,
                  variation_weights=VARIED_WEIGHTS,
                  planted_issue_rate=0.2, planted_false_positive_rate=0.2)
    )
