"""De-duplicated, triage-ready accessibility reports from per-screen audit captures."""

from .capture import (
    AccessibilityIssue,
    BundleError,
    CaptureBundle,
    ElementDetection,
    ScreenCapture,
    associate_issue,
    load_bundle,
    write_bundle,
)
from .config import ConfigurationError, PipelineConfig, load_config
from .geometry import Rect, iou
from .grouping import ScreenGroup, SimilarityScorer, Storyboard, build_storyboard, score
from .ignores import IgnoreRecord, IgnoreStore, apply_ignores
from .matching import (
    ElementGroupRecord,
    MatchResult,
    TemplateRecord,
    build_element_groups,
    find_best_match,
    icon_match,
    ncc,
    normalize_text,
    preprocess_template,
    text_similarity,
)
from .metrics import CorrespondenceJudgment, matching_metrics, pairwise_grouping_metrics
from .report import Report, UniqueIssue, assemble_report, dedupe_group_issues, filter_false_positives, summarize
from .synth import SynthSpec, generate_app, generate_corpus, write_corpus, write_synth_app

__version__ = "0.1.0"
