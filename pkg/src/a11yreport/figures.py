"""Report figures and delimited summaries written next to the report JSON."""
from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.patches import ConnectionPatch

from .capture import CaptureBundle
from .report import Report

_THUMB_SCALE = 8


def save_storyboard_figure(report: Report, bundle: CaptureBundle, path: str | Path) -> Path:
    """Draw screen-group thumbnails with the observed transition arrows."""
    groups = report.storyboard.groups
    cols = min(5, max(1, len(groups)))
    rows = (len(groups) + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(2.2 * cols, 4.2 * rows))
    axes = np.atleast_1d(axes).ravel()

    centers = {}
    for ax, group in zip(axes, groups):
        cap = bundle.capture(group.representative_id)
        thumb = cap.screenshot[::_THUMB_SCALE, ::_THUMB_SCALE]
        ax.imshow(thumb)
        ax.set_title(f"g{group.group_id} ({len(group.member_ids)})", fontsize=9)
        centers[group.group_id] = ax
    for ax in axes[len(groups):]:
        ax.set_visible(False)
    for ax in axes[: len(groups)]:
        ax.set_xticks([])
        ax.set_yticks([])

    for src, dst in sorted(report.storyboard.edges):
        if src not in centers or dst not in centers:
            continue
        fig.add_artist(
            ConnectionPatch(
                xyA=(0.5, 0.5), coordsA=centers[src].transAxes,
                xyB=(0.5, 0.5), coordsB=centers[dst].transAxes,
                arrowstyle="-|>", mutation_scale=12,
                color="tab:blue", alpha=0.5, shrinkA=30, shrinkB=30,
            )
        )

    fig.suptitle(f"{report.app_id} storyboard: {len(groups)} screen groups", fontsize=11)
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=110, bbox_inches="tight")
    plt.close(fig)
    return out


def save_category_counts_figure(report: Report, path: str | Path) -> Path:
    """Horizontal bars of active unique issues per category."""
    counts = report.summary.get("app", {}).get("by_category", {})
    categories = list(counts)
    values = [counts[c] for c in categories]
    fig, ax = plt.subplots(figsize=(6, max(2.0, 0.5 * len(categories) + 1)))
    if categories:
        ax.barh(categories[::-1], values[::-1], color="tab:orange")
        for i, v in enumerate(values[::-1]):
            ax.text(v, i, f" {v}", va="center", fontsize=9)
    else:
        ax.text(0.5, 0.5, "no active issues", ha="center", va="center")
        ax.set_axis_off()
    ax.set_xlabel("active unique issues")
    ax.set_title(f"{report.app_id}: issues by category")
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=110, bbox_inches="tight")
    plt.close(fig)
    return out


def write_summary_csv(report: Report, path: str | Path) -> Path:
    """Flat delimited view of the summary counts for spreadsheets and diffs."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["level", "group_id", "category", "check_name", "count"])
        app = report.summary.get("app", {})
        for category, count in app.get("by_category", {}).items():
            writer.writerow(["app", "", category, "", count])
        for category, checks in app.get("by_check", {}).items():
            for check, count in checks.items():
                writer.writerow(["app", "", category, check, count])
        for group_id, block in report.summary.get("per_group", {}).items():
            for category, checks in block.get("by_check", {}).items():
                for check, count in checks.items():
                    writer.writerow(["group", group_id, category, check, count])
    return out
