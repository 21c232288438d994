"""Command line entry points: generate, serve, eval, synth."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from PIL import Image

from .capture import BundleError, load_bundle
from .config import ConfigurationError, load_config
from .grouping import SimilarityScorer, build_storyboard
from .ignores import IgnoreStore
from .metrics import CorrespondenceJudgment, matching_metrics, pairwise_grouping_metrics
from .report import assemble_report
from .synth import SynthSpec, write_corpus


def _parse_variations(raw: str | None) -> dict[str, float]:
    weights: dict[str, float] = {}
    if not raw:
        return weights
    for part in raw.split(","):
        if not part.strip():
            continue
        name, _, value = part.partition("=")
        weights[name.strip()] = float(value)
    return weights


def cmd_generate(args) -> int:
    try:
        config = load_config(args.config, similarity=args.similarity)
        bundle = load_bundle(args.bundle_dir)
        if args.similarity is None and args.config is None and bundle.similarity_mode_hint:
            config = load_config(None, similarity=bundle.similarity_mode_hint)
        scorer = SimilarityScorer.from_config(config, threshold=args.threshold)
        storyboard = build_storyboard(bundle, scorer)
        store = IgnoreStore(args.ignore_file) if args.ignore_file else None
        report = assemble_report(
            bundle,
            storyboard,
            ignore_store=store,
            config=config,
            scorer=scorer,
            bundle_dir=str(Path(args.bundle_dir).resolve()),
        )
    except (BundleError, ConfigurationError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    doc = report.to_json()
    (out / "report.json").write_text(json.dumps(doc, indent=2), encoding="utf-8")

    screens_dir = out / "screens"
    screens_dir.mkdir(exist_ok=True)
    for cap in bundle.captures:
        Image.fromarray(cap.screenshot).save(screens_dir / f"{cap.capture_id}.png")

    from .figures import save_category_counts_figure, save_storyboard_figure, write_summary_csv

    write_summary_csv(report, out / "summary.csv")
    if not args.no_figures:
        save_storyboard_figure(report, bundle, out / "figures" / "storyboard.png")
        save_category_counts_figure(report, out / "figures" / "category_counts.png")

    app_counts = report.summary["app"]
    print(f"report written to {out / 'report.json'}")
    print(f"screens: {len(bundle.captures)} captures in {len(storyboard.groups)} groups")
    print(f"active unique issues: {app_counts['total']}"
          f" (ignored: {len(report.ignored)}, hidden: {len(report.hidden)})")
    for category, count in app_counts["by_category"].items():
        print(f"  {category}: {count}")
    return 0


def cmd_serve(args) -> int:
    from .server import serve

    try:
        config = load_config(args.config)
        serve(args.report_dir, args.ignore_file, host=args.host, port=args.port,
              config=config, ui_dir=args.ui_dir)
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return 2
    return 0


def _load_grouping_labels(path: Path) -> dict[str, object]:
    doc = json.loads(path.read_text(encoding="utf-8"))
    if isinstance(doc, dict) and "grouping" in doc:
        return doc["grouping"]
    return doc


def _load_correspondences(path: Path) -> list[dict]:
    doc = json.loads(path.read_text(encoding="utf-8"))
    if isinstance(doc, dict) and "correspondences" in doc:
        return doc["correspondences"]
    return doc


def _eval_grouping(args) -> dict:
    gold = _load_grouping_labels(Path(args.gold))
    if args.bundle:
        bundle = load_bundle(args.bundle)
        config = load_config(args.config, similarity=args.similarity)
        scorer = SimilarityScorer.from_config(config, threshold=args.threshold)
        storyboard = build_storyboard(bundle, scorer)
    else:
        if not args.pred:
            raise ValueError("grouping eval needs --pred or --bundle")
        labels = _load_grouping_labels(Path(args.pred))
        from .grouping import ScreenGroup, Storyboard

        groups: dict[object, ScreenGroup] = {}
        storyboard = Storyboard()
        for capture_id in sorted(labels):
            label = labels[capture_id]
            if label not in groups:
                groups[label] = ScreenGroup(len(groups), [], capture_id)
                storyboard.groups.append(groups[label])
            groups[label].member_ids.append(capture_id)
    return pairwise_grouping_metrics(storyboard, gold)


def _eval_matching(args) -> dict:
    gold_pairs = _load_correspondences(Path(args.gold))
    gold: dict[tuple[str, str, str], str | None] = {}
    for pair in gold_pairs:
        for template_id, target_id in pair["mapping"].items():
            gold[(pair["template_capture"], pair["target_capture"], template_id)] = target_id

    judgments = []
    if args.bundle:
        from .matching import build_element_groups, find_best_match, preprocess_template

        bundle = load_bundle(args.bundle)
        config = load_config(args.config)
        group_cache = {}
        for pair in gold_pairs:
            template_cap = bundle.capture(pair["template_capture"])
            target_cap = bundle.capture(pair["target_capture"])
            if target_cap.capture_id not in group_cache:
                group_cache[target_cap.capture_id] = build_element_groups(target_cap.detections)
            for template_id, target_id in pair["mapping"].items():
                template = preprocess_template(template_cap, template_cap.detection(template_id))
                result = find_best_match(template, target_cap, config,
                                         new_groups=group_cache[target_cap.capture_id])
                judgments.append(
                    CorrespondenceJudgment(template_id, result.matched_id, target_id)
                )
    else:
        if not args.pred:
            raise ValueError("matching eval needs --pred or --bundle")
        pred_pairs = _load_correspondences(Path(args.pred))
        pred: dict[tuple[str, str, str], str | None] = {}
        for pair in pred_pairs:
            for template_id, target_id in pair["mapping"].items():
                pred[(pair["template_capture"], pair["target_capture"], template_id)] = target_id
        if set(pred) != set(gold):
            raise ValueError("prediction and gold files cover different templates")
        for key in sorted(gold):
            judgments.append(CorrespondenceJudgment(key[2], pred[key], gold[key]))
    return matching_metrics(judgments)


def cmd_eval(args) -> int:
    try:
        if args.task == "grouping":
            metrics = _eval_grouping(args)
        else:
            metrics = _eval_matching(args)
    except (OSError, ValueError, KeyError, BundleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps(metrics, indent=2))
    else:
        print(f"{'metric':<12} value")
        for name in ("precision", "recall", "f1", "accuracy"):
            print(f"{name:<12} {metrics[name]:.4f}")
        print(f"{'tp/fp/fn/tn':<12} {metrics['tp']}/{metrics['fp']}/{metrics['fn']}/{metrics['tn']}")
    return 0


def cmd_synth(args) -> int:
    try:
        spec = SynthSpec(
            seed=args.seed,
            app_count=args.apps,
            screens_per_app=args.screens,
            variation_weights=_parse_variations(args.variations),
            planted_issue_rate=args.issue_rate,
            planted_false_positive_rate=args.fp_rate,
            emit_embeddings=not args.no_embeddings,
        )
        paths = write_corpus(spec, args.out)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in paths:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="a11yreport",
        description="Summarize per-screen accessibility audits into one de-duplicated app report.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="build a report from a capture bundle")
    p.add_argument("bundle_dir")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--similarity", choices=["embedding", "pixel", "structural"], default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--config", default=None, help="JSON config file of pipeline knobs")
    p.add_argument("--ignore-file", default=None)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("serve", help="serve a generated report with a mutation API")
    p.add_argument("report_dir")
    p.add_argument("--ignore-file", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8077)
    p.add_argument("--config", default=None)
    p.add_argument("--ui-dir", default=None, help="directory of built UI assets to serve at /")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("eval", help="score predictions against gold labels")
    p.add_argument("task", choices=["grouping", "matching"])
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", default=None)
    p.add_argument("--bundle", default=None, help="compute predictions from this bundle instead of --pred")
    p.add_argument("--similarity", choices=["embedding", "pixel", "structural"], default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate synthetic capture bundles with gold labels")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--apps", type=int, default=1)
    p.add_argument("--screens", type=int, default=10)
    p.add_argument("--variations", default=None,
                   help="comma list like scrolled=0.4,keyboard=0.2")
    p.add_argument("--issue-rate", type=float, default=0.3)
    p.add_argument("--fp-rate", type=float, default=0.1)
    p.add_argument("--no-embeddings", action="store_true")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
