"""Command-line entry point: ``docdegrade {augment,evaluate,preview,validate}``.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import annotate, evaluate, pipeline
from .effects import (
    ConfigError,
    EffectParams,
    apply_dirty_screen,
    apply_ink_bleed,
    apply_jpeg_artifact,
    apply_letterpress,
    apply_low_ink_periodic_lines,
    apply_low_ink_random_lines,
)
from .imageio import ImageFormatError, load_image, save_image
from .raster import Raster, rotate_image, to_gray, to_rgb
from .rng import RngStream

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2

PREVIEW_EFFECTS = ("inkbleed", "letterpress", "lowink-random", "lowink-periodic", "jpeg", "dirtyscreen", "rotate")
PREVIEW_ALL = PREVIEW_EFFECTS[:6]
PANEL_GUTTER = 8
GUTTER_VALUE = 128

log = logging.getLogger("docdegrade")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- config -----------------------------------------------------------------

RUN_KEYS = {"manifest", "out", "workers"}


def load_run_config(path) -> tuple[dict, dict]:
    """Split a JSON config into (pipeline fields, run fields)."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must be a JSON object")
    run = {k: data[k] for k in RUN_KEYS if k in data}
    fields = {k: v for k, v in data.items() if k not in RUN_KEYS}
    return fields, run


def _pipeline_config(args, need_seed: bool = True) -> tuple[pipeline.PipelineConfig, dict]:
    fields, run = ({}, {})
    if getattr(args, "config", None):
        fields, run = load_run_config(args.config)
    if getattr(args, "seed", None) is not None:
        fields["master_seed"] = args.seed
    if getattr(args, "variants", None) is not None:
        fields["variants_per_document"] = args.variants
    if need_seed and "master_seed" not in fields:
        raise UsageError("a seed is required: pass --seed or set master_seed in the config file")
    try:
        return pipeline.PipelineConfig.from_dict(fields), run
    except ConfigError as exc:
        raise UsageError(f"bad config: {exc}") from exc


# -- augment ----------------------------------------------------------------

def cmd_augment(args) -> int:
    config, run = _pipeline_config(args)
    manifest_path = args.manifest or run.get("manifest")
    out_dir = args.out or run.get("out")
    workers = args.workers if args.workers is not None else run.get("workers", pipeline.default_workers())
    if not manifest_path or not out_dir:
        raise UsageError("both --manifest and --out are required (flag or config file)")
    if not isinstance(workers, int) or workers < 1:
        raise UsageError(f"workers must be a positive integer, got {workers!r}")
    if not Path(manifest_path).is_file():
        raise UsageError(f"manifest not found: {manifest_path}")
    try:
        entries = pipeline.load_manifest(manifest_path)
    except pipeline.ManifestError as exc:
        raise UsageError(str(exc)) from exc

    report = pipeline.augment_corpus(entries, config, out_dir, workers=workers)
    print(f"augmented {report['documents']}/{report['documents_total']} documents -> "
          f"{report['variants']} variants in {out_dir} (seed {config.master_seed})")
    if report["failures"]:
        print(f"warning: {len(report['failures'])} document(s) failed; see {Path(out_dir) / 'report.json'}",
              file=sys.stderr)
        if report["documents"] == 0:
            return EXIT_FAILURE
    return EXIT_OK


# -- evaluate ---------------------------------------------------------------

def expand_annotation_paths(paths) -> list[Path]:
    """Annotation files, directories, or manifests -> annotation file paths."""
    found: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            manifest = p / "manifest.json"
            if manifest.is_file():
                found.extend(e.annotation for e in pipeline.load_manifest(manifest))
            else:
                found.extend(sorted(p.glob("*.json")))
        elif p.is_file():
            try:
                obj = json.loads(p.read_text(encoding="utf-8"))
            except json.JSONDecodeError:
                found.append(p)  # reported later as invalid JSON
                continue
            if isinstance(obj, list):
                found.extend(e.annotation for e in pipeline.parse_manifest(obj, p.parent))
            else:
                found.append(p)
        else:
            raise UsageError(f"no such file or directory: {raw}")
    return found


def cmd_evaluate(args) -> int:
    if args.iou is not None and args.iou_sweep:
        raise UsageError("--iou and --iou-sweep are mutually exclusive")
    if not Path(args.pred).is_file():
        raise UsageError(f"predictions file not found: {args.pred}")
    try:
        thresholds = evaluate.parse_sweep(args.iou_sweep) if args.iou_sweep else [args.iou or evaluate.DEFAULT_IOU]
    except evaluate.EvaluationError as exc:
        raise UsageError(str(exc)) from exc
    try:
        gt = [annotate.load_annotation(p) for p in expand_annotation_paths(args.gt)]
        dets = evaluate.load_predictions(args.pred)
        sweep = evaluate.map_sweep(gt, dets, thresholds)
    except (annotate.AnnotationError, evaluate.EvaluationError, pipeline.ManifestError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE

    for rep in sweep.reports:
        print(evaluate.format_table(rep))
    if len(sweep.reports) > 1:
        print(f"mean mAP over {len(sweep.reports)} thresholds {sweep.mean_map:.4f}")
    report_path = Path(args.report) if args.report else Path(args.pred).with_suffix(".report.json")
    report_path.write_text(json.dumps(sweep.to_json(), indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


# -- preview ----------------------------------------------------------------

def _preview_panel(name: str, img: Raster, params: EffectParams, config: pipeline.PipelineConfig,
                   rng: RngStream) -> Raster:
    if name == "inkbleed":
        return apply_ink_bleed(img, params.ink_bleed, rng)
    if name == "letterpress":
        return apply_letterpress(img, params.letterpress, rng)
    if name == "lowink-random":
        return apply_low_ink_random_lines(img, params.low_ink, rng)
    if name == "lowink-periodic":
        return apply_low_ink_periodic_lines(img, params.low_ink, rng)
    if name == "jpeg":
        return apply_jpeg_artifact(img, params.jpeg, rng)
    if name == "dirtyscreen":
        return apply_dirty_screen(img, params.dirty_screen, rng)
    if name == "rotate":
        return rotate_image(img, float(rng.uniform(*config.angle_range_degrees)), config.fill)
    raise UsageError(f"unknown effect {name!r}; valid: {', '.join(PREVIEW_EFFECTS)}")


def compose_panels(panels: list[Raster]) -> Raster:
    rgb = any(p.channels == 3 for p in panels)
    if rgb:
        panels = [to_rgb(p) for p in panels]
    h = panels[0].height
    gutter = np.full((h, PANEL_GUTTER, panels[0].channels), GUTTER_VALUE, dtype=np.uint8)
    parts = []
    for i, p in enumerate(panels):
        if i:
            parts.append(gutter)
        parts.append(p.pixels)
    return Raster(np.concatenate(parts, axis=1))


def cmd_preview(args) -> int:
    config, _ = _pipeline_config(args)
    names = list(PREVIEW_ALL) if args.all else list(dict.fromkeys(args.effect or []))
    if not names:
        raise UsageError("choose at least one --effect or pass --all")
    try:
        img = load_image(args.image)
    except (OSError, ImageFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE

    stream = RngStream(config.master_seed)
    panels = [img]
    for name in names:
        panels.append(_preview_panel(name, img, config.effect_params, config, stream.child("preview", name)))
    detail = ""
    if args.all:
        sample_cfg = replace(config, variants_per_document=max(1, config.variants_per_document))
        doc_id = Path(args.image).stem
        plan = pipeline.plan_variant(sample_cfg, doc_id, 0)
        ann = annotate.DocumentAnnotation.empty(doc_id, img.width, img.height)
        sample, _ = pipeline.execute_variant(img, ann, plan, sample_cfg)
        panels.append(sample)
        names.append("pipeline")
        detail = f" sample={json.dumps(plan.describe(), sort_keys=True)}"

    out = Path(args.out)
    composite = compose_panels(panels)
    # follow the requested extension: .ppm always RGB, .pgm always gray
    if out.suffix.lower() == ".ppm":
        composite = to_rgb(composite)
    elif out.suffix.lower() == ".pgm":
        composite = to_gray(composite)
    save_image(composite, out)
    print(f"preview seed={config.master_seed} panels=original,{','.join(names)}{detail} -> {out}")
    return EXIT_OK


# -- validate ---------------------------------------------------------------

def cmd_validate(args) -> int:
    paths = expand_annotation_paths(args.paths)
    bad = 0
    for p in paths:
        try:
            obj = json.loads(Path(p).read_text(encoding="utf-8"))
            problems = annotate.annotation_violations(obj)
        except OSError as exc:
            problems = [f"cannot read: {exc.strerror or exc}"]
        except json.JSONDecodeError as exc:
            problems = [f"invalid JSON ({exc})"]
        if problems:
            bad += 1
            for msg in problems:
                print(f"{p}: {msg}")
    if bad:
        print(f"{bad} of {len(paths)} annotation file(s) invalid")
        return EXIT_FAILURE
    print(f"ok ({len(paths)} annotation file(s))")
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="docdegrade", description="Scanned-document degradation and detection scoring.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("augment", help="generate augmented variants for a corpus")
    p.add_argument("--manifest", help="input manifest: JSON array of {image, annotation}")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int, help="master seed (required unless set in --config)")
    p.add_argument("--config", help="JSON config with pipeline fields (and optionally manifest/out/workers)")
    p.add_argument("--variants", type=int, help="variants per document (default 5)")
    p.add_argument("--workers", type=int, help="worker processes (default: available CPUs)")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("evaluate", help="score predictions against ground-truth annotations")
    p.add_argument("--gt", nargs="+", required=True, help="annotation files, directories, or manifests")
    p.add_argument("--pred", required=True, help="predictions, JSON Lines")
    p.add_argument("--iou", type=float, help="IoU threshold (default 0.5)")
    p.add_argument("--iou-sweep", help="threshold grid start:stop:step, e.g. 0.50:0.95:0.05")
    p.add_argument("--report", help="JSON report path (default: <pred>.report.json)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("preview", help="render a side-by-side effect panel for one image")
    p.add_argument("image", help="input image (PGM/PPM, or PNG with Pillow)")
    p.add_argument("--effect", action="append", choices=PREVIEW_EFFECTS, help="effect panel to add (repeatable)")
    p.add_argument("--all", action="store_true", help="all six effects plus one pipeline sample")
    p.add_argument("--seed", type=int, help="seed (required unless set in --config)")
    p.add_argument("--config", help="JSON pipeline config for effect parameters")
    p.add_argument("--out", default="preview.ppm", help="output image (default preview.ppm)")
    p.set_defaults(func=cmd_preview)

    p = sub.add_parser("validate", help="check annotation files against the 12-key schema")
    p.add_argument("paths", nargs="+", help="annotation files, directories, or manifests")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"docdegrade {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except pipeline.ManifestError as exc:
        print(f"docdegrade {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"docdegrade {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
