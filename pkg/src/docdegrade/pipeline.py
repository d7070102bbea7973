"""Variant planning and corpus augmentation.

Each source document gets ``variants_per_document`` counterparts. A plan is
six uniforms drawn from a stream addressed by ``(master_seed, document_id,
variant_index, "plan")``:

    u1  text effect gate     (apply iff u1 < effect_probability)
    u2  text effect kind     (floor(4 * u2))
    u3  paper effect gate    (apply iff u3 < effect_probability)
    u4  paper effect kind    (floor(2 * u4))
    u5  rotation gate        (apply iff u5 < rotation_probability)
    u6  angle                (lo + (hi - lo) * u6)

All six are always drawn, so no gate shifts any other decision.
"""
from __future__ import annotations

import json
import logging
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .annotate import DocumentAnnotation, count_dropped, load_annotation, rotate_annotation, save_annotation
from .effects import (
    PAPER_EFFECTS,
    TEXT_EFFECTS,
    EffectParams,
    PaperEffectKind,
    TextEffectKind,
    apply_paper_effect,
    apply_text_effect,
)
from .effects.params import ConfigError, strict_from_dict, to_plain
from .imageio import image_extension, load_image, save_image
from .raster import Raster, rotate_image
from .rng import MASK64, RngStream, derive_seed

log = logging.getLogger(__name__)

STAGES = ("text", "paper", "rotate")


@dataclass(frozen=True)
class PipelineConfig:
    variants_per_document: int = 5
    effect_probability: float = 0.7
    rotation_probability: float = 0.5
    angle_range_degrees: tuple[float, float] = (-5.0, 5.0)
    effect_params: EffectParams = field(default_factory=EffectParams)
    master_seed: int = 0
    fill: int = 255

    def __post_init__(self):
        if self.variants_per_document < 0:
            raise ConfigError("variants_per_document must be >= 0")
        for name in ("effect_probability", "rotation_probability"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name}: probability {p} outside [0, 1]")
        if len(self.angle_range_degrees) != 2 or self.angle_range_degrees[0] > self.angle_range_degrees[1]:
            raise ConfigError(f"angle_range_degrees: invalid range {self.angle_range_degrees!r}")
        if not 0 <= self.master_seed <= MASK64:
            raise ConfigError("master_seed must be an unsigned 64-bit integer")
        if not 0 <= self.fill <= 255:
            raise ConfigError("fill must be a sample value in [0, 255]")

    @classmethod
    def from_dict(cls, data) -> "PipelineConfig":
        return strict_from_dict(cls, data, "config")

    def to_dict(self) -> dict:
        return to_plain(self)


@dataclass(frozen=True)
class VariantPlan:
    variant_index: int
    text_effect: Optional[TextEffectKind]
    paper_effect: Optional[PaperEffectKind]
    rotation_angle: Optional[float]
    effect_seeds: dict = field(default_factory=dict)

    @property
    def is_identity(self) -> bool:
        return self.text_effect is None and self.paper_effect is None and self.rotation_angle is None

    def describe(self) -> dict:
        return {
            "variant_index": self.variant_index,
            "text_effect": self.text_effect.value if self.text_effect else None,
            "paper_effect": self.paper_effect.value if self.paper_effect else None,
            "rotation_angle": self.rotation_angle,
        }


def stage_seed(config: PipelineConfig, document_id: str, variant_index: int, stage: str) -> int:
    return derive_seed(config.master_seed, document_id, variant_index, stage)


def plan_from_draws(config: PipelineConfig, document_id: str, variant_index: int, draws: Sequence[float]) -> VariantPlan:
    """Resolve a plan from six explicit uniforms (see module docstring)."""
    if len(draws) != 6:
        raise ValueError(f"a plan consumes exactly 6 draws, got {len(draws)}")
    u1, u2, u3, u4, u5, u6 = (float(u) for u in draws)
    p = config.effect_probability
    text = TEXT_EFFECTS[min(int(u2 * 4), 3)] if u1 < p else None
    paper = PAPER_EFFECTS[min(int(u4 * 2), 1)] if u3 < p else None
    lo, hi = config.angle_range_degrees
    angle = lo + (hi - lo) * u6 if u5 < config.rotation_probability else None

    selected = {"text": text is not None, "paper": paper is not None, "rotate": angle is not None}
    seeds = {s: stage_seed(config, document_id, variant_index, s) for s in STAGES if selected[s]}
    return VariantPlan(variant_index, text, paper, angle, seeds)


def plan_variant(config: PipelineConfig, document_id: str, variant_index: int) -> VariantPlan:
    if not 0 <= variant_index < config.variants_per_document:
        raise ValueError(f"variant_index {variant_index} outside [0, {config.variants_per_document})")
    stream = RngStream(config.master_seed).child(document_id, variant_index, "plan")
    return plan_from_draws(config, document_id, variant_index, stream.random(6))


def variant_suffix(variant_index: int) -> str:
    return f"#aug{variant_index}"


def execute_variant(img: Raster, ann: DocumentAnnotation, plan: VariantPlan,
                    config: PipelineConfig) -> tuple[Raster, DocumentAnnotation]:
    """Text effect, then paper effect, then joint rotation of image and boxes."""
    if (img.width, img.height) != (ann.width, ann.height):
        raise ValueError(
            f"{ann.document_id}: image is {img.width}x{img.height} but annotation says {ann.width}x{ann.height}")
    out = img
    if plan.text_effect is not None:
        out = apply_text_effect(plan.text_effect, out, config.effect_params, RngStream(plan.effect_seeds["text"]))
    if plan.paper_effect is not None:
        out = apply_paper_effect(plan.paper_effect, out, config.effect_params, RngStream(plan.effect_seeds["paper"]))
    suffix = variant_suffix(plan.variant_index)
    if plan.rotation_angle is not None:
        out = rotate_image(out, plan.rotation_angle, config.fill)
        new_ann = rotate_annotation(ann, plan.rotation_angle, suffix)
    else:
        new_ann = DocumentAnnotation(ann.document_id + suffix, ann.width, ann.height, dict(ann.entries))
    if out is img:
        out = img.copy()
    return out, new_ann


# -- corpus runs -------------------------------------------------------------

class ManifestError(ValueError):
    """The manifest itself is unusable; the whole run aborts."""


@dataclass(frozen=True)
class ManifestEntry:
    image: Path
    annotation: Path


def parse_manifest(obj, base_dir=".") -> list[ManifestEntry]:
    """Relative paths are resolved against ``base_dir`` (the manifest's folder)."""
    if not isinstance(obj, list):
        raise ManifestError("manifest must be a JSON array of {image, annotation} objects")
    base = Path(base_dir)
    entries = []
    for i, item in enumerate(obj):
        if not isinstance(item, dict) or set(item) != {"image", "annotation"}:
            raise ManifestError(f"manifest entry {i} must have exactly the fields 'image' and 'annotation'")
        if not all(isinstance(item[k], str) and item[k] for k in ("image", "annotation")):
            raise ManifestError(f"manifest entry {i}: paths must be non-empty strings")
        entries.append(ManifestEntry(base / item["image"], base / item["annotation"]))
    return entries


def load_manifest(path) -> list[ManifestEntry]:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest {path} is not valid JSON: {exc}") from exc
    return parse_manifest(obj, path.parent)


def _safe_name(document_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", document_id)[:80] or "doc"


def _empty_counts() -> dict:
    return {
        "documents": 0,
        "variants": 0,
        "dropped_boxes": 0,
        "rotations": 0,
        "text_effects": {**{k.value: 0 for k in TEXT_EFFECTS}, "none": 0},
        "paper_effects": {**{k.value: 0 for k in PAPER_EFFECTS}, "none": 0},
    }


def _process_document(job) -> dict:
    doc_index, entry, config, out_dir = job
    result = {"index": doc_index, "counts": _empty_counts(), "outputs": [], "failure": None}
    try:
        img = load_image(entry.image)
        ann = load_annotation(entry.annotation)
        if (img.width, img.height) != (ann.width, ann.height):
            raise ValueError(f"image is {img.width}x{img.height} but annotation says {ann.width}x{ann.height}")
        outputs = []
        counts = _empty_counts()
        for i in range(config.variants_per_document):
            plan = plan_variant(config, ann.document_id, i)
            out_img, out_ann = execute_variant(img, ann, plan, config)
            stem = f"{doc_index:05d}_{_safe_name(ann.document_id)}_aug{i}"
            img_rel = Path("images") / (stem + image_extension(out_img))
            ann_rel = Path("annotations") / (stem + ".json")
            save_image(out_img, out_dir / img_rel)
            save_annotation(out_ann, out_dir / ann_rel)
            outputs.append({"image": img_rel.as_posix(), "annotation": ann_rel.as_posix()})
            counts["variants"] += 1
            counts["dropped_boxes"] += count_dropped(ann, out_ann)
            counts["rotations"] += plan.rotation_angle is not None
            counts["text_effects"][plan.text_effect.value if plan.text_effect else "none"] += 1
            counts["paper_effects"][plan.paper_effect.value if plan.paper_effect else "none"] += 1
        counts["documents"] = 1
        result["counts"] = counts
        result["outputs"] = outputs
    except Exception as exc:  # per-document failures are reported, not fatal
        result["failure"] = {"index": doc_index, "image": str(entry.image), "annotation": str(entry.annotation),
                             "error": f"{type(exc).__name__}: {exc}"}
    return result


def merge_counts(a: dict, b: dict) -> dict:
    """Associative, commutative merge of per-document counters."""
    return {k: merge_counts(a[k], b[k]) if isinstance(a[k], dict) else a[k] + b[k] for k in a}


def default_workers() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:  # pragma: no cover - non-Linux
        return os.cpu_count() or 1


def augment_corpus(entries: Sequence[ManifestEntry], config: PipelineConfig, out_dir, workers: int = 1) -> dict:
    """Write every variant plus ``manifest.json`` and ``report.json`` under ``out_dir``.

    Output bytes depend only on the inputs and ``config``; worker count and
    scheduling have no effect.
    """
    out_dir = Path(out_dir)
    (out_dir / "images").mkdir(parents=True, exist_ok=True)
    (out_dir / "annotations").mkdir(parents=True, exist_ok=True)
    jobs = [(i, e, config, out_dir) for i, e in enumerate(entries)]
    if workers <= 1 or len(jobs) <= 1:
        results = [_process_document(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_process_document, jobs, chunksize=1))

    counts = _empty_counts()
    manifest, failures = [], []
    for res in sorted(results, key=lambda r: r["index"]):
        counts = merge_counts(counts, res["counts"])
        manifest.extend(res["outputs"])
        if res["failure"]:
            failures.append(res["failure"])
            log.warning("document %d failed: %s", res["index"], res["failure"]["error"])

    report = {
        "documents_total": len(entries),
        "documents": counts["documents"],
        "variants": counts["variants"],
        "dropped_boxes": counts["dropped_boxes"],
        "rotations": counts["rotations"],
        "text_effects": dict(sorted(counts["text_effects"].items())),
        "paper_effects": dict(sorted(counts["paper_effects"].items())),
        "failures": failures,
        "config": config.to_dict(),
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    (out_dir / "report.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    return report
