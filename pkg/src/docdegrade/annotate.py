"""Twelve-key form annotations, the -1 sentinel, and box rotation.

Boxes use continuous pixel coordinates with half-open extent, so the area of
``(x_min, y_min, x_max, y_max)`` is ``(x_max - x_min) * (y_max - y_min)``.
``None`` stands for ABSENT (serialized as ``-1``) and for DROPPED results of
:func:`rotate_bbox`.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .raster import cos_sin_degrees, rotate_point

KEYS = tuple(range(1, 13))
ABSENT_SENTINEL = -1
MIN_AREA = 1.0


class AnnotationError(ValueError):
    """Annotation data violates the schema; ``violations`` lists every problem."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


@dataclass(frozen=True)
class BBox:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        coords = (self.x_min, self.y_min, self.x_max, self.y_max)
        if not all(math.isfinite(v) for v in coords):
            raise ValueError(f"non-finite box coordinates {coords}")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(f"box {coords} has non-positive area")

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    def as_list(self) -> list[float]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]

    def within(self, width: float, height: float) -> bool:
        return self.x_min >= 0 and self.y_min >= 0 and self.x_max <= width and self.y_max <= height


@dataclass(frozen=True)
class DocumentAnnotation:
    document_id: str
    width: int
    height: int
    entries: dict = field(default_factory=dict)  # key -> BBox | None

    def __post_init__(self):
        problems = _entry_violations(self.document_id, self.width, self.height, self.entries)
        if problems:
            raise AnnotationError(problems)

    @classmethod
    def empty(cls, document_id: str, width: int, height: int) -> "DocumentAnnotation":
        return cls(document_id, width, height, {k: None for k in KEYS})

    def present(self) -> list[tuple[int, BBox]]:
        return filter_absent(self)

    def to_json(self) -> dict:
        keys = {}
        for k in KEYS:
            box = self.entries[k]
            keys[str(k)] = ABSENT_SENTINEL if box is None else [_num(v) for v in box.as_list()]
        return {"document_id": self.document_id, "width": self.width, "height": self.height, "keys": keys}

    @classmethod
    def from_json(cls, obj) -> "DocumentAnnotation":
        problems = annotation_violations(obj)
        if problems:
            raise AnnotationError(problems)
        entries = {}
        for k in KEYS:
            value = obj["keys"][str(k)]
            entries[k] = None if _is_sentinel(value) else BBox(*map(float, value))
        return cls(obj["document_id"], int(obj["width"]), int(obj["height"]), entries)


def _num(v: float):
    return int(v) if float(v).is_integer() else float(v)


def _is_sentinel(value) -> bool:
    return not isinstance(value, bool) and isinstance(value, (int, float)) and value == ABSENT_SENTINEL


def _entry_violations(doc_id, width, height, entries) -> list[str]:
    problems = []
    for k in KEYS:
        if k not in entries:
            problems.append(f"{doc_id}: missing key {k}")
            continue
        box = entries[k]
        if box is not None and not box.within(width, height):
            problems.append(f"{doc_id}: key {k} box {box.as_list()} lies outside the {width}x{height} canvas")
    extra = sorted(set(entries) - set(KEYS), key=str)
    for k in extra:
        problems.append(f"{doc_id}: unexpected key {k!r}")
    return problems


def annotation_violations(obj) -> list[str]:
    """Every schema problem in one raw annotation object (empty list = valid)."""
    if not isinstance(obj, dict):
        return [f"annotation must be a JSON object, got {type(obj).__name__}"]
    doc_id = obj.get("document_id", "<unknown>")
    problems = []
    for name in ("document_id", "width", "height", "keys"):
        if name not in obj:
            problems.append(f"{doc_id}: missing field '{name}'")
    unknown = sorted(set(obj) - {"document_id", "width", "height", "keys"})
    if unknown:
        problems.append(f"{doc_id}: unknown field(s) {', '.join(unknown)}")
    if problems:
        return problems
    if not isinstance(doc_id, str):
        problems.append(f"{doc_id!r}: document_id must be a string")
    width, height = obj["width"], obj["height"]
    for name, value in (("width", width), ("height", height)):
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            problems.append(f"{doc_id}: {name} must be a positive integer, got {value!r}")
    keys = obj["keys"]
    if not isinstance(keys, dict):
        return problems + [f"{doc_id}: 'keys' must be an object"]
    if problems:
        return problems
    for k in KEYS:
        if str(k) not in keys:
            problems.append(f"{doc_id}: missing key {k}")
            continue
        value = keys[str(k)]
        if _is_sentinel(value):
            continue
        if (not isinstance(value, list) or len(value) != 4
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
            problems.append(f"{doc_id}: key {k} must be -1 or [x_min, y_min, x_max, y_max], got {value!r}")
            continue
        x0, y0, x1, y1 = value
        if not all(math.isfinite(v) for v in value):
            problems.append(f"{doc_id}: key {k} has non-finite coordinates")
        elif not x0 < x1:
            problems.append(f"{doc_id}: key {k} has x_min >= x_max ({x0} >= {x1})")
        elif not y0 < y1:
            problems.append(f"{doc_id}: key {k} has y_min >= y_max ({y0} >= {y1})")
        elif x0 < 0 or y0 < 0 or x1 > width or y1 > height:
            problems.append(f"{doc_id}: key {k} box {value} lies outside the {width}x{height} canvas")
    for extra in sorted(set(keys) - {str(k) for k in KEYS}):
        problems.append(f"{doc_id}: unexpected key {extra!r}")
    return problems


def load_annotation(path) -> DocumentAnnotation:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise AnnotationError([f"{path}: invalid JSON ({exc})"]) from exc
    return DocumentAnnotation.from_json(obj)


def dump_annotation(ann: DocumentAnnotation) -> str:
    return json.dumps(ann.to_json(), indent=2) + "\n"


def save_annotation(ann: DocumentAnnotation, path) -> None:
    Path(path).write_text(dump_annotation(ann), encoding="utf-8")


def filter_absent(ann: DocumentAnnotation) -> list[tuple[int, BBox]]:
    return [(k, ann.entries[k]) for k in KEYS if ann.entries[k] is not None]


def rotated_hull(box: BBox, angle: float, width: int, height: int) -> tuple[float, float, float, float]:
    """Axis-aligned hull of the four rotated corners, before clipping."""
    xs, ys = [], []
    for x, y in ((box.x_min, box.y_min), (box.x_max, box.y_min), (box.x_max, box.y_max), (box.x_min, box.y_max)):
        rx, ry = rotate_point(x, y, angle, width, height)
        xs.append(rx)
        ys.append(ry)
    return min(xs), min(ys), max(xs), max(ys)


def rotate_bbox(box: BBox, angle: float, width: int, height: int) -> Optional[BBox]:
    """Rotate with the image transform, take the hull, clip to the canvas.

    Returns None (DROPPED) when less than one square pixel survives clipping.
    """
    if cos_sin_degrees(angle) == (1.0, 0.0):
        return box
    x0, y0, x1, y1 = rotated_hull(box, angle, width, height)
    x0, y0 = max(x0, 0.0), max(y0, 0.0)
    x1, y1 = min(x1, float(width)), min(y1, float(height))
    if x1 <= x0 or y1 <= y0 or (x1 - x0) * (y1 - y0) < MIN_AREA:
        return None
    return BBox(x0, y0, x1, y1)


def rotate_annotation(ann: DocumentAnnotation, angle: float, suffix: str = "") -> DocumentAnnotation:
    entries = {}
    for k in KEYS:
        box = ann.entries[k]
        entries[k] = None if box is None else rotate_bbox(box, angle, ann.width, ann.height)
    return DocumentAnnotation(ann.document_id + suffix, ann.width, ann.height, entries)


def count_dropped(before: DocumentAnnotation, after: DocumentAnnotation) -> int:
    return sum(1 for k in KEYS if before.entries[k] is not None and after.entries[k] is None)
