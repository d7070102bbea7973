"""Detection scoring: IoU, greedy matching, all-point AP and class-mean mAP.

Matching is always per document and per class. Detections are ranked by
descending score; equal scores keep their input order. The class set is the
set of keys with at least one ground-truth box anywhere in the corpus, and
mAP is the plain mean of AP over that set.
"""
from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .annotate import KEYS, BBox, DocumentAnnotation, filter_absent

DEFAULT_IOU = 0.5


class EvaluationError(ValueError):
    pass


class PredictionFormatError(EvaluationError):
    pass


@dataclass(frozen=True)
class Detection:
    document_id: str
    key: int
    box: BBox
    score: float

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise ValueError(f"detection score must be finite, got {self.score}")


@dataclass(frozen=True)
class PRPoint:
    recall: float
    precision: float
    score_threshold: float


@dataclass(frozen=True)
class LedgerEntry:
    index: int  # position in the input detection list
    document_id: str
    key: int
    score: float
    status: str  # "TP", "FP" or "ignored" (class has no ground truth)
    iou: float  # IoU with the matched ground truth, 0 when unmatched


@dataclass
class EvalReport:
    iou_threshold: float
    per_class_ap: dict
    map_value: float
    gt_counts: dict
    ledger: list = field(default_factory=list)

    @property
    def classes(self) -> list[int]:
        return sorted(self.per_class_ap)

    def summary(self) -> dict:
        tp = sum(e.status == "TP" for e in self.ledger)
        fp = sum(e.status == "FP" for e in self.ledger)
        ignored = sum(e.status == "ignored" for e in self.ledger)
        return {"detections": len(self.ledger), "tp": tp, "fp": fp, "ignored": ignored}

    def to_json(self) -> dict:
        return {
            "iou_threshold": self.iou_threshold,
            "map": self.map_value,
            "per_class_ap": {str(k): self.per_class_ap[k] for k in self.classes},
            "gt_counts": {str(k): v for k, v in sorted(self.gt_counts.items())},
            "ledger_summary": self.summary(),
        }


@dataclass
class SweepResult:
    reports: list
    mean_map: float

    def to_json(self) -> dict:
        return {"thresholds": [r.iou_threshold for r in self.reports],
                "mean_map": self.mean_map,
                "reports": [r.to_json() for r in self.reports]}


def iou(a: BBox, b: BBox) -> float:
    iw = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    ih = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    return inter / (a.area + b.area - inter)


def _rank(scores: Sequence[float]) -> list[int]:
    # descending score, stable on input order
    return sorted(range(len(scores)), key=lambda i: -scores[i])


def _greedy_match(dets: Sequence[Detection], gts: Sequence[tuple[int, BBox]], threshold: float):
    labels = [False] * len(dets)
    overlaps = [0.0] * len(dets)
    taken = [False] * len(gts)
    for i in _rank([d.score for d in dets]):
        det = dets[i]
        best, best_iou = None, -1.0
        for j, (key, box) in enumerate(gts):
            if taken[j] or key != det.key:
                continue
            v = iou(det.box, box)
            if v >= threshold and v > best_iou:
                best, best_iou = j, v
        if best is not None:
            taken[best] = True
            labels[i] = True
            overlaps[i] = best_iou
    return labels, overlaps


def match_detections(dets: Sequence[Detection], gts: Sequence[tuple[int, BBox]],
                     iou_threshold: float = DEFAULT_IOU) -> list[bool]:
    """TP (True) / FP (False) per detection, aligned with the input order.

    All detections and ground truths must belong to one document.
    """
    if len({d.document_id for d in dets}) > 1:
        raise EvaluationError("match_detections expects detections from a single document")
    return _greedy_match(dets, gts, iou_threshold)[0]


def precision_recall_curve(labels: Sequence[bool], scores: Sequence[float], num_gt: int) -> list[PRPoint]:
    order = _rank(scores)
    points, tp = [], 0
    for n, i in enumerate(order, start=1):
        tp += bool(labels[i])
        points.append(PRPoint(tp / num_gt, tp / n, scores[i]))
    return points


def average_precision(labels: Sequence[bool], num_gt: int, scores: Optional[Sequence[float]] = None) -> float:
    """Area under the precision envelope over recall.

    ``labels`` are taken in the given order unless ``scores`` is supplied,
    in which case they are ranked by descending score first.
    """
    if num_gt < 1:
        raise EvaluationError("average precision is undefined without ground truth")
    if scores is None:
        scores = [float(len(labels) - i) for i in range(len(labels))]
    points = precision_recall_curve(labels, scores, num_gt)
    if not points:
        return 0.0
    envelope = [p.precision for p in points]
    for i in range(len(envelope) - 2, -1, -1):
        envelope[i] = max(envelope[i], envelope[i + 1])
    ap, prev_recall = 0.0, 0.0
    for point, prec in zip(points, envelope):
        if point.recall > prev_recall:
            ap += (point.recall - prev_recall) * prec
            prev_recall = point.recall
    return ap


def _ground_truth(gt_corpus: Iterable[DocumentAnnotation]) -> dict:
    gts: dict[str, list] = {}
    for ann in gt_corpus:
        if ann.document_id in gts:
            raise EvaluationError(f"duplicate ground-truth document {ann.document_id!r}")
        gts[ann.document_id] = filter_absent(ann)
    return gts


def mean_ap(gt_corpus: Iterable[DocumentAnnotation], det_corpus: Sequence[Detection],
            iou_threshold: float = DEFAULT_IOU) -> EvalReport:
    if not 0.0 < iou_threshold <= 1.0:
        raise EvaluationError(f"IoU threshold must lie in (0, 1], got {iou_threshold}")
    gts = _ground_truth(gt_corpus)
    gt_counts: dict[int, int] = defaultdict(int)
    for boxes in gts.values():
        for key, _ in boxes:
            gt_counts[key] += 1
    classes = sorted(gt_counts)
    if not classes:
        raise EvaluationError("no evaluable classes: the ground truth holds no boxes")

    by_doc: dict[str, list[int]] = defaultdict(list)
    for i, det in enumerate(det_corpus):
        if det.document_id not in gts:
            raise EvaluationError(f"detection {i} refers to unknown document {det.document_id!r}")
        by_doc[det.document_id].append(i)

    labels = [False] * len(det_corpus)
    overlaps = [0.0] * len(det_corpus)
    for doc_id, idx in by_doc.items():
        doc_labels, doc_ious = _greedy_match([det_corpus[i] for i in idx], gts[doc_id], iou_threshold)
        for i, lab, ov in zip(idx, doc_labels, doc_ious):
            labels[i], overlaps[i] = lab, ov

    per_class: dict[int, list[int]] = defaultdict(list)
    for i, det in enumerate(det_corpus):
        per_class[det.key].append(i)
    per_class_ap = {}
    for key in classes:
        idx = per_class.get(key, [])
        per_class_ap[key] = average_precision([labels[i] for i in idx], gt_counts[key],
                                              scores=[det_corpus[i].score for i in idx])
    map_value = sum(per_class_ap[k] for k in classes) / len(classes)

    ledger = []
    for i, det in enumerate(det_corpus):
        status = "ignored" if det.key not in gt_counts else ("TP" if labels[i] else "FP")
        ledger.append(LedgerEntry(i, det.document_id, det.key, det.score, status, overlaps[i]))
    return EvalReport(iou_threshold, per_class_ap, map_value, dict(gt_counts), ledger)


def map_sweep(gt_corpus: Iterable[DocumentAnnotation], det_corpus: Sequence[Detection],
              thresholds: Sequence[float]) -> SweepResult:
    if not thresholds:
        raise EvaluationError("threshold sweep needs at least one threshold")
    gt_list = list(gt_corpus)
    reports = [mean_ap(gt_list, det_corpus, t) for t in thresholds]
    return SweepResult(reports, sum(r.map_value for r in reports) / len(reports))


def parse_sweep(spec: str) -> list[float]:
    """``"start:stop:step"`` (inclusive stop) -> thresholds rounded to 1e-9."""
    try:
        start, stop, step = (float(v) for v in spec.split(":"))
    except ValueError as exc:
        raise EvaluationError(f"sweep must look like 0.50:0.95:0.05, got {spec!r}") from exc
    if step <= 0 or start > stop:
        raise EvaluationError(f"invalid sweep {spec!r}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    values = [round(start + i * step, 9) for i in range(n)]
    for v in values:
        if not 0.0 < v <= 1.0:
            raise EvaluationError(f"sweep threshold {v} outside (0, 1]")
    return values


def detection_from_json(obj, where: str = "detection") -> Detection:
    if not isinstance(obj, dict):
        raise PredictionFormatError(f"{where}: expected a JSON object")
    missing = [k for k in ("document_id", "key", "bbox", "score") if k not in obj]
    if missing:
        raise PredictionFormatError(f"{where}: missing field(s) {', '.join(missing)}")
    unknown = sorted(set(obj) - {"document_id", "key", "bbox", "score"})
    if unknown:
        raise PredictionFormatError(f"{where}: unknown field(s) {', '.join(unknown)}")
    doc_id, key, bbox, score = obj["document_id"], obj["key"], obj["bbox"], obj["score"]
    if not isinstance(doc_id, str):
        raise PredictionFormatError(f"{where}: field 'document_id' must be a string")
    if isinstance(key, bool) or not isinstance(key, int) or key not in KEYS:
        raise PredictionFormatError(f"{where}: field 'key' must be an integer in 1..12, got {key!r}")
    if (not isinstance(bbox, list) or len(bbox) != 4
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in bbox)):
        raise PredictionFormatError(f"{where}: field 'bbox' must be [x_min, y_min, x_max, y_max]")
    if isinstance(score, bool) or not isinstance(score, (int, float)) or not math.isfinite(score):
        raise PredictionFormatError(f"{where}: field 'score' must be a finite number")
    try:
        box = BBox(*(float(v) for v in bbox))
    except ValueError as exc:
        raise PredictionFormatError(f"{where}: field 'bbox' {exc}") from exc
    return Detection(doc_id, key, box, float(score))


def detection_to_json(det: Detection) -> dict:
    return {"document_id": det.document_id, "key": det.key, "bbox": det.box.as_list(), "score": det.score}


def load_predictions(path) -> list[Detection]:
    dets = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            where = f"{path}:{lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise PredictionFormatError(f"{where}: invalid JSON ({exc.msg})") from exc
            dets.append(detection_from_json(obj, where))
    return dets


def write_predictions(dets: Iterable[Detection], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for det in dets:
            fh.write(json.dumps(detection_to_json(det)) + "\n")


def ground_truth_as_detections(gt_corpus: Iterable[DocumentAnnotation], score: float = 1.0) -> list[Detection]:
    return [Detection(ann.document_id, key, box, score) for ann in gt_corpus for key, box in filter_absent(ann)]


def format_table(report: EvalReport) -> str:
    lines = [f"IoU {report.iou_threshold:.2f}", "key   n_gt      AP"]
    for key in report.classes:
        lines.append(f"{key:>3}  {report.gt_counts[key]:>5}  {report.per_class_ap[key]:.4f}")
    lines.append(f"mAP {report.map_value:.4f}")
    return "\n".join(lines)
