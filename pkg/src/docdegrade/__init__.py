"""Scanned-handwriting-style degradation of form pages, with box-preserving
rotation and mAP scoring of key-field detections."""
from .annotate import BBox, DocumentAnnotation, filter_absent, rotate_annotation, rotate_bbox
from .evaluate import Detection, EvalReport, average_precision, iou, map_sweep, match_detections, mean_ap
from .imageio import load_image, save_image
from .pipeline import PipelineConfig, VariantPlan, augment_corpus, execute_variant, plan_variant
from .raster import Raster, box_blur, dilate, ink_mask, rotate_image, to_gray
from .rng import RngStream

__version__ = "0.1.0"

__all__ = [
    "BBox", "Detection", "DocumentAnnotation", "EvalReport", "PipelineConfig", "Raster", "RngStream",
    "VariantPlan", "augment_corpus", "average_precision", "box_blur", "dilate", "execute_variant",
    "filter_absent", "ink_mask", "iou", "load_image", "map_sweep", "match_detections", "mean_ap",
    "plan_variant", "rotate_annotation", "rotate_bbox", "rotate_image", "save_image", "to_gray",
]
