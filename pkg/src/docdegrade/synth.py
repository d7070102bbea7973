"""Synthetic form pages with ground-truth boxes, for tests and demos."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .annotate import KEYS, BBox, DocumentAnnotation, save_annotation
from .imageio import save_image
from .raster import Raster
from .rng import RngStream


def _scribble(px: np.ndarray, x0: int, y0: int, x1: int, y1: int, rng: RngStream) -> None:
    """Fill a field with glyph-like dark strokes."""
    x = x0 + 2
    while x < x1 - 4:
        gw = int(rng.integers(3, 9))
        gh = min(int(rng.integers(max(3, (y1 - y0) // 2), max(4, y1 - y0 - 2))), y1 - y0)
        top = y0 + (y1 - y0 - gh) // 2
        ink = int(rng.integers(0, 60))
        stroke = int(rng.integers(1, 2))
        right = min(x + gw, x1 - 2)
        px[top:top + gh, x:x + stroke] = ink
        px[top:top + stroke, x:right] = ink
        px[top + gh - stroke:top + gh, x:right] = ink
        x += gw + int(rng.integers(2, 5))


def synthetic_form(document_id: str, width: int, height: int, seed: int,
                   absent_probability: float = 0.25, channels: int = 1) -> tuple[Raster, DocumentAnnotation]:
    """Ruled form page: 12 field slots in a grid, each filled or left blank (-1)."""
    rng = RngStream(seed).child("synthetic-form", document_id)
    px = np.full((height, width), 255, dtype=np.uint8)
    rows, cols = 6, 2
    margin_x, margin_y = width // 20, height // 20
    cell_w = (width - 2 * margin_x) // cols
    cell_h = (height - 2 * margin_y) // rows
    entries = {}
    for k in KEYS:
        r, c = divmod(k - 1, cols)
        cx0 = margin_x + c * cell_w
        cy0 = margin_y + r * cell_h
        line_y = cy0 + int(cell_h * 0.7)
        px[line_y, cx0 + 4:cx0 + cell_w - 4] = 0  # ruling under the field
        if rng.random() < absent_probability:
            entries[k] = None
            continue
        fw = int(rng.integers(max(1, cell_w // 3), max(1, cell_w - 12)))
        fy0 = max(cy0, line_y - max(6, int(cell_h * 0.35)) - 2)
        fh = max(1, line_y - 2 - fy0)
        fx0 = min(cx0 + 6, width - fw - 1)
        _scribble(px, fx0, fy0, fx0 + fw, fy0 + fh, rng)
        entries[k] = BBox(float(fx0), float(fy0), float(fx0 + fw), float(fy0 + fh))
    if channels == 3:
        tint = np.array([255, 250, 240], dtype=np.float64) / 255.0
        rgb = np.floor(px[:, :, None] * tint + 0.5).astype(np.uint8)
        raster = Raster(rgb)
    else:
        raster = Raster(px[:, :, None])
    return raster, DocumentAnnotation(document_id, width, height, entries)


def write_synthetic_corpus(root, count: int, width: int = 400, height: int = 300, seed: int = 0,
                           channels: int = 1) -> Path:
    """Write ``count`` pages plus ``manifest.json`` under ``root``; returns the manifest path."""
    root = Path(root)
    (root / "images").mkdir(parents=True, exist_ok=True)
    (root / "annotations").mkdir(parents=True, exist_ok=True)
    manifest = []
    for i in range(count):
        doc_id = f"form-{i:04d}"
        img, ann = synthetic_form(doc_id, width, height, seed, channels=channels)
        ext = ".pgm" if img.channels == 1 else ".ppm"
        save_image(img, root / "images" / f"{doc_id}{ext}")
        save_annotation(ann, root / "annotations" / f"{doc_id}.json")
        manifest.append({"image": f"images/{doc_id}{ext}", "annotation": f"annotations/{doc_id}.json"})
    path = root / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path
