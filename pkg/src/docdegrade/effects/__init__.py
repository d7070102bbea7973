"""The six degradation effects: four text effects and two paper effects."""
from __future__ import annotations

import enum

from ..raster import Raster
from ..rng import RngStream
from .dirty_screen import apply_dirty_screen, dot_grid
from .jpeg import apply_jpeg_artifact, block_dct, jpeg_roundtrip, scaled_table
from .params import (
    ConfigError,
    DirtyScreenParams,
    EffectParams,
    InkBleedParams,
    JpegParams,
    LetterpressParams,
    LowInkParams,
)
from .text import (
    apply_ink_bleed,
    apply_letterpress,
    apply_low_ink_lines,
    apply_low_ink_periodic_lines,
    apply_low_ink_random_lines,
    lighten_ink_rows,
    periodic_rows,
)


class TextEffectKind(enum.Enum):
    INK_BLEED = "InkBleed"
    LETTERPRESS = "Letterpress"
    LOW_INK_RANDOM_LINES = "LowInkRandomLines"
    LOW_INK_PERIODIC_LINES = "LowInkPeriodicLines"


class PaperEffectKind(enum.Enum):
    JPEG_ARTIFACT = "JpegArtifact"
    DIRTY_SCREEN = "DirtyScreen"


# Index order is what plan sampling maps uniforms onto; do not reorder.
TEXT_EFFECTS = tuple(TextEffectKind)
PAPER_EFFECTS = tuple(PaperEffectKind)


def apply_text_effect(kind: TextEffectKind, img: Raster, params: EffectParams, rng: RngStream) -> Raster:
    if kind is TextEffectKind.INK_BLEED:
        return apply_ink_bleed(img, params.ink_bleed, rng)
    if kind is TextEffectKind.LETTERPRESS:
        return apply_letterpress(img, params.letterpress, rng)
    if kind is TextEffectKind.LOW_INK_RANDOM_LINES:
        return apply_low_ink_random_lines(img, params.low_ink, rng)
    if kind is TextEffectKind.LOW_INK_PERIODIC_LINES:
        return apply_low_ink_periodic_lines(img, params.low_ink, rng)
    raise ValueError(f"unknown text effect {kind!r}")


def apply_paper_effect(kind: PaperEffectKind, img: Raster, params: EffectParams, rng: RngStream) -> Raster:
    if kind is PaperEffectKind.JPEG_ARTIFACT:
        return apply_jpeg_artifact(img, params.jpeg, rng)
    if kind is PaperEffectKind.DIRTY_SCREEN:
        return apply_dirty_screen(img, params.dirty_screen, rng)
    raise ValueError(f"unknown paper effect {kind!r}")


__all__ = [
    "ConfigError", "DirtyScreenParams", "EffectParams", "InkBleedParams", "JpegParams",
    "LetterpressParams", "LowInkParams", "PAPER_EFFECTS", "PaperEffectKind", "TEXT_EFFECTS",
    "TextEffectKind", "apply_dirty_screen", "apply_ink_bleed", "apply_jpeg_artifact",
    "apply_letterpress", "apply_low_ink_lines", "apply_low_ink_periodic_lines",
    "apply_low_ink_random_lines", "apply_paper_effect", "apply_text_effect", "block_dct",
    "dot_grid", "jpeg_roundtrip", "lighten_ink_rows", "periodic_rows", "scaled_table",
]
