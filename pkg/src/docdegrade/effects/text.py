"""Text effects: they only touch ink pixels or their immediate neighbourhood.

Random draw order is part of each function's contract. New parameters must
append draws after the existing ones so that old seeds keep their meaning.
"""
from __future__ import annotations

import math

import numpy as np

from ..raster import DEFAULT_INK_THRESHOLD, Raster, dilate, ink_mask, integral_image, to_u8, window_means
from ..rng import RngStream
from .params import InkBleedParams, LetterpressParams, LowInkParams


def apply_ink_bleed(img: Raster, params: InkBleedParams, rng: RngStream,
                    threshold: int = DEFAULT_INK_THRESHOLD) -> Raster:
    """Darken paper around strokes as if the ink had soaked into the fibres.

    Halo pixels (inside ``dilate(mask, dilation_radius)`` but not ink) are
    visited in row-major order. Draws: one uniform gate per halo pixel
    (bleed iff ``u < bleed_probability``), then one darkening factor per halo
    pixel from ``darken_alpha_range``. Selected pixels are scaled by
    ``1 - alpha``. Finally the bleed region is replaced by
    ``min(current, box_blur(current))`` so the blur only ever spreads ink.
    """
    mask = ink_mask(img, threshold)
    if not mask.any():
        return img.copy()
    region = dilate(mask, params.dilation_radius)
    halo = np.flatnonzero(region & ~mask)
    gate = rng.random(halo.size) < params.bleed_probability
    lo, hi = params.darken_alpha_range
    alpha = rng.uniform(lo, hi, halo.size)

    px = img.pixels.copy()
    flat = px.reshape(-1, img.channels)
    chosen = halo[gate]
    flat[chosen] = to_u8(flat[chosen] * (1.0 - alpha[gate])[:, None])

    if params.blur_radius > 0:
        ys, xs = np.nonzero(region)
        table = integral_image(px, params.blur_radius)
        blurred = window_means(table, params.blur_radius, ys, xs)
        px[ys, xs] = np.minimum(px[ys, xs], blurred)
    return Raster(px)


def apply_letterpress(img: Raster, params: LetterpressParams, rng: RngStream,
                      threshold: int = DEFAULT_INK_THRESHOLD) -> Raster:
    """Lighten ink in soft blotches to mimic uneven pressing.

    ``round(blob_density * ink_pixels / 1e4)`` blobs. Draws: blob centres
    (uniform over ink pixels in row-major order), then one sigma per blob,
    then one strength per blob. Coverage combines as
    ``1 - prod(1 - strength * exp(-d^2 / 2 sigma^2))`` and each ink sample
    moves that fraction of the way to 255.
    """
    mask = ink_mask(img, threshold)
    ink = np.flatnonzero(mask)
    count = int(math.floor(params.blob_density * ink.size / 1e4 + 0.5))
    if count == 0:
        return img.copy()
    h, w = mask.shape
    centres = ink[rng.integers(0, ink.size - 1, count)]
    sigmas = rng.uniform(*params.blob_sigma_range, count)
    strengths = rng.uniform(*params.lighten_range, count)

    keep = np.ones((h, w), dtype=np.float64)
    for centre, sigma, strength in zip(centres, sigmas, strengths):
        cy, cx = divmod(int(centre), w)
        reach = int(math.ceil(3.0 * sigma))
        y0, y1 = max(0, cy - reach), min(h, cy + reach + 1)
        x0, x1 = max(0, cx - reach), min(w, cx + reach + 1)
        dy2 = ((np.arange(y0, y1) - cy) ** 2)[:, None]
        dx2 = ((np.arange(x0, x1) - cx) ** 2)[None, :]
        falloff = np.exp(-(dy2 + dx2) / (2.0 * sigma * sigma))
        keep[y0:y1, x0:x1] *= 1.0 - strength * falloff

    px = img.pixels.copy()
    sel = mask & (keep < 1.0)
    vals = px[sel].astype(np.float64)
    lighten = (1.0 - keep[sel])[:, None]
    px[sel] = to_u8(vals + (255.0 - vals) * lighten)
    return Raster(px)


def lighten_ink_rows(img: Raster, rows, amounts, threshold: int = DEFAULT_INK_THRESHOLD) -> Raster:
    """Add ``amounts[i]`` (clamped at 255) to every ink pixel of ``rows[i]``."""
    px = img.pixels.copy()
    mask = ink_mask(img, threshold)
    for row, amount in zip(rows, amounts):
        m = mask[row]
        if m.any():
            vals = px[row][m].astype(np.int32) + int(amount)
            px[row][m] = np.minimum(vals, 255).astype(np.uint8)
    return Raster(px)


def periodic_rows(height: int, start: int, period: int) -> np.ndarray:
    return np.arange(start, height, period)


def apply_low_ink_random_lines(img: Raster, params: LowInkParams, rng: RngStream,
                               threshold: int = DEFAULT_INK_THRESHOLD) -> Raster:
    """Faded print on randomly chosen rows.

    Draws: line count k from ``line_count_range`` (capped at the height), the
    k distinct rows, then one lighten amount per row.
    """
    k = min(int(rng.integers(*params.line_count_range)), img.height)
    rows = rng.choice_without_replacement(img.height, k)
    amounts = rng.integers(*params.lighten_add_range, size=k)
    return lighten_ink_rows(img, rows, amounts, threshold)


def apply_low_ink_periodic_lines(img: Raster, params: LowInkParams, rng: RngStream,
                                 threshold: int = DEFAULT_INK_THRESHOLD) -> Raster:
    """Faded print repeating every ``period`` rows.

    Draws: period p from ``period_range``, start row uniform in [0, p-1], then
    one lighten amount per affected row.
    """
    period = int(rng.integers(*params.period_range))
    start = int(rng.integers(0, period - 1))
    rows = periodic_rows(img.height, start, period)
    amounts = rng.integers(*params.lighten_add_range, size=rows.size)
    return lighten_ink_rows(img, rows, amounts, threshold)


def apply_low_ink_lines(img: Raster, variant: str, params: LowInkParams, rng: RngStream,
                        threshold: int = DEFAULT_INK_THRESHOLD) -> Raster:
    if variant == "random":
        return apply_low_ink_random_lines(img, params, rng, threshold)
    if variant == "periodic":
        return apply_low_ink_periodic_lines(img, params, rng, threshold)
    raise ValueError(f"low-ink variant must be 'random' or 'periodic', got {variant!r}")
