from __future__ import annotations

import numpy as np

from ..raster import Raster
from ..rng import RngStream
from .params import DirtyScreenParams


def dot_grid(height: int, width: int, params: DirtyScreenParams, rng: RngStream) -> np.ndarray:
    """Per-pixel darkening amounts for a jittered grid of dots.

    Draws: cell size from ``cell_size_range``; then, each as one vector over
    all grid cells in row-major order (partial cells included): a gate
    uniform, x jitter, y jitter (both in [0, cell-1]), dot side (1 or 2) and
    a darkening amount from ``darken_range``. Overlapping dots keep the
    larger amount.
    """
    cell = int(rng.integers(*params.cell_size_range))
    ny, nx = -(-height // cell), -(-width // cell)
    n = ny * nx
    gate = rng.random(n) < params.dot_probability
    jx = rng.integers(0, cell - 1, n)
    jy = rng.integers(0, cell - 1, n)
    side = rng.integers(1, 2, n)
    amount = rng.integers(*params.darken_range, size=n)

    darken = np.zeros((height, width), dtype=np.int16)
    cells = np.flatnonzero(gate)
    if cells.size == 0:
        return darken
    x0 = (cells % nx) * cell + jx[cells]
    y0 = (cells // nx) * cell + jy[cells]
    for dy in (0, 1):
        for dx in (0, 1):
            use = side[cells] > max(dx, dy)
            xs, ys = x0[use] + dx, y0[use] + dy
            ok = (xs < width) & (ys < height)
            np.maximum.at(darken, (ys[ok], xs[ok]), amount[cells][use][ok].astype(np.int16))
    return darken


def apply_dirty_screen(img: Raster, params: DirtyScreenParams, rng: RngStream) -> Raster:
    darken = dot_grid(img.height, img.width, params, rng)
    if not darken.any():
        return img.copy()
    vals = img.pixels.astype(np.int16) - darken[:, :, None]
    return Raster(np.clip(vals, 0, 255).astype(np.uint8))
