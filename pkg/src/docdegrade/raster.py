"""8-bit raster buffer and the pixel/geometry primitives shared by every effect.

Conventions used throughout the package:

* pixels are stored as a ``(height, width, channels)`` ``uint8`` array,
  channels is 1 (gray) or 3 (RGB);
* sample ``(x, y)`` sits on lattice point ``(x, y)``; rotations turn about
  ``((w - 1) / 2, (h - 1) / 2)`` with y pointing down;
* every float-to-sample conversion rounds half-up and then clamps to
  ``[0, 255]`` (see :func:`to_u8`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_INK_THRESHOLD = 127

# Integer BT.601 weights (x1000) so luma is exact: (299 R + 587 G + 114 B + 500) // 1000.
_LUMA_WEIGHTS = (299, 587, 114)

InkMask = np.ndarray  # (height, width) bool, True = ink


@dataclass(eq=False)
class Raster:
    pixels: np.ndarray

    def __post_init__(self):
        px = self.pixels
        if not isinstance(px, np.ndarray):
            raise TypeError("Raster pixels must be a numpy array")
        if px.ndim == 2:
            px = px[:, :, None]
        if px.ndim != 3 or px.shape[2] not in (1, 3):
            raise ValueError(f"expected (h, w, 1|3) pixels, got shape {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("raster must be at least 1x1")
        if px.dtype != np.uint8:
            raise TypeError(f"raster samples must be uint8, got {px.dtype}")
        self.pixels = np.ascontiguousarray(px)

    @classmethod
    def from_bytes(cls, width: int, height: int, channels: int, data: bytes) -> "Raster":
        expected = width * height * channels
        if len(data) != expected:
            raise ValueError(f"expected {expected} samples, got {len(data)}")
        arr = np.frombuffer(data, dtype=np.uint8).reshape(height, width, channels)
        return cls(arr.copy())

    @classmethod
    def blank(cls, width: int, height: int, channels: int = 1, value: int = 255) -> "Raster":
        return cls(np.full((height, width, channels), value, dtype=np.uint8))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    @property
    def data(self) -> bytes:
        return self.pixels.tobytes()

    def copy(self) -> "Raster":
        return Raster(self.pixels.copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Raster):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and np.array_equal(self.pixels, other.pixels)

    def __repr__(self) -> str:
        return f"Raster(w={self.width}, h={self.height}, c={self.channels})"


def round_half_up(values: np.ndarray) -> np.ndarray:
    return np.floor(values + 0.5)


def to_u8(values: np.ndarray, scratch: bool = False) -> np.ndarray:
    """Round half-up, clamp to [0, 255] and cast.

    With ``scratch=True`` a float ``values`` array is overwritten in place.
    """
    if not (scratch and isinstance(values, np.ndarray) and values.dtype.kind == "f"):
        return np.clip(round_half_up(values), 0, 255).astype(np.uint8)
    values += 0.5
    np.floor(values, out=values)
    np.clip(values, 0, 255, out=values)
    return values.astype(np.uint8)


def luma(raster: Raster) -> np.ndarray:
    """BT.601 luma as a ``(h, w)`` uint8 array."""
    px = raster.pixels
    if raster.channels == 1:
        return px[:, :, 0]
    r, g, b = (px[:, :, i].astype(np.uint32) for i in range(3))
    wr, wg, wb = _LUMA_WEIGHTS
    return ((wr * r + wg * g + wb * b + 500) // 1000).astype(np.uint8)


def to_gray(raster: Raster) -> Raster:
    if raster.channels == 1:
        return raster
    return Raster(luma(raster)[:, :, None].copy())


def to_rgb(raster: Raster) -> Raster:
    if raster.channels == 3:
        return raster
    return Raster(np.repeat(raster.pixels, 3, axis=2))


def ink_mask(raster: Raster, threshold: int = DEFAULT_INK_THRESHOLD) -> InkMask:
    return luma(raster) < threshold


def _dilate_axis(mask: np.ndarray, radius: int, axis: int) -> np.ndarray:
    out = mask.copy()
    n = mask.shape[axis]
    for d in range(1, min(radius, n - 1) + 1):
        if axis == 0:
            out[d:] |= mask[:-d]
            out[:-d] |= mask[d:]
        else:
            out[:, d:] |= mask[:, :-d]
            out[:, :-d] |= mask[:, d:]
    return out


def dilate(mask: InkMask, radius: int) -> InkMask:
    """Dilation by a (2r+1)x(2r+1) square; pixels beyond the border count as background."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    mask = np.asarray(mask, dtype=bool)
    if radius == 0:
        return mask.copy()
    return _dilate_axis(_dilate_axis(mask, radius, 0), radius, 1)


def integral_image(values: np.ndarray, radius: int) -> np.ndarray:
    """Summed-area table of the edge-replicated image, with a leading zero row/column.

    The (2r+1)^2 window sum centred on ``(y, x)`` is
    ``S[y+2r+1, x+2r+1] - S[y, x+2r+1] - S[y+2r+1, x] + S[y, x]``.
    """
    pad = ((radius, radius), (radius, radius)) + ((0, 0),) * (values.ndim - 2)
    padded = np.pad(values, pad, mode="edge")
    table = np.zeros((padded.shape[0] + 1, padded.shape[1] + 1) + padded.shape[2:], dtype=np.int64)
    np.cumsum(padded, axis=0, dtype=np.int64, out=table[1:, 1:])
    np.cumsum(table[1:, 1:], axis=1, out=table[1:, 1:])
    return table


def window_means(table: np.ndarray, radius: int, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Half-up rounded window means at the given pixel coordinates."""
    k = 2 * radius + 1
    sums = table[ys + k, xs + k] - table[ys, xs + k] - table[ys + k, xs] + table[ys, xs]
    n = k * k
    return ((2 * sums + n) // (2 * n)).astype(np.uint8)


def box_blur(raster: Raster, radius: int) -> Raster:
    """Mean over the (2r+1)^2 window with replicated borders, exact integer rounding."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if radius == 0:
        return raster.copy()
    h, w = raster.height, raster.width
    table = integral_image(raster.pixels, radius)
    k = 2 * radius + 1
    sums = table[k:k + h, k:k + w] - table[:h, k:k + w] - table[k:k + h, :w] + table[:h, :w]
    n = k * k
    return Raster(((2 * sums + n) // (2 * n)).astype(np.uint8))


def cos_sin_degrees(angle: float) -> tuple[float, float]:
    """cos/sin of an angle in degrees, exact at multiples of 90."""
    if not math.isfinite(angle):
        raise ValueError(f"angle must be finite, got {angle}")
    a = math.fmod(angle, 360.0)
    if a < 0:
        a += 360.0
    exact = {0.0: (1.0, 0.0), 90.0: (0.0, 1.0), 180.0: (-1.0, 0.0), 270.0: (0.0, -1.0)}
    if a in exact:
        return exact[a]
    t = math.radians(a)
    return math.cos(t), math.sin(t)


def rotate_point(x, y, angle: float, width: int, height: int):
    """Forward rotation of lattice coordinates, matching :func:`rotate_image`."""
    c, s = cos_sin_degrees(angle)
    cx, cy = (width - 1) / 2.0, (height - 1) / 2.0
    dx, dy = x - cx, y - cy
    return cx + dx * c - dy * s, cy + dx * s + dy * c


_EDGE_EPS = 1e-9
_ROW_CHUNK = 64


def rotate_image(raster: Raster, angle: float, fill=255) -> Raster:
    """Rotate about the canvas center on the same canvas, bilinear sampling.

    A destination pixel whose inverse-mapped source point falls outside
    ``[0, w-1] x [0, h-1]`` takes ``fill`` (a scalar or one value per channel).
    Coordinates are computed in float64, interpolation in float32.
    """
    c, s = cos_sin_degrees(angle)
    h, w, ch = raster.pixels.shape
    fill_arr = np.broadcast_to(np.asarray(fill, dtype=np.float32), (ch,))
    if c == 1.0 and s == 0.0:
        return raster.copy()
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    # one replicated column/row so the +1 neighbours always exist (weight 0 at the edge)
    padded = np.pad(raster.pixels, ((0, 1), (0, 1), (0, 0)), mode="edge")
    stride = w + 1
    planes = [padded[:, :, k].ravel() for k in range(ch)]
    out = np.empty((h, w, ch), dtype=np.uint8)
    xs = np.arange(w, dtype=np.float64) - cx
    # inverse of the forward map, split into per-column and per-row terms
    base_x = cx + xs * c
    base_y = cy - xs * s

    for y0 in range(0, h, _ROW_CHUNK):
        y1 = min(h, y0 + _ROW_CHUNK)
        ys = (np.arange(y0, y1, dtype=np.float64) - cy)[:, None]
        sx = base_x + ys * s
        sy = base_y + ys * c
        outside = (sx < -_EDGE_EPS) | (sx > w - 1 + _EDGE_EPS) | (sy < -_EDGE_EPS) | (sy > h - 1 + _EDGE_EPS)
        np.clip(sx, 0.0, w - 1, out=sx)
        np.clip(sy, 0.0, h - 1, out=sy)
        ix = sx.astype(np.int32)
        iy = sy.astype(np.int32)
        fx = (sx - ix).astype(np.float32)
        fy = (sy - iy).astype(np.float32)
        idx = iy * stride + ix
        for k, flat in enumerate(planes):
            p00 = flat[idx].astype(np.float32)
            p01 = flat[idx + 1].astype(np.float32)
            p10 = flat[idx + stride].astype(np.float32)
            p11 = flat[idx + stride + 1].astype(np.float32)
            top = p00 + (p01 - p00) * fx
            bot = p10 + (p11 - p10) * fx
            vals = top + (bot - top) * fy
            vals[outside] = fill_arr[k]
            out[y0:y1, :, k] = to_u8(vals, scratch=True)
    return Raster(out)
