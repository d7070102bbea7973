"""In-memory JPEG-style lossy round trip (no entropy coding).

Y'CbCr (BT.601 full range) -> optional 2x2 chroma averaging -> 8x8 DCT-II per
channel -> quantize with the Annex K tables scaled by quality -> dequantize ->
inverse DCT -> back to RGB -> round half-up and clamp.
"""
from __future__ import annotations

import numpy as np

from ..raster import Raster, to_u8
from ..rng import RngStream
from .params import JpegParams

LUMA_TABLE = np.array([
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
], dtype=np.int64)

CHROMA_TABLE = np.array([
    [17, 18, 24, 47, 99, 99, 99, 99],
    [18, 21, 26, 66, 99, 99, 99, 99],
    [24, 26, 56, 99, 99, 99, 99, 99],
    [47, 66, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
], dtype=np.int64)

RGB_TO_YCBCR = np.array([
    [0.299, 0.587, 0.114],
    [-0.168736, -0.331264, 0.5],
    [0.5, -0.418688, -0.081312],
])
YCBCR_TO_RGB = np.linalg.inv(RGB_TO_YCBCR)
_CHROMA_OFFSET = np.array([0.0, 128.0, 128.0])


def _dct_matrix() -> np.ndarray:
    k = np.arange(8)[:, None]
    n = np.arange(8)[None, :]
    m = np.cos((2 * n + 1) * k * np.pi / 16) * 0.5
    m[0, :] = np.sqrt(1.0 / 8.0)
    return m


DCT_MATRIX = _dct_matrix()


def quality_scale(quality: int) -> int:
    if not 1 <= quality <= 100:
        raise ValueError(f"quality must be in [1, 100], got {quality}")
    return 5000 // quality if quality < 50 else 200 - 2 * quality


def scaled_table(base: np.ndarray, quality: int) -> np.ndarray:
    scale = quality_scale(quality)
    return np.clip((base * scale + 50) // 100, 1, 255)


def _to_blocks(plane: np.ndarray) -> tuple[np.ndarray, tuple[int, int]]:
    h, w = plane.shape
    ph, pw = -h % 8, -w % 8
    if ph or pw:
        plane = np.pad(plane, ((0, ph), (0, pw)), mode="edge")
    hb, wb = plane.shape[0] // 8, plane.shape[1] // 8
    blocks = plane.reshape(hb, 8, wb, 8).transpose(0, 2, 1, 3).reshape(-1, 8, 8)
    if np.shares_memory(blocks, plane):
        blocks = blocks.copy()
    return blocks, (hb, wb)


def _from_blocks(blocks: np.ndarray, grid: tuple[int, int], shape: tuple[int, int]) -> np.ndarray:
    hb, wb = grid
    plane = blocks.reshape(hb, wb, 8, 8).transpose(0, 2, 1, 3).reshape(hb * 8, wb * 8)
    return plane[:shape[0], :shape[1]]


def block_dct(plane: np.ndarray) -> np.ndarray:
    """Orthonormal 8x8 DCT-II of a level-shifted plane, shape ``(n_blocks, 8, 8)``."""
    blocks, _ = _to_blocks(np.asarray(plane, dtype=np.float64) - 128.0)
    return DCT_MATRIX @ blocks @ DCT_MATRIX.T


def quantize_plane(plane: np.ndarray, table: np.ndarray) -> np.ndarray:
    """DCT, quantize, dequantize and invert one float plane (same shape out)."""
    blocks, grid = _to_blocks(plane)
    blocks -= 128.0
    # stacked 8x8 products: each block goes through an identical computation
    coef = DCT_MATRIX @ blocks @ DCT_MATRIX.T
    q = table.astype(np.float64)
    coef /= q
    coef += 0.5
    np.floor(coef, out=coef)
    coef *= q
    rec = DCT_MATRIX.T @ coef @ DCT_MATRIX
    rec += 128.0
    return _from_blocks(rec, grid, plane.shape)


def _subsample_2x2(plane: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    padded = np.pad(plane, ((0, h % 2), (0, w % 2)), mode="edge")
    H, W = padded.shape
    means = padded.reshape(H // 2, 2, W // 2, 2).mean(axis=(1, 3))
    return np.repeat(np.repeat(means, 2, axis=0), 2, axis=1)[:h, :w]


def jpeg_roundtrip(img: Raster, quality: int, chroma_subsample: bool = True) -> Raster:
    luma_q = scaled_table(LUMA_TABLE, quality)
    if img.channels == 1:
        y = img.pixels[:, :, 0].astype(np.float64)
        return Raster(to_u8(quantize_plane(y, luma_q), scratch=True)[:, :, None])

    chroma_q = scaled_table(CHROMA_TABLE, quality)
    rgb = img.pixels.astype(np.float64)
    ycc = rgb @ RGB_TO_YCBCR.T + _CHROMA_OFFSET
    planes = [ycc[:, :, 0], ycc[:, :, 1], ycc[:, :, 2]]
    if chroma_subsample:
        planes[1] = _subsample_2x2(planes[1])
        planes[2] = _subsample_2x2(planes[2])
    out = np.stack([
        quantize_plane(planes[0], luma_q),
        quantize_plane(planes[1], chroma_q),
        quantize_plane(planes[2], chroma_q),
    ], axis=-1)
    back = (out - _CHROMA_OFFSET) @ YCBCR_TO_RGB.T
    return Raster(to_u8(back, scratch=True))


def apply_jpeg_artifact(img: Raster, params: JpegParams, rng: RngStream) -> Raster:
    """Draws: quality, uniform integer in ``quality_range``."""
    quality = int(rng.integers(*params.quality_range))
    return jpeg_roundtrip(img, quality, params.chroma_subsample)
