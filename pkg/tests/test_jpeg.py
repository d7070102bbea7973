import numpy as np
import pytest

from docdegrade.effects import JpegParams, apply_jpeg_artifact, block_dct, jpeg_roundtrip, scaled_table
from docdegrade.effects.jpeg import LUMA_TABLE, quality_scale
from docdegrade.raster import Raster, luma
from docdegrade.rng import RngStream

import oracles
from conftest import random_text_page


def gray(plane):
    return Raster(np.asarray(plane, dtype=np.uint8)[:, :, None])


def checkerboard(h, w):
    yy, xx = np.mgrid[0:h, 0:w]
    return np.where((xx + yy) % 2 == 0, 0, 255).astype(np.uint8)


@pytest.mark.parametrize("q,scale", [(1, 5000), (10, 500), (25, 200), (49, 102), (50, 100), (75, 50), (100, 0)])
def test_quality_scale(q, scale):
    assert quality_scale(q) == scale


@pytest.mark.parametrize("q", [1, 10, 25, 50, 75, 95, 100])
def test_scaled_table_matches_oracle(q):
    assert scaled_table(LUMA_TABLE, q).tolist() == oracles.quant_table(q)


def test_q50_is_the_base_table_and_q100_is_all_ones():
    assert np.array_equal(scaled_table(LUMA_TABLE, 50), LUMA_TABLE)
    assert (scaled_table(LUMA_TABLE, 100) == 1).all()


def test_quality_bounds():
    with pytest.raises(ValueError):
        quality_scale(0)
    with pytest.raises(ValueError):
        quality_scale(101)


@pytest.mark.parametrize("shape", [(8, 8), (16, 24), (13, 10)])
def test_dct_coefficients_match_naive_oracle(shape):
    plane = random_text_page(shape[0] * 31 + shape[1], width=shape[1], height=shape[0]).pixels[:, :, 0]
    got = block_dct(plane)
    ref = oracles.dct_coefficients(plane)
    assert np.abs(got - ref).max() < 1e-6


def test_naive_oracle_inverts_itself():
    rng = np.random.default_rng(0)
    blk = rng.normal(size=(8, 8)).tolist()
    back = oracles.naive_idct(oracles.naive_dct(blk))
    assert np.abs(np.array(back) - np.array(blk)).max() < 1e-12


# seeds whose quantizer inputs all sit > 1e-6 away from a rounding tie, so float
# summation order cannot legitimately flip a quantized coefficient
@pytest.mark.parametrize("q,seed", [(25, 0), (25, 1), (50, 0), (50, 1), (95, 4), (95, 5), (100, 24), (100, 27)])
def test_gray_roundtrip_matches_oracle(q, seed):
    plane = random_text_page(seed, width=21, height=18).pixels[:, :, 0]
    ref, closest_tie = oracles.jpeg_gray_roundtrip(plane, q)
    assert closest_tie > 1e-6
    got = jpeg_roundtrip(gray(plane), q).pixels[:, :, 0]
    assert np.array_equal(got, ref)


@pytest.mark.parametrize("v", [0, 1, 37, 100, 128, 129, 200, 254, 255])
def test_constant_page_q50_within_one_level(v):
    img = gray(np.full((20, 20), v))
    out = jpeg_roundtrip(img, 50)
    assert np.abs(out.pixels.astype(int) - v).max() <= 1
    ref, _ = oracles.jpeg_gray_roundtrip(np.full((8, 8), v, dtype=np.uint8), 50)
    assert np.abs(ref.astype(int) - v).max() <= 1


@pytest.mark.parametrize("channels", [1, 3])
def test_q100_within_two_levels(channels):
    page = random_text_page(3, width=40, height=33, channels=channels)
    out = jpeg_roundtrip(page, 100, chroma_subsample=False)
    assert np.abs(luma(out).astype(int) - luma(page).astype(int)).max() <= 2
    if channels == 1:
        assert np.abs(out.pixels.astype(int) - page.pixels.astype(int)).max() <= 2


def test_checkerboard_mse_decreases_with_quality():
    board = checkerboard(32, 32)
    low = jpeg_roundtrip(gray(board), 25).pixels[:, :, 0].astype(float)
    high = jpeg_roundtrip(gray(board), 95).pixels[:, :, 0].astype(float)
    mse = lambda x: np.mean((x - board) ** 2)
    assert mse(low) > mse(high)
    ref_low, _ = oracles.jpeg_gray_roundtrip(board, 25)
    ref_high, _ = oracles.jpeg_gray_roundtrip(board, 95)
    assert mse(ref_low.astype(float)) > mse(ref_high.astype(float))


def test_block_separability_on_gray():
    page = random_text_page(5, width=48, height=40)
    full = jpeg_roundtrip(page, 40, chroma_subsample=False).pixels
    for y0, y1, x0, x1 in [(0, 8, 0, 8), (8, 32, 16, 48), (0, 40, 8, 24), (32, 40, 40, 48)]:
        sub = Raster(page.pixels[y0:y1, x0:x1].copy())
        part = jpeg_roundtrip(sub, 40, chroma_subsample=False).pixels
        assert np.array_equal(part, full[y0:y1, x0:x1])


def test_rgb_gray_content_stays_near_gray():
    page = random_text_page(6, width=24, height=24)
    rgb = Raster(np.repeat(page.pixels, 3, axis=2))
    out = jpeg_roundtrip(rgb, 75).pixels.astype(int)
    assert np.abs(out - out[:, :, :1]).max() <= 2


def test_subsampling_changes_colour_detail():
    rng = np.random.default_rng(0)
    px = rng.integers(0, 256, (16, 16, 3), dtype=np.uint8)
    a = jpeg_roundtrip(Raster(px), 90, chroma_subsample=True)
    b = jpeg_roundtrip(Raster(px), 90, chroma_subsample=False)
    assert a != b


def test_apply_draws_quality_from_range():
    page = random_text_page(7, width=32, height=32)
    out = apply_jpeg_artifact(page, JpegParams(quality_range=(60, 60)), RngStream(123))
    assert out == jpeg_roundtrip(page, 60)
    a = apply_jpeg_artifact(page, JpegParams(), RngStream(9))
    assert a == apply_jpeg_artifact(page, JpegParams(), RngStream(9))
