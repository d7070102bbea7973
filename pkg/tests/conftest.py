from __future__ import annotations

import sys
from collections import defaultdict
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from docdegrade.raster import Raster  # noqa: E402
from docdegrade.rng import RngStream  # noqa: E402
from docdegrade.synth import synthetic_form  # noqa: E402


def random_text_page(seed: int, width: int = 96, height: int = 64, channels: int = 1) -> Raster:
    """White page with random dark strokes and some mid-gray noise."""
    rng = np.random.default_rng(seed)
    page = np.full((height, width), 255, dtype=np.uint8)
    for _ in range(rng.integers(5, 25)):
        x, y = rng.integers(0, width), rng.integers(0, height)
        w, h = rng.integers(1, 20), rng.integers(1, 4)
        if rng.random() < 0.5:
            w, h = h, w
        page[y:y + h, x:x + w] = rng.integers(0, 100)
    speckle = rng.random((height, width)) < 0.02
    page[speckle] = rng.integers(100, 255, speckle.sum())
    if channels == 3:
        tint = rng.integers(200, 256, 3) / 255.0
        rgb = np.floor(page[:, :, None] * tint + 0.5).astype(np.uint8)
        return Raster(rgb)
    return Raster(page[:, :, None])


@pytest.fixture
def text_page():
    return random_text_page(0)


@pytest.fixture
def form_page():
    return synthetic_form("form-fixture", 240, 180, seed=3)


@pytest.fixture
def rng():
    return RngStream(1234)


# -- acceptance summary ------------------------------------------------------

_CRITERIA: dict[str, tuple[int, str]] = {}
_NOTES: list[str] = []
_OUTCOMES: dict[int, list[str]] = defaultdict(list)
_TITLES: dict[int, str] = {}


@pytest.fixture
def acceptance_note():
    """Append a measurement line to the acceptance summary."""
    return _NOTES.append


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("acceptance")
        if marker:
            number, title = marker.args
            _CRITERIA[item.nodeid] = (number, title)
            _TITLES[number] = title


def pytest_runtest_logreport(report):
    if report.nodeid not in _CRITERIA:
        return
    number, _ = _CRITERIA[report.nodeid]
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _OUTCOMES[number].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_TITLES):
        outcomes = _OUTCOMES.get(number, [])
        if not outcomes:
            status = "NOT RUN"
        elif all(o == "passed" for o in outcomes):
            status = "PASS"
        elif any(o == "failed" for o in outcomes):
            status = "FAIL"
        else:
            status = "SKIP"
        terminalreporter.write_line(f"[{status:>7}] criterion {number}: {_TITLES[number]} ({len(outcomes)} test(s))")
    for note in _NOTES:
        terminalreporter.write_line(f"  note: {note}")
