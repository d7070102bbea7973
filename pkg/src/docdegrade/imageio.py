"""Binary PGM/PPM codec (normative) plus an optional PNG reader."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .raster import Raster

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_WHITESPACE = b" \t\n\r\v\f"


class ImageFormatError(ValueError):
    """The file is not a readable image of a supported kind."""


class MalformedHeaderError(ImageFormatError):
    pass


class UnsupportedBitDepthError(ImageFormatError):
    pass


def _read_header_fields(buf: bytes, count: int, path) -> tuple[list[int], int]:
    fields: list[int] = []
    pos = 2
    n = len(buf)
    while len(fields) < count:
        while pos < n and (buf[pos] in _WHITESPACE or buf[pos] == ord("#")):
            if buf[pos] == ord("#"):
                while pos < n and buf[pos] not in b"\r\n":
                    pos += 1
            else:
                pos += 1
        start = pos
        while pos < n and buf[pos] not in _WHITESPACE and buf[pos] != ord("#"):
            pos += 1
        token = buf[start:pos]
        if not token or not token.isdigit():
            raise MalformedHeaderError(f"{path}: malformed header field {token!r}")
        fields.append(int(token))
    if pos >= n or buf[pos] not in _WHITESPACE:
        raise MalformedHeaderError(f"{path}: header must end with a single whitespace byte")
    return fields, pos + 1


def _decode_pnm(buf: bytes, path) -> Raster:
    magic = buf[:2]
    if magic not in (b"P5", b"P6"):
        raise MalformedHeaderError(f"{path}: not a binary PGM/PPM file (magic {magic!r})")
    channels = 1 if magic == b"P5" else 3
    (width, height, maxval), offset = _read_header_fields(buf, 3, path)
    if width < 1 or height < 1:
        raise MalformedHeaderError(f"{path}: invalid dimensions {width}x{height}")
    if maxval > 255:
        raise UnsupportedBitDepthError(f"{path}: unsupported bit depth (maxval {maxval}, only 8-bit is supported)")
    if maxval != 255:
        raise UnsupportedBitDepthError(f"{path}: unsupported maxval {maxval} (expected 255)")
    size = width * height * channels
    payload = buf[offset:offset + size]
    if len(payload) != size:
        raise MalformedHeaderError(f"{path}: truncated pixel data ({len(payload)} of {size} bytes)")
    return Raster.from_bytes(width, height, channels, payload)


def _decode_png(path) -> Raster:
    try:
        from PIL import Image
    except ImportError as exc:  # pragma: no cover - depends on environment
        raise ImageFormatError(f"{path}: PNG support requires Pillow (pip install 'artifact[png]')") from exc
    with Image.open(path) as im:
        im.load()
        if im.mode in ("I", "I;16", "I;16B", "F"):
            raise UnsupportedBitDepthError(f"{path}: unsupported bit depth (mode {im.mode})")
        if im.mode == "P":
            im = im.convert("RGBA")
        if im.mode in ("LA", "RGBA", "PA"):
            rgba = np.asarray(im.convert("RGBA"), dtype=np.float64)
            alpha = rgba[:, :, 3:4] / 255.0
            # flatten onto white
            rgb = rgba[:, :, :3] * alpha + 255.0 * (1.0 - alpha)
            arr = np.clip(np.floor(rgb + 0.5), 0, 255).astype(np.uint8)
            if im.mode == "LA":
                arr = arr[:, :, :1]
            return Raster(arr)
        if im.mode == "1":
            im = im.convert("L")
        if im.mode == "L":
            return Raster(np.asarray(im, dtype=np.uint8)[:, :, None].copy())
        return Raster(np.asarray(im.convert("RGB"), dtype=np.uint8).copy())


def load_image(path) -> Raster:
    path = Path(path)
    try:
        buf = path.read_bytes()
    except OSError as exc:
        raise OSError(f"cannot read image {path}: {exc.strerror or exc}") from exc
    if buf.startswith(_PNG_SIGNATURE):
        return _decode_png(path)
    return _decode_pnm(buf, path)


def encode_pnm(raster: Raster) -> bytes:
    magic = b"P5" if raster.channels == 1 else b"P6"
    header = b"%s\n%d %d\n255\n" % (magic, raster.width, raster.height)
    return header + raster.data


def save_image(raster: Raster, path) -> None:
    """Write PGM (gray) or PPM (RGB) depending on the channel count."""
    path = Path(path)
    try:
        with open(path, "wb") as fh:
            fh.write(encode_pnm(raster))
    except OSError as exc:
        raise OSError(f"cannot write image {path}: {exc.strerror or exc}") from exc


def image_extension(raster: Raster) -> str:
    return ".pgm" if raster.channels == 1 else ".ppm"

