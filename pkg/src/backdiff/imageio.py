"""Binary PGM (P5) and PPM (P6) codecs, PNG via Pillow, and path helpers.

PGM/PPM parsing follows the netpbm layout: magic token, width, height,
maxval (only 255 accepted) separated by whitespace, '#' comment lines
skipped, a single whitespace byte, then the row-major binary payload.
Written files are canonical and byte-stable.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image as PILImage

from .imaging import ColourImage, GreyImage

__all__ = [
    "ImageFormatError",
    "sniff_format",
    "decode_image",
    "encode_image",
    "read_image",
    "write_image",
    "format_for_path",
]

_WHITESPACE = b" \t\n\r\x0b\x0c"
_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


class ImageFormatError(ValueError):
    """Unreadable, corrupt, or unsupported image data."""


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """First `count` whitespace-separated tokens, skipping '#' comments.

    Returns the tokens and the offset just past the single whitespace
    byte terminating the last one (start of the binary payload).
    """
    tokens: list[bytes] = []
    i = 0
    while len(tokens) < count:
        while i < len(data):
            c = data[i : i + 1]
            if c in _WHITESPACE:
                i += 1
            elif c == b"#":
                while i < len(data) and data[i : i + 1] not in b"\r\n":
                    i += 1
            else:
                break
        start = i
        while i < len(data) and data[i : i + 1] not in _WHITESPACE:
            i += 1
        if i == start:
            raise ImageFormatError("truncated header")
        tokens.append(data[start:i])
    if i >= len(data) or data[i : i + 1] not in _WHITESPACE:
        raise ImageFormatError("missing whitespace before payload")
    return tokens, i + 1


def _decode_netpbm(data: bytes) -> GreyImage | ColourImage:
    tokens, offset = _header_tokens(data, 4)
    magic = tokens[0]
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise ImageFormatError(f"non-numeric header token: {exc}") from exc
    if width < 1 or height < 1:
        raise ImageFormatError(f"bad dimensions {width} x {height}")
    if maxval != 255:
        raise ImageFormatError(f"only maxval 255 is supported, got {maxval}")
    channels = 1 if magic == b"P5" else 3
    payload = data[offset:]
    expected = width * height * channels
    if len(payload) != expected:
        raise ImageFormatError(
            f"payload holds {len(payload)} bytes, expected {expected}"
        )
    arr = np.frombuffer(payload, dtype=np.uint8)
    if channels == 1:
        return GreyImage(arr.reshape(height, width).copy())
    return ColourImage(arr.reshape(height, width, 3).copy())


def _decode_png(data: bytes) -> GreyImage | ColourImage:
    try:
        with PILImage.open(io.BytesIO(data)) as im:
            im.load()
            mode = im.mode
            arr = np.asarray(im)
    except Exception as exc:
        raise ImageFormatError(f"cannot decode PNG: {exc}") from exc
    if mode == "L":
        return GreyImage(arr.astype(np.uint8))
    if mode == "RGB":
        return ColourImage(arr.astype(np.uint8))
    raise ImageFormatError(f"unsupported PNG mode {mode!r}; need 8-bit grey or RGB")


def sniff_format(data: bytes) -> str:
    """Identify the container of raw image bytes: pgm, ppm, or png."""
    if data.startswith(_PNG_MAGIC):
        return "png"
    if data[:2] in (b"P5", b"P6") and data[2:3] in _WHITESPACE + b"#":
        return "pgm" if data[:2] == b"P5" else "ppm"
    raise ImageFormatError("unrecognised image data; expected PGM, PPM, or PNG")


def decode_image(data: bytes) -> GreyImage | ColourImage:
    """Decode PGM, PPM, or PNG bytes into an image object."""
    fmt = sniff_format(data)
    if fmt == "png":
        return _decode_png(data)
    return _decode_netpbm(data)


def encode_image(img: GreyImage | ColourImage, fmt: str) -> bytes:
    """Encode an image as 'pgm', 'ppm', or 'png' bytes."""
    grey = isinstance(img, GreyImage)
    if fmt == "pgm":
        if not grey:
            raise ImageFormatError("PGM stores greyscale images only")
        header = f"P5\n{img.width} {img.height}\n255\n".encode()
        return header + img.samples.tobytes()
    if fmt == "ppm":
        if grey:
            raise ImageFormatError("PPM stores colour images only")
        header = f"P6\n{img.width} {img.height}\n255\n".encode()
        return header + img.samples.tobytes()
    if fmt == "png":
        pil = PILImage.fromarray(img.samples, mode="L" if grey else "RGB")
        buf = io.BytesIO()
        pil.save(buf, format="PNG")
        return buf.getvalue()
    raise ImageFormatError(f"unknown output format {fmt!r}; expected pgm, ppm, or png")


def format_for_path(path) -> str:
    suffix = Path(path).suffix.lower()
    fmt = {".pgm": "pgm", ".ppm": "ppm", ".png": "png"}.get(suffix)
    if fmt is None:
        raise ImageFormatError(
            f"cannot infer image format from {str(path)!r}; use .pgm, .ppm, or .png"
        )
    return fmt


def read_image(path) -> GreyImage | ColourImage:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise ImageFormatError(f"cannot read {str(path)!r}: {exc}") from exc
    return decode_image(data)


def write_image(path, img: GreyImage | ColourImage) -> None:
    Path(path).write_bytes(encode_image(img, format_for_path(path)))
