"""Binary PGM (P5) / PPM (P6) images and resizing."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from PIL import Image as PILImage


class ImageFormatError(ValueError):
    pass


@dataclass
class Image:
    """Raster image, ``data`` has shape (height, width, channels) with values in [0, 255]."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim == 2:
            data = data[:, :, None]
        if data.ndim != 3 or data.shape[2] not in (1, 3):
            raise ValueError(f"image data must be (H, W, 1|3), got shape {data.shape}")
        if data.size == 0:
            raise ValueError("empty image")
        if not np.all(np.isfinite(data)) or data.min() < 0 or data.max() > 255:
            raise ValueError("pixel values must lie in [0, 255]")
        self.data = data

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    def to_rgb(self) -> Image:
        if self.channels == 3:
            return self
        return Image(np.repeat(self.data, 3, axis=2))


def _tokens(buf: bytes, count: int, path):
    """Read ``count`` whitespace-separated header tokens, skipping ``#`` comments."""
    tokens = []
    pos = 0
    while len(tokens) < count:
        while pos < len(buf) and buf[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(buf):
            raise ImageFormatError(f"{path}: truncated header")
        if buf[pos:pos + 1] == b"#":
            end = buf.find(b"\n", pos)
            pos = len(buf) if end < 0 else end + 1
            continue
        start = pos
        while pos < len(buf) and not buf[pos:pos + 1].isspace():
            pos += 1
        tokens.append(buf[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def decode_netpbm(buf: bytes, path="<bytes>") -> Image:
    magic = buf[:2]
    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    else:
        raise ImageFormatError(f"{path}: not a binary PGM/PPM file (magic {magic!r})")
    (w, h, maxval), offset = _tokens(buf[2:], 3, path)
    try:
        width, height, maxval = int(w), int(h), int(maxval)
    except ValueError:
        raise ImageFormatError(f"{path}: malformed header") from None
    if width < 1 or height < 1:
        raise ImageFormatError(f"{path}: invalid dimensions {width}x{height}")
    if maxval != 255:
        raise ImageFormatError(f"{path}: only 8-bit images (maxval 255) are supported, got {maxval}")
    n = width * height * channels
    raster = buf[2 + offset:2 + offset + n]
    if len(raster) < n:
        raise ImageFormatError(f"{path}: truncated raster ({len(raster)} of {n} bytes)")
    data = np.frombuffer(raster, dtype=np.uint8).reshape(height, width, channels)
    return Image(data.copy())


def read_netpbm(path) -> Image:
    try:
        with open(path, "rb") as f:
            buf = f.read()
    except OSError as e:
        raise ImageFormatError(f"{path}: cannot read image ({e.strerror})") from e
    return decode_netpbm(buf, path)


def encode_netpbm(image: Image) -> bytes:
    data = np.clip(np.rint(image.data), 0, 255).astype(np.uint8)
    magic = b"P5" if image.channels == 1 else b"P6"
    header = b"%s\n%d %d\n255\n" % (magic, image.width, image.height)
    return header + data.tobytes()


def write_netpbm(path, image: Image) -> None:
    with open(path, "wb") as f:
        f.write(encode_netpbm(image))


def is_netpbm_path(path) -> bool:
    return os.path.splitext(str(path))[1].lower() in (".pgm", ".ppm", ".pnm")


def resize(image: Image, width: int, height: int) -> Image:
    """Bilinear resize; a no-op when the size already matches."""
    if (image.width, image.height) == (width, height):
        return image
    data = np.clip(np.rint(image.data), 0, 255).astype(np.uint8)
    pil = PILImage.fromarray(data[:, :, 0] if image.channels == 1 else data)
    out = np.asarray(pil.resize((width, height), PILImage.BILINEAR))
    return Image(out.copy())
