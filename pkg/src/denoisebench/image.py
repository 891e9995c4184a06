"""
Grayscale image type, binary PGM (P5) I/O, replicate padding and window extraction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class PGMError(ValueError):
    """Base class for PGM decoding failures."""


class MagicMismatch(PGMError):
    pass


class MaxvalUnsupported(PGMError):
    pass


class TruncatedPayload(PGMError):
    pass


class MalformedHeader(PGMError):
    pass


class WindowExceedsPadding(ValueError):
    pass


class GrayImage:
    """Immutable 8-bit single-channel raster.

    ``data`` is a read-only ``uint8`` array of shape ``(height, width)``.
    """

    __slots__ = ("_data",)

    def __init__(self, data):
        arr = np.asarray(data)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("width and height must be >= 1")
        if arr.dtype != np.uint8:
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("pixel values must lie in [0, 255]")
            if not np.all(np.equal(np.mod(arr, 1), 0)):
                raise ValueError("pixel values must be integers")
            arr = arr.astype(np.uint8)
        arr = np.array(arr, dtype=np.uint8, copy=True)
        arr.setflags(write=False)
        self._data = arr

    @classmethod
    def from_pixels(cls, width: int, height: int, pixels: Sequence[int]) -> "GrayImage":
        """Build from a row-major pixel sequence."""
        if width < 1 or height < 1:
            raise ValueError("width and height must be >= 1")
        flat = np.asarray(pixels)
        if flat.size != width * height:
            raise ValueError(f"expected {width * height} pixels, got {flat.size}")
        return cls(flat.reshape(height, width))

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def width(self) -> int:
        return self._data.shape[1]

    @property
    def height(self) -> int:
        return self._data.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self._data.shape

    @property
    def pixels(self) -> list[int]:
        return self._data.ravel().tolist()

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self._data, other._data)

    def __hash__(self):
        return hash((self.shape, self._data.tobytes()))

    def __repr__(self):
        return f"GrayImage(width={self.width}, height={self.height})"


def quantize(values) -> np.ndarray:
    """Round half away from zero, clamp to [0, 255], return uint8."""
    v = np.asarray(values, dtype=np.float64)
    rounded = np.copysign(np.floor(np.abs(v) + 0.5), v)
    return np.clip(rounded, 0, 255).astype(np.uint8)


# --- PGM -------------------------------------------------------------------

_WS = b" \t\n\r\v\f"


def _next_token(buf: bytes, pos: int, allow_comments: bool) -> tuple[bytes, int]:
    n = len(buf)
    while pos < n:
        c = buf[pos:pos + 1]
        if c in _WS:
            pos += 1
        elif c == b"#" and allow_comments:
            eol = buf.find(b"\n", pos)
            pos = n if eol < 0 else eol + 1
        else:
            break
    start = pos
    while pos < n and buf[pos:pos + 1] not in _WS and buf[pos:pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise MalformedHeader("unexpected end of header")
    return buf[start:pos], pos


def load_pgm(data: bytes) -> GrayImage:
    """Decode a binary PGM (P5, maxval 255) byte stream."""
    data = bytes(data)
    if data[:2] != b"P5":
        raise MagicMismatch(f"expected magic b'P5', got {data[:2]!r}")
    pos = 2
    if pos < len(data) and data[pos:pos + 1] not in _WS and data[pos:pos + 1] != b"#":
        raise MagicMismatch("magic must be followed by whitespace")
    fields = []
    for _ in range(3):
        tok, pos = _next_token(data, pos, allow_comments=True)
        if not re.fullmatch(rb"[0-9]+", tok):
            raise MalformedHeader(f"non-numeric header field {tok!r}")
        fields.append(int(tok))
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise MalformedHeader(f"bad dimensions {width}x{height}")
    if maxval != 255:
        raise MaxvalUnsupported(f"maxval {maxval} is not supported (need 255)")
    if pos >= len(data) or data[pos:pos + 1] not in _WS:
        raise TruncatedPayload("missing whitespace byte after maxval")
    pos += 1
    need = width * height
    payload = data[pos:pos + need]
    if len(payload) < need:
        raise TruncatedPayload(f"expected {need} data bytes, got {len(payload)}")
    arr = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return GrayImage(arr)


def save_pgm(img: GrayImage) -> bytes:
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.data.tobytes()


def read_pgm(path) -> GrayImage:
    with open(path, "rb") as fh:
        return load_pgm(fh.read())


def write_pgm(path, img: GrayImage) -> None:
    with open(path, "wb") as fh:
        fh.write(save_pgm(img))


# --- padding and windows ---------------------------------------------------

@dataclass(frozen=True)
class PaddedView:
    """Virtual replicate-padded view of ``source`` extending ``margin`` pixels."""

    source: GrayImage
    margin: int
    policy: str = "replicate"
    _padded: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.margin < 0:
            raise ValueError("margin must be non-negative")
        if self.policy != "replicate":
            raise ValueError(f"unsupported padding policy {self.policy!r}")
        padded = np.pad(self.source.data, self.margin, mode="edge")
        padded.setflags(write=False)
        object.__setattr__(self, "_padded", padded)

    @property
    def array(self) -> np.ndarray:
        """The padded raster, shape ``(height + 2m, width + 2m)``."""
        return self._padded

    def read(self, x: int, y: int) -> int:
        m = self.margin
        if not (-m <= x < self.source.width + m and -m <= y < self.source.height + m):
            raise IndexError(f"({x}, {y}) outside padded extent (margin {m})")
        return int(self._padded[y + m, x + m])


def pad_replicate(img: GrayImage, margin: int) -> PaddedView:
    return PaddedView(img, margin)


def window(view: PaddedView, cx: int, cy: int, size: int) -> list[int]:
    """Row-major ``size`` x ``size`` neighbourhood centred on (cx, cy)."""
    if size < 1 or size % 2 == 0:
        raise ValueError(f"window size must be odd and positive, got {size}")
    r = size // 2
    if r > view.margin:
        raise WindowExceedsPadding(f"size {size} needs margin >= {r}, view has {view.margin}")
    if not (0 <= cx < view.source.width and 0 <= cy < view.source.height):
        raise IndexError(f"centre ({cx}, {cy}) outside the source image")
    m = view.margin
    block = view.array[cy + m - r:cy + m + r + 1, cx + m - r:cx + m + r + 1]
    return block.ravel().tolist()
