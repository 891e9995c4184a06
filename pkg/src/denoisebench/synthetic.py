"""Deterministic Saturn-like test image: a flat disk inside a tilted ring on black."""

from __future__ import annotations

import numpy as np

from .image import GrayImage, quantize

DEFAULT_SIZE = (256, 256)


def saturn_like(width: int = 256, height: int = 256) -> GrayImage:
    """Render the synthetic test scene.

    With ``s = min(width, height)`` and centre ``c = ((width-1)/2, (height-1)/2)``:

    * background 0
    * ring: ellipse flattened 3:1 vertically, radial coordinate
      ``rho = hypot(dx, 3*dy)`` in ``[0.30 s, 0.47 s]``; intensity falls linearly
      from 210 (inner edge) to 90 (outer edge)
    * disk: radius ``0.22 s``, constant 170, drawn over the ring's back half
      (``dy < 0``) and under its front half (``dy >= 0``)
    """
    if width < 1 or height < 1:
        raise ValueError("width and height must be >= 1")
    s = float(min(width, height))
    y, x = np.mgrid[0:height, 0:width].astype(np.float64)
    dx = x - (width - 1) / 2.0
    dy = y - (height - 1) / 2.0

    inner, outer = 0.30 * s, 0.47 * s
    rho = np.hypot(dx, 3.0 * dy)
    t = (rho - inner) / (outer - inner)
    on_ring = (t >= 0.0) & (t <= 1.0)
    ring = 210.0 - 120.0 * t

    disk = np.hypot(dx, dy) <= 0.22 * s

    out = np.zeros((height, width), dtype=np.float64)
    back = on_ring & (dy < 0)
    front = on_ring & (dy >= 0)
    out[back] = ring[back]
    out[disk] = 170.0
    out[front] = ring[front]
    return GrayImage(quantize(out))


def parse_size(text: str) -> tuple[int, int]:
    """Parse ``WxH`` (e.g. ``256x256``)."""
    w, sep, h = text.lower().partition("x")
    if not sep:
        raise ValueError(f"expected WxH, got {text!r}")
    try:
        width, height = int(w), int(h)
    except ValueError:
        raise ValueError(f"expected WxH, got {text!r}") from None
    if width < 1 or height < 1:
        raise ValueError(f"image size must be positive, got {text!r}")
    return width, height
