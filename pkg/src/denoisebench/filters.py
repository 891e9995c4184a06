"""
Restoration filters: mean (MF), standard median (SMF), adaptive Wiener (AWF),
Gaussian low-pass (GF) and adaptive median (AMF).

All filters read borders through replicate padding, compute in float64 on the
0-255 scale, and quantize once at the output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .image import GrayImage, pad_replicate, quantize


class BadKernelSize(ValueError):
    pass


class BadSigma(ValueError):
    pass


class BadSmax(ValueError):
    pass


class NegativeNoiseVariance(ValueError):
    pass


FILTER_KINDS = ("mf", "smf", "awf", "gf", "amf")


def _check_odd(size, what="window") -> int:
    if isinstance(size, bool) or int(size) != size or size < 1 or size % 2 == 0:
        raise BadKernelSize(f"{what} must be an odd positive integer, got {size!r}")
    return int(size)


@dataclass(frozen=True)
class Kernel2D:
    size: int
    weights: np.ndarray = field(compare=False)

    def __post_init__(self):
        _check_odd(self.size, "kernel size")
        w = np.array(self.weights, dtype=np.float64).reshape(self.size, self.size)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, size: int) -> "Kernel2D":
        size = _check_odd(size)
        return cls(size, np.full((size, size), 1.0 / (size * size)))


def gaussian_kernel(size: int, sigma: float) -> Kernel2D:
    size = _check_odd(size, "kernel size")
    if not sigma > 0 or not math.isfinite(sigma):
        raise BadSigma(f"sigma must be positive, got {sigma!r}")
    c = size // 2
    d = np.arange(size, dtype=np.float64) - c
    r2 = d[:, None] ** 2 + d[None, :] ** 2
    w = np.exp(-r2 / (2.0 * sigma * sigma))
    return Kernel2D(size, w / w.sum())


def convolve2d(img: GrayImage, kernel: Kernel2D) -> GrayImage:
    """Weighted neighbourhood sum: ``out[y, x] = sum_ij w[i, j] * pad[y+i-c, x+j-c]``.

    Terms are accumulated in row-major kernel order so any per-pixel loop that
    does the same reproduces the result bit for bit.
    """
    k = kernel.size
    h, w = img.shape
    padded = pad_replicate(img, k // 2).array.astype(np.float64)
    acc = np.zeros((h, w), dtype=np.float64)
    for i in range(k):
        for j in range(k):
            acc += kernel.weights[i, j] * padded[i:i + h, j:j + w]
    return GrayImage(quantize(acc))


def _windows(img: GrayImage, size: int) -> np.ndarray:
    """Stack of replicate-padded neighbourhoods, shape ``(h, w, size*size)``."""
    padded = pad_replicate(img, size // 2).array
    win = sliding_window_view(padded, (size, size))
    return win.reshape(img.height, img.width, size * size)


def mean_filter(img: GrayImage, window: int = 3) -> GrayImage:
    return convolve2d(img, Kernel2D.uniform(_check_odd(window)))


def gaussian_filter(img: GrayImage, kernel_size: int = 3, sigma: float = 0.5) -> GrayImage:
    return convolve2d(img, gaussian_kernel(kernel_size, sigma))


def median_filter(img: GrayImage, window: int = 3) -> GrayImage:
    window = _check_odd(window)
    if window == 1:
        return img
    n = window * window
    win = _windows(img, window)
    med = np.partition(win, n // 2, axis=-1)[..., n // 2]
    return GrayImage(med)


def adaptive_wiener(img: GrayImage, window: int = 3,
                    noise_variance: Optional[float] = None) -> GrayImage:
    """Local-statistics Wiener filter.

    If ``noise_variance`` is None it is estimated as the mean of all local
    variances. Variances are population variances on the 0-255 scale.
    """
    window = _check_odd(window)
    if noise_variance is not None and not noise_variance >= 0:
        raise NegativeNoiseVariance(f"noise variance must be >= 0, got {noise_variance!r}")
    win = _windows(img, window).astype(np.float64)
    mu = win.mean(axis=-1)
    var = ((win - mu[..., None]) ** 2).mean(axis=-1)
    nv = float(var.mean()) if noise_variance is None else float(noise_variance)

    g = img.data.astype(np.float64)
    denom = np.maximum(var, nv)
    flat = var == 0
    gain = np.maximum(var - nv, 0.0) / np.where(flat, 1.0, denom)
    out = np.where(flat, mu, mu + gain * (g - mu))
    return GrayImage(quantize(out))


def adaptive_median(img: GrayImage, s_max: int = 7) -> GrayImage:
    """Adaptive median filter with windows 3, 5, ..., ``s_max``.

    Level A grows the window until its median is strictly between the window
    minimum and maximum; if it never is, the median of the largest window is
    output. Level B keeps the centre pixel when it is itself strictly inside
    (min, max), otherwise outputs the median.
    """
    if isinstance(s_max, bool) or int(s_max) != s_max or s_max < 3 or s_max % 2 == 0:
        raise BadSmax(f"s_max must be an odd integer >= 3, got {s_max!r}")
    z = img.data
    out = np.empty_like(z)
    pending = np.ones(z.shape, dtype=bool)
    for size in range(3, int(s_max) + 1, 2):
        n = size * size
        srt = np.sort(_windows(img, size)[pending], axis=-1)
        zmin, zmed, zmax = srt[:, 0], srt[:, n // 2], srt[:, -1]
        zxy = z[pending]
        level_b = (zmin < zmed) & (zmed < zmax)
        keep = (zmin < zxy) & (zxy < zmax)
        result = np.where(keep, zxy, zmed)
        if size + 2 > s_max:
            result = np.where(level_b, result, zmed)
            out[pending] = result
            break
        idx = np.flatnonzero(pending)
        done = idx[level_b]
        out.flat[done] = result[level_b]
        pending.flat[done] = False
        if not pending.any():
            break
    return GrayImage(out)


# --- filter specs ----------------------------------------------------------

_PARAM_KEYS = {
    "mf": ("window",),
    "smf": ("window",),
    "awf": ("window", "noisevar"),
    "gf": ("size", "sigma"),
    "amf": ("smax",),
}


class FilterSpecError(ValueError):
    """Raised for an unparseable filter-spec string; ``token`` names the culprit."""

    def __init__(self, message: str, token: str):
        super().__init__(message)
        self.token = token


@dataclass(frozen=True)
class FilterSpec:
    kind: str
    window: int = 3
    sigma: float = 0.5
    kernel_size: int = 3
    s_max: int = 7
    noise_variance: Optional[float] = None

    def __post_init__(self):
        if self.kind not in FILTER_KINDS:
            raise ValueError(f"unknown filter kind {self.kind!r}")
        _check_odd(self.window)
        _check_odd(self.kernel_size, "kernel size")
        if not self.sigma > 0:
            raise BadSigma(f"sigma must be positive, got {self.sigma!r}")
        if self.s_max < 3 or self.s_max % 2 == 0:
            raise BadSmax(f"s_max must be an odd integer >= 3, got {self.s_max!r}")
        if self.noise_variance is not None and not self.noise_variance >= 0:
            raise NegativeNoiseVariance(f"noise variance must be >= 0, got {self.noise_variance!r}")

    def _settings(self) -> dict:
        values = {
            "window": self.window,
            "noisevar": self.noise_variance,
            "size": self.kernel_size,
            "sigma": self.sigma,
            "smax": self.s_max,
        }
        defaults = {"window": 3, "noisevar": None, "size": 3, "sigma": 0.5, "smax": 7}
        return {k: values[k] for k in _PARAM_KEYS[self.kind] if values[k] != defaults[k]}

    @property
    def label(self) -> str:
        """Canonical spec string; bare kind when every parameter is default."""
        settings = self._settings()
        if not settings:
            return self.kind
        return self.kind + ":" + ",".join(f"{k}={v:.10g}" for k, v in settings.items())

    def __str__(self):
        return self.label

    def apply(self, img: GrayImage) -> GrayImage:
        if self.kind == "mf":
            return mean_filter(img, self.window)
        if self.kind == "smf":
            return median_filter(img, self.window)
        if self.kind == "awf":
            return adaptive_wiener(img, self.window, self.noise_variance)
        if self.kind == "gf":
            return gaussian_filter(img, self.kernel_size, self.sigma)
        return adaptive_median(img, self.s_max)


def _int_value(key: str, raw: str, token: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise FilterSpecError(f"{key} expects an integer, got {raw!r}", token) from None


def parse_filter_spec(text: str) -> FilterSpec:
    """Parse ``kind[:key=value[,key=value]*]``, e.g. ``gf:size=3,sigma=0.5``."""
    text = text.strip()
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind not in FILTER_KINDS:
        raise FilterSpecError(f"unknown filter kind {kind!r}", kind)
    kwargs = {}
    if rest.strip():
        for token in rest.split(","):
            key, eq, raw = token.partition("=")
            key, raw = key.strip().lower(), raw.strip()
            if not eq or not raw:
                raise FilterSpecError(f"expected key=value, got {token!r}", token)
            if key not in _PARAM_KEYS[kind]:
                raise FilterSpecError(f"key {key!r} is not valid for filter {kind!r}", token)
            if key == "window":
                kwargs["window"] = _int_value(key, raw, token)
            elif key == "size":
                kwargs["kernel_size"] = _int_value(key, raw, token)
            elif key == "smax":
                kwargs["s_max"] = _int_value(key, raw, token)
            else:
                try:
                    value = float(raw)
                except ValueError:
                    raise FilterSpecError(f"{key} expects a number, got {raw!r}", token) from None
                kwargs["sigma" if key == "sigma" else "noise_variance"] = value
    try:
        return FilterSpec(kind, **kwargs)
    except ValueError as exc:
        raise FilterSpecError(str(exc), text) from None


def parse_filter_list(text: str) -> list[FilterSpec]:
    """Parse a comma list of filter specs.

    A comma also separates parameters inside one spec, so a piece with ``=``
    but no ``:`` continues the preceding spec: ``mf,gf:size=5,sigma=1,smf``.
    """
    groups: list[str] = []
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            raise FilterSpecError("empty filter entry", text)
        if "=" in piece and ":" not in piece:
            if not groups:
                raise FilterSpecError(f"parameter {piece!r} has no filter", piece)
            groups[-1] += "," + piece
        else:
            groups.append(piece)
    return [parse_filter_spec(g) for g in groups]
