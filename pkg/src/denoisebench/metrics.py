"""MSE and PSNR for 8-bit images (peak 255)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .image import GrayImage

PEAK = 255
PEAK_SQUARED = PEAK * PEAK

INFINITE = math.inf


class DimensionMismatch(ValueError):
    pass


class NegativeMse(ValueError):
    pass


@dataclass(frozen=True)
class QualityReport:
    mse: float
    psnr_db: float

    def __post_init__(self):
        if not self.mse >= 0:
            raise NegativeMse(f"mse must be >= 0, got {self.mse!r}")

    @property
    def is_lossless(self) -> bool:
        return self.psnr_db == INFINITE

    def as_csv(self) -> str:
        return f"{format_value(self.mse)},{format_value(self.psnr_db)}"


def format_value(v: float) -> str:
    """Two decimals; infinity renders as ``inf``."""
    if v == math.inf:
        return "inf"
    return f"{v:.2f}"


def mse(a: GrayImage, b: GrayImage) -> float:
    if a.shape != b.shape:
        raise DimensionMismatch(f"image sizes differ: {a.width}x{a.height} vs {b.width}x{b.height}")
    diff = a.data.astype(np.int64) - b.data.astype(np.int64)
    # integer sum is exact; one division at the end
    return int(np.sum(diff * diff)) / diff.size


def psnr(mse_value: float) -> QualityReport:
    if not mse_value >= 0:
        raise NegativeMse(f"mse must be >= 0, got {mse_value!r}")
    if mse_value == 0:
        return QualityReport(0.0, INFINITE)
    return QualityReport(float(mse_value), 10.0 * math.log10(PEAK_SQUARED / mse_value))


def evaluate(reference: GrayImage, candidate: GrayImage) -> QualityReport:
    return psnr(mse(reference, candidate))
