"""
Seed-reproducible noise injection: salt & pepper (SPN), additive Gaussian (RVIN)
and multiplicative uniform speckle (SPKN).

Random stream
-------------
Every injector draws from numpy's ``PCG64`` bit generator seeded with
``SeedSequence(seed)``. Raw 64-bit outputs are turned into uniforms on [0, 1)
as ``(raw >> 11) * 2**-53``, consumed in row-major pixel order:

* SPN   one uniform per pixel
* RVIN  two uniforms per pixel (Box-Muller, cosine branch)
* SPKN  one uniform per pixel

Only the PCG64 raw stream is relied on, so outputs do not depend on numpy's
distribution samplers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .image import GrayImage, quantize

SEED_MASK = (1 << 64) - 1


class DensityOutOfRange(ValueError):
    pass


class NoiseKind(str, enum.Enum):
    SPN = "spn"
    RVIN = "rvin"
    SPKN = "spkn"

    @classmethod
    def parse(cls, value) -> "NoiseKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown noise kind {value!r}; expected one of spn, rvin, spkn") from None

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class GaussianNoiseParams:
    """Normal noise in normalized [0, 1] intensity units."""

    mean: float = 0.0
    variance: float = 0.0

    def __post_init__(self):
        if not self.variance >= 0:
            raise ValueError("variance must be >= 0")


@dataclass(frozen=True)
class SaltPepperParams:
    density: float
    salt_fraction: float = 0.5
    salt_value: int = 255
    pepper_value: int = 0

    def __post_init__(self):
        if not 0.0 <= self.density <= 1.0:
            raise DensityOutOfRange(f"density {self.density} not in [0, 1]")
        if not 0.0 <= self.salt_fraction <= 1.0:
            raise ValueError(f"salt_fraction {self.salt_fraction} not in [0, 1]")
        for v in (self.salt_value, self.pepper_value):
            if not 0 <= v <= 255:
                raise ValueError(f"impulse value {v} not in [0, 255]")

    @property
    def p_salt(self) -> float:
        return self.density * self.salt_fraction

    @property
    def p_pepper(self) -> float:
        return self.density * (1.0 - self.salt_fraction)


@dataclass(frozen=True)
class SpeckleParams:
    """Zero-mean uniform multiplier field with the given variance."""

    variance: float = 0.0

    def __post_init__(self):
        if not self.variance >= 0:
            raise ValueError("variance must be >= 0")

    @property
    def half_width(self) -> float:
        return math.sqrt(3.0 * self.variance)


NoiseParams = Union[SaltPepperParams, GaussianNoiseParams, SpeckleParams]


@dataclass(frozen=True)
class NoiseSpec:
    kind: NoiseKind
    density: float
    params: NoiseParams


def density_to_params(kind, density: float) -> NoiseSpec:
    """Map a severity fraction to concrete noise parameters.

    SPN uses it as the corruption probability (split evenly salt/pepper);
    RVIN and SPKN use it as a variance on normalized intensities.
    """
    kind = NoiseKind.parse(kind)
    density = float(density)
    if not 0.0 <= density <= 1.0:
        raise DensityOutOfRange(f"density {density} not in [0, 1]")
    if kind is NoiseKind.SPN:
        params = SaltPepperParams(density, 0.5, 255, 0)
    elif kind is NoiseKind.RVIN:
        params = GaussianNoiseParams(mean=0.0, variance=density)
    else:
        params = SpeckleParams(variance=density)
    return NoiseSpec(kind, density, params)


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= SEED_MASK:
        raise ValueError(f"seed {seed} is not an unsigned 64-bit integer")
    return seed


def uniform_stream(seed: int, count: int) -> np.ndarray:
    """``count`` uniforms on [0, 1) from the documented PCG64 stream."""
    bitgen = np.random.PCG64(np.random.SeedSequence(check_seed(seed)))
    raw = bitgen.random_raw(count)
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def add_salt_pepper(img: GrayImage, params: SaltPepperParams, seed: int) -> GrayImage:
    u = uniform_stream(seed, img.data.size).reshape(img.shape)
    out = img.data.copy()
    corrupt = u < params.density
    salt = u < params.p_salt
    out[corrupt & salt] = params.salt_value
    out[corrupt & ~salt] = params.pepper_value
    return GrayImage(out)


def add_gaussian_noise(img: GrayImage, params: GaussianNoiseParams, seed: int) -> GrayImage:
    n = img.data.size
    u = uniform_stream(seed, 2 * n).reshape(n, 2)
    # 1 - u lies in (0, 1], so the log is finite
    z = np.sqrt(-2.0 * np.log1p(-u[:, 0])) * np.cos(2.0 * np.pi * u[:, 1])
    z = params.mean + math.sqrt(params.variance) * z
    noisy = img.data.astype(np.float64) + 255.0 * z.reshape(img.shape)
    return GrayImage(quantize(noisy))


def add_speckle(img: GrayImage, params: SpeckleParams, seed: int) -> GrayImage:
    a = params.half_width
    u = uniform_stream(seed, img.data.size).reshape(img.shape)
    mult = a * (2.0 * u - 1.0)
    base = img.data.astype(np.float64)
    return GrayImage(quantize(base + mult * base))


def apply_noise(img: GrayImage, spec: NoiseSpec, seed: int) -> GrayImage:
    if spec.kind is NoiseKind.SPN:
        return add_salt_pepper(img, spec.params, seed)
    if spec.kind is NoiseKind.RVIN:
        return add_gaussian_noise(img, spec.params, seed)
    return add_speckle(img, spec.params, seed)
