"""
Density-sweep benchmark: noise kinds x densities x filters, scored by MSE/PSNR,
rendered as per-noise tables (CSV), long-format plot data and a JSON grid.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .filters import FilterSpec
from .image import GrayImage
from .metrics import QualityReport, format_value, mse, psnr
from .noise import SEED_MASK, NoiseKind, apply_noise, check_seed, density_to_params

DEFAULT_DENSITIES = (0.10, 0.20, 0.30, 0.40, 0.50, 0.60)
DEFAULT_FILTERS = tuple(FilterSpec(k) for k in ("mf", "awf", "gf", "smf", "amf"))
ALL_KINDS = (NoiseKind.SPN, NoiseKind.RVIN, NoiseKind.SPKN)
MSE_REFERENCES = ("original", "noisy")

_KIND_CODE = {NoiseKind.SPN: 1, NoiseKind.RVIN: 2, NoiseKind.SPKN: 3}


class SweepError(RuntimeError):
    """A filter or metric failed; the message names the offending cell."""


# --- seeding ---------------------------------------------------------------

def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & SEED_MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & SEED_MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & SEED_MASK
    return x ^ (x >> 31)


def derive_cell_seed(master_seed: int, noise_kind, density: float, trial: int) -> int:
    """Per-cell seed: SplitMix64 chained over (kind code, density bits, trial).

    ``h = master; for w in (kind_code, float64_bits(density), trial): h = splitmix64(h ^ w)``
    with kind codes spn=1, rvin=2, spkn=3.
    """
    h = check_seed(master_seed)
    kind = NoiseKind.parse(noise_kind)
    (density_bits,) = struct.unpack("<Q", struct.pack("<d", float(density)))
    for word in (_KIND_CODE[kind], density_bits, int(trial) & SEED_MASK):
        h = _splitmix64(h ^ word)
    return h


# --- configuration and results ---------------------------------------------

@dataclass(frozen=True)
class SweepConfig:
    input_image: GrayImage
    noise_kinds: Sequence[NoiseKind] = ALL_KINDS
    densities: Sequence[float] = DEFAULT_DENSITIES
    filters: Sequence[FilterSpec] = DEFAULT_FILTERS
    master_seed: int = 0
    trials: int = 1
    mse_reference: str = "original"

    def __post_init__(self):
        kinds = tuple(NoiseKind.parse(k) for k in self.noise_kinds)
        object.__setattr__(self, "noise_kinds", kinds)
        object.__setattr__(self, "densities", tuple(float(d) for d in self.densities))
        object.__setattr__(self, "filters", tuple(self.filters))
        check_seed(self.master_seed)
        if not kinds or not self.densities or not self.filters:
            raise ValueError("noise kinds, densities and filters must be non-empty")
        if len(set(kinds)) != len(kinds):
            raise ValueError("duplicate noise kind")
        for d in self.densities:
            if not 0.0 <= d <= 1.0:
                raise ValueError(f"density {d} not in [0, 1]")
        if any(b <= a for a, b in zip(self.densities, self.densities[1:])):
            raise ValueError("densities must be strictly increasing")
        labels = [f.label for f in self.filters]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate filter in {labels}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError("trials must be a positive integer")
        if self.mse_reference not in MSE_REFERENCES:
            raise ValueError(f"mse_reference must be one of {MSE_REFERENCES}")

    def echo(self) -> dict:
        return {
            "image": {"width": self.input_image.width, "height": self.input_image.height},
            "noise_kinds": [k.value for k in self.noise_kinds],
            "densities": list(self.densities),
            "filters": [f.label for f in self.filters],
            "master_seed": self.master_seed,
            "trials": self.trials,
            "mse_reference": self.mse_reference,
        }


@dataclass(frozen=True)
class Cell:
    noise: NoiseKind
    density: float
    filter: str
    report: QualityReport
    seeds: tuple[int, ...]

    @property
    def seed(self) -> int:
        return self.seeds[0]


@dataclass
class ResultGrid:
    config: dict
    cells: dict = field(default_factory=dict)

    @property
    def noise_kinds(self) -> list[NoiseKind]:
        return [NoiseKind(k) for k in self.config["noise_kinds"]]

    @property
    def densities(self) -> list[float]:
        return list(self.config["densities"])

    @property
    def filters(self) -> list[str]:
        return list(self.config["filters"])

    def cell(self, kind, density: float, filter_label: str) -> Cell:
        return self.cells[(NoiseKind.parse(kind), float(density), filter_label)]

    def series(self, kind, filter_label: str, metric: str = "psnr") -> list[float]:
        """Metric values for one (noise, filter) pair across densities."""
        return [_metric(self.cell(kind, d, filter_label).report, metric) for d in self.densities]

    def to_json(self) -> bytes:
        cells = {}
        for (kind, density, label), c in self.cells.items():
            cells[f"{kind.value}/{density!r}/{label}"] = {
                "noise": kind.value,
                "filter": label,
                "density": density,
                "mse": c.report.mse,
                "psnr_db": "inf" if c.report.psnr_db == math.inf else c.report.psnr_db,
                "seed": c.seed,
                "trial_seeds": list(c.seeds),
            }
        doc = {"config": self.config, "cells": cells}
        return (json.dumps(doc, indent=2, allow_nan=False) + "\n").encode("utf-8")


def _metric(report: QualityReport, metric: str) -> float:
    if metric == "psnr":
        return report.psnr_db
    if metric == "mse":
        return report.mse
    raise ValueError(f"metric must be 'psnr' or 'mse', got {metric!r}")


# --- sweep -----------------------------------------------------------------

def _run_unit(config: SweepConfig, kind: NoiseKind, density: float, trial: int):
    seed = derive_cell_seed(config.master_seed, kind, density, trial)
    original = config.input_image
    noisy = apply_noise(original, density_to_params(kind, density), seed)
    reference = original if config.mse_reference == "original" else noisy
    errors = []
    for spec in config.filters:
        try:
            errors.append(mse(reference, spec.apply(noisy)))
        except Exception as exc:
            raise SweepError(
                f"cell noise={kind.value} density={density:g} filter={spec.label} "
                f"trial={trial}: {exc}"
            ) from exc
    return seed, errors


def run_sweep(config: SweepConfig, workers: int = 1) -> ResultGrid:
    """Run every (noise, density, trial) unit and average MSE over trials per cell.

    Results do not depend on ``workers``: seeds are derived per unit and the
    reduction runs in a fixed order after all units finish.
    """
    units = [(k, d, t) for k in config.noise_kinds for d in config.densities
             for t in range(config.trials)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda u: _run_unit(config, *u), units))
    else:
        outcomes = [_run_unit(config, *u) for u in units]

    by_unit = dict(zip(units, outcomes))
    grid = ResultGrid(config.echo())
    for kind in config.noise_kinds:
        for density in config.densities:
            trials = [by_unit[(kind, density, t)] for t in range(config.trials)]
            seeds = tuple(seed for seed, _ in trials)
            for i, spec in enumerate(config.filters):
                mean_mse = math.fsum(errs[i] for _, errs in trials) / config.trials
                grid.cells[(kind, density, spec.label)] = Cell(
                    kind, density, spec.label, psnr(mean_mse), seeds)
    return grid


# --- rendering -------------------------------------------------------------

def percent_label(density: float) -> str:
    return format(density * 100.0, ".10g") + "%"


def _writer(buf: io.StringIO):
    return csv.writer(buf, lineterminator="\n")


def emit_csv(grid: ResultGrid, metric: str = "psnr",
             kinds: Optional[Iterable] = None) -> bytes:
    """Table-shaped CSV: one block per noise kind, blank line between blocks.

    Each block is a header ``filter,10%,...`` and one row per filter.
    """
    kinds = grid.noise_kinds if kinds is None else [NoiseKind.parse(k) for k in kinds]
    blocks = []
    for kind in kinds:
        buf = io.StringIO()
        w = _writer(buf)
        w.writerow(["filter"] + [percent_label(d) for d in grid.densities])
        for label in grid.filters:
            w.writerow([label] + [format_value(v) for v in grid.series(kind, label, metric)])
        blocks.append(buf.getvalue())
    return "\n".join(blocks).encode("utf-8")


def emit_plot_data(grid: ResultGrid, metric: str = "psnr") -> bytes:
    """Long-format ``noise,filter,density,metric_value`` sorted by (noise, filter, density)."""
    rows = []
    for (kind, density, label), c in grid.cells.items():
        rows.append((kind.value, label, density, _metric(c.report, metric)))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(["noise", "filter", "density", "metric_value"])
    for noise, label, density, value in rows:
        w.writerow([noise, label, format(density, ".10g"), format_value(value)])
    return buf.getvalue().encode("utf-8")


def write_outputs(grid: ResultGrid, out_dir, plot_metric: str = "psnr") -> list[str]:
    """Write per-noise PSNR/MSE tables, the plot CSV and the JSON grid; return file names."""
    os.makedirs(out_dir, exist_ok=True)
    files = {}
    for kind in grid.noise_kinds:
        for metric in ("psnr", "mse"):
            files[f"{metric}_{kind.value}.csv"] = emit_csv(grid, metric, [kind])
    files[f"plot_{plot_metric}.csv"] = emit_plot_data(grid, plot_metric)
    files["grid.json"] = grid.to_json()
    for name, payload in files.items():
        with open(os.path.join(out_dir, name), "wb") as fh:
            fh.write(payload)
    return list(files)
