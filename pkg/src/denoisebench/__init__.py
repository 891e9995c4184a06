"""Grayscale noise models, restoration filters and a PSNR/MSE density-sweep benchmark."""

from .image import GrayImage, load_pgm, save_pgm, read_pgm, write_pgm, pad_replicate, window
from .noise import (
    NoiseKind,
    NoiseSpec,
    density_to_params,
    add_salt_pepper,
    add_gaussian_noise,
    add_speckle,
    apply_noise,
)
from .filters import (
    FilterSpec,
    Kernel2D,
    gaussian_kernel,
    convolve2d,
    mean_filter,
    gaussian_filter,
    median_filter,
    adaptive_wiener,
    adaptive_median,
    parse_filter_spec,
)
from .metrics import QualityReport, mse, psnr, evaluate
from .bench import SweepConfig, ResultGrid, derive_cell_seed, run_sweep, emit_csv, emit_plot_data
from .synthetic import saturn_like

__version__ = "0.1.0"
