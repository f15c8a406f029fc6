"""Density estimation and sampling over autoencoder latent spaces.

Two samplers over a set of latent vectors — a quantized cell-histogram model
whose samples never leave the neighborhood of training data, and a Gaussian
mixture baseline fitted by EM — plus transport and Frechet metrics to compare
them, binary/CSV persistence, and a benchmarking CLI.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .bench import BenchReport, make_mixture_dataset, run_bench, run_scaling
from .gmm import (EmConfig, EmFitReport, GmmModel, fit_gmm, init_kmeanspp,
                  log_likelihood, sample_gmm)
from .grid import (QuantizationGrid, as_latent_set, compute_bounds, fit_grid,
                   partition_bounds, quantize_rows, quantize_vector)
from .io import load_latents, load_model, save_latents, save_model, write_scatter
from .metrics import (GaussianStats, SinkhornConfig, SinkhornDidNotConverge,
                      frechet_gaussian_distance, gaussian_stats,
                      matrix_sqrt_psd, pca_basis, pca_project,
                      sinkhorn_distance, total_variation, wasserstein_1d_exact)
from .pmfs import PmfsModel, fit_pmfs, partition_weight, sample_pmfs, sweep_k

__version__ = "0.1.0"

__all__ = [
    "BenchReport",
    "EmConfig",
    "EmFitReport",
    "GaussianStats",
    "GmmModel",
    "KERNEL_BACKEND",
    "PmfsModel",
    "QuantizationGrid",
    "SinkhornConfig",
    "SinkhornDidNotConverge",
    "as_latent_set",
    "compute_bounds",
    "fit_gmm",
    "fit_grid",
    "fit_pmfs",
    "frechet_gaussian_distance",
    "gaussian_stats",
    "init_kmeanspp",
    "load_latents",
    "load_model",
    "log_likelihood",
    "make_mixture_dataset",
    "matrix_sqrt_psd",
    "partition_bounds",
    "partition_weight",
    "pca_basis",
    "pca_project",
    "quantize_rows",
    "quantize_vector",
    "run_bench",
    "run_scaling",
    "sample_gmm",
    "sample_pmfs",
    "save_latents",
    "save_model",
    "sinkhorn_distance",
    "sweep_k",
    "total_variation",
    "wasserstein_1d_exact",
    "write_scatter",
]
