"""Uniform per-dimension quantization of latent vectors.

A latent set is a plain float64 array of shape (n, d).  Fitting a grid
records per-dimension bounds and splits each dimension into k equal cells;
a vector's cell key is

    key[j] = floor(k * (z[j] - min[j]) / (max[j] - min[j]))

clamped to k - 1 so the dimension maximum falls in the last cell.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import minmax_pass, quantize_pass


def as_latent_set(data, allow_empty: bool = False) -> np.ndarray:
    """Validate and return a (n, d) float64 C-contiguous latent set.

    A 1-D input is read as n scalar latents, i.e. a (n, 1) column.
    """
    arr = np.ascontiguousarray(data, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[1] < 1:
        raise ValueError(f"latent set must be 2-D with d >= 1, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise ValueError(f"non-finite value at row {bad[0]}, column {bad[1]}")
    if not allow_empty and arr.shape[0] == 0:
        raise ValueError("cannot fit on empty latent set")
    return arr


@dataclass(frozen=True)
class QuantizationGrid:
    """Cell geometry: k cells per dimension over the box [mins, maxes]."""

    k: int
    mins: np.ndarray
    maxes: np.ndarray
    widths: np.ndarray

    @classmethod
    def from_bounds(cls, mins, maxes, k: int) -> "QuantizationGrid":
        if k < 1:
            raise ValueError("k must be positive")
        mins = np.asarray(mins, dtype=np.float64)
        maxes = np.asarray(maxes, dtype=np.float64)
        if mins.shape != maxes.shape or mins.ndim != 1:
            raise ValueError("dimension mismatch")
        if (maxes < mins).any():
            raise ValueError("maxes must be >= mins")
        return cls(k=int(k), mins=mins, maxes=maxes, widths=(maxes - mins) / k)

    @property
    def dim(self) -> int:
        return self.mins.shape[0]

    def __eq__(self, other):
        if not isinstance(other, QuantizationGrid):
            return NotImplemented
        return (
            self.k == other.k
            and np.array_equal(self.mins, other.mins)
            and np.array_equal(self.maxes, other.maxes)
        )


def compute_bounds(latents) -> tuple[np.ndarray, np.ndarray]:
    """Per-dimension (mins, maxes) of a non-empty latent set; single pass."""
    data = as_latent_set(latents)
    mins, maxes, _ = minmax_pass(data)
    return mins, maxes


def fit_grid(latents, k: int) -> QuantizationGrid:
    """Bounds pass + grid construction in one call."""
    mins, maxes = compute_bounds(latents)
    return QuantizationGrid.from_bounds(mins, maxes, k)


def quantize_rows(latents, grid: QuantizationGrid) -> np.ndarray:
    """Cell keys for every row; rows must lie inside the grid box."""
    data = as_latent_set(latents, allow_empty=True)
    if data.shape[1] != grid.dim:
        raise ValueError("dimension mismatch")
    below = data < grid.mins
    above = data > grid.maxes
    if below.any() or above.any():
        row = int(np.argwhere(below | above)[0][0])
        raise ValueError(f"vector outside grid bounds (row {row})")
    keys, _ = quantize_pass(data, grid.mins, grid.maxes, grid.k)
    return keys


def quantize_vector(z, grid: QuantizationGrid) -> np.ndarray:
    """Cell key of one vector (length-d int64 array)."""
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 1 or z.shape[0] != grid.dim:
        raise ValueError("dimension mismatch")
    return quantize_rows(z.reshape(1, -1), grid)[0]


def partition_bounds(key, grid: QuantizationGrid) -> tuple[np.ndarray, np.ndarray]:
    """(lower, upper) corners of a cell: lower = min + key * width."""
    key = np.asarray(key, dtype=np.int64)
    if key.ndim != 1 or key.shape[0] != grid.dim:
        raise ValueError("dimension mismatch")
    lower = grid.mins + key * grid.widths
    upper = lower + grid.widths
    return lower, upper
