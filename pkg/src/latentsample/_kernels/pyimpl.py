"""Pure NumPy kernels: the fallback backend.

Every function here has a compiled twin in ``_core.pyx``.  The two must stay
bit-identical: the same IEEE-754 double operations in the same order per
element, and the same counter-based RNG positions.  Tests compare the
backends bitwise, so any change here must be mirrored in the .pyx file.

Visit counts tally one visit per latent-set element per pass; the fit
performs exactly two passes (bounds, then quantize).
"""

from __future__ import annotations

import numpy as np

from ..rng import uniforms_at


def minmax_pass(data: np.ndarray):
    """Per-column minima and maxima in one bounds pass.

    Returns (mins, maxes, visits) where visits == data.size.
    """
    mins = np.min(data, axis=0)
    maxes = np.max(data, axis=0)
    return mins, maxes, data.size


def quantize_pass(data: np.ndarray, mins: np.ndarray, maxes: np.ndarray, k: int):
    """Map rows to integer cell keys: floor(k * (x - min) / (max - min)).

    The floor of the full expression is taken, then clamped to k - 1 so the
    per-dimension maximum lands in the last cell.  Zero-width dimensions map
    to cell 0.  Callers guarantee data is inside [mins, maxes].

    Returns (keys, visits) with keys an int64 (n, d) array, visits == data.size.
    """
    span = maxes - mins
    safe = np.where(span > 0, span, 1.0)
    keys = np.floor(k * (data - mins) / safe).astype(np.int64)
    np.minimum(keys, k - 1, out=keys)
    keys[:, span == 0.0] = 0
    return keys, data.size


def draw_cells(
    cum: np.ndarray,
    keys: np.ndarray,
    lowers: np.ndarray,
    uppers: np.ndarray,
    mins: np.ndarray,
    maxes: np.ndarray,
    k: int,
    count: int,
    seed: int,
) -> np.ndarray:
    """Draw ``count`` vectors: pick a cell by cumulative weight, fill uniformly.

    RNG layout: sample s consumes uniforms at positions s*(1+d) (cell choice)
    and s*(1+d)+1+j (coordinate j).  Each coordinate is clamped into its cell
    and, if floating-point rounding at a cell edge would re-quantize it into a
    neighboring cell, replaced by the cell midpoint.  That keeps the advertised
    guarantee airtight: every output re-quantizes to the cell that was drawn.
    """
    m, d = lowers.shape
    if count == 0:
        return np.empty((0, d), dtype=np.float64)

    u = uniforms_at(seed, 0, count * (1 + d)).reshape(count, 1 + d)
    sel = np.searchsorted(cum, u[:, 0], side="right")
    np.minimum(sel, m - 1, out=sel)

    lo = lowers[sel]
    hi = uppers[sel]
    out = lo + u[:, 1:] * (hi - lo)
    np.clip(out, lo, hi, out=out)

    span = maxes - mins
    safe = np.where(span > 0, span, 1.0)
    requant = np.floor(k * (out - mins) / safe).astype(np.int64)
    np.minimum(requant, k - 1, out=requant)
    requant[:, span == 0.0] = 0
    off_cell = requant != keys[sel]
    if off_cell.any():
        mid = 0.5 * (lo + hi)
        out[off_cell] = mid[off_cell]
    return out
