"""Timing harness for the fitting-speed comparison.

Synthetic data stands in for encoder outputs: a seeded mixture of spherical
Gaussians whose centers sit close together relative to their spread, so EM
has genuine work to do.  Timings are medians over repeated runs with one
discarded warm-up, which is sturdier than single measurements at this scale.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .gmm import EmConfig, fit_gmm
from .pmfs import fit_pmfs
from .rng import CounterRng


@dataclass
class BenchReport:
    method: str
    n: int
    d: int
    fit_seconds: float
    repeats: int
    k: int | None = None
    components: int | None = None
    iterations_used: int | None = None
    speedup_ratio: float | None = None

    def line(self) -> str:
        parts = [f"method={self.method}", f"n={self.n}", f"d={self.d}"]
        if self.k is not None:
            parts.append(f"k={self.k}")
        if self.components is not None:
            parts.append(f"components={self.components}")
        if self.iterations_used is not None:
            parts.append(f"iterations_used={self.iterations_used}")
        parts.append(f"repeats={self.repeats}")
        parts.append(f"fit_seconds={self.fit_seconds:.6f}")
        return " ".join(parts)


def make_mixture_dataset(n: int, d: int, components: int, seed: int,
                         center_scale: float = 0.5, sigma: float = 1.0) -> np.ndarray:
    """Seeded overlapping mixture of ``components`` spherical Gaussians.

    RNG layout: components*d normals for the centers, n uniforms for the
    component assignments, then n*d normals for the offsets; reproducible
    across machines from the seed alone.
    """
    rng = CounterRng(seed)
    centers = rng.normals(components * d).reshape(components, d) * center_scale
    assign = np.minimum((rng.uniforms(n) * components).astype(np.int64), components - 1)
    return centers[assign] + rng.normals(n * d).reshape(n, d) * sigma


def median_seconds(fn, repeats: int, warmup: bool = True) -> float:
    """Median wall-clock time of ``fn`` over ``repeats`` runs, warm-up discarded."""
    if repeats < 3:
        raise ValueError("repeats must be >= 3")
    if warmup:
        fn()
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def bench_pmfs(data: np.ndarray, k: int, repeats: int) -> BenchReport:
    n, d = data.shape
    seconds = median_seconds(lambda: fit_pmfs(data, k), repeats)
    return BenchReport(method="pmfs", n=n, d=d, k=k, fit_seconds=seconds, repeats=repeats)


def bench_gmm(data: np.ndarray, components: int, max_iterations: int,
              repeats: int, seed: int) -> BenchReport:
    n, d = data.shape
    cfg = EmConfig(max_iterations=max_iterations, seed=seed)
    model = fit_gmm(data, components, cfg)  # doubles as the warm-up run
    seconds = median_seconds(lambda: fit_gmm(data, components, cfg), repeats, warmup=False)
    return BenchReport(
        method="gmm", n=n, d=d, components=components, fit_seconds=seconds,
        repeats=repeats, iterations_used=model.fit_report.iterations_used,
    )


def run_bench(n: int, d: int, k: int, components: int, max_iterations: int,
              repeats: int, seed: int) -> tuple[BenchReport, BenchReport]:
    """Time both fits on one synthetic dataset; attaches the speedup ratio."""
    data = make_mixture_dataset(n, d, components, seed)
    pmfs_report = bench_pmfs(data, k, repeats)
    gmm_report = bench_gmm(data, components, max_iterations, repeats, seed)
    ratio = gmm_report.fit_seconds / pmfs_report.fit_seconds
    pmfs_report.speedup_ratio = ratio
    gmm_report.speedup_ratio = ratio
    return pmfs_report, gmm_report


def run_scaling(ns, d: int, k: int, components: int, repeats: int, seed: int):
    """Median histogram-fit seconds per dataset size, for the linearity check."""
    out = []
    for n in ns:
        data = make_mixture_dataset(n, d, components, seed)
        out.append((n, median_seconds(lambda: fit_pmfs(data, k), repeats)))
    return out
