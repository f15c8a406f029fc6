"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines; the whole suite takes a few minutes, dominated by the benchmark
criterion.  Tolerances are pinned here and nowhere else.
"""

from __future__ import annotations

import collections
import re
import time

import numpy as np
import pytest

from latentsample import (EmConfig, GaussianStats, SinkhornConfig, fit_gmm,
                          fit_pmfs, frechet_gaussian_distance, gaussian_stats,
                          load_latents, load_model, quantize_rows,
                          quantize_vector, sample_gmm, sample_pmfs,
                          save_latents, save_model, sinkhorn_distance,
                          sweep_k, total_variation, wasserstein_1d_exact)
from latentsample.bench import median_seconds
from latentsample.cli import main
from latentsample.grid import QuantizationGrid
from latentsample.metrics import _cost_matrix


def report(ok: bool, label: str, detail: str):
    print(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")
    assert ok, f"{label}: {detail}"


def zero_weight_hits(samples: np.ndarray, model) -> int:
    """Vectors outside the box or in cells that hold no training data."""
    grid = model.grid
    inside = ((samples >= grid.mins) & (samples <= grid.maxes)).all(axis=1)
    hits = int((~inside).sum())
    if inside.any():
        keys, counts = np.unique(
            quantize_rows(samples[inside], grid), axis=0, return_counts=True
        )
        for key, cnt in zip(keys, counts):
            if tuple(int(v) for v in key) not in model.counts:
                hits += int(cnt)
    return hits


def test_criterion_01_golden_quantization():
    grid = QuantizationGrid.from_bounds([-19.0, -5.0, 0.0], [5.7, 3.0, 20.0], 10)
    key = quantize_vector([1.5, 2.6, 8.0], grid)
    report(key.tolist() == [8, 9, 4], "criterion 1 (golden quantization)",
           f"key={key.tolist()}, expected [8, 9, 4]")


def test_criterion_02_pmf_axioms():
    rng = np.random.default_rng(20_240_001)
    worst_gap = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 5001))
        d = int(rng.integers(1, 65))
        k = int(rng.integers(1, 33))
        data = rng.normal(size=(n, d)) * rng.uniform(0.1, 10)
        model = fit_pmfs(data, k)
        weights = np.array(list(model.weights.values()))
        assert (weights > 0).all()
        worst_gap = max(worst_gap, abs(float(weights.sum()) - 1.0))
    report(worst_gap <= 1e-12, "criterion 2 (PMF axioms)",
           f"200 datasets, all weights > 0, worst |sum - 1| = {worst_gap:.2e} <= 1e-12")


def test_criterion_03_no_outlier_guarantee():
    rng = np.random.default_rng(20_240_002)
    total = bad = 0
    for i in range(20):
        d = int(rng.integers(1, 7))
        n = int(rng.integers(50, 3000))
        k = int(rng.integers(1, 33))
        data = rng.normal(size=(n, d)) * rng.uniform(0.05, 20)
        if i % 3 == 0:
            data[:, 0] = np.round(data[:, 0])  # lumpy marginals
        if i % 5 == 0:
            data[:, -1] = 1.25  # degenerate dimension
        model = fit_pmfs(data, k)
        samples = sample_pmfs(model, 100_000, seed=i)
        inside = ((samples >= model.grid.mins) & (samples <= model.grid.maxes)).all()
        assert inside
        bad += zero_weight_hits(samples, model)
        total += len(samples)
    report(bad == 0, "criterion 3 (no-outlier guarantee)",
           f"{total - bad}/{total} samples in positively weighted cells, all inside the box")


def test_criterion_04_sampling_fidelity():
    rng = np.random.default_rng(2024)
    centers = np.array([[0, 0], [5, 2], [-3, 4]], float)
    datasets = [
        (np.vstack([c + 0.3 * rng.normal(size=(400, 2)) for c in centers]), 6),
        (np.concatenate([rng.normal(0, 0.2, 600), rng.normal(3, 0.5, 400)]).reshape(-1, 1), 12),
        (rng.normal(size=(2000, 3)), 4),
        (np.full((50, 4), 2.5), 3),
        (rng.normal(size=(3000, 2)), 8),
        (rng.exponential(1.0, 1500).reshape(-1, 1), 16),
    ]
    worst = 0.0
    for seed, (data, k) in enumerate(datasets):
        model = fit_pmfs(data, k)
        assert model.num_cells <= 100
        samples = sample_pmfs(model, 100_000, seed)
        counter = collections.Counter(map(tuple, quantize_rows(samples, model.grid).tolist()))
        empirical = {key: c / 100_000 for key, c in counter.items()}
        worst = max(worst, total_variation(empirical, model.weights))
    report(worst < 0.01, "criterion 4 (sampling fidelity)",
           f"6 models (1..{max(len(m[0]) for m in datasets)} rows), worst TV = {worst:.4f} < 0.01")


def test_criterion_05_fit_cost_law():
    rng = np.random.default_rng(20_240_003)
    for n, d, k in [(1, 1, 1), (10, 3, 2), (500, 17, 5), (2000, 33, 32), (10_000, 32, 8)]:
        model = fit_pmfs(rng.normal(size=(n, d)), k)
        assert model.fit_visits == 2 * n * d, (n, d, k)

    base = rng.normal(size=(10_000, 32))
    double = rng.normal(size=(20_000, 32))
    t_base = median_seconds(lambda: fit_pmfs(base, 8), repeats=7)
    t_double = median_seconds(lambda: fit_pmfs(double, 8), repeats=7)
    ratio = t_double / t_base
    report(1.3 <= ratio <= 3.0, "criterion 5 (fit-cost law)",
           f"element visits = 2nd for all cases; time(2e4)/time(1e4) = {ratio:.2f} in [1.3, 3]")


def test_criterion_06_speedup_reproduction(capsys):
    code = main(["bench", "--n", "10000", "--d", "32", "--k", "8",
                 "--components", "10", "--max-iters", "100",
                 "--repeats", "3", "--seed", "0"])
    out = capsys.readouterr().out
    assert code == 0
    match = re.search(r"speedup_ratio=([0-9.]+)", out)
    assert match is not None
    ratio = float(match.group(1))
    with capsys.disabled():
        report(ratio > 50, "criterion 6 (speedup reproduction)",
               f"bench speedup_ratio = {ratio:.1f} > 50")


def test_criterion_07_em_correctness():
    worst_drop = 0.0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        data = np.vstack([
            rng.normal(size=(80, 2)) * rng.uniform(0.3, 1.5),
            rng.normal(size=(80, 2)) * rng.uniform(0.3, 1.5) + rng.uniform(1, 6),
        ])
        model = fit_gmm(data, 3, EmConfig(seed=seed))
        lls = model.fit_report.log_likelihoods
        drops = [max(0.0, a - b) for a, b in zip(lls, lls[1:])]
        worst_drop = max(worst_drop, max(drops, default=0.0))
    assert worst_drop <= 1e-9

    # enough rows that estimator noise (sigma/sqrt(n)) sits far inside 0.1*sigma
    sigma = 0.5
    rng = np.random.default_rng(77)
    data = np.vstack([rng.normal(size=(2000, 2)) * sigma,
                      rng.normal(size=(2000, 2)) * sigma + 5.0])
    model = fit_gmm(data, 2, EmConfig(seed=1))
    means = model.means[np.argsort(model.means[:, 0])]
    err = max(np.abs(means[0] - 0.0).max(), np.abs(means[1] - 5.0).max())
    report(err < 0.1 * sigma, "criterion 7 (EM correctness)",
           f"50 runs monotone (worst drop {worst_drop:.2e} <= 1e-9); "
           f"cluster means off by {err:.4f} < {0.1 * sigma}")


def test_criterion_08_gmm_outlier_contrast():
    rng = np.random.default_rng(20_240_004)
    data = np.vstack([
        rng.normal(size=(1000, 1)) * 0.02,
        rng.normal(size=(1000, 1)) * 0.02 + 1.0,
    ])
    pmfs_model = fit_pmfs(data, 8)
    gmm_model = fit_gmm(data, 2, EmConfig(seed=0))

    gmm_bad = zero_weight_hits(sample_gmm(gmm_model, 1_000_000, 42), pmfs_model)
    pmfs_bad = zero_weight_hits(sample_pmfs(pmfs_model, 1_000_000, 42), pmfs_model)
    report(gmm_bad >= 1 and pmfs_bad == 0, "criterion 8 (GMM-outlier contrast)",
           f"GMM put {gmm_bad}/1000000 samples in zero-weight cells; histogram sampler {pmfs_bad}")


def test_criterion_09_metric_oracles():
    closed_form = frechet_gaussian_distance(
        GaussianStats(np.array([0.0]), np.array([[1.0]])),
        GaussianStats(np.array([1.0]), np.array([[4.0]])),
    )
    assert closed_form == pytest.approx(2.0, abs=1e-8)

    stats = gaussian_stats(np.random.default_rng(1).normal(size=(200, 4)))
    assert frechet_gaussian_distance(stats, stats) <= 1e-8

    a = np.random.default_rng(2).normal(size=(80, 3))
    assert sinkhorn_distance(a, a.copy()) <= 1e-6

    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(20):
        x = rng.normal(size=(50, 1)) * rng.uniform(0.5, 2) + rng.uniform(-1, 1)
        y = rng.normal(size=(50, 1)) * rng.uniform(0.5, 2) + rng.uniform(-1, 1)
        eps = 0.01 * float(np.median(_cost_matrix(x, y, 2.0)))
        cfg = SinkhornConfig(epsilon=eps, max_iterations=20_000, tolerance=1e-4)
        approx = sinkhorn_distance(x, y, cfg)
        exact = wasserstein_1d_exact(x.ravel(), y.ravel(), 2.0)
        worst = max(worst, abs(approx - exact) / exact)
    report(worst <= 0.03, "criterion 9 (metric oracles)",
           f"closed form {closed_form:.9f} ~= 2; identical stats/sets at 0; "
           f"20 pairs vs exact 1-D transport, worst rel err {worst:.4%} <= 3%")


def test_criterion_10_sweep_sanity():
    rng = np.random.default_rng(31)
    centers = np.array([[0, 0], [4, 1], [-2, 3]], float)
    data = np.vstack([c + 0.25 * rng.normal(size=(120, 2)) for c in centers])
    results = dict(sweep_k(data, data, [1, 2, 4, 8, 16], 300, seed=11))
    best = min(results[k] for k in (2, 4, 8, 16))
    report(best < results[1], "criterion 10 (sweep sanity)",
           f"best distance over k in {{2,4,8,16}} = {best:.4f} "
           f"< box-uniform k=1 distance {results[1]:.4f}")


def test_criterion_11_io_round_trips(tmp_path):
    data = np.random.default_rng(3).normal(size=(100, 8))
    latents_path = tmp_path / "latents.bin"
    save_latents(data, latents_path, "binary")
    bits_ok = load_latents(latents_path, "binary").tobytes() == data.tobytes()

    model = fit_pmfs(np.random.default_rng(4).normal(size=(500, 3)), 7)
    model_path = tmp_path / "model.json"
    save_model(model, model_path)
    reloaded = load_model(model_path)
    samples_ok = (
        sample_pmfs(reloaded, 10_000, 9).tobytes() == sample_pmfs(model, 10_000, 9).tobytes()
    )
    report(bits_ok and samples_ok, "criterion 11 (I/O round trips)",
           "binary latents bit-exact; reloaded model samples byte-identical")