"""Command-line front end: fit, sample, eval, sweep, project, bench.

Exit codes everywhere: 0 success, 1 runtime or numeric failure, 2 usage
error (including missing input files).
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from .bench import run_bench, run_scaling
from .gmm import EmConfig, GmmModel, fit_gmm, sample_gmm
from .grid import quantize_rows
from .io import load_latents, load_model, save_latents, save_model, write_scatter
from .metrics import (SinkhornConfig, frechet_gaussian_distance,
                      gaussian_stats, pca_basis, sinkhorn_distance,
                      total_variation)
from .pmfs import PmfsModel, fit_pmfs, sample_pmfs, partition_weight, sweep_k

OUTSIDE_BIN = ("outside",)


class UsageError(Exception):
    pass


def _detect_format(path, fmt: str) -> str:
    if fmt != "auto":
        return fmt
    return "csv" if str(path).endswith(".csv") else "binary"


def _load(path, fmt: str):
    return load_latents(path, _detect_format(path, fmt))


def cmd_fit(args) -> int:
    data = _load(args.input, args.format)
    t0 = time.perf_counter()
    if args.method == "pmfs":
        if args.k is None:
            raise UsageError("fit --method pmfs requires --k")
        model = fit_pmfs(data, args.k)
    else:
        if args.components is None:
            raise UsageError("fit --method gmm requires --components")
        cfg = EmConfig(max_iterations=args.max_iters, seed=args.seed)
        model = fit_gmm(data, args.components, cfg)
    elapsed = time.perf_counter() - t0
    save_model(model, args.output)
    print(f"fit_seconds {elapsed:.6f}")
    if args.method == "gmm":
        print(f"iterations_used {model.fit_report.iterations_used}")
    return 0


def cmd_sample(args) -> int:
    model = load_model(args.model)
    if isinstance(model, PmfsModel):
        samples = sample_pmfs(model, args.count, args.seed)
    else:
        samples = sample_gmm(model, args.count, args.seed)
    save_latents(samples, args.output, _detect_format(args.output, args.format))
    return 0


def _bin_histogram(data: np.ndarray, model: PmfsModel) -> dict:
    """Bin frequencies of a set under the model's grid.

    Rows outside the fitted box are pooled into a sentinel bin, which by
    construction carries zero model weight.
    """
    grid = model.grid
    inside = ((data >= grid.mins) & (data <= grid.maxes)).all(axis=1)
    counts: dict = {}
    if inside.any():
        for key in map(tuple, quantize_rows(data[inside], grid).tolist()):
            counts[key] = counts.get(key, 0) + 1
    n_out = int((~inside).sum())
    if n_out:
        counts[OUTSIDE_BIN] = n_out
    n = data.shape[0]
    return {key: c / n for key, c in counts.items()}


def cmd_eval(args) -> int:
    a = _load(args.a, args.format)
    b = _load(args.b, args.format)
    if args.metric == "sinkhorn":
        cfg = SinkhornConfig(epsilon=args.epsilon, exponent=args.xi)
        print(f"{sinkhorn_distance(a, b, cfg):.12g}")
        return 0
    if args.metric == "frechet":
        print(f"{frechet_gaussian_distance(gaussian_stats(a), gaussian_stats(b)):.12g}")
        return 0
    # tv-bins
    if args.model is None:
        raise UsageError("eval --metric tv-bins requires --model")
    model = load_model(args.model)
    if not isinstance(model, PmfsModel):
        raise ValueError("tv-bins requires a pmfs model")
    hist_a = _bin_histogram(a, model)
    hist_b = _bin_histogram(b, model)
    print(f"{total_variation(hist_a, hist_b):.12g}")
    unsupported = sum(
        freq for key, freq in hist_a.items()
        if key == OUTSIDE_BIN or partition_weight(model, key) == 0.0
    )
    if unsupported > 0:
        n_bad = round(unsupported * a.shape[0])
        print(f"support check failed: {n_bad} of {a.shape[0]} vectors in "
              f"zero-weight bins", file=sys.stderr)
        return 1
    return 0


def cmd_sweep(args) -> int:
    train = _load(args.train, args.format)
    holdout = _load(args.holdout, args.format)
    k_values = [int(v) for v in args.k_values.split(",") if v]
    results = sweep_k(train, holdout, k_values, args.samples, args.seed)
    with open(args.output, "w") as fh:
        fh.write("k,distance\n")
        for k, dist in results:
            fh.write(f"{k},{dist:.12g}\n")
    for k, dist in results:
        print(f"k={k} distance={dist:.12g}")
    return 0


def cmd_project(args) -> int:
    named = []
    for item in args.inputs.split(","):
        name, _, path = item.partition("=")
        if not name or not path:
            raise UsageError(f"bad --inputs entry {item!r}, expected name=PATH")
        named.append((name, _load(path, args.format)))
    mean, comps = pca_basis(named[0][1], 2)
    projected = [(name, (data - mean) @ comps) for name, data in named]
    write_scatter(projected, args.output)
    return 0


def cmd_bench(args) -> int:
    if args.repeats < 3:
        raise UsageError("--repeats must be >= 3")
    if args.scaling:
        ns = [int(v) for v in args.scaling.split(",") if v]
        results = run_scaling(ns, args.d, args.k, args.components, args.repeats, args.seed)
        for n, seconds in results:
            print(f"n={n} fit_seconds={seconds:.6f}")
        if args.output:
            with open(args.output, "w") as fh:
                fh.write("n,fit_seconds\n")
                for n, seconds in results:
                    fh.write(f"{n},{seconds:.6g}\n")
        return 0
    pm, gm = run_bench(args.n, args.d, args.k, args.components,
                       args.max_iters, args.repeats, args.seed)
    print(pm.line())
    print(gm.line())
    print(f"speedup_ratio={pm.speedup_ratio:.2f}")
    if args.output:
        with open(args.output, "w") as fh:
            fh.write("method,n,d,k,components,iterations_used,repeats,fit_seconds,speedup_ratio\n")
            for rep in (pm, gm):
                fh.write(f"{rep.method},{rep.n},{rep.d},{rep.k or ''},{rep.components or ''},"
                         f"{rep.iterations_used or ''},{rep.repeats},"
                         f"{rep.fit_seconds:.6g},{rep.speedup_ratio:.4g}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latentsample",
        description="Density estimation and sampling over latent sets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a sampler and write it to disk")
    p.add_argument("--method", choices=["pmfs", "gmm"], required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--components", type=int)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["auto", "csv", "binary"], default="auto")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("sample", help="draw vectors from a fitted model")
    p.add_argument("--model", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.add_argument("--format", choices=["auto", "csv", "binary"], default="auto")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("eval", help="print a distance between two latent sets")
    p.add_argument("--metric", choices=["sinkhorn", "frechet", "tv-bins"], required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--xi", type=float, default=2.0)
    p.add_argument("--model", help="pmfs model for tv-bins; its grid defines the bins")
    p.add_argument("--format", choices=["auto", "csv", "binary"], default="auto")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="distance vs cell count on a holdout")
    p.add_argument("--train", required=True)
    p.add_argument("--holdout", required=True)
    p.add_argument("--k-values", default="1,2,4,8,16")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.add_argument("--format", choices=["auto", "csv", "binary"], default="auto")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("project", help="project named sets to 2-D for scatter plots")
    p.add_argument("--inputs", required=True,
                   help="name=PATH[,name=PATH...]; PCA basis comes from the first set")
    p.add_argument("--output", required=True)
    p.add_argument("--format", choices=["auto", "csv", "binary"], default="auto")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("bench", help="time both fitters on synthetic data")
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--d", type=int, default=32)
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--components", type=int, default=10)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.add_argument("--scaling", help="comma-separated dataset sizes; time pmfs fits only")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
