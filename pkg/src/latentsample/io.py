"""File formats for latent sets and fitted models.

Latent sets travel in two formats:

* binary — header ``LATV`` (4 bytes), version u32 = 1, n u64, d u64, all
  little-endian, followed by the n*d float64 payload row-major
  little-endian.  Bit-exact round trips.
* csv — comma-separated decimal rows, one optional header line
  (auto-detected as a non-numeric first row); written with 17 significant
  digits so values survive the round trip.

Models persist as JSON with a kind tag.  Histogram models store occupied
cell keys with integer counts plus n — never floating weights — so a
reloaded model samples byte-identically.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .gmm import GmmModel
from .grid import QuantizationGrid, as_latent_set
from .pmfs import PmfsModel

_MAGIC = b"LATV"
_VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


def save_latents(latents, path, format: str = "binary") -> None:
    """Write a latent set; the inverse of load_latents."""
    data = as_latent_set(latents, allow_empty=True)
    if format == "binary":
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(_MAGIC, _VERSION, data.shape[0], data.shape[1]))
            fh.write(np.ascontiguousarray(data, dtype="<f8").tobytes())
    elif format == "csv":
        with open(path, "w") as fh:
            for row in data:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    else:
        raise ValueError(f"unknown format {format!r}")


def load_latents(path, format: str = "binary") -> np.ndarray:
    if format == "binary":
        return _load_binary(path)
    if format == "csv":
        return _load_csv(path)
    raise ValueError(f"unknown format {format!r}")


def _load_binary(path) -> np.ndarray:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) == 0:
        raise ValueError(f"{path}: empty file")
    if len(blob) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, version, n, d = _HEADER.unpack_from(blob)
    if magic != _MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != _VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    expected = _HEADER.size + n * d * 8
    if len(blob) != expected:
        raise ValueError(f"{path}: payload length {len(blob) - _HEADER.size}, expected {n * d * 8}")
    data = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size).reshape(n, d).astype(np.float64)
    return as_latent_set(data, allow_empty=True)


def _load_csv(path) -> np.ndarray:
    rows = []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            try:
                values = [float(c) for c in cells]
            except ValueError:
                if lineno == 1:
                    continue  # header line
                raise ValueError(f"{path}:{lineno}: unparseable row") from None
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise ValueError(
                    f"{path}:{lineno}: ragged row ({len(values)} columns, expected {width})"
                )
            for col, v in enumerate(values):
                if not np.isfinite(v):
                    raise ValueError(f"{path}:{lineno}: non-finite value in column {col}")
            rows.append(values)
    if not rows:
        raise ValueError(f"{path}: empty file")
    return np.array(rows, dtype=np.float64)


def save_model(model, path) -> None:
    """Persist a fitted model as a kind-tagged JSON document."""
    if isinstance(model, PmfsModel):
        keys = sorted(model.counts)
        doc = {
            "kind": "pmfs",
            "k": model.grid.k,
            "n": model.n,
            "mins": model.grid.mins.tolist(),
            "maxes": model.grid.maxes.tolist(),
            "keys": [list(key) for key in keys],
            "counts": [model.counts[key] for key in keys],
        }
    elif isinstance(model, GmmModel):
        doc = {
            "kind": "gmm",
            "weights": model.weights.tolist(),
            "means": model.means.tolist(),
            "covariances": model.covariances.tolist(),
        }
    else:
        raise ValueError(f"cannot save model of type {type(model).__name__}")
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_model(path):
    """Load a model saved by save_model; never yields a partial model."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not a valid model file ({exc})") from None
    kind = doc.get("kind")
    if kind == "pmfs":
        return _pmfs_from_doc(doc, path)
    if kind == "gmm":
        return _gmm_from_doc(doc, path)
    raise ValueError(f"{path}: unknown model kind {kind!r}")


def _pmfs_from_doc(doc, path) -> PmfsModel:
    try:
        grid = QuantizationGrid.from_bounds(doc["mins"], doc["maxes"], doc["k"])
        n = int(doc["n"])
        keys = doc["keys"]
        counts = doc["counts"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{path}: malformed pmfs model ({exc})") from None
    if len(keys) != len(counts):
        raise ValueError(f"{path}: keys/counts length mismatch")
    count_map = {}
    for key, cnt in zip(keys, counts):
        key = tuple(int(v) for v in key)
        if len(key) != grid.dim:
            raise ValueError(f"{path}: key dimension mismatch")
        if any(idx < 0 or idx >= grid.k for idx in key):
            raise ValueError(f"{path}: key {key} outside [0, k-1]")
        if int(cnt) < 1 or key in count_map:
            raise ValueError(f"{path}: invalid cell count for {key}")
        count_map[key] = int(cnt)
    try:
        return PmfsModel(grid, count_map, n)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None


def _gmm_from_doc(doc, path) -> GmmModel:
    try:
        return GmmModel(doc["weights"], doc["means"], doc["covariances"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{path}: malformed gmm model ({exc})") from None


def write_scatter(sets, path) -> None:
    """Emit named 2-D point sets as a label,x,y CSV for plotting."""
    rows = []
    for name, data in sets:
        data = as_latent_set(data, allow_empty=True)
        if data.shape[1] != 2:
            raise ValueError(f"set {name!r} has d={data.shape[1]}, scatter needs d=2")
        for x, y in data:
            rows.append(f"{name},{x:.17g},{y:.17g}\n")
    with open(path, "w") as fh:
        fh.write("label,x,y\n")
        fh.writelines(rows)
