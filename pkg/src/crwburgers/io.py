"""File formats: field CSV, PGM rasters, JSON metadata, diagram CSV/SVG."""

from __future__ import annotations

import contextlib
import csv
import json
import os
import shutil
import tempfile
from pathlib import Path

import numpy as np

from .maxplus import format_extended, parse_extended

__all__ = [
    "write_field_csv", "read_field_csv", "write_pgm", "read_pgm", "gray_levels",
    "write_json", "write_diagram_csv", "write_diagram_svg", "staged_output",
]


def _token(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format_extended(v)


def write_field_csv(path, rows, index_name="n", first_index=0):
    """One row per time step; the header lists the site indices."""
    rows = np.atleast_2d(np.asarray(rows))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([index_name] + [str(j) for j in range(rows.shape[1])])
        for n, row in enumerate(rows, start=first_index):
            w.writerow([str(n)] + [_token(v) for v in row.tolist()])


def read_field_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        next(r)
        return np.array([[parse_extended(t) for t in row[1:]] for row in r])


def gray_levels(values, scale) -> np.ndarray:
    """0 maps to white (255) and ``scale`` to black (0); clipped to [0, 255]."""
    v = np.asarray(values, dtype=float)
    g = np.rint(255.0 * (1.0 - v / float(scale)))
    return np.clip(g, 0, 255).astype(np.uint8)


def write_pgm(path, rows, scale):
    """Binary P5 raster, time running downward, maxval 255."""
    g = gray_levels(np.atleast_2d(rows), scale)
    height, width = g.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(g.tobytes())


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM")
    width, height = map(int, parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(height, width)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return [_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if np.isfinite(x):
            return x
        return format_extended(x)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_diagram_csv(path, points):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["density", "meanFlow", "flowStd", "n"])
        for p in points:
            w.writerow([repr(p.density), repr(p.meanFlow), repr(p.flowStd), p.sampleCount])


def write_diagram_svg(path, points, L, estimate=None):
    """Scatter of flow against density, deterministic byte for byte."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "crwburgers", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(5, 4))
        ax.plot([p.density for p in points], [p.meanFlow for p in points], "o",
                markersize=3, color="black")
        if estimate is not None and not estimate.degenerate:
            for rho in (estimate.conjectured_rho_low, estimate.conjectured_rho_high):
                ax.axvline(rho, color="gray", linestyle="--", linewidth=0.8)
            ax.axhline(estimate.conjectured_q, color="gray", linestyle=":", linewidth=0.8)
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 0.55)
        ax.set_xlabel("density")
        ax.set_ylabel("flow")
        ax.set_title(f"L = {L}")
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)


@contextlib.contextmanager
def staged_output(out_dir):
    """Yield a scratch directory; its files move into ``out_dir`` only if the
    block finishes without raising."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stage = Path(tempfile.mkdtemp(prefix=".staging-", dir=out))
    try:
        yield stage
    except BaseException:
        shutil.rmtree(stage, ignore_errors=True)
        raise
    for item in sorted(stage.iterdir()):
        os.replace(item, out / item.name)
    stage.rmdir()
