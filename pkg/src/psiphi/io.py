"""Point-cloud CSV and plain-text PGM rasters."""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

CSV_FORMAT = "%.17g"


def format_float(v: float) -> str:
    return CSV_FORMAT % (float(v) + 0.0)


def cloud_to_csv(points) -> str:
    """One point per line, coordinates comma-separated, lexicographically sorted."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    pts = pts[np.lexsort(pts.T[::-1])] + 0.0
    buf = io.StringIO()
    np.savetxt(buf, pts, fmt=CSV_FORMAT, delimiter=",")
    return buf.getvalue()


def write_cloud_csv(path, points) -> None:
    Path(path).write_text(cloud_to_csv(points))


def read_cloud_csv(path) -> np.ndarray:
    text = Path(path).read_text()
    if not text.strip():
        raise ValueError(f"{path}: empty point cloud (compact sets are nonempty)")
    arr = np.loadtxt(io.StringIO(text), delimiter=",", ndmin=2)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{path}: non-finite coordinates")
    return arr


def rasterize(points, width: int = 800) -> np.ndarray:
    """Occupancy raster: 0 (dark) where a point falls, 255 elsewhere.

    1-D clouds give a single row; 2-D clouds a ``width x width`` square over
    the bounding square, first row at the top (largest y).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    dim = pts.shape[1]
    if dim not in (1, 2):
        raise ValueError("rasters are available for 1-D and 2-D clouds only")
    if width < 1:
        raise ValueError("raster width must be positive")
    lo = pts.min(axis=0)
    span = float((pts.max(axis=0) - lo).max())
    if span == 0:
        lo = lo - 0.5
        span = 1.0
    cells = np.clip(np.floor((pts - lo) / span * width).astype(np.int64), 0, width - 1)
    if dim == 1:
        img = np.full((1, width), 255, dtype=np.int64)
        img[0, cells[:, 0]] = 0
    else:
        img = np.full((width, width), 255, dtype=np.int64)
        img[width - 1 - cells[:, 1], cells[:, 0]] = 0
    return img


def pgm_text(img: np.ndarray) -> str:
    h, w = img.shape
    lines = ["P2", f"{w} {h}", "255"]
    lines.extend(" ".join(str(v) for v in row) for row in img)
    return "\n".join(lines) + "\n"


def write_pgm(path, points, width: int = 800) -> None:
    Path(path).write_text(pgm_text(rasterize(points, width)))


def read_pgm(path) -> np.ndarray:
    tokens = Path(path).read_text().split()
    if tokens[0] != "P2":
        raise ValueError("not a plain PGM file")
    w, h = int(tokens[1]), int(tokens[2])
    return np.array([int(t) for t in tokens[4:4 + w * h]]).reshape(h, w)
