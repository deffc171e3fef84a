"""Signed-distance heatmaps: red-green-blue colormap, histogram, export."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import InvalidInputError
from ..geometry import TriangleMesh, save_mesh

DEFAULT_RANGE = (-5.0, 5.0)
HISTOGRAM_BIN_WIDTH = 0.25  # mm


def distance_colors(values, lo=DEFAULT_RANGE[0], hi=DEFAULT_RANGE[1]) -> np.ndarray:
    """Linear red -> green -> blue over [lo, hi], clamped. lo maps to pure
    red, the midpoint to pure green, hi to pure blue."""
    if lo >= hi:
        raise InvalidInputError(f"display range must have lo < hi, got ({lo}, {hi})")
    t = np.clip((np.asarray(values, dtype=float) - lo) / (hi - lo), 0.0, 1.0)
    r = np.clip(1.0 - 2.0 * t, 0.0, 1.0)
    b = np.clip(2.0 * t - 1.0, 0.0, 1.0)
    g = 1.0 - r - b
    rgb = np.stack([r, g, b], axis=1)
    return np.rint(255.0 * rgb).astype(np.uint8)


def distance_histogram(values, lo=DEFAULT_RANGE[0], hi=DEFAULT_RANGE[1],
                       bin_width=HISTOGRAM_BIN_WIDTH):
    """Rows of (bin_lo, bin_hi, count) with an underflow bin below lo and
    an overflow bin above hi; interior bins are [edge, edge+width), the
    last interior bin closed at hi. Counts always total len(values)."""
    if lo >= hi:
        raise InvalidInputError(f"histogram range must have lo < hi, got ({lo}, {hi})")
    values = np.asarray(values, dtype=float)
    n_bins = int(np.ceil((hi - lo) / bin_width - 1e-12))
    edges = lo + bin_width * np.arange(n_bins + 1)
    edges[-1] = hi
    under = int((values < lo).sum())
    over = int((values > hi).sum())
    interior = values[(values >= lo) & (values <= hi)]
    idx = np.minimum(((interior - lo) / bin_width).astype(int), n_bins - 1)
    counts = np.bincount(idx, minlength=n_bins)
    rows = [(-np.inf, lo, under)]
    rows += [(float(edges[k]), float(edges[k + 1]), int(counts[k])) for k in range(n_bins)]
    rows.append((hi, np.inf, over))
    return rows


def write_histogram_csv(rows, path) -> None:
    lines = ["bin_lo_mm,bin_hi_mm,count"]
    for lo, hi, count in rows:
        lines.append(f"{lo:.6f},{hi:.6f},{count}")
    Path(path).write_text("\n".join(lines) + "\n")


def generate_heatmap(plate_mesh: TriangleMesh, distances, ply_path, histogram_path,
                     display_range=DEFAULT_RANGE):
    """Write the colored heatmap PLY (per-vertex scalar + 8-bit color) and
    the histogram CSV. Returns (colors, histogram rows)."""
    lo, hi = display_range
    distances = np.asarray(distances, dtype=float)
    if distances.shape != (plate_mesh.n_vertices,):
        raise InvalidInputError(
            f"distances length {distances.shape} != vertex count {plate_mesh.n_vertices}"
        )
    colors = distance_colors(distances, lo, hi)
    save_mesh(plate_mesh, ply_path, scalars=distances, colors=colors)
    rows = distance_histogram(distances, lo, hi)
    write_histogram_csv(rows, histogram_path)
    return colors, rows
