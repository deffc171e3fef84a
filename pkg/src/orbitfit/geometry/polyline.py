"""Open 3D polylines and equal-arc-length resampling."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import InvalidInputError, ParseError

_MIN_SEGMENT = 1e-9  # mm


class Polyline:
    """Ordered point chain; consecutive points strictly distinct."""

    __slots__ = ("points", "name")

    def __init__(self, points, name=""):
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != 3 or len(points) < 2:
            raise InvalidInputError("polyline needs at least two 3D points")
        if not np.all(np.isfinite(points)):
            raise InvalidInputError("polyline contains non-finite coordinates")
        seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
        if np.any(seg <= _MIN_SEGMENT):
            raise InvalidInputError("polyline has coincident consecutive points")
        self.points = points
        self.name = str(name)
        self.points.setflags(write=False)

    def __len__(self):
        return len(self.points)

    def arc_lengths(self) -> np.ndarray:
        """Cumulative arc length, starting at 0."""
        seg = np.linalg.norm(np.diff(self.points, axis=0), axis=1)
        return np.concatenate([[0.0], np.cumsum(seg)])

    def length(self) -> float:
        return float(self.arc_lengths()[-1])

    def transformed(self, transform) -> "Polyline":
        return Polyline(transform.apply(self.points), self.name)

    def __repr__(self):
        return f"Polyline({self.name!r}, {len(self.points)} points)"


def resample_polyline(curve: Polyline, n: int) -> Polyline:
    """n points at equal arc-length spacing along `curve`; the first and
    last output points are the curve endpoints, bit for bit."""
    if n < 2:
        raise InvalidInputError(f"resample count must be >= 2, got {n}")
    cumulative = curve.arc_lengths()
    total = cumulative[-1]
    targets = np.linspace(0.0, total, n)
    seg_idx = np.clip(np.searchsorted(cumulative, targets, side="right") - 1, 0, len(curve) - 2)
    seg_start = cumulative[seg_idx]
    seg_len = cumulative[seg_idx + 1] - seg_start
    t = (targets - seg_start) / seg_len
    pts = curve.points[seg_idx] * (1.0 - t[:, None]) + curve.points[seg_idx + 1] * t[:, None]
    pts[0] = curve.points[0]
    pts[-1] = curve.points[-1]
    return Polyline(pts, curve.name)


def load_polyline(path, name="") -> Polyline:
    """Read an ordered curve from a markups-json (controlPoints order) or
    fcsv file; point labels are ignored, duplicates allowed."""
    path = Path(path)
    if not path.exists():
        raise InvalidInputError(f"curve file not found: {path}")
    points = []
    if path.suffix.lower() == ".fcsv":
        for lineno, line in enumerate(path.read_text().splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split(",")
            if len(fields) < 4:
                raise ParseError(path, "curve row needs id,x,y,z", line=lineno)
            points.append([float(fields[1]), float(fields[2]), float(fields[3])])
    else:
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ParseError(path, f"invalid JSON: {exc.msg}", line=exc.lineno)
        for markup in doc.get("markups", []):
            for cp in markup.get("controlPoints", []):
                position = cp.get("position")
                if position is None:
                    raise ParseError(path, "control point has no position")
                points.append(position)
    if len(points) < 2:
        raise ParseError(path, f"curve has {len(points)} points, need at least 2")
    return Polyline(points, name=name)


def save_polyline(curve: Polyline, path) -> None:
    doc = {
        "markups": [
            {
                "type": "Curve",
                "controlPoints": [
                    {"label": str(i + 1), "position": list(map(float, p))}
                    for i, p in enumerate(curve.points)
                ],
            }
        ]
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
