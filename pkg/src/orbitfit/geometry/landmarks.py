"""Labeled landmark sets and their file formats (markups-json, fcsv)."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import InvalidInputError, ParseError


class LandmarkSet:
    """Ordered (label, position) entries; labels unique within a set.
    Correspondence between two sets is by matching label, never index."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        seen = set()
        clean = []
        for label, position in entries:
            if not isinstance(label, str) or not label:
                raise InvalidInputError(f"landmark label must be non-empty text, got {label!r}")
            if label in seen:
                raise InvalidInputError(f"duplicate landmark label {label!r}")
            seen.add(label)
            position = np.asarray(position, dtype=float)
            if position.shape != (3,) or not np.all(np.isfinite(position)):
                raise InvalidInputError(f"landmark {label!r} has invalid position")
            clean.append((label, position))
        self.entries = tuple(clean)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def labels(self):
        return [label for label, _ in self.entries]

    def get(self, label) -> np.ndarray:
        for name, position in self.entries:
            if name == label:
                return position
        raise KeyError(label)

    def __contains__(self, label):
        return label in self.labels

    def positions(self) -> np.ndarray:
        return np.array([p for _, p in self.entries])

    def matched(self, other: "LandmarkSet"):
        """Positions of label-shared landmarks, ordered by this set."""
        src, dst = [], []
        for label, position in self.entries:
            if label in other:
                src.append(position)
                dst.append(other.get(label))
        return np.array(src), np.array(dst)

    def transformed(self, transform) -> "LandmarkSet":
        return LandmarkSet(
            [(label, transform.apply(position)) for label, position in self.entries]
        )

    def __repr__(self):
        return f"LandmarkSet({self.labels})"


def _from_markups_json(path):
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(path, f"invalid JSON: {exc.msg}", line=exc.lineno)
    entries = []
    markups = doc.get("markups")
    if not isinstance(markups, list):
        raise ParseError(path, "missing 'markups' array")
    for markup in markups:
        for cp in markup.get("controlPoints", []):
            label = cp.get("label")
            position = cp.get("position")
            if position is None:
                raise ParseError(path, f"control point {label!r} has no position")
            entries.append((label, position))
    return entries


def _from_fcsv(path):
    entries = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split(",")
        if len(fields) < 4:
            raise ParseError(path, f"row has {len(fields)} fields, need at least 4", line=lineno)
        try:
            position = [float(fields[1]), float(fields[2]), float(fields[3])]
        except ValueError:
            raise ParseError(path, "non-numeric coordinate", line=lineno)
        # standard fcsv puts the label in column 11; short rows fall back
        # to the last field
        label = fields[11] if len(fields) > 11 else fields[-1]
        entries.append((label.strip(), position))
    if not entries:
        raise ParseError(path, "no data rows", line=1)
    return entries


def load_landmarks(path, fmt=None) -> LandmarkSet:
    """Load a landmark file. fmt: "markups-json" | "fcsv"; None sniffs from
    the extension. Positions are taken as stored (mm, RAS)."""
    path = Path(path)
    if not path.exists():
        raise InvalidInputError(f"landmark file not found: {path}")
    if fmt is None:
        fmt = "fcsv" if path.suffix.lower() == ".fcsv" else "markups-json"
    if fmt == "markups-json":
        entries = _from_markups_json(path)
    elif fmt == "fcsv":
        entries = _from_fcsv(path)
    else:
        raise InvalidInputError(f"unknown landmark format {fmt!r}")
    return LandmarkSet(entries)


def save_landmarks(landmarks: LandmarkSet, path) -> None:
    """Write the markups-json subset this package reads."""
    doc = {
        "markups": [
            {
                "type": "Fiducial",
                "controlPoints": [
                    {"label": label, "position": list(map(float, position))}
                    for label, position in landmarks
                ],
            }
        ]
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
