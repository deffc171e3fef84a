"""Plate model: mesh, posterior stop, registration landmarks, edge curves."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import InvalidPlateError, SchemaVersionError
from ..geometry import (
    LandmarkSet,
    Polyline,
    SpatialIndex,
    TriangleMesh,
    load_landmarks,
    load_mesh,
    load_polyline,
)

CANONICAL_CURVES = (
    "anterior_floor",
    "anterior_medial_wall",
    "lateral_floor",
    "superior_medial_wall",
    "floor_wall_junction",
)

CURVE_SURFACE_TOL = 1.0  # mm: edge curves must hug the plate surface
PLATE_SCHEMA_VERSION = 1


class PlateModel:
    """A preformed plate in its own coordinate frame.

    `stop_point` is the labeled posterior-stop location; `edge_curves`
    holds exactly the five canonical curves, each verified to lie within
    1 mm of the plate surface. Replacing a curve keeps the original in
    `curve_history` for comparison.
    """

    __slots__ = (
        "plate_id", "mesh", "stop_label", "stop_point",
        "registration_landmarks", "edge_curves", "curve_history",
        "vendor", "size_class", "_index",
    )

    def __init__(self, plate_id, mesh, stop_label, registration_landmarks,
                 edge_curves, vendor="", size_class="", curve_history=None):
        if not isinstance(mesh, TriangleMesh):
            raise InvalidPlateError("plate mesh must be a TriangleMesh")
        if stop_label not in registration_landmarks:
            raise InvalidPlateError(
                f"stop point label {stop_label!r} not present in plate landmarks"
            )
        names = sorted(edge_curves)
        if names != sorted(CANONICAL_CURVES):
            missing = sorted(set(CANONICAL_CURVES) - set(names))
            extra = sorted(set(names) - set(CANONICAL_CURVES))
            detail = []
            if missing:
                detail.append(f"missing {missing}")
            if extra:
                detail.append(f"unknown {extra}")
            raise InvalidPlateError(f"edge curves invalid: {'; '.join(detail)}")
        self.plate_id = str(plate_id)
        self.mesh = mesh
        self.stop_label = stop_label
        self.stop_point = registration_landmarks.get(stop_label)
        self.registration_landmarks = registration_landmarks
        self.vendor = vendor
        self.size_class = size_class
        self.curve_history = dict(curve_history or {})
        self._index = SpatialIndex(mesh)
        for name in CANONICAL_CURVES:
            self._check_curve_on_surface(edge_curves[name])
        self.edge_curves = {name: edge_curves[name] for name in CANONICAL_CURVES}

    def _check_curve_on_surface(self, curve: Polyline):
        dist = self._index.distances(curve.points)
        worst = float(dist.max())
        if worst > CURVE_SURFACE_TOL:
            raise InvalidPlateError(
                f"curve {curve.name!r} strays {worst:.3f} mm from the plate "
                f"surface (limit {CURVE_SURFACE_TOL} mm)"
            )

    def with_curve(self, curve_name, new_polyline: Polyline) -> "PlateModel":
        """Replace one canonical curve; the previous version is retained in
        curve_history."""
        if curve_name not in CANONICAL_CURVES:
            raise InvalidPlateError(f"unknown curve name {curve_name!r}")
        curves = dict(self.edge_curves)
        history = {k: list(v) for k, v in self.curve_history.items()}
        history.setdefault(curve_name, []).append(curves[curve_name])
        curves[curve_name] = Polyline(new_polyline.points, curve_name)
        return PlateModel(
            self.plate_id, self.mesh, self.stop_label,
            self.registration_landmarks, curves,
            vendor=self.vendor, size_class=self.size_class,
            curve_history=history,
        )

    def surface_index(self) -> SpatialIndex:
        return self._index

    def __repr__(self):
        return f"PlateModel({self.plate_id!r}, {self.mesh.n_vertices} vertices)"


def update_edge_curve(plate: PlateModel, curve_name, new_polyline) -> PlateModel:
    return plate.with_curve(curve_name, new_polyline)


def load_plate(manifest_path) -> PlateModel:
    """Load a plate from its JSON manifest (mesh file, stop-point label,
    landmark file, five curve files; paths relative to the manifest)."""
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise InvalidPlateError(f"plate manifest not found: {manifest_path}")
    doc = json.loads(manifest_path.read_text())
    version = doc.get("schema_version", 1)
    if version > PLATE_SCHEMA_VERSION:
        raise SchemaVersionError(version, PLATE_SCHEMA_VERSION)
    base = manifest_path.parent
    for key in ("plate_id", "mesh", "landmarks", "stop_point_label", "edge_curves"):
        if key not in doc:
            raise InvalidPlateError(f"{manifest_path}: manifest missing {key!r}")
    mesh = load_mesh(base / doc["mesh"])
    landmarks = load_landmarks(base / doc["landmarks"])
    curves = {}
    for name, rel in doc["edge_curves"].items():
        curves[name] = load_polyline(base / rel, name=name)
    return PlateModel(
        plate_id=doc["plate_id"],
        mesh=mesh,
        stop_label=doc["stop_point_label"],
        registration_landmarks=landmarks,
        edge_curves=curves,
        vendor=doc.get("vendor", ""),
        size_class=doc.get("size_class", ""),
    )
