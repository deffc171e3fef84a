"""The two conformity metrics: plate-wide signed distances and
edge-specific curve distances.

Plate-wide distances are signed (negative beneath the reconstructed
orbit, positive above). Edge distances are unsigned projection lengths:
each canonical curve is resampled to evenly spaced points, each point
projected to its closest orbit point.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError
from ..geometry import SpatialIndex, TriangleMesh, resample_polyline
from .collision import CollisionReport, detect_collisions
from .plate import CANONICAL_CURVES, PlateModel

DEFAULT_SAMPLES_PER_CURVE = 10


def plate_wide_distances(plate_mesh: TriangleMesh, orbit_index: SpatialIndex,
                         transform=None) -> np.ndarray:
    """One signed mm value per plate vertex, against the reconstructed
    orbit (which must be oriented with normals toward 'above')."""
    points = plate_mesh.vertices if transform is None else transform.apply(plate_mesh.vertices)
    return orbit_index.signed_distances(points)


@dataclass(frozen=True)
class EdgeReport:
    curve_name: str
    point_distances: np.ndarray   # unsigned mm, samples_per_curve values
    projected_points: np.ndarray  # on the orbit surface
    mean: float


def edge_distances(plate: PlateModel, orbit_index: SpatialIndex, transform=None,
                   samples_per_curve: int = DEFAULT_SAMPLES_PER_CURVE):
    """EdgeReports for the five canonical curves, in canonical order."""
    if samples_per_curve < 2:
        raise InvalidInputError("samples_per_curve must be >= 2")
    reports = []
    for name in CANONICAL_CURVES:
        curve = plate.edge_curves[name]
        if transform is not None:
            curve = curve.transformed(transform)
        sampled = resample_polyline(curve, samples_per_curve)
        projected, _, dist, _ = orbit_index.closest_points(sampled.points)
        reports.append(
            EdgeReport(
                curve_name=name,
                point_distances=dist,
                projected_points=projected,
                mean=float(dist.mean()),
            )
        )
    return reports


@dataclass(frozen=True)
class FitReport:
    plate_id: str
    plate_wide: np.ndarray          # signed mm per plate vertex
    edge_reports: tuple             # five EdgeReport, canonical order
    overall_edge_mean: float        # mean over all edge sample distances
    collision: CollisionReport
    plate_mesh: TriangleMesh        # plate under placement, for heatmap export

    def edge_means(self) -> dict:
        return {r.curve_name: r.mean for r in self.edge_reports}


def compute_fit_report(plate: PlateModel, placement_transform, orbit_index: SpatialIndex,
                       bone_index: SpatialIndex | None = None,
                       samples_per_curve: int = DEFAULT_SAMPLES_PER_CURVE,
                       penetration_tol: float = 0.0) -> FitReport:
    """Full per-plate conformity report for one placement."""
    moved = plate.mesh.transformed(placement_transform)
    wide = plate_wide_distances(moved, orbit_index)
    edges = edge_distances(plate, orbit_index, transform=placement_transform,
                           samples_per_curve=samples_per_curve)
    all_dist = np.concatenate([r.point_distances for r in edges])
    if bone_index is not None:
        collision = detect_collisions(moved, bone_index, penetration_tol)
    else:
        collision = CollisionReport(0, moved.n_vertices, 0.0, ())
    return FitReport(
        plate_id=plate.plate_id,
        plate_wide=wide,
        edge_reports=tuple(edges),
        overall_edge_mean=float(all_dist.mean()),
        collision=collision,
        plate_mesh=moved,
    )
