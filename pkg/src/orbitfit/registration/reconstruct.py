"""Mirrored-orbit reconstruction pipeline.

Mirrors the skull across the midsagittal plane and registers the mirrored
mesh back onto the original, restricted to an intact-bone ROI: rigid
always, optionally refined by a global affine or a CPD deformation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError
from ..geometry import (
    AffineTransform,
    MirrorPlane,
    RigidTransform,
    SpatialIndex,
    TriangleMesh,
)
from .cpd import CpdParams, DeformationField, cpd_nonrigid
from .icp import IcpParams, icp_affine, icp_rigid

METHODS = ("rigid", "affine", "cpd")


def farthest_point_sample(points, count, seed=42) -> np.ndarray:
    """Indices of a deterministic farthest-point subsample. The seed picks
    the starting point; the greedy growth is deterministic after that."""
    points = np.asarray(points, dtype=float)
    if count >= len(points):
        return np.arange(len(points))
    rng = np.random.default_rng(seed)
    start = int(rng.integers(len(points)))
    chosen = np.empty(count, dtype=np.int64)
    chosen[0] = start
    dist = np.linalg.norm(points - points[start], axis=1)
    for k in range(1, count):
        nxt = int(np.argmax(dist))
        chosen[k] = nxt
        dist = np.minimum(dist, np.linalg.norm(points - points[nxt], axis=1))
    return np.sort(chosen)


@dataclass(frozen=True)
class ReconstructionResult:
    method: str
    transform: RigidTransform | AffineTransform
    deformation: DeformationField | None
    reconstructed_orbit: TriangleMesh
    residual_rms: float


def _roi_mask(mesh, roi):
    if roi is None:
        return np.ones(mesh.n_vertices, dtype=bool)
    roi = np.asarray(roi, dtype=bool)
    if roi.shape != (mesh.n_vertices,):
        raise InvalidInputError("roi mask length must equal skull vertex count")
    if not roi.any():
        raise InvalidInputError("roi mask selects no vertices")
    return roi


def reconstruct_orbit(
    skull: TriangleMesh,
    plane: MirrorPlane,
    roi=None,
    method: str = "rigid",
    icp: IcpParams | None = None,
    cpd: CpdParams | None = None,
    cpd_sample_count: int = 3000,
    seed: int = 42,
) -> ReconstructionResult:
    """Reconstruct the pre-injury orbit from the mirrored contralateral side.

    roi marks intact-bone vertices (by skull vertex index) used for
    correspondence and for the reported residual; the fracture region
    should be excluded. The returned mesh is the transformed (and, for
    cpd, deformed) mirrored skull.
    """
    if method not in METHODS:
        raise InvalidInputError(f"method must be one of {METHODS}, got {method!r}")
    icp = icp or IcpParams(seed=seed)
    cpd = cpd or CpdParams()
    roi = _roi_mask(skull, roi)

    mirrored = skull.mirrored(plane)
    target = skull if roi.all() else skull.submesh(roi)
    index = SpatialIndex(target)
    source_points = mirrored.vertices[roi]

    rigid_tf, rigid_rms = icp_rigid(source_points, index, params=icp)

    if method == "rigid":
        return ReconstructionResult(
            "rigid", rigid_tf, None, mirrored.transformed(rigid_tf), rigid_rms
        )

    if method == "affine":
        affine_tf, affine_rms = icp_affine(source_points, index, init=rigid_tf, params=icp)
        return ReconstructionResult(
            "affine", affine_tf, None, mirrored.transformed(affine_tf), affine_rms
        )

    # cpd: deform the rigidly aligned mirrored mesh onto the target
    aligned = mirrored.transformed(rigid_tf)
    src_idx = farthest_point_sample(aligned.vertices[roi], cpd_sample_count, seed)
    dst_idx = farthest_point_sample(target.vertices, cpd_sample_count, seed)
    field = cpd_nonrigid(
        aligned.vertices[roi][src_idx], target.vertices[dst_idx], cpd
    )
    deformed = aligned.with_vertices(field.apply(aligned.vertices))
    residual = index.distances(deformed.vertices[roi])
    cpd_rms = float(np.sqrt(np.mean(residual**2)))
    return ReconstructionResult("cpd", rigid_tf, field, deformed, cpd_rms)
