"""Alignment algorithms: landmark rigid, trimmed ICP, CPD, and the
mirrored-orbit reconstruction pipeline."""

from .cpd import CoherentPointDrift, CpdParams, DeformationField, cpd_nonrigid
from .icp import AffineIcp, IcpParams, RigidIcp, icp_affine, icp_rigid
from .landmark import LandmarkRigidAlign, landmark_rigid_align, rigid_from_correspondences
from .reconstruct import (
    ReconstructionResult,
    farthest_point_sample,
    reconstruct_orbit,
)
from .serialize import (
    load_deformation,
    load_transform,
    save_deformation,
    save_transform,
)

__all__ = [
    "AffineIcp",
    "CoherentPointDrift",
    "CpdParams",
    "DeformationField",
    "IcpParams",
    "LandmarkRigidAlign",
    "ReconstructionResult",
    "RigidIcp",
    "cpd_nonrigid",
    "farthest_point_sample",
    "icp_affine",
    "icp_rigid",
    "landmark_rigid_align",
    "load_deformation",
    "load_transform",
    "reconstruct_orbit",
    "rigid_from_correspondences",
    "save_deformation",
    "save_transform",
]
