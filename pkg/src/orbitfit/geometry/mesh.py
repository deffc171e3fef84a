"""Indexed triangle surface with angle-weighted vertex normals."""
from __future__ import annotations

import numpy as np

from ..errors import InvalidInputError
from .transforms import AffineTransform, MirrorPlane, RigidTransform

DEGENERATE_AREA = 1e-12  # mm^2


def _triangle_areas(vertices, triangles):
    a = vertices[triangles[:, 0]]
    b = vertices[triangles[:, 1]]
    c = vertices[triangles[:, 2]]
    return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)


def angle_weighted_normals(vertices, triangles):
    """Per-vertex normals: face normals accumulated with the interior
    angle at each corner as weight, then normalized."""
    a = vertices[triangles[:, 0]]
    b = vertices[triangles[:, 1]]
    c = vertices[triangles[:, 2]]
    face = np.cross(b - a, c - a)
    face_len = np.linalg.norm(face, axis=1)
    face_unit = face / face_len[:, None]

    def corner_angle(p, q, r):
        u = q - p
        v = r - p
        nu = np.linalg.norm(u, axis=1)
        nv = np.linalg.norm(v, axis=1)
        cosang = np.einsum("ij,ij->i", u, v) / (nu * nv)
        return np.arccos(np.clip(cosang, -1.0, 1.0))

    weights = np.stack(
        [corner_angle(a, b, c), corner_angle(b, c, a), corner_angle(c, a, b)], axis=1
    )
    normals = np.zeros_like(vertices)
    for corner in range(3):
        np.add.at(normals, triangles[:, corner], weights[:, corner, None] * face_unit)
    lengths = np.linalg.norm(normals, axis=1)
    if np.any(lengths < 1e-20):
        raise InvalidInputError("mesh has a vertex with a vanishing normal")
    return normals / lengths[:, None]


class TriangleMesh:
    """Immutable indexed triangle mesh in mm.

    Construction validates the full set of invariants: in-range indices,
    no degenerate triangles, every vertex referenced. Use
    :func:`orbitfit.geometry.meshio.load_mesh` for file input, which cleans
    before constructing.
    """

    __slots__ = ("vertices", "triangles", "vertex_normals", "_cache")

    def __init__(self, vertices, triangles):
        vertices = np.ascontiguousarray(np.asarray(vertices, dtype=float))
        triangles = np.ascontiguousarray(np.asarray(triangles, dtype=np.int64))
        if vertices.ndim != 2 or vertices.shape[1] != 3 or len(vertices) == 0:
            raise InvalidInputError("vertices must be a non-empty (n,3) array")
        if triangles.ndim != 2 or triangles.shape[1] != 3 or len(triangles) == 0:
            raise InvalidInputError("triangles must be a non-empty (m,3) array")
        if not np.all(np.isfinite(vertices)):
            raise InvalidInputError("vertices contain non-finite values")
        if triangles.min() < 0 or triangles.max() >= len(vertices):
            raise InvalidInputError("triangle index out of range")
        areas = _triangle_areas(vertices, triangles)
        if np.any(areas <= DEGENERATE_AREA):
            bad = int(np.argmax(areas <= DEGENERATE_AREA))
            raise InvalidInputError(
                f"triangle {bad} is degenerate (area {areas[bad]:.3e} mm^2)"
            )
        used = np.zeros(len(vertices), dtype=bool)
        used[triangles.ravel()] = True
        if not used.all():
            raise InvalidInputError(
                f"{int((~used).sum())} vertices are not referenced by any triangle"
            )
        self.vertices = vertices
        self.triangles = triangles
        self.vertex_normals = angle_weighted_normals(vertices, triangles)
        self.vertices.setflags(write=False)
        self.triangles.setflags(write=False)
        self.vertex_normals.setflags(write=False)
        self._cache = {}

    # -- basic measures -------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def triangle_corners(self) -> np.ndarray:
        """(m,3,3) array of triangle corner coordinates."""
        return self.vertices[self.triangles]

    def surface_area(self) -> float:
        return float(_triangle_areas(self.vertices, self.triangles).sum())

    def signed_volume(self) -> float:
        """Divergence-theorem volume; meaningful for closed meshes."""
        a, b, c = (self.vertices[self.triangles[:, k]] for k in range(3))
        return float(np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0)

    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def is_watertight(self) -> bool:
        """Every undirected edge shared by exactly two triangles."""
        if "watertight" not in self._cache:
            edges = np.concatenate(
                [self.triangles[:, [0, 1]], self.triangles[:, [1, 2]], self.triangles[:, [2, 0]]]
            )
            edges = np.sort(edges, axis=1)
            _, counts = np.unique(edges, axis=0, return_counts=True)
            self._cache["watertight"] = bool(np.all(counts == 2))
        return self._cache["watertight"]

    # -- derived meshes ---------------------------------------------------

    def transformed(self, transform) -> "TriangleMesh":
        """Apply a RigidTransform or AffineTransform; normals recomputed."""
        if not isinstance(transform, (RigidTransform, AffineTransform)):
            raise InvalidInputError(f"unsupported transform type {type(transform)!r}")
        return TriangleMesh(transform.apply(self.vertices), self.triangles)

    def mirrored(self, plane: MirrorPlane) -> "TriangleMesh":
        """Reflect across `plane`, reversing winding so normals stay outward."""
        reflected = plane.reflect(self.vertices)
        flipped = self.triangles[:, [0, 2, 1]]
        return TriangleMesh(reflected, flipped)

    def with_vertices(self, vertices) -> "TriangleMesh":
        """Same topology, new vertex positions (e.g. after a deformation)."""
        return TriangleMesh(vertices, self.triangles)

    def submesh(self, vertex_mask) -> "TriangleMesh":
        """Triangles whose three corners are all inside `vertex_mask`,
        with vertices renumbered compactly."""
        vertex_mask = np.asarray(vertex_mask, dtype=bool)
        if vertex_mask.shape != (self.n_vertices,):
            raise InvalidInputError("vertex mask length must equal vertex count")
        keep_tri = vertex_mask[self.triangles].all(axis=1)
        if not keep_tri.any():
            raise InvalidInputError("vertex mask selects no complete triangle")
        tris = self.triangles[keep_tri]
        used = np.unique(tris)
        remap = np.full(self.n_vertices, -1, dtype=np.int64)
        remap[used] = np.arange(len(used))
        return TriangleMesh(self.vertices[used], remap[tris])

    def __repr__(self):
        return f"TriangleMesh({self.n_vertices} vertices, {self.n_triangles} triangles)"


def mirror_mesh(mesh: TriangleMesh, plane: MirrorPlane) -> TriangleMesh:
    return mesh.mirrored(plane)


def apply_transform(obj, transform):
    """Transform a TriangleMesh or an (n,3)/3-vector point array."""
    if isinstance(obj, TriangleMesh):
        return obj.transformed(transform)
    return transform.apply(obj)
