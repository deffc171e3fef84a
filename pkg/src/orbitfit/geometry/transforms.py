"""Rigid and affine 3D transforms, mirror planes.

All coordinates are millimeters. Rotations are orthonormal with det +1;
validation tolerances follow the package-wide 1e-9 convention.
"""
from __future__ import annotations

import numpy as np

from ..errors import InvalidInputError

ORTHONORMAL_TOL = 1e-9


def _as_matrix3(m, name):
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise InvalidInputError(f"{name} must be 3x3, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return m


def _as_vector3(v, name):
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise InvalidInputError(f"{name} must be a 3-vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return v


def rotation_drift(rotation) -> float:
    """Max-norm departure of a 3x3 matrix from a proper rotation."""
    rotation = np.asarray(rotation, dtype=float)
    gram = rotation.T @ rotation
    return max(
        float(np.abs(gram - np.eye(3)).max()),
        abs(float(np.linalg.det(rotation)) - 1.0),
    )


def orthonormalize(rotation) -> np.ndarray:
    """Polar correction: nearest proper rotation in Frobenius norm."""
    u, _, vt = np.linalg.svd(np.asarray(rotation, dtype=float))
    r = u @ vt
    if np.linalg.det(r) < 0:
        u = u.copy()
        u[:, -1] = -u[:, -1]
        r = u @ vt
    return r


class RigidTransform:
    """Proper rigid motion p -> R p + t."""

    __slots__ = ("rotation", "translation")

    def __init__(self, rotation=None, translation=None):
        rotation = np.eye(3) if rotation is None else _as_matrix3(rotation, "rotation")
        translation = (
            np.zeros(3) if translation is None else _as_vector3(translation, "translation")
        )
        if rotation_drift(rotation) > ORTHONORMAL_TOL:
            raise InvalidInputError(
                "rotation is not orthonormal with determinant +1 "
                f"(drift {rotation_drift(rotation):.3e})"
            )
        self.rotation = rotation
        self.translation = translation
        self.rotation.setflags(write=False)
        self.translation.setflags(write=False)

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls()

    @classmethod
    def from_matrix(cls, matrix) -> "RigidTransform":
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape != (4, 4):
            raise InvalidInputError(f"expected 4x4 matrix, got {matrix.shape}")
        if not np.allclose(matrix[3], [0.0, 0.0, 0.0, 1.0], atol=1e-12):
            raise InvalidInputError("last row of a rigid matrix must be [0,0,0,1]")
        return cls(matrix[:3, :3], matrix[:3, 3])

    @classmethod
    def translate(cls, delta) -> "RigidTransform":
        return cls(np.eye(3), delta)

    @classmethod
    def rotate_about(cls, axis, angle, center=None) -> "RigidTransform":
        """Rotation by `angle` (radians) about `axis` through `center`."""
        axis = _as_vector3(axis, "axis")
        norm = np.linalg.norm(axis)
        if norm < 1e-12:
            raise InvalidInputError("rotation axis has zero length")
        x, y, z = axis / norm
        c, s = np.cos(angle), np.sin(angle)
        cc = 1.0 - c
        rot = np.array(
            [
                [c + x * x * cc, x * y * cc - z * s, x * z * cc + y * s],
                [y * x * cc + z * s, c + y * y * cc, y * z * cc - x * s],
                [z * x * cc - y * s, z * y * cc + x * s, c + z * z * cc],
            ]
        )
        rot = orthonormalize(rot)
        if center is None:
            return cls(rot, np.zeros(3))
        center = _as_vector3(center, "center")
        return cls(rot, center - rot @ center)

    def matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m

    def apply(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = pts @ self.rotation.T + self.translation
        return out[0] if np.asarray(points).ndim == 1 else out

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """Return self ∘ other (apply `other` first). The rotation product
        is re-polished only when rounding drift actually shows up, so
        composing with a pure translation preserves the rotation bits."""
        rot = self.rotation @ other.rotation
        if rotation_drift(rot) > 1e-12:
            rot = orthonormalize(rot)
        return RigidTransform(rot, self.rotation @ other.translation + self.translation)

    def inverse(self) -> "RigidTransform":
        rinv = self.rotation.T
        return RigidTransform(rinv, -(rinv @ self.translation))

    def __eq__(self, other):
        if not isinstance(other, RigidTransform):
            return NotImplemented
        return np.array_equal(self.rotation, other.rotation) and np.array_equal(
            self.translation, other.translation
        )

    def __repr__(self):
        return f"RigidTransform(t={self.translation.tolist()})"


class AffineTransform:
    """General invertible affine map p -> L p + t."""

    __slots__ = ("linear", "translation")

    def __init__(self, linear, translation=None):
        linear = _as_matrix3(linear, "linear")
        translation = (
            np.zeros(3) if translation is None else _as_vector3(translation, "translation")
        )
        if abs(np.linalg.det(linear)) <= 1e-12:
            raise InvalidInputError("affine linear part is singular")
        self.linear = linear
        self.translation = translation
        self.linear.setflags(write=False)
        self.translation.setflags(write=False)

    @classmethod
    def from_rigid(cls, rigid: RigidTransform) -> "AffineTransform":
        return cls(rigid.rotation.copy(), rigid.translation.copy())

    def matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.linear
        m[:3, 3] = self.translation
        return m

    def apply(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = pts @ self.linear.T + self.translation
        return out[0] if np.asarray(points).ndim == 1 else out

    def compose(self, other) -> "AffineTransform":
        other_linear = other.linear if isinstance(other, AffineTransform) else other.rotation
        return AffineTransform(
            self.linear @ other_linear,
            self.linear @ other.translation + self.translation,
        )

    def __repr__(self):
        return f"AffineTransform(det={np.linalg.det(self.linear):.6g})"


class MirrorPlane:
    """Plane given by a point and a unit normal."""

    __slots__ = ("point", "normal")

    def __init__(self, point, normal):
        self.point = _as_vector3(point, "point")
        normal = _as_vector3(normal, "normal")
        norm = np.linalg.norm(normal)
        if norm < 1e-12:
            raise InvalidInputError("mirror plane normal has zero length")
        if abs(norm - 1.0) > 1e-9:
            normal = normal / norm
        self.normal = normal
        self.point.setflags(write=False)
        self.normal.setflags(write=False)

    def _axis(self):
        """Index of the axis when the normal is exactly axis-aligned, else None."""
        for i in range(3):
            others = [j for j in range(3) if j != i]
            if abs(self.normal[i]) == 1.0 and self.normal[others[0]] == 0.0 and self.normal[others[1]] == 0.0:
                return i
        return None

    def reflect(self, points) -> np.ndarray:
        """Reflect points across the plane.

        Axis-aligned planes use the per-coordinate form 2*o - x, which is
        exact (hence a bitwise involution) when the plane offset is 0.0.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        axis = self._axis()
        if axis is not None:
            out = pts.copy()
            offset = self.point[axis]
            if offset == 0.0:
                out[:, axis] = -out[:, axis]
            else:
                out[:, axis] = 2.0 * offset - out[:, axis]
        else:
            d = (pts - self.point) @ self.normal
            out = pts - 2.0 * d[:, None] * self.normal
        return out[0] if np.asarray(points).ndim == 1 else out

    def __repr__(self):
        return f"MirrorPlane(point={self.point.tolist()}, normal={self.normal.tolist()})"
