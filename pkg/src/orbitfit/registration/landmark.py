"""Least-squares rigid alignment of corresponding point pairs (Kabsch)."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from ..errors import InsufficientLandmarksError
from ..geometry import LandmarkSet, RigidTransform
from ._validation import check_not_collinear, check_points


def rigid_from_correspondences(source, target):
    """Rigid transform minimizing sum ||R s_i + t - t_i||^2 over matched
    rows. Reflections are excluded by flipping the sign of the smallest
    singular direction, so det(R) = +1 always. Returns (transform, rms)."""
    source = check_points(source, "source", min_points=3)
    target = check_points(target, "target", min_points=3)
    if len(source) != len(target):
        raise InsufficientLandmarksError(
            f"source and target have {len(source)} vs {len(target)} points"
        )
    check_not_collinear(source, "source points")
    check_not_collinear(target, "target points")

    src_mean = source.mean(axis=0)
    dst_mean = target.mean(axis=0)
    h = (source - src_mean).T @ (target - dst_mean)
    u, _, vt = np.linalg.svd(h)
    d = np.sign(np.linalg.det(vt.T @ u.T))
    if d == 0:
        d = 1.0
    flip = np.diag([1.0, 1.0, d])
    rotation = vt.T @ flip @ u.T
    translation = dst_mean - rotation @ src_mean
    transform = RigidTransform(rotation, translation)
    residual = transform.apply(source) - target
    rms = float(np.sqrt(np.mean(np.einsum("ij,ij->i", residual, residual))))
    return transform, rms


class LandmarkRigidAlign(BaseEstimator):
    """Estimator wrapper: fit(X, y) aligns matched point rows X onto y.

    Attributes after fit: transform_ (RigidTransform), rms_ (mm).
    """

    def fit(self, X, y):
        self.transform_, self.rms_ = rigid_from_correspondences(X, y)
        return self

    def transform(self, X):
        return self.transform_.apply(check_points(X, "X"))


def landmark_rigid_align(source: LandmarkSet, target: LandmarkSet) -> RigidTransform:
    """Align two landmark sets by shared labels (order-independent)."""
    src, dst = source.matched(target)
    if len(src) < 3:
        raise InsufficientLandmarksError(
            f"need at least 3 label-matched landmark pairs, found {len(src)}"
        )
    transform, _ = rigid_from_correspondences(src, dst)
    return transform
