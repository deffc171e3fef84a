import numpy as np
import pytest

from orbitfit.errors import DegenerateConfigurationError, InsufficientLandmarksError
from orbitfit.geometry import LandmarkSet, RigidTransform
from orbitfit.registration import (
    LandmarkRigidAlign,
    landmark_rigid_align,
    rigid_from_correspondences,
)


def make_set(points, labels=None):
    labels = labels or [f"p{i}" for i in range(len(points))]
    return LandmarkSet(list(zip(labels, points)))


def test_identity_when_target_equals_source():
    src = make_set([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0.2, 0.3, 0.9]])
    t = landmark_rigid_align(src, src)
    assert np.allclose(t.matrix(), np.eye(4), atol=1e-12)


def test_recovers_known_rigid_motion():
    pts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=float)
    # rotate 90 degrees about z, then translate by (1,2,3)
    truth = RigidTransform.translate([1, 2, 3]).compose(
        RigidTransform.rotate_about([0, 0, 1], np.pi / 2)
    )
    src = make_set(pts)
    dst = src.transformed(truth)
    recovered = landmark_rigid_align(src, dst)
    assert np.allclose(recovered.apply(pts), truth.apply(pts), atol=1e-9)


def test_noisy_landmarks_recover_pose_within_tolerance():
    rng = np.random.default_rng(42)
    pts = rng.uniform(-30, 30, size=(6, 3))
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    truth = RigidTransform.translate(rng.uniform(-10, 10, 3)).compose(
        RigidTransform.rotate_about(axis, 0.4)
    )
    noisy_dst = truth.apply(pts) + rng.normal(scale=0.1, size=(6, 3))
    recovered, _ = rigid_from_correspondences(pts, noisy_dst)
    # rotation angle error < 1 degree
    delta = recovered.rotation @ truth.rotation.T
    angle = np.arccos(np.clip((np.trace(delta) - 1) / 2, -1, 1))
    assert np.degrees(angle) < 1.0
    # translation error < 0.2 mm at the centroid
    centroid = pts.mean(axis=0)
    assert np.linalg.norm(recovered.apply(centroid) - truth.apply(centroid)) < 0.2


def test_fewer_than_three_matches_rejected():
    src = make_set([[0, 0, 0], [1, 0, 0]], labels=["a", "b"])
    dst = make_set([[0, 0, 1], [1, 0, 1]], labels=["a", "b"])
    with pytest.raises(InsufficientLandmarksError):
        landmark_rigid_align(src, dst)


def test_disjoint_labels_rejected():
    src = make_set([[0, 0, 0], [1, 0, 0], [0, 1, 0]], labels=["a", "b", "c"])
    dst = make_set([[0, 0, 0], [1, 0, 0], [0, 1, 0]], labels=["x", "y", "z"])
    with pytest.raises(InsufficientLandmarksError):
        landmark_rigid_align(src, dst)


def test_collinear_points_rejected():
    pts = [[0, 0, 0], [1, 0, 0], [2, 0, 0], [3, 0, 0]]
    with pytest.raises(DegenerateConfigurationError):
        rigid_from_correspondences(pts, pts)


def test_determinant_plus_one_even_for_mirrored_target():
    rng = np.random.default_rng(3)
    for _ in range(20):
        pts = rng.uniform(-10, 10, size=(5, 3))
        mirrored = pts * np.array([-1.0, 1.0, 1.0])
        t, _ = rigid_from_correspondences(pts, mirrored)
        assert np.linalg.det(t.rotation) == pytest.approx(1.0, abs=1e-9)


def test_equivariance_of_residual():
    rng = np.random.default_rng(12)
    src = rng.uniform(-10, 10, size=(7, 3))
    dst = src + rng.normal(scale=0.2, size=(7, 3))
    _, rms_base = rigid_from_correspondences(src, dst)
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    common = RigidTransform.translate([5, -3, 8]).compose(
        RigidTransform.rotate_about(axis, 1.2)
    )
    _, rms_conj = rigid_from_correspondences(common.apply(src), common.apply(dst))
    assert abs(rms_base - rms_conj) < 1e-6


def test_estimator_api():
    rng = np.random.default_rng(9)
    pts = rng.uniform(-5, 5, size=(8, 3))
    truth = RigidTransform.translate([1, 0, -2])
    est = LandmarkRigidAlign().fit(pts, truth.apply(pts))
    assert est.rms_ < 1e-9
    assert np.allclose(est.transform(pts), truth.apply(pts), atol=1e-9)
    assert "transform_" in dir(est)
    assert est.get_params() == {}
