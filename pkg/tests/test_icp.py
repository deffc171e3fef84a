import numpy as np
import pytest

from orbitfit.errors import DegenerateConfigurationError, RegistrationFailedError
from orbitfit.geometry import RigidTransform, SpatialIndex
from orbitfit.registration import AffineIcp, IcpParams, RigidIcp, icp_affine, icp_rigid
from orbitfit.synthetic import make_hemiskull

LOOSE = IcpParams(trim_fraction=0.0, max_correspondence_distance=1e9)


@pytest.fixture(scope="module")
def skull():
    return make_hemiskull(subdivisions=3)


@pytest.fixture(scope="module")
def skull_index(skull):
    return SpatialIndex(skull)


def test_source_equals_target_gives_identity(skull, skull_index):
    t, rms = icp_rigid(skull, skull_index, params=LOOSE)
    assert rms < 1e-9
    assert np.allclose(t.matrix(), np.eye(4), atol=1e-9)


def test_recovers_small_translation(skull):
    truth = RigidTransform.translate([0.5, 0.3, -0.4])
    target = skull.transformed(truth)
    params = IcpParams(trim_fraction=0.0, max_correspondence_distance=1e9,
                       convergence_tol=1e-8)
    t, rms = icp_rigid(skull, SpatialIndex(target), params=params)
    assert np.linalg.norm(t.translation - truth.translation) < 1e-3
    assert rms < 1e-3


def test_far_init_fails_with_gate(skull, skull_index):
    far = RigidTransform.translate([500.0, 0.0, 0.0])
    with pytest.raises(RegistrationFailedError):
        icp_rigid(skull, skull_index, init=far, params=IcpParams(max_correspondence_distance=10.0))


def test_residual_history_non_increasing_when_untrimmed(skull):
    truth = RigidTransform.translate([1.0, -0.5, 0.8])
    target = skull.transformed(truth)
    est = RigidIcp(trim_fraction=0.0, max_correspondence_distance=1e9).fit(
        skull, SpatialIndex(target)
    )
    history = np.asarray(est.residual_history_)
    assert np.all(np.diff(history) <= 1e-12)


def test_equivariance_residual(skull):
    truth = RigidTransform.translate([0.8, 0.2, -0.3])
    target = skull.transformed(truth)
    _, rms_base = icp_rigid(skull, SpatialIndex(target), params=LOOSE)

    rng = np.random.default_rng(11)
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    common = RigidTransform.translate(rng.uniform(-20, 20, 3)).compose(
        RigidTransform.rotate_about(axis, 0.7)
    )
    skull2 = skull.transformed(common)
    target2 = target.transformed(common)
    _, rms_conj = icp_rigid(skull2, SpatialIndex(target2), params=LOOSE)
    assert abs(rms_base - rms_conj) < 1e-6


class TestAffine:
    def test_copy_gives_identity(self, skull, skull_index):
        t, rms = icp_affine(skull, skull_index, params=LOOSE)
        assert rms < 1e-6
        assert np.allclose(t.matrix(), np.eye(4), atol=1e-6)

    def test_recovers_uniform_scale(self, skull):
        scaled = skull.with_vertices(skull.vertices * 1.05)
        t, _ = icp_affine(skull, SpatialIndex(scaled), params=LOOSE)
        assert np.allclose(t.linear, 1.05 * np.eye(3), atol=1e-2)

    def test_coplanar_source_rejected(self, skull_index):
        rng = np.random.default_rng(0)
        flat = rng.uniform(-5, 5, size=(50, 3))
        flat[:, 2] = 0.0
        with pytest.raises(DegenerateConfigurationError):
            AffineIcp(trim_fraction=0.0, max_correspondence_distance=1e9)._solve(
                flat, flat + [0.0, 0.0, 1.0]
            )


def test_sampling_is_seeded(skull):
    target = skull.transformed(RigidTransform.translate([0.4, 0.1, -0.2]))
    idx = SpatialIndex(target)
    params = IcpParams(trim_fraction=0.0, max_correspondence_distance=1e9,
                       sample_count=300, seed=7)
    t1, r1 = icp_rigid(skull, idx, params=params)
    t2, r2 = icp_rigid(skull, idx, params=params)
    assert np.array_equal(t1.matrix(), t2.matrix())
    assert r1 == r2
