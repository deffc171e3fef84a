import numpy as np
import pytest

from oracles import closest_point_exhaustive, signed_distance_exhaustive
from orbitfit.errors import InvalidInputError
from orbitfit.fitting import (
    PlateModel,
    compute_fit_report,
    edge_distances,
    plate_wide_distances,
    posterior_stop_align,
    Placement,
)
from orbitfit.geometry import RigidTransform, SpatialIndex
from orbitfit.synthetic import make_grid_mesh, make_orbit_patch, make_plate


@pytest.fixture(scope="module")
def flat_orbit_index():
    return SpatialIndex(make_grid_mesh(nx=40, ny=40, extent=60.0))


@pytest.fixture(scope="module")
def flat_plate():
    mesh, stop, lms, curves = make_plate(bias=2.0, curvature=0.0)
    return PlateModel("flat", mesh, "stop", lms, curves)


def test_coincident_plate_reports_zero(flat_orbit_index):
    mesh, stop, lms, curves = make_plate(bias=0.0, curvature=0.0)
    plate = PlateModel("zero", mesh, "stop", lms, curves)
    wide = plate_wide_distances(plate.mesh, flat_orbit_index)
    assert np.all(np.abs(wide) < 1e-9)


def test_flat_plate_one_mm_above(flat_orbit_index):
    mesh, _, _, _ = make_plate(bias=1.0, curvature=0.0)
    wide = plate_wide_distances(mesh, flat_orbit_index)
    assert np.allclose(wide, 1.0, atol=1e-9)


def test_signed_below_surface(flat_orbit_index):
    mesh, _, _, _ = make_plate(bias=-1.5, curvature=0.0)
    wide = plate_wide_distances(mesh, flat_orbit_index)
    assert np.allclose(wide, -1.5, atol=1e-9)


def test_plate_wide_matches_exhaustive_oracle():
    orbit = make_orbit_patch(nx=18, ny=18, extent=24.0)
    index = SpatialIndex(orbit)
    mesh, _, _, _ = make_plate(nx=8, ny=8, bias=1.3, curvature=0.02)
    wide = plate_wide_distances(mesh, index)
    for v, got in zip(mesh.vertices, wide):
        assert abs(got - signed_distance_exhaustive(orbit, v)) < 1e-9


class TestEdgeDistances:
    def test_flat_offset_means_two(self, flat_plate, flat_orbit_index):
        reports = edge_distances(flat_plate, flat_orbit_index)
        assert len(reports) == 5
        for rep in reports:
            assert len(rep.point_distances) == 10
            assert np.allclose(rep.point_distances, 2.0, atol=1e-9)
            assert rep.mean == pytest.approx(2.0, abs=1e-9)

    def test_curve_on_surface_mean_zero(self, flat_orbit_index):
        mesh, stop, lms, curves = make_plate(bias=0.0, curvature=0.0)
        plate = PlateModel("on", mesh, "stop", lms, curves)
        reports = edge_distances(plate, flat_orbit_index)
        assert all(r.mean < 1e-9 for r in reports)

    def test_mean_equals_oracle_projection_mean(self):
        orbit = make_orbit_patch(nx=20, ny=20, extent=26.0)
        index = SpatialIndex(orbit)
        mesh, stop, lms, curves = make_plate(nx=9, ny=9, bias=1.0, curvature=0.021)
        plate = PlateModel("curved", mesh, "stop", lms, curves)
        reports = edge_distances(plate, index)
        from orbitfit.geometry import resample_polyline

        for rep in reports:
            sampled = resample_polyline(plate.edge_curves[rep.curve_name], 10)
            oracle = [closest_point_exhaustive(orbit, p)[2] for p in sampled.points]
            assert rep.mean == pytest.approx(float(np.mean(oracle)), abs=1e-9)

    def test_projected_points_on_orbit(self, flat_plate, flat_orbit_index):
        reports = edge_distances(flat_plate, flat_orbit_index)
        for rep in reports:
            assert np.allclose(rep.projected_points[:, 2], 0.0, atol=1e-9)

    def test_sample_count_override(self, flat_plate, flat_orbit_index):
        reports = edge_distances(flat_plate, flat_orbit_index, samples_per_curve=25)
        assert all(len(r.point_distances) == 25 for r in reports)

    def test_bad_sample_count(self, flat_plate, flat_orbit_index):
        with pytest.raises(InvalidInputError):
            edge_distances(flat_plate, flat_orbit_index, samples_per_curve=1)


class TestFitReport:
    def test_overall_mean_is_50_point_mean(self, flat_plate, flat_orbit_index):
        report = compute_fit_report(flat_plate, RigidTransform.identity(), flat_orbit_index)
        all_d = np.concatenate([r.point_distances for r in report.edge_reports])
        assert len(all_d) == 50
        assert report.overall_edge_mean == pytest.approx(float(all_d.mean()), abs=1e-12)

    def test_overall_mean_invariant_under_curve_reorder(self, flat_orbit_index):
        mesh, stop, lms, curves = make_plate(bias=1.0, curvature=0.01)
        plate_a = PlateModel("a", mesh, "stop", lms, curves)
        reordered = dict(reversed(list(curves.items())))
        plate_b = PlateModel("b", mesh, "stop", lms, reordered)
        ra = compute_fit_report(plate_a, RigidTransform.identity(), flat_orbit_index)
        rb = compute_fit_report(plate_b, RigidTransform.identity(), flat_orbit_index)
        assert ra.overall_edge_mean == rb.overall_edge_mean

    def test_equivariance_under_common_motion(self):
        orbit = make_orbit_patch(nx=16, ny=16, extent=24.0)
        mesh, stop, lms, curves = make_plate(nx=8, ny=8, bias=1.5, curvature=0.02)
        plate = PlateModel("eq", mesh, "stop", lms, curves)
        base = compute_fit_report(plate, RigidTransform.identity(), SpatialIndex(orbit))

        rng = np.random.default_rng(5)
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        common = RigidTransform.translate([4.0, -7.0, 11.0]).compose(
            RigidTransform.rotate_about(axis, 0.9)
        )
        moved_orbit = orbit.transformed(common)
        moved = compute_fit_report(plate, common, SpatialIndex(moved_orbit))
        assert np.allclose(moved.plate_wide, base.plate_wide, atol=1e-9)
        assert moved.overall_edge_mean == pytest.approx(base.overall_edge_mean, abs=1e-9)

    def test_placement_transform_applied(self, flat_plate, flat_orbit_index):
        placement = Placement("flat")
        placement = posterior_stop_align(
            placement, flat_plate.stop_point,
            np.array([0.0, -12.0, 5.0]),
        )
        report = compute_fit_report(flat_plate, placement.transform, flat_orbit_index)
        assert np.allclose(report.plate_wide, 5.0, atol=1e-9)


class TestTrimScenario:
    def test_resample_count_unchanged_after_shortening(self, flat_orbit_index):
        mesh, stop, lms, curves = make_plate(bias=1.0, curvature=0.0)
        plate = PlateModel("trim", mesh, "stop", lms, curves)
        shorter = plate.edge_curves["lateral_floor"].points[:6]
        from orbitfit.geometry import Polyline

        trimmed = plate.with_curve("lateral_floor", Polyline(shorter, "lateral_floor"))
        reports = edge_distances(trimmed, flat_orbit_index)
        assert all(len(r.point_distances) == 10 for r in reports)

    def test_reposition_plus_rerotation_improves_overall_mean(self):
        # plate hovering above a matching-curvature orbit: rotating the far
        # edge down closes the gap; moving the lateral sampling curve
        # medially models a trimmed lateral margin
        orbit = make_orbit_patch(nx=30, ny=30, extent=40.0)
        index = SpatialIndex(orbit)
        mesh, stop, lms, curves = make_plate(bias=1.5, curvature=0.015, tilt=0.04)
        plate = PlateModel("p1937", mesh, "stop", lms, curves)
        orbit_stop = orbit.vertices.reshape(30, 30, 3)[15, 0]
        placement = posterior_stop_align(Placement("p1937"), plate.stop_point, orbit_stop)
        before = compute_fit_report(plate, placement.transform, index)

        grid = mesh.vertices.reshape(14, 14, 3)
        from orbitfit.geometry import Polyline

        medial_column = Polyline(grid[10, :], "lateral_floor")  # moved inward
        trimmed = plate.with_curve("lateral_floor", medial_column)
        from orbitfit.fitting import pivot_rotate

        adjusted = pivot_rotate(placement, [1.0, 0.0, 0.0], -0.045)
        after = compute_fit_report(trimmed, adjusted.transform, index)
        assert after.overall_edge_mean < before.overall_edge_mean
