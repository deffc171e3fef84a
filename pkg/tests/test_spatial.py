import numpy as np
import pytest

from oracles import closest_point_exhaustive, signed_distance_exhaustive
from orbitfit.errors import InvalidInputError
from orbitfit.geometry import SpatialIndex, TriangleMesh, build_spatial_index, closest_point
from orbitfit.synthetic import make_grid_mesh, make_icosphere


def test_single_triangle_index():
    mesh = TriangleMesh([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]])
    idx = build_spatial_index(mesh)
    r = closest_point(idx, [0.2, 0.2, 0.0])
    assert r.distance < 1e-12
    assert abs(r.signed_distance) == r.distance
    assert r.triangle_id == 0


def test_empty_mesh_rejected():
    with pytest.raises(InvalidInputError):
        TriangleMesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=int))


def test_interior_query_zero_distance(tetra):
    idx = SpatialIndex(tetra)
    surface_point = tetra.vertices[tetra.triangles[0]].mean(axis=0)
    r = idx.closest_point(surface_point)
    assert r.distance < 1e-12
    assert r.signed_distance >= 0.0  # zero distance gets the + sign


def test_offset_along_normal_from_flat_patch():
    patch = make_grid_mesh(nx=11, ny=11, extent=20.0)  # flat z=0, normals +z
    idx = SpatialIndex(patch)
    r = idx.closest_point([0.0, 0.0, 2.0])
    assert r.signed_distance == pytest.approx(2.0, abs=1e-9)
    r2 = idx.closest_point([0.0, 0.0, -2.0])
    assert r2.signed_distance == pytest.approx(-2.0, abs=1e-9)


def test_barycentric_valid(sphere):
    idx = SpatialIndex(sphere)
    rng = np.random.default_rng(0)
    for q in rng.uniform(-15, 15, size=(20, 3)):
        r = idx.closest_point(q)
        assert np.all(r.barycentric >= -1e-12)
        assert r.barycentric.sum() == pytest.approx(1.0, abs=1e-9)
        corners = sphere.vertices[sphere.triangles[r.triangle_id]]
        recon = r.barycentric @ corners
        assert np.allclose(recon, r.point, atol=1e-9)


def test_matches_exhaustive_scan_on_sphere(sphere):
    idx = SpatialIndex(sphere)
    rng = np.random.default_rng(42)
    queries = rng.uniform(-20, 20, size=(100, 3))
    points, _, dist, signed = idx.closest_points(queries)
    for q, p, d, s in zip(queries, points, dist, signed):
        op, _, od = closest_point_exhaustive(sphere, q)
        assert abs(d - od) < 1e-9
        assert np.linalg.norm(p - op) < 1e-9
        assert abs(s - signed_distance_exhaustive(sphere, q)) < 1e-9


def test_matches_exhaustive_on_irregular_patch():
    patch = make_grid_mesh(nx=15, ny=13, extent=18.0,
                           height=lambda x, y: 0.05 * x * y + 0.3 * np.sin(x))
    idx = SpatialIndex(patch)
    rng = np.random.default_rng(7)
    queries = rng.uniform(-12, 12, size=(100, 3))
    _, _, dist, _ = idx.closest_points(queries)
    for q, d in zip(queries, dist):
        _, _, od = closest_point_exhaustive(patch, q)
        assert abs(d - od) < 1e-9


def test_tie_breaks_by_lowest_triangle_id():
    # two coplanar triangles sharing an edge; query is equidistant and
    # closest to the shared edge
    mesh = TriangleMesh(
        [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], [[0, 1, 2], [1, 3, 2]]
    )
    idx = SpatialIndex(mesh)
    r = idx.closest_point([0.5, 0.5, 1.0])  # above the shared diagonal
    assert r.triangle_id == 0
    assert r.distance == pytest.approx(1.0, abs=1e-12)


def test_construction_deterministic(sphere):
    a = SpatialIndex(sphere)
    b = SpatialIndex(sphere)
    assert np.array_equal(a._tri_order, b._tri_order)
    assert np.array_equal(a._node_min, b._node_min)


def test_signed_distance_inside_sphere(sphere):
    idx = SpatialIndex(sphere)
    assert idx.closest_point([0.0, 0.0, 0.0]).signed_distance < 0
    assert idx.closest_point([0.0, 0.0, 20.0]).signed_distance > 0


def test_large_sphere_brute_force_sample():
    mesh = make_icosphere(subdivisions=4, radius=8.0)  # 5120 triangles
    idx = SpatialIndex(mesh)
    rng = np.random.default_rng(3)
    queries = rng.uniform(-12, 12, size=(100, 3))
    _, _, dist, _ = idx.closest_points(queries)
    for q, d in zip(queries, dist):
        _, _, od = closest_point_exhaustive(mesh, q)
        assert abs(d - od) < 1e-9
