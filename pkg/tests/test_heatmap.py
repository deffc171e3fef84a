import numpy as np
import pytest

from orbitfit.errors import InvalidInputError
from orbitfit.fitting import distance_colors, distance_histogram, generate_heatmap
from orbitfit.geometry import load_mesh, load_scalars
from orbitfit.synthetic import make_grid_mesh


def test_anchor_colors():
    colors = distance_colors([-5.0, 0.0, 5.0])
    assert np.array_equal(colors[0], [255, 0, 0])    # pure red at -5
    assert np.array_equal(colors[1], [0, 255, 0])    # pure green at 0
    assert np.array_equal(colors[2], [0, 0, 255])    # pure blue at +5


def test_out_of_range_clamps():
    colors = distance_colors([-50.0, 50.0])
    assert np.array_equal(colors[0], [255, 0, 0])
    assert np.array_equal(colors[1], [0, 0, 255])


def test_all_zero_distances_map_to_green():
    colors = distance_colors(np.zeros(7))
    assert np.all(colors == [0, 255, 0])


def test_custom_range_midpoint():
    colors = distance_colors([0.0], lo=-2.0, hi=2.0)
    assert np.array_equal(colors[0], [0, 255, 0])


def test_invalid_range_rejected():
    with pytest.raises(InvalidInputError):
        distance_colors([0.0], lo=5.0, hi=-5.0)


class TestHistogram:
    def test_counts_sum_to_vertex_count(self):
        rng = np.random.default_rng(0)
        values = rng.normal(scale=4.0, size=1234)
        rows = distance_histogram(values)
        assert sum(count for _, _, count in rows) == 1234

    def test_quarter_mm_bins_over_default_range(self):
        rows = distance_histogram([0.0])
        # 40 interior bins for (-5, 5) plus underflow and overflow
        assert len(rows) == 42
        widths = [hi - lo for lo, hi, _ in rows[1:-1]]
        assert np.allclose(widths, 0.25, atol=1e-12)

    def test_underflow_overflow(self):
        rows = distance_histogram([-99.0, 99.0, 0.0])
        assert rows[0][2] == 1
        assert rows[-1][2] == 1

    def test_boundary_values_counted_inside(self):
        rows = distance_histogram([-5.0, 5.0])
        assert rows[0][2] == 0 and rows[-1][2] == 0
        assert sum(c for _, _, c in rows[1:-1]) == 2


def test_generate_heatmap_roundtrip(tmp_path):
    mesh = make_grid_mesh(nx=6, ny=6, extent=5.0)
    distances = mesh.vertices[:, 0].copy()
    ply = tmp_path / "heat.ply"
    csv = tmp_path / "hist.csv"
    colors, rows = generate_heatmap(mesh, distances, ply, csv)
    assert len(colors) == mesh.n_vertices
    again = load_mesh(ply)
    assert again.n_vertices == mesh.n_vertices
    assert np.allclose(load_scalars(ply), distances, atol=1e-6)
    text = csv.read_text().splitlines()
    assert text[0] == "bin_lo_mm,bin_hi_mm,count"
    assert len(text) == 43
    assert sum(c for _, _, c in rows) == mesh.n_vertices


def test_generate_heatmap_length_mismatch(tmp_path):
    mesh = make_grid_mesh(nx=4, ny=4, extent=2.0)
    with pytest.raises(InvalidInputError):
        generate_heatmap(mesh, np.zeros(3), tmp_path / "h.ply", tmp_path / "h.csv")
