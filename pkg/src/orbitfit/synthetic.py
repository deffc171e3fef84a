"""Synthetic geometry: test fixtures and the bundled demo case.

Everything here is deterministic for a given seed. The "hemiskull" is a
bumpy dome with two orbit-like depressions, symmetric about x=0 unless a
unilateral warp is requested; plates are curved open sheets with a
posterior stop, registration landmarks, and the five canonical edge
curves.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .fitting.plate import CANONICAL_CURVES  # noqa: F401  (re-exported for tests)
from .geometry import (
    LandmarkSet,
    Polyline,
    TriangleMesh,
    save_landmarks,
    save_mesh,
    save_polyline,
    save_stl_binary,
)


def make_grid_mesh(nx=20, ny=20, extent=20.0, height=None, origin=(0.0, 0.0, 0.0)):
    """Open rectangular sheet over [-extent/2, extent/2]^2; `height` maps
    (x, y) -> z (default flat)."""
    xs = np.linspace(-extent / 2.0, extent / 2.0, nx)
    ys = np.linspace(-extent / 2.0, extent / 2.0, ny)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    gz = np.zeros_like(gx) if height is None else height(gx, gy)
    vertices = np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=1) + np.asarray(origin, float)
    tris = []
    for i in range(nx - 1):
        for j in range(ny - 1):
            a = i * ny + j
            b = (i + 1) * ny + j
            c = (i + 1) * ny + j + 1
            d = i * ny + j + 1
            tris.append([a, b, c])
            tris.append([a, c, d])
    return TriangleMesh(vertices, np.asarray(tris))


def make_icosphere(subdivisions=3, radius=1.0, center=(0.0, 0.0, 0.0)):
    """Watertight sphere with outward winding."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
            [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
            [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
        ],
        dtype=float,
    )
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = [
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ]
    verts = list(verts)
    for _ in range(subdivisions):
        cache = {}
        new_faces = []

        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = verts[i] + verts[j]
                m /= np.linalg.norm(m)
                verts.append(m)
                cache[key] = len(verts) - 1
            return cache[key]

        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
        faces = new_faces
    vertices = np.asarray(verts) * radius + np.asarray(center, float)
    return TriangleMesh(vertices, np.asarray(faces))


def _dome_radius(directions, bumps=True):
    """Radial profile of the synthetic skull: a dome with two orbit-like
    depressions mirrored about x=0 and a few symmetric bumps to give ICP
    features to lock onto."""
    x, y, z = directions.T
    r = np.full(len(directions), 50.0)
    for sign in (1.0, -1.0):
        orbit_dir = np.array([sign * 0.45, 0.75, 0.49])
        orbit_dir /= np.linalg.norm(orbit_dir)
        dot = directions @ orbit_dir
        r -= 9.0 * np.exp(-(np.arccos(np.clip(dot, -1, 1)) / 0.28) ** 2)
    r += 2.5 * np.sin(3.0 * z) * np.cos(2.0 * np.abs(x))
    r += 1.5 * np.cos(4.0 * y)
    return r


def make_hemiskull(subdivisions=3, warp=0.0, warp_side=1.0, seed=0):
    """Closed bumpy dome, symmetric about x=0 when warp == 0.

    warp > 0 inflates one side (sign of `warp_side`) by a smooth radial
    bump of that amplitude in mm, emulating natural asymmetry.
    """
    sphere = make_icosphere(subdivisions=subdivisions, radius=1.0)
    directions = sphere.vertices / np.linalg.norm(sphere.vertices, axis=1, keepdims=True)
    r = _dome_radius(directions)
    if warp != 0.0:
        x = directions[:, 0] * warp_side
        side = np.clip(x, 0.0, None) ** 2
        r = r + warp * side * (1.0 + 0.3 * np.sin(2.0 * directions[:, 1]))
    return sphere.with_vertices(directions * r[:, None])


def make_shell(outer_radius, inner_radius, center=(0.0, 0.0, 0.0), subdivisions=2):
    """Watertight hollow shell: outward outer sphere plus an inner sphere
    with reversed winding, so the enclosed cavity counts as outside the
    solid. Stands in for bone around an orbital cavity."""
    outer = make_icosphere(subdivisions, radius=outer_radius, center=center)
    inner = make_icosphere(subdivisions, radius=inner_radius, center=center)
    vertices = np.vstack([outer.vertices, inner.vertices])
    flipped = inner.triangles[:, [0, 2, 1]] + outer.n_vertices
    triangles = np.vstack([outer.triangles, flipped])
    return TriangleMesh(vertices, triangles)


def skull_landmarks(mesh, count=6, seed=7) -> LandmarkSet:
    """Well-spread labeled points on the mesh surface."""
    from .registration import farthest_point_sample

    idx = farthest_point_sample(mesh.vertices, count, seed=seed)
    return LandmarkSet(
        [(f"L{k}", mesh.vertices[i]) for k, i in enumerate(idx)]
    )


def make_orbit_patch(nx=30, ny=30, extent=30.0, curvature=0.015, origin=(0, 0, 0)):
    """Concave sheet standing in for the reconstructed orbit floor.
    Normals point up (+z), i.e. toward plates placed above it."""
    return make_grid_mesh(
        nx, ny, extent,
        height=lambda x, y: curvature * (x**2 + y**2),
        origin=origin,
    )


def make_plate(nx=14, ny=14, extent=24.0, curvature=0.015, bias=0.0,
               tilt=0.0, name="plate"):
    """Curved plate sheet hovering `bias` mm above the canonical orbit
    patch shape, with stop point, landmarks and the five edge curves.

    Returns (mesh, stop_point, landmarks, curves) in the plate's own frame.
    """
    def height(x, y):
        return curvature * (x**2 + y**2) + bias + tilt * x

    mesh = make_grid_mesh(nx, ny, extent, height=height)
    v = mesh.vertices.reshape(nx, ny, 3)
    # posterior stop: middle of the -y edge
    stop_point = v[nx // 2, 0].copy()
    landmarks = LandmarkSet(
        [
            ("stop", stop_point),
            ("corner_pp", v[nx - 1, ny - 1]),
            ("corner_np", v[0, ny - 1]),
            ("corner_nn", v[0, 0]),
            ("mid", v[nx // 2, ny // 2]),
        ]
    )
    curves = {
        "anterior_floor": Polyline(v[:, ny - 1], "anterior_floor"),
        "anterior_medial_wall": Polyline(v[0, :], "anterior_medial_wall"),
        "lateral_floor": Polyline(v[nx - 1, :], "lateral_floor"),
        "superior_medial_wall": Polyline(v[:, 0], "superior_medial_wall"),
        "floor_wall_junction": Polyline(v[:, ny // 2], "floor_wall_junction"),
    }
    return mesh, stop_point, landmarks, curves


def write_demo_case(out_dir, n_plates=2, seed=42) -> Path:
    """Write a complete self-consistent case directory and return the path
    to its manifest. Deterministic for a given seed."""
    out_dir = Path(out_dir)
    (out_dir / "plates").mkdir(parents=True, exist_ok=True)

    # orbit: concave patch inside the cavity of a bone shell. The shell's
    # inner surface clears the plates at rest, so collisions appear only
    # when a placement tips an edge into the bone.
    orbit_center = np.array([0.0, 30.0, 20.0])
    orbit = make_orbit_patch(origin=orbit_center)
    save_mesh(orbit, out_dir / "orbit.ply")
    orbit_reach = float(
        np.linalg.norm(orbit.vertices - orbit_center, axis=1).max()
    )
    bone = make_shell(
        outer_radius=orbit_reach + 11.0,
        inner_radius=orbit_reach + 3.0,
        center=orbit_center,
    )
    save_stl_binary(bone, out_dir / "bone.stl")

    orbit_v = orbit.vertices.reshape(30, 30, 3)
    orbit_entries = [
        ("stop", orbit_v[15, 0]),
        ("corner_pp", orbit_v[29, 29]),
        ("corner_np", orbit_v[0, 29]),
        ("corner_nn", orbit_v[0, 0]),
        ("mid", orbit_v[15, 15]),
        ("up", orbit_v[15, 15] + np.array([0.0, 0.0, 40.0])),
    ]
    save_landmarks(LandmarkSet(orbit_entries), out_dir / "orbit_landmarks.mrk.json")

    plate_specs = [
        ("vendor_a_small", dict(bias=1.0, curvature=0.015, tilt=0.00)),
        ("vendor_b_small", dict(bias=2.0, curvature=0.019, tilt=0.02)),
        ("vendor_a_large", dict(bias=2.6, curvature=0.012, tilt=-0.02)),
        ("vendor_b_large", dict(bias=3.2, curvature=0.021, tilt=0.04)),
    ][:n_plates]
    plate_paths = []
    for plate_id, kw in plate_specs:
        mesh, stop, lms, curves = make_plate(name=plate_id, **kw)
        pdir = out_dir / "plates"
        save_stl_binary(mesh, pdir / f"{plate_id}.stl")
        save_landmarks(lms, pdir / f"{plate_id}_landmarks.mrk.json")
        curve_files = {}
        for cname, curve in curves.items():
            cpath = pdir / f"{plate_id}_{cname}.mrk.json"
            save_polyline(curve, cpath)
            curve_files[cname] = cpath.name
        manifest = {
            "schema_version": 1,
            "plate_id": plate_id,
            "vendor": plate_id.split("_")[1],
            "size_class": plate_id.split("_")[2],
            "mesh": f"{plate_id}.stl",
            "landmarks": f"{plate_id}_landmarks.mrk.json",
            "stop_point_label": "stop",
            "edge_curves": curve_files,
        }
        mpath = pdir / f"{plate_id}.json"
        mpath.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        plate_paths.append(f"plates/{plate_id}.json")

    case = {
        "schema_version": 1,
        "case_id": "demo",
        "bone_mesh": "bone.stl",
        "orbit_mesh": "orbit.ply",
        "orbit_landmarks": "orbit_landmarks.mrk.json",
        "orbit_stop_label": "stop",
        "orbit_up_label": "up",
        "plates": plate_paths,
    }
    manifest_path = out_dir / "case.json"
    manifest_path.write_text(json.dumps(case, indent=2, sort_keys=True) + "\n")
    return manifest_path


def main(argv=None):
    import argparse

    parser = argparse.ArgumentParser(description="write the synthetic demo case")
    parser.add_argument("out_dir")
    parser.add_argument("--plates", type=int, default=2)
    args = parser.parse_args(argv)
    path = write_demo_case(args.out_dir, n_plates=args.plates)
    print(path)


if __name__ == "__main__":
    main()
