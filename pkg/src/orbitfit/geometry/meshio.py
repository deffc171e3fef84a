"""STL / PLY readers and writers.

STL: ASCII and binary (little-endian 50-byte facet records). PLY: ASCII,
with an optional per-vertex float scalar property named "distance" and
optional uchar red/green/blue. Vertex coordinates are stored at float32
precision in both formats, mm units, no unit metadata.
"""
from __future__ import annotations

import re
import struct
import warnings
from pathlib import Path

import numpy as np

from ..errors import InvalidInputError, ParseError
from .mesh import DEGENERATE_AREA, TriangleMesh


class MeshCleaningWarning(UserWarning):
    """Raised (as a warning) when load-time cleaning dropped geometry."""


def _clean_soup(points, path, weld_tolerance=None):
    """Dedup facet-soup vertices, drop degenerate facets and the vertices
    they orphan. `points` is (3f, 3) per facet. Returns (vertices, tris)."""
    points = np.asarray(points, dtype=float)
    if len(points) == 0 or len(points) % 3 != 0:
        raise ParseError(path, "no complete facets found")
    key_points = points
    if weld_tolerance is not None and weld_tolerance > 0:
        key_points = np.round(points / weld_tolerance) * weld_tolerance
    # exact-bit dedup: byte view of each coordinate triple
    raw = np.ascontiguousarray(key_points).view(
        np.dtype((np.void, key_points.dtype.itemsize * 3))
    ).ravel()
    _, first_idx, inverse = np.unique(raw, return_index=True, return_inverse=True)
    vertices = points[first_idx]
    triangles = inverse.reshape(-1, 3).astype(np.int64)

    a, b, c = (vertices[triangles[:, k]] for k in range(3))
    areas = 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)
    good = areas > DEGENERATE_AREA
    dropped = int((~good).sum())
    if dropped:
        warnings.warn(
            f"{path}: dropped {dropped} degenerate facet(s)", MeshCleaningWarning
        )
        triangles = triangles[good]
    if len(triangles) == 0:
        raise InvalidInputError(f"{path}: mesh is empty after cleaning")
    used = np.unique(triangles)
    if len(used) < len(vertices):
        remap = np.full(len(vertices), -1, dtype=np.int64)
        remap[used] = np.arange(len(used))
        vertices = vertices[used]
        triangles = remap[triangles]
    return vertices, triangles


# ---------------------------------------------------------------------------
# STL

_STL_HEADER = 80
_STL_RECORD = 50


def _load_stl_binary(path):
    data = Path(path).read_bytes()
    if len(data) < _STL_HEADER + 4:
        raise ParseError(path, "file too short for a binary STL", byte_offset=len(data))
    (count,) = struct.unpack_from("<I", data, _STL_HEADER)
    expected = _STL_HEADER + 4 + count * _STL_RECORD
    if len(data) < expected:
        raise ParseError(
            path,
            f"truncated binary STL: {count} facets declared, file ends early",
            byte_offset=len(data),
        )
    if count == 0:
        raise InvalidInputError(f"{path}: binary STL declares zero facets")
    records = np.frombuffer(
        data, dtype=np.uint8, count=count * _STL_RECORD, offset=_STL_HEADER + 4
    ).reshape(count, _STL_RECORD)
    floats = records[:, :48].copy().view("<f4").reshape(count, 4, 3)
    pts = floats[:, 1:4, :].reshape(-1, 3).astype(float)
    if not np.all(np.isfinite(pts)):
        bad = int(np.argmin(np.isfinite(pts).all(axis=1)))
        raise ParseError(
            path,
            "non-finite vertex coordinate",
            byte_offset=_STL_HEADER + 4 + (bad // 3) * _STL_RECORD,
        )
    return pts


_ASCII_VERTEX = re.compile(rb"^\s*vertex\s+(\S+)\s+(\S+)\s+(\S+)\s*$")


def _load_stl_ascii(path):
    data = Path(path).read_bytes()
    pts = []
    offset = 0
    for line in data.splitlines(keepends=True):
        stripped = line.strip()
        if stripped.startswith(b"vertex"):
            m = _ASCII_VERTEX.match(line)
            if not m:
                raise ParseError(path, f"malformed vertex line {stripped!r}", byte_offset=offset)
            try:
                pts.append([float(m.group(k)) for k in (1, 2, 3)])
            except ValueError:
                raise ParseError(path, f"bad float in {stripped!r}", byte_offset=offset)
        offset += len(line)
    if not pts:
        raise InvalidInputError(f"{path}: empty mesh (no facets)")
    if len(pts) % 3 != 0:
        raise ParseError(path, f"vertex count {len(pts)} is not a multiple of 3", byte_offset=offset)
    return np.asarray(pts, dtype=float)


def _sniff_stl_binary(path):
    data = Path(path).read_bytes()
    if len(data) >= _STL_HEADER + 4:
        (count,) = struct.unpack_from("<I", data, _STL_HEADER)
        if len(data) == _STL_HEADER + 4 + count * _STL_RECORD:
            return True
    return not data.lstrip().startswith(b"solid")


# ---------------------------------------------------------------------------
# PLY (ascii)

def _load_ply_ascii(path):
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines or lines[0].strip() != "ply":
        raise ParseError(path, "missing 'ply' magic", line=1)
    n_vertex = n_face = None
    vertex_props = []
    in_vertex_element = False
    body_start = None
    for i, line in enumerate(lines[1:], start=2):
        tok = line.split()
        if not tok:
            continue
        if tok[0] == "format":
            if tok[1] != "ascii":
                raise ParseError(path, f"unsupported PLY format {tok[1]!r}", line=i)
        elif tok[0] == "element":
            in_vertex_element = tok[1] == "vertex"
            if tok[1] == "vertex":
                n_vertex = int(tok[2])
            elif tok[1] == "face":
                n_face = int(tok[2])
        elif tok[0] == "property" and in_vertex_element and tok[1] != "list":
            vertex_props.append(tok[-1])
        elif tok[0] == "end_header":
            body_start = i
            break
    if body_start is None or n_vertex is None or n_face is None:
        raise ParseError(path, "incomplete PLY header", line=len(lines))
    for axis in ("x", "y", "z"):
        if axis not in vertex_props:
            raise ParseError(path, f"vertex property {axis!r} missing", line=body_start)
    body = lines[body_start:]
    if len(body) < n_vertex + n_face:
        raise ParseError(path, "fewer data lines than header declares", line=len(lines))

    vertex_rows = np.empty((n_vertex, len(vertex_props)), dtype=float)
    for k in range(n_vertex):
        tok = body[k].split()
        if len(tok) != len(vertex_props):
            raise ParseError(path, f"vertex row has {len(tok)} fields, expected {len(vertex_props)}", line=body_start + 1 + k)
        vertex_rows[k] = [float(t) for t in tok]
    cols = {name: vertex_rows[:, j] for j, name in enumerate(vertex_props)}
    vertices = np.stack([cols["x"], cols["y"], cols["z"]], axis=1)

    faces = []
    for k in range(n_face):
        tok = body[n_vertex + k].split()
        if not tok:
            raise ParseError(path, "empty face row", line=body_start + 1 + n_vertex + k)
        n = int(tok[0])
        if n != 3 or len(tok) != 4:
            raise ParseError(path, f"only triangular faces supported, got {n}-gon", line=body_start + 1 + n_vertex + k)
        faces.append([int(tok[1]), int(tok[2]), int(tok[3])])
    scalars = cols.get("distance")
    return vertices, np.asarray(faces, dtype=np.int64), scalars


# ---------------------------------------------------------------------------
# public API

_FORMATS = ("stl-ascii", "stl-binary", "ply")


def load_mesh(path, fmt=None, weld_tolerance=None) -> TriangleMesh:
    """Load a surface mesh.

    fmt: one of "stl-ascii", "stl-binary", "ply"; None sniffs from the
    extension and content. STL facet soup is deduplicated by exact bit
    equality (or welded to `weld_tolerance` when given); degenerate facets
    are dropped with a MeshCleaningWarning.
    """
    path = Path(path)
    if not path.exists():
        raise InvalidInputError(f"mesh file not found: {path}")
    if fmt is None:
        if path.suffix.lower() == ".ply":
            fmt = "ply"
        else:
            fmt = "stl-binary" if _sniff_stl_binary(path) else "stl-ascii"
    if fmt not in _FORMATS:
        raise InvalidInputError(f"unknown mesh format {fmt!r}; expected one of {_FORMATS}")

    if fmt == "ply":
        vertices, triangles, _ = _load_ply_ascii(path)
        a, b, c = (vertices[triangles[:, k]] for k in range(3))
        areas = 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)
        good = areas > DEGENERATE_AREA
        if not good.all():
            warnings.warn(
                f"{path}: dropped {int((~good).sum())} degenerate facet(s)",
                MeshCleaningWarning,
            )
            triangles = triangles[good]
        if len(triangles) == 0:
            raise InvalidInputError(f"{path}: mesh is empty after cleaning")
        used = np.unique(triangles)
        if len(used) < len(vertices):
            remap = np.full(len(vertices), -1, dtype=np.int64)
            remap[used] = np.arange(len(used))
            vertices, triangles = vertices[used], remap[triangles]
        return TriangleMesh(vertices, triangles)

    pts = _load_stl_binary(path) if fmt == "stl-binary" else _load_stl_ascii(path)
    vertices, triangles = _clean_soup(pts, path, weld_tolerance)
    return TriangleMesh(vertices, triangles)


def load_scalars(path) -> np.ndarray:
    """Per-vertex 'distance' scalars from a PLY written by this package."""
    _, _, scalars = _load_ply_ascii(Path(path))
    if scalars is None:
        raise InvalidInputError(f"{path}: no per-vertex 'distance' property")
    return scalars


def _f32(x):
    # shortest decimal that round-trips a float32
    return np.format_float_positional(np.float32(x), unique=True, trim="0")


def save_mesh(mesh: TriangleMesh, path, scalars=None, colors=None) -> None:
    """Write an ASCII PLY. `scalars` adds a per-vertex float property named
    "distance"; `colors` adds uchar red/green/blue."""
    path = Path(path)
    if scalars is not None:
        scalars = np.asarray(scalars, dtype=float)
        if scalars.shape != (mesh.n_vertices,):
            raise InvalidInputError(
                f"scalars length {scalars.shape} != vertex count {mesh.n_vertices}"
            )
    if colors is not None:
        colors = np.asarray(colors, dtype=np.uint8)
        if colors.shape != (mesh.n_vertices, 3):
            raise InvalidInputError("colors must be (n_vertices, 3) uint8")
    lines = ["ply", "format ascii 1.0", f"element vertex {mesh.n_vertices}"]
    lines += ["property float x", "property float y", "property float z"]
    if colors is not None:
        lines += ["property uchar red", "property uchar green", "property uchar blue"]
    if scalars is not None:
        lines.append("property float distance")
    lines += [
        f"element face {mesh.n_triangles}",
        "property list uchar int vertex_indices",
        "end_header",
    ]
    for i, v in enumerate(mesh.vertices):
        row = f"{_f32(v[0])} {_f32(v[1])} {_f32(v[2])}"
        if colors is not None:
            row += f" {colors[i, 0]} {colors[i, 1]} {colors[i, 2]}"
        if scalars is not None:
            row += f" {_f32(scalars[i])}"
        lines.append(row)
    for t in mesh.triangles:
        lines.append(f"3 {t[0]} {t[1]} {t[2]}")
    path.write_text("\n".join(lines) + "\n")


def save_mesh_with_scalars(mesh: TriangleMesh, scalars, path) -> None:
    save_mesh(mesh, path, scalars=scalars)


def save_stl_binary(mesh: TriangleMesh, path) -> None:
    path = Path(path)
    corners = mesh.triangle_corners().astype(np.float32)
    normals = np.cross(
        corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0]
    )
    lengths = np.linalg.norm(normals, axis=1)
    lengths[lengths == 0] = 1.0
    normals = (normals / lengths[:, None]).astype(np.float32)
    buf = bytearray()
    buf += b"\x00" * _STL_HEADER
    buf += struct.pack("<I", mesh.n_triangles)
    for n, tri in zip(normals, corners):
        buf += n.tobytes()
        buf += tri.tobytes()
        buf += b"\x00\x00"
    path.write_bytes(bytes(buf))
