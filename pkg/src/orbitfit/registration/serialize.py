"""Text serialization for registration results.

Transform file: a named record with the 4x4 row-major matrix. Deformation
sidecar (cpd only): kernel source points, weights, beta, and the recorded
normalization. Floats are written with 17 significant digits so values
round-trip bit for bit.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import ParseError, SchemaVersionError
from ..geometry import AffineTransform, RigidTransform
from .cpd import DeformationField
from .reconstruct import METHODS

TRANSFORM_MAGIC = "orbitfit-transform"
DEFORMATION_MAGIC = "orbitfit-deformation"
SCHEMA_VERSION = 1


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _fmt_row(values) -> str:
    return " ".join(_fmt(v) for v in values)


def save_transform(path, name, method, transform) -> None:
    if isinstance(transform, (RigidTransform, AffineTransform)):
        matrix = transform.matrix()
    else:
        matrix = np.asarray(transform, dtype=float)
    lines = [
        f"{TRANSFORM_MAGIC} v{SCHEMA_VERSION}",
        f"name {name}",
        f"method {method}",
        "matrix",
    ]
    lines += [_fmt_row(row) for row in matrix]
    Path(path).write_text("\n".join(lines) + "\n")


def _check_magic(lines, path, magic):
    if not lines or not lines[0].startswith(magic):
        raise ParseError(path, f"missing {magic!r} header", line=1)
    version = int(lines[0].split("v")[-1])
    if version > SCHEMA_VERSION:
        raise SchemaVersionError(version, SCHEMA_VERSION)


def load_transform(path):
    """Returns (name, method, transform). Rigid records come back as
    RigidTransform, everything else as AffineTransform."""
    path = Path(path)
    lines = path.read_text().splitlines()
    _check_magic(lines, path, TRANSFORM_MAGIC)
    name = method = None
    matrix_rows = []
    in_matrix = False
    for lineno, line in enumerate(lines[1:], start=2):
        tok = line.split()
        if not tok:
            continue
        if in_matrix:
            if len(tok) != 4:
                raise ParseError(path, "matrix row needs 4 values", line=lineno)
            matrix_rows.append([float(t) for t in tok])
        elif tok[0] == "name":
            name = line.split(None, 1)[1] if len(tok) > 1 else ""
        elif tok[0] == "method":
            method = tok[1]
        elif tok[0] == "matrix":
            in_matrix = True
    if method not in METHODS or len(matrix_rows) != 4:
        raise ParseError(path, "incomplete transform record")
    matrix = np.asarray(matrix_rows)
    if method == "rigid":
        return name, method, RigidTransform.from_matrix(matrix)
    return name, method, AffineTransform(matrix[:3, :3], matrix[:3, 3])


def save_deformation(path, field: DeformationField) -> None:
    m = len(field.source_points)
    lines = [
        f"{DEFORMATION_MAGIC} v{SCHEMA_VERSION}",
        f"beta {_fmt(field.beta)}",
        f"source_mean {_fmt_row(field.source_mean)}",
        f"source_scale {_fmt(field.source_scale)}",
        f"target_mean {_fmt_row(field.target_mean)}",
        f"target_scale {_fmt(field.target_scale)}",
        f"points {m}",
    ]
    lines += [_fmt_row(p) for p in field.source_points]
    lines.append(f"weights {m}")
    lines += [_fmt_row(w) for w in field.kernel_weights]
    Path(path).write_text("\n".join(lines) + "\n")


def load_deformation(path) -> DeformationField:
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    _check_magic(lines, path, DEFORMATION_MAGIC)
    fields = {}
    i = 1
    while i < len(lines):
        tok = lines[i].split()
        key = tok[0]
        if key in ("points", "weights"):
            count = int(tok[1])
            block = [
                [float(v) for v in lines[i + 1 + k].split()] for k in range(count)
            ]
            fields[key] = np.asarray(block)
            i += 1 + count
        else:
            fields[key] = [float(v) for v in tok[1:]]
            i += 1
    try:
        return DeformationField(
            source_points=fields["points"],
            kernel_weights=fields["weights"],
            beta=fields["beta"][0],
            source_mean=fields["source_mean"],
            source_scale=fields["source_scale"][0],
            target_mean=fields["target_mean"],
            target_scale=fields["target_scale"][0],
        )
    except KeyError as exc:
        raise ParseError(path, f"missing field {exc}")
