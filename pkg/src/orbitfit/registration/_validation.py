"""Input validation helpers shared by the registration estimators."""
from __future__ import annotations

import numpy as np

from ..errors import DegenerateConfigurationError, InvalidInputError
from ..geometry import SpatialIndex, TriangleMesh

COLLINEAR_RTOL = 1e-9


def check_points(x, name="points", min_points=1) -> np.ndarray:
    """Coerce to a float (n,3) array with finite entries."""
    if isinstance(x, TriangleMesh):
        x = x.vertices
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != 3:
        raise InvalidInputError(f"{name} must be an (n,3) array, got shape {x.shape}")
    if len(x) < min_points:
        raise InvalidInputError(f"{name} needs at least {min_points} points, got {len(x)}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return x


def check_target_index(target) -> SpatialIndex:
    if isinstance(target, SpatialIndex):
        return target
    if isinstance(target, TriangleMesh):
        return SpatialIndex(target)
    raise InvalidInputError(
        f"target must be a SpatialIndex or TriangleMesh, got {type(target)!r}"
    )


def check_not_collinear(points, name="points") -> None:
    """Reject configurations whose centered spread is rank < 2."""
    centered = points - points.mean(axis=0)
    s = np.linalg.svd(centered, compute_uv=False)
    if s[0] <= 0 or s[1] <= COLLINEAR_RTOL * s[0]:
        raise DegenerateConfigurationError(f"{name} are collinear (or coincident)")
