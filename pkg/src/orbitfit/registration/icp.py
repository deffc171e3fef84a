"""Trimmed iterative-closest-point refinement, rigid and affine."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ..errors import (
    DegenerateConfigurationError,
    InvalidInputError,
    ReflectionCollapseError,
    RegistrationFailedError,
)
from ..geometry import AffineTransform, RigidTransform
from ._validation import check_points, check_target_index
from .landmark import rigid_from_correspondences


@dataclass(frozen=True)
class IcpParams:
    max_iterations: int = 100
    convergence_tol: float = 1e-4   # mm change in trimmed RMS
    trim_fraction: float = 0.1      # worst fraction of pairs dropped per iteration
    max_correspondence_distance: float = 10.0  # mm
    sample_count: int = 5000
    seed: int = 42

    def __post_init__(self):
        if not 0.0 <= self.trim_fraction < 1.0:
            raise InvalidInputError("trim_fraction must be in [0, 1)")
        if self.convergence_tol <= 0 or self.max_correspondence_distance <= 0:
            raise InvalidInputError("tolerances must be positive")
        if self.max_iterations < 1 or self.sample_count < 3:
            raise InvalidInputError("max_iterations >= 1 and sample_count >= 3 required")


def _sample_points(points, count, seed):
    if len(points) <= count:
        return points
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(len(points), size=count, replace=False))
    return points[idx]


class _IcpBase(BaseEstimator):
    def __init__(self, max_iterations=100, convergence_tol=1e-4, trim_fraction=0.1,
                 max_correspondence_distance=10.0, sample_count=5000, seed=42):
        self.max_iterations = max_iterations
        self.convergence_tol = convergence_tol
        self.trim_fraction = trim_fraction
        self.max_correspondence_distance = max_correspondence_distance
        self.sample_count = sample_count
        self.seed = seed

    def _params(self):
        return IcpParams(
            max_iterations=self.max_iterations,
            convergence_tol=self.convergence_tol,
            trim_fraction=self.trim_fraction,
            max_correspondence_distance=self.max_correspondence_distance,
            sample_count=self.sample_count,
            seed=self.seed,
        )

    def _correspond(self, index, moved, params):
        """Closest points gated by distance, then worst-fraction trimmed.
        Returns (kept source rows, kept target points, trimmed rms)."""
        points, _, dist, _ = index.closest_points(moved)
        gate = np.nonzero(dist <= params.max_correspondence_distance)[0]
        if len(gate) == 0:
            raise RegistrationFailedError(
                "no correspondences within "
                f"{params.max_correspondence_distance} mm of the target"
            )
        if params.trim_fraction > 0.0:
            n_keep = len(gate) - int(len(gate) * params.trim_fraction)
            order = np.argsort(dist[gate], kind="stable")
            gate = gate[order[:n_keep]]
        if len(gate) < 3:
            raise RegistrationFailedError(
                f"only {len(gate)} surviving correspondences; need at least 3"
            )
        rms = float(np.sqrt(np.mean(dist[gate] ** 2)))
        return gate, points[gate], rms

    def fit(self, X, y, init=None):
        """Register source X (mesh or points) onto target y (SpatialIndex
        or mesh), starting from `init` (identity when None)."""
        params = self._params()
        source = check_points(X, "source", min_points=3)
        index = check_target_index(y)
        current = self._initial(init)
        sampled = _sample_points(source, params.sample_count, params.seed)

        history = []
        prev_rms = None
        for _ in range(params.max_iterations):
            moved = current.apply(sampled)
            gate, targets, rms = self._correspond(index, moved, params)
            history.append(rms)
            if prev_rms is not None and abs(prev_rms - rms) < params.convergence_tol:
                break
            prev_rms = rms
            delta = self._solve(moved[gate], targets)
            current = delta.compose(current)
        moved = current.apply(sampled)
        _, _, final_rms = self._correspond(index, moved, params)
        history.append(final_rms)

        self.transform_ = current
        self.residual_rms_ = final_rms
        self.residual_history_ = history
        self.n_iterations_ = len(history) - 1
        return self

    def transform(self, X):
        return self.transform_.apply(check_points(X, "X"))


class RigidIcp(_IcpBase):
    """Trimmed point-to-point rigid ICP.

    Attributes after fit: transform_ (RigidTransform), residual_rms_ (mm),
    residual_history_ (per-iteration trimmed RMS), n_iterations_.
    """

    @staticmethod
    def _initial(init):
        return init if init is not None else RigidTransform.identity()

    @staticmethod
    def _solve(moved, targets):
        delta, _ = rigid_from_correspondences(moved, targets)
        return delta


class AffineIcp(_IcpBase):
    """ICP with an unconstrained 3x4 least-squares solve per iteration."""

    @staticmethod
    def _initial(init):
        if init is None:
            return AffineTransform(np.eye(3))
        if isinstance(init, RigidTransform):
            return AffineTransform.from_rigid(init)
        return init

    @staticmethod
    def _solve(moved, targets):
        src_mean = moved.mean(axis=0)
        dst_mean = targets.mean(axis=0)
        a = moved - src_mean
        b = targets - dst_mean
        solution, _, rank, _ = np.linalg.lstsq(a, b, rcond=None)
        if rank < 3:
            raise DegenerateConfigurationError(
                "source points are coplanar; affine solve is underdetermined"
            )
        linear = solution.T
        det = float(np.linalg.det(linear))
        if det <= 0.0:
            raise ReflectionCollapseError(
                f"affine solve produced determinant {det:.3e} <= 0"
            )
        return AffineTransform(linear, dst_mean - linear @ src_mean)


def icp_rigid(source, target_index, init=None, params: IcpParams | None = None):
    """Functional form; returns (RigidTransform, residual_rms)."""
    params = params or IcpParams()
    est = RigidIcp(**asdict(params)).fit(source, target_index, init=init)
    return est.transform_, est.residual_rms_


def icp_affine(source, target_index, init=None, params: IcpParams | None = None):
    """Functional form; returns (AffineTransform, residual_rms)."""
    params = params or IcpParams()
    est = AffineIcp(**asdict(params)).fit(source, target_index, init=init)
    return est.transform_, est.residual_rms_
