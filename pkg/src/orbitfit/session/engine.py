"""CaseSession: the single engine behind the CLI and the HTTP API.

All mutations go through this class: they are serialized by a per-case
lock, appended to the event log, and bump a revision counter used for
optimistic concurrency. Replaying the log against a freshly loaded case
reproduces the placements exactly.
"""
from __future__ import annotations

import threading
import time

import numpy as np

from ..errors import InvalidInputError, OrbitFitError, RejectedTransformError
from ..fitting import (
    compute_fit_report,
    detect_collisions,
    edge_distances,
    initial_landmark_placement,
    nudge_translate,
    pivot_rotate,
    posterior_stop_align,
    rank_plates,
    reset_to_posterior_stop,
    set_initial_transform,
)
from ..geometry import Polyline, RigidTransform
from ..geometry.transforms import orthonormalize, rotation_drift
from .case import Case, create_case, load_case_state, save_case_state
from .events import make_event

RIGID_REJECT_DRIFT = 1e-3
RIGID_CORRECT_DRIFT = 1e-9


class StaleRevisionError(OrbitFitError):
    """Mutation carried a revision that is no longer current."""


class RankingUnavailableError(OrbitFitError):
    """Ranking requested before any fit reports were computed."""


def _materialize_timestamp(timestamp) -> float:
    """One wall-clock read per mutation so the placement history entry and
    the event record carry the identical timestamp (replay exactness)."""
    return float(time.time() if timestamp is None else timestamp)


def _check_rigid_matrix(matrix) -> RigidTransform:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape != (4, 4):
        raise InvalidInputError(f"expected a 4x4 matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise InvalidInputError("matrix contains non-finite values")
    if not np.allclose(matrix[3], [0.0, 0.0, 0.0, 1.0], atol=1e-9):
        raise RejectedTransformError("last row must be [0,0,0,1]")
    rotation = matrix[:3, :3]
    drift = rotation_drift(rotation)
    if drift > RIGID_REJECT_DRIFT:
        raise RejectedTransformError(
            f"rotation drift {drift:.3e} exceeds {RIGID_REJECT_DRIFT:.0e}; "
            "transform rejected as non-rigid"
        )
    if drift > RIGID_CORRECT_DRIFT:
        rotation = orthonormalize(rotation)
    return RigidTransform(rotation, matrix[:3, 3])


class CaseSession:
    def __init__(self, case: Case, events=None, actor="local"):
        self.case = case
        self.events = list(events or [])
        self.actor = actor
        self.revision = len(self.events)
        self._lock = threading.Lock()
        self._fit_cache = {}

    @classmethod
    def open(cls, case_dir, actor="local") -> "CaseSession":
        case = create_case(case_dir)
        events = load_case_state(case)
        return cls(case, events=events, actor=actor)

    def save(self):
        save_case_state(self.case, self.events)

    # -- helpers ----------------------------------------------------------

    def _plate(self, plate_id):
        if plate_id not in self.case.plates:
            raise KeyError(plate_id)
        return self.case.plates[plate_id]

    def _record(self, action, payload, timestamp=None, actor=None):
        event = make_event(action, payload, actor or self.actor, timestamp)
        self.events.append(event)
        self.revision += 1
        return event

    def _check_revision(self, expected):
        if expected is not None and int(expected) != self.revision:
            raise StaleRevisionError(
                f"revision {expected} is stale (current {self.revision})"
            )

    def live_summary(self, plate_id) -> dict:
        """The cheap interactive metrics: collision report plus the five
        per-curve mean distances for the current placement."""
        plate = self._plate(plate_id)
        placement = self.case.placements[plate_id]
        moved = plate.mesh.transformed(placement.transform)
        collision = detect_collisions(moved, self.case.bone_index)
        edges = edge_distances(plate, self.case.orbit_index, transform=placement.transform)
        return {
            "plate_id": plate_id,
            "revision": self.revision,
            "collision": {
                "count": collision.collision_count,
                "total": collision.total_points,
                "percent": collision.percent,
                "percent_text": collision.percent_text,
                "collision_points": list(collision.collision_points),
            },
            "edge_means_mm": {r.curve_name: r.mean for r in edges},
            "matrix": placement.transform.matrix().tolist(),
            "stop_aligned": placement.pivot is not None,
        }

    # -- mutations (all serialized, all logged) -----------------------------

    def initial_align(self, plate_id, timestamp=None, actor=None, revision=None) -> dict:
        timestamp = _materialize_timestamp(timestamp)
        with self._lock:
            self._check_revision(revision)
            plate = self._plate(plate_id)
            transform = initial_landmark_placement(plate, self.case.orbit_landmarks)
            placement = set_initial_transform(
                self.case.placements[plate_id], transform, timestamp=timestamp
            )
            self.case.placements[plate_id] = placement
            self._fit_cache.pop(plate_id, None)
            self._record(
                "initial_align", {"plate_id": plate_id}, timestamp, actor
            )
        return self.live_summary(plate_id)

    def stop_align(self, plate_id, timestamp=None, actor=None, revision=None) -> dict:
        timestamp = _materialize_timestamp(timestamp)
        with self._lock:
            self._check_revision(revision)
            plate = self._plate(plate_id)
            placement = posterior_stop_align(
                self.case.placements[plate_id], plate.stop_point,
                self.case.orbit_stop, timestamp=timestamp,
            )
            self.case.placements[plate_id] = placement
            self._fit_cache.pop(plate_id, None)
            self._record("posterior_stop_align", {"plate_id": plate_id}, timestamp, actor)
        return self.live_summary(plate_id)

    def rotate(self, plate_id, axis, angle, timestamp=None, actor=None, revision=None) -> dict:
        timestamp = _materialize_timestamp(timestamp)
        with self._lock:
            self._check_revision(revision)
            self._plate(plate_id)
            placement = pivot_rotate(
                self.case.placements[plate_id], axis, float(angle), timestamp=timestamp
            )
            self.case.placements[plate_id] = placement
            self._fit_cache.pop(plate_id, None)
            self._record(
                "pivot_rotate",
                {"plate_id": plate_id, "axis": list(map(float, axis)), "angle": float(angle)},
                timestamp, actor,
            )
        return self.live_summary(plate_id)

    def nudge(self, plate_id, delta, move_pivot=False, timestamp=None, actor=None,
              revision=None) -> dict:
        timestamp = _materialize_timestamp(timestamp)
        with self._lock:
            self._check_revision(revision)
            self._plate(plate_id)
            placement = nudge_translate(
                self.case.placements[plate_id], delta, move_pivot=move_pivot,
                timestamp=timestamp,
            )
            self.case.placements[plate_id] = placement
            self._fit_cache.pop(plate_id, None)
            self._record(
                "nudge_translate",
                {"plate_id": plate_id, "delta": list(map(float, delta)),
                 "move_pivot": bool(move_pivot)},
                timestamp, actor,
            )
        return self.live_summary(plate_id)

    def reset(self, plate_id, timestamp=None, actor=None, revision=None) -> dict:
        timestamp = _materialize_timestamp(timestamp)
        with self._lock:
            self._check_revision(revision)
            self._plate(plate_id)
            placement = reset_to_posterior_stop(
                self.case.placements[plate_id], timestamp=timestamp
            )
            self.case.placements[plate_id] = placement
            self._fit_cache.pop(plate_id, None)
            self._record("reset_to_posterior_stop", {"plate_id": plate_id}, timestamp, actor)
        return self.live_summary(plate_id)

    def set_plate_transform(self, plate_id, matrix, timestamp=None, actor=None,
                            revision=None) -> dict:
        """Install an absolute pose (the interactive-handle path). The
        matrix is re-checked for rigidity: drift beyond 1e-3 is rejected,
        smaller drift is polar-corrected."""
        timestamp = _materialize_timestamp(timestamp)
        with self._lock:
            self._check_revision(revision)
            self._plate(plate_id)
            transform = _check_rigid_matrix(matrix)
            placement = self.case.placements[plate_id]
            placement = set_initial_transform(placement, transform, timestamp=timestamp)
            self.case.placements[plate_id] = placement
            self._fit_cache.pop(plate_id, None)
            self._record(
                "set_plate_transform",
                {"plate_id": plate_id, "matrix": transform.matrix().tolist()},
                timestamp, actor,
            )
        return self.live_summary(plate_id)

    def update_curve(self, plate_id, curve_name, points, timestamp=None, actor=None,
                     revision=None) -> dict:
        timestamp = _materialize_timestamp(timestamp)
        with self._lock:
            self._check_revision(revision)
            plate = self._plate(plate_id)
            new_curve = Polyline(points, curve_name)
            self.case.plates[plate_id] = plate.with_curve(curve_name, new_curve)
            self._fit_cache.pop(plate_id, None)
            self._record(
                "update_edge_curve",
                {"plate_id": plate_id, "curve_name": curve_name,
                 "points": [list(map(float, p)) for p in points]},
                timestamp, actor,
            )
        return self.live_summary(plate_id)

    # -- reads -------------------------------------------------------------

    def fit_report(self, plate_id, samples_per_curve=10):
        plate = self._plate(plate_id)
        cached = self._fit_cache.get(plate_id)
        if cached is not None:
            return cached
        placement = self.case.placements[plate_id]
        report = compute_fit_report(
            plate, placement.transform, self.case.orbit_index,
            bone_index=self.case.bone_index, samples_per_curve=samples_per_curve,
        )
        self._fit_cache[plate_id] = report
        return report

    def compute_all_fits(self):
        return [self.fit_report(pid) for pid in sorted(self.case.plates)]

    def ranking(self):
        reports = [self._fit_cache[pid] for pid in sorted(self._fit_cache)]
        if not reports:
            raise RankingUnavailableError(
                "no fit reports computed yet; GET /fit/{plate_id} (or run "
                "the fit command) first"
            )
        return rank_plates(reports)

    # -- replay -----------------------------------------------------------

    def apply_event(self, event):
        """Re-execute one recorded event (replay path)."""
        handler = {
            "initial_align": lambda p: self.initial_align(
                p["plate_id"], timestamp=event.timestamp, actor=event.actor),
            "posterior_stop_align": lambda p: self.stop_align(
                p["plate_id"], timestamp=event.timestamp, actor=event.actor),
            "pivot_rotate": lambda p: self.rotate(
                p["plate_id"], p["axis"], p["angle"],
                timestamp=event.timestamp, actor=event.actor),
            "nudge_translate": lambda p: self.nudge(
                p["plate_id"], p["delta"], move_pivot=p.get("move_pivot", False),
                timestamp=event.timestamp, actor=event.actor),
            "reset_to_posterior_stop": lambda p: self.reset(
                p["plate_id"], timestamp=event.timestamp, actor=event.actor),
            "set_plate_transform": lambda p: self.set_plate_transform(
                p["plate_id"], p["matrix"], timestamp=event.timestamp, actor=event.actor),
            "update_edge_curve": lambda p: self.update_curve(
                p["plate_id"], p["curve_name"], p["points"],
                timestamp=event.timestamp, actor=event.actor),
        }.get(event.action)
        if handler is None:
            raise InvalidInputError(f"unknown event action {event.action!r}")
        return handler(event.payload)


def replay_events(case_dir, events) -> CaseSession:
    """Fresh session over the static case inputs with `events` re-applied."""
    case = create_case(case_dir)
    session = CaseSession(case)
    for event in events:
        session.apply_event(event)
    return session
