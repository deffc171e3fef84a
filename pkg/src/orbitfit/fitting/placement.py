"""Plate placement under surgical constraints.

A placement is the rigid pose of one plate in the patient frame plus the
rotation pivot (the orbital posterior stop) and an append-only history for
undo and audit. Operations return new Placement objects; mutation of a
shared placement is the session layer's job.

While the plate is anchored (between a posterior-stop alignment and the
first nudge), every pivot rotation re-snaps the transformed plate stop
onto the orbital stop, so anchoring error never accumulates across long
rotation sequences.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError, MissingHistoryError, MissingPivotError
from ..geometry import LandmarkSet, RigidTransform
from ..registration import landmark_rigid_align


@dataclass(frozen=True)
class HistoryEntry:
    timestamp: float
    op: str
    matrix: tuple          # 4x4 row-major nested tuple
    pivot: tuple | None
    anchored: bool

    def transform(self) -> RigidTransform:
        return RigidTransform.from_matrix(np.asarray(self.matrix))


def _entry(timestamp, op, transform, pivot, anchored):
    return HistoryEntry(
        timestamp=float(time.time() if timestamp is None else timestamp),
        op=op,
        matrix=tuple(tuple(row) for row in transform.matrix().tolist()),
        pivot=None if pivot is None else tuple(pivot.tolist()),
        anchored=anchored,
    )


class Placement:
    """Immutable snapshot of one plate's pose."""

    __slots__ = ("plate_id", "transform", "pivot", "plate_stop", "anchored", "history")

    def __init__(self, plate_id, transform=None, pivot=None, plate_stop=None,
                 anchored=False, history=()):
        self.plate_id = str(plate_id)
        self.transform = transform if transform is not None else RigidTransform.identity()
        self.pivot = None if pivot is None else np.asarray(pivot, dtype=float)
        self.plate_stop = None if plate_stop is None else np.asarray(plate_stop, dtype=float)
        self.anchored = bool(anchored)
        self.history = tuple(history)

    def _evolve(self, transform, op, timestamp, pivot=..., anchored=None):
        pivot = self.pivot if pivot is ... else pivot
        anchored = self.anchored if anchored is None else anchored
        entry = _entry(timestamp, op, transform, pivot, anchored)
        return Placement(
            self.plate_id, transform, pivot, self.plate_stop,
            anchored, self.history + (entry,),
        )

    def transformed_stop(self) -> np.ndarray:
        if self.plate_stop is None:
            raise MissingPivotError("placement has no recorded plate stop point")
        return self.transform.apply(self.plate_stop)

    def __repr__(self):
        return f"Placement({self.plate_id!r}, anchored={self.anchored})"


def initial_landmark_placement(plate, orbit_landmarks: LandmarkSet) -> RigidTransform:
    """Coarse plate-to-patient alignment from label-matched landmarks."""
    return landmark_rigid_align(plate.registration_landmarks, orbit_landmarks)


def set_initial_transform(placement: Placement, transform: RigidTransform,
                          timestamp=None) -> Placement:
    """Install a coarse alignment (e.g. from landmark registration)."""
    return Placement(
        placement.plate_id, transform, placement.pivot, placement.plate_stop,
        anchored=False,
        history=placement.history + (
            _entry(timestamp, "set_transform", transform, placement.pivot, False),
        ),
    )


def posterior_stop_align(placement: Placement, plate_stop, orbit_stop,
                         timestamp=None) -> Placement:
    """Translate so the transformed plate stop lands on the orbital stop;
    the orbital stop becomes the rotation pivot."""
    plate_stop = np.asarray(plate_stop, dtype=float)
    orbit_stop = np.asarray(orbit_stop, dtype=float)
    current = placement.transform.apply(plate_stop)
    delta = orbit_stop - current
    new_transform = RigidTransform.translate(delta).compose(placement.transform)
    entry = _entry(timestamp, "posterior_stop_align", new_transform, orbit_stop, True)
    return Placement(
        placement.plate_id, new_transform, orbit_stop, plate_stop,
        anchored=True, history=placement.history + (entry,),
    )


def pivot_rotate(placement: Placement, axis, angle, timestamp=None) -> Placement:
    """Rotate about `axis` through the pivot (the orbital stop). When the
    plate is anchored, the stop point is re-snapped onto the pivot after
    the rotation so it cannot drift."""
    if placement.pivot is None:
        raise MissingPivotError(
            "pivot rotation requires posterior-stop alignment first"
        )
    delta = RigidTransform.rotate_about(axis, angle, center=placement.pivot)
    new_transform = delta.compose(placement.transform)
    if placement.anchored and placement.plate_stop is not None:
        stop_image = new_transform.apply(placement.plate_stop)
        correction = placement.pivot - stop_image
        new_transform = RigidTransform.translate(correction).compose(new_transform)
    return placement._evolve(new_transform, "pivot_rotate", timestamp)


def nudge_translate(placement: Placement, delta, move_pivot=False,
                    timestamp=None) -> Placement:
    """Small translational adjustment. The pivot stays at the orbital stop
    unless move_pivot is set; any non-zero nudge releases the anchor."""
    delta = np.asarray(delta, dtype=float)
    if delta.shape != (3,) or not np.all(np.isfinite(delta)):
        raise InvalidInputError("nudge delta must be a finite 3-vector")
    new_transform = RigidTransform.translate(delta).compose(placement.transform)
    pivot = placement.pivot
    if move_pivot and pivot is not None:
        pivot = pivot + delta
    anchored = placement.anchored and not np.any(delta != 0.0)
    entry = _entry(timestamp, "nudge_translate", new_transform, pivot, anchored)
    return Placement(
        placement.plate_id, new_transform, pivot, placement.plate_stop,
        anchored, placement.history + (entry,),
    )


def reset_to_posterior_stop(placement: Placement, timestamp=None) -> Placement:
    """Restore the pose recorded at the most recent posterior-stop
    alignment, bit for bit."""
    for entry in reversed(placement.history):
        if entry.op == "posterior_stop_align":
            transform = entry.transform()
            pivot = None if entry.pivot is None else np.asarray(entry.pivot)
            new_entry = _entry(timestamp, "reset_to_posterior_stop", transform, pivot, True)
            return Placement(
                placement.plate_id, transform, pivot, placement.plate_stop,
                anchored=True, history=placement.history + (new_entry,),
            )
    raise MissingHistoryError(
        "no posterior-stop alignment on record for this placement"
    )
