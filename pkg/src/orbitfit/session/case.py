"""Case: the persistent bundle of bone, reconstructed orbit, landmarks,
plates, and placements.

On disk a case is a directory of text manifests plus the referenced mesh
and landmark files: case.json (static inputs), state.json (placements),
events.ndjson (session log). Matrices are serialized through JSON float
repr, which round-trips bit for bit.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import InvalidInputError, SchemaVersionError
from ..fitting import Placement, check_bone_for_collisions, load_plate
from ..fitting.placement import HistoryEntry
from ..geometry import SpatialIndex, load_landmarks, load_mesh
from ..geometry.transforms import RigidTransform

CASE_SCHEMA_VERSION = 1


class Case:
    __slots__ = (
        "case_id", "case_dir", "bone_mesh", "orbit_mesh", "bone_index",
        "orbit_index", "orbit_landmarks", "orbit_stop_label", "orbit_stop",
        "plates", "placements", "bone_watertight",
    )

    def __init__(self, case_id, case_dir, bone_mesh, orbit_mesh, orbit_landmarks,
                 orbit_stop_label, plates):
        self.case_id = str(case_id)
        self.case_dir = Path(case_dir)
        self.bone_mesh = bone_mesh
        self.orbit_mesh = orbit_mesh
        self.bone_index = SpatialIndex(bone_mesh)
        self.orbit_index = SpatialIndex(orbit_mesh)
        self.orbit_landmarks = orbit_landmarks
        self.orbit_stop_label = orbit_stop_label
        if orbit_stop_label not in orbit_landmarks:
            raise InvalidInputError(
                f"orbit stop label {orbit_stop_label!r} not in orbit landmarks"
            )
        self.orbit_stop = orbit_landmarks.get(orbit_stop_label)
        ids = [p.plate_id for p in plates]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise InvalidInputError(f"duplicate plate_id(s): {dupes}")
        self.plates = {p.plate_id: p for p in plates}
        self.placements = {pid: Placement(pid) for pid in self.plates}
        self.bone_watertight = check_bone_for_collisions(bone_mesh)

    def rebuild_orbit_index(self):
        self.orbit_index = SpatialIndex(self.orbit_mesh)


def _validate_orbit_orientation(orbit_mesh, landmarks, up_label):
    """The orbit mesh must face its 'above' side: the majority of vertex
    normals should point toward the user-supplied up landmark."""
    if up_label is None or up_label not in landmarks:
        return
    up_point = landmarks.get(up_label)
    toward_up = up_point - orbit_mesh.vertices
    agree = np.einsum("ij,ij->i", orbit_mesh.vertex_normals, toward_up) > 0
    if agree.mean() < 0.5:
        raise InvalidInputError(
            "reconstructed orbit normals point away from the 'up' landmark; "
            "flip the mesh orientation (plate-above must be the positive side)"
        )


def create_case(manifest_path) -> Case:
    """Load a case from its manifest; validates plates, builds indexes."""
    manifest_path = Path(manifest_path)
    if manifest_path.is_dir():
        manifest_path = manifest_path / "case.json"
    if not manifest_path.exists():
        raise InvalidInputError(f"case manifest not found: {manifest_path}")
    doc = json.loads(manifest_path.read_text())
    version = doc.get("schema_version", 1)
    if version > CASE_SCHEMA_VERSION:
        raise SchemaVersionError(version, CASE_SCHEMA_VERSION)
    base = manifest_path.parent
    for key in ("case_id", "bone_mesh", "orbit_mesh", "orbit_landmarks",
                "orbit_stop_label", "plates"):
        if key not in doc:
            raise InvalidInputError(f"{manifest_path}: case manifest missing {key!r}")

    bone = load_mesh(base / doc["bone_mesh"])
    orbit = load_mesh(base / doc["orbit_mesh"])
    landmarks = load_landmarks(base / doc["orbit_landmarks"])
    _validate_orbit_orientation(orbit, landmarks, doc.get("orbit_up_label"))
    plates = [load_plate(base / rel) for rel in doc["plates"]]
    return Case(
        case_id=doc["case_id"],
        case_dir=base,
        bone_mesh=bone,
        orbit_mesh=orbit,
        orbit_landmarks=landmarks,
        orbit_stop_label=doc["orbit_stop_label"],
        plates=plates,
    )


# -- placement state persistence ---------------------------------------------

def _placement_to_doc(p: Placement) -> dict:
    return {
        "plate_id": p.plate_id,
        "matrix": p.transform.matrix().tolist(),
        "pivot": None if p.pivot is None else p.pivot.tolist(),
        "plate_stop": None if p.plate_stop is None else p.plate_stop.tolist(),
        "anchored": p.anchored,
        "history": [
            {
                "timestamp": e.timestamp,
                "op": e.op,
                "matrix": [list(row) for row in e.matrix],
                "pivot": None if e.pivot is None else list(e.pivot),
                "anchored": e.anchored,
            }
            for e in p.history
        ],
    }


def _placement_from_doc(doc: dict) -> Placement:
    history = tuple(
        HistoryEntry(
            timestamp=e["timestamp"],
            op=e["op"],
            matrix=tuple(tuple(row) for row in e["matrix"]),
            pivot=None if e["pivot"] is None else tuple(e["pivot"]),
            anchored=e["anchored"],
        )
        for e in doc.get("history", [])
    )
    return Placement(
        plate_id=doc["plate_id"],
        transform=RigidTransform.from_matrix(np.asarray(doc["matrix"])),
        pivot=doc.get("pivot"),
        plate_stop=doc.get("plate_stop"),
        anchored=doc.get("anchored", False),
        history=history,
    )


def save_case_state(case: Case, events, directory=None) -> Path:
    """Write state.json + events.ndjson next to the case manifest."""
    from .events import write_events

    directory = Path(directory) if directory is not None else case.case_dir
    state = {
        "schema_version": CASE_SCHEMA_VERSION,
        "case_id": case.case_id,
        "placements": {
            pid: _placement_to_doc(p) for pid, p in sorted(case.placements.items())
        },
    }
    (directory / "state.json").write_text(json.dumps(state, indent=2, sort_keys=True) + "\n")
    write_events(events, directory / "events.ndjson")
    return directory


def load_case_state(case: Case, directory=None):
    """Restore placements and the event log saved by save_case_state.
    Returns the list of events (empty when no state exists)."""
    from .events import read_events

    directory = Path(directory) if directory is not None else case.case_dir
    state_path = directory / "state.json"
    if state_path.exists():
        doc = json.loads(state_path.read_text())
        version = doc.get("schema_version", 1)
        if version > CASE_SCHEMA_VERSION:
            raise SchemaVersionError(version, CASE_SCHEMA_VERSION)
        for pid, pdoc in doc.get("placements", {}).items():
            if pid not in case.plates:
                raise InvalidInputError(f"state references unknown plate {pid!r}")
            case.placements[pid] = _placement_from_doc(pdoc)
    return read_events(directory / "events.ndjson")
