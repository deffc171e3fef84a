"""HTTP/JSON API for the interactive viewer loop.

Mutations are strictly serialized per case (engine lock); requests may
carry the last-seen revision for optimistic concurrency (409 when stale).
Contract violations map to 422, unknown ids to 404.
"""
from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ..errors import InvalidInputError, OrbitFitError
from ..fitting import ranking_payload
from .engine import CaseSession, RankingUnavailableError, StaleRevisionError


class TransformBody(BaseModel):
    matrix: list[list[float]]
    revision: int | None = None


class PivotRotateBody(BaseModel):
    axis: list[float]
    angle_rad: float
    revision: int | None = None


class CurveBody(BaseModel):
    points: list[list[float]]
    revision: int | None = None


class MutationBody(BaseModel):
    revision: int | None = None


def _fit_payload(report) -> dict:
    return {
        "plate_id": report.plate_id,
        "overall_edge_mean_mm": report.overall_edge_mean,
        "plate_wide_mm": [float(v) for v in report.plate_wide],
        "edges": [
            {
                "curve": e.curve_name,
                "mean_mm": e.mean,
                "distances_mm": [float(v) for v in e.point_distances],
                "projected_points": [list(map(float, p)) for p in e.projected_points],
            }
            for e in report.edge_reports
        ],
        "collision": {
            "count": report.collision.collision_count,
            "total": report.collision.total_points,
            "percent": report.collision.percent,
            "percent_text": report.collision.percent_text,
            "collision_points": list(report.collision.collision_points),
        },
    }


def _mesh_payload(mesh_id, mesh) -> dict:
    return {
        "id": mesh_id,
        "vertices": [list(map(float, v)) for v in mesh.vertices],
        "triangles": [list(map(int, t)) for t in mesh.triangles],
        "normals": [list(map(float, n)) for n in mesh.vertex_normals],
    }


def create_app(session: CaseSession, static_dir=None) -> FastAPI:
    app = FastAPI(title="orbitfit", version="0.1.0")

    @app.exception_handler(KeyError)
    async def _missing(request: Request, exc: KeyError):
        return JSONResponse(status_code=404, content={"detail": f"unknown id {exc}"})

    @app.exception_handler(StaleRevisionError)
    async def _stale(request: Request, exc: StaleRevisionError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(RankingUnavailableError)
    async def _no_ranking(request: Request, exc: RankingUnavailableError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(InvalidInputError)
    async def _contract(request: Request, exc: InvalidInputError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(OrbitFitError)
    async def _other(request: Request, exc: OrbitFitError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/case")
    def case_summary():
        case = session.case
        return {
            "case_id": case.case_id,
            "revision": session.revision,
            "plate_ids": sorted(case.plates),
            "orbit_stop": list(map(float, case.orbit_stop)),
            "orbit_stop_label": case.orbit_stop_label,
            "bone_watertight": case.bone_watertight,
            "mesh_ids": ["bone", "orbit"] + sorted(case.plates),
        }

    @app.get("/meshes/{mesh_id}")
    def mesh(mesh_id: str):
        case = session.case
        if mesh_id == "bone":
            return _mesh_payload(mesh_id, case.bone_mesh)
        if mesh_id == "orbit":
            return _mesh_payload(mesh_id, case.orbit_mesh)
        if mesh_id in case.plates:
            plate = case.plates[mesh_id]
            payload = _mesh_payload(mesh_id, plate.mesh)
            payload["stop_point"] = list(map(float, plate.stop_point))
            payload["edge_curves"] = {
                name: [list(map(float, p)) for p in curve.points]
                for name, curve in plate.edge_curves.items()
            }
            return payload
        raise KeyError(mesh_id)

    @app.get("/placements")
    def placements():
        return {
            pid: {
                "matrix": p.transform.matrix().tolist(),
                "pivot": None if p.pivot is None else list(map(float, p.pivot)),
                "anchored": p.anchored,
                "stop_aligned": p.pivot is not None,
            }
            for pid, p in sorted(session.case.placements.items())
        }

    @app.put("/placements/{plate_id}")
    def put_placement(plate_id: str, body: TransformBody):
        return session.set_plate_transform(
            plate_id, body.matrix, revision=body.revision, actor="api"
        )

    @app.post("/placements/{plate_id}/initial-align")
    def post_initial_align(plate_id: str, body: MutationBody | None = None):
        revision = body.revision if body else None
        return session.initial_align(plate_id, revision=revision, actor="api")

    @app.post("/placements/{plate_id}/stop-align")
    def post_stop_align(plate_id: str, body: MutationBody | None = None):
        revision = body.revision if body else None
        return session.stop_align(plate_id, revision=revision, actor="api")

    @app.post("/placements/{plate_id}/pivot-rotate")
    def post_pivot_rotate(plate_id: str, body: PivotRotateBody):
        return session.rotate(
            plate_id, body.axis, body.angle_rad, revision=body.revision, actor="api"
        )

    @app.post("/placements/{plate_id}/reset")
    def post_reset(plate_id: str, body: MutationBody | None = None):
        revision = body.revision if body else None
        return session.reset(plate_id, revision=revision, actor="api")

    @app.get("/fit/{plate_id}")
    def fit(plate_id: str):
        if plate_id not in session.case.plates:
            raise KeyError(plate_id)
        return _fit_payload(session.fit_report(plate_id))

    @app.get("/ranking")
    def ranking():
        return ranking_payload(session.ranking())

    @app.put("/plates/{plate_id}/curves/{curve_name}")
    def put_curve(plate_id: str, curve_name: str, body: CurveBody):
        return session.update_curve(
            plate_id, curve_name, body.points, revision=body.revision, actor="api"
        )

    @app.get("/events")
    def events():
        return [
            {
                "timestamp": e.timestamp,
                "actor": e.actor,
                "action": e.action,
                "payload": e.payload,
            }
            for e in session.events
        ]

    @app.post("/save")
    def save():
        session.save()
        return {"saved": True, "revision": session.revision}

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="viewer")

    return app


def serve(case_dir, port=8000, host="127.0.0.1", static_dir=None):
    """Run the viewer service for one case directory."""
    import uvicorn

    session = CaseSession.open(case_dir)
    app = create_app(session, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)
