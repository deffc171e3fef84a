"""Command-line interface.

Subcommands: reconstruct, register, fit, rank, serve, replay. Exit codes:
0 success, 2 contract violations (including usage errors), 1 I/O and
other runtime failures.
"""
from __future__ import annotations

import json
import shutil
import sys
from pathlib import Path

import click
import numpy as np

from ..errors import InvalidInputError, OrbitFitError
from ..fitting import export_fit_outputs, ranking_payload, rank_plates
from ..geometry import MirrorPlane, load_mesh, save_mesh
from ..registration import (
    CpdParams,
    IcpParams,
    reconstruct_orbit,
    save_deformation,
    save_transform,
)
from .engine import CaseSession, replay_events
from .events import read_events


def _load_config(config_path, seed):
    doc = {}
    if config_path:
        doc = json.loads(Path(config_path).read_text())
    icp_kwargs = dict(doc.get("icp", {}))
    cpd_kwargs = dict(doc.get("cpd", {}))
    if seed is not None:
        icp_kwargs["seed"] = seed
    return IcpParams(**icp_kwargs), CpdParams(**cpd_kwargs), doc


def _parse_vec(text, name):
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != 3:
        raise InvalidInputError(f"{name} must be three comma-separated numbers")
    return np.array([float(p) for p in parts])


@click.group()
def main():
    """Plate-to-orbit registration and fit comparison."""


@main.command()
@click.argument("skull_mesh", type=click.Path())
@click.option("--method", type=click.Choice(["rigid", "affine", "cpd"]), default="rigid")
@click.option("--plane-point", default="0,0,0", show_default=True)
@click.option("--plane-normal", default="1,0,0", show_default=True)
@click.option("--roi", "roi_path", type=click.Path(), default=None,
              help="JSON list of intact-bone vertex indices")
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="JSON with icp/cpd parameter overrides")
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_dir", type=click.Path(), default="reconstruction")
def reconstruct(skull_mesh, method, plane_point, plane_normal, roi_path,
                config_path, seed, out_dir):
    """Mirror the skull and register the mirrored side back onto it."""
    icp, cpd, _ = _load_config(config_path, seed)
    skull = load_mesh(skull_mesh)
    plane = MirrorPlane(_parse_vec(plane_point, "--plane-point"),
                        _parse_vec(plane_normal, "--plane-normal"))
    roi = None
    if roi_path:
        indices = json.loads(Path(roi_path).read_text())
        roi = np.zeros(skull.n_vertices, dtype=bool)
        roi[np.asarray(indices, dtype=int)] = True
    result = reconstruct_orbit(
        skull, plane, roi=roi, method=method, icp=icp, cpd=cpd,
        seed=seed if seed is not None else 42,
    )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_mesh(result.reconstructed_orbit, out / "reconstructed_orbit.ply")
    save_transform(out / "transform.txt", "reconstruction", result.method, result.transform)
    if result.deformation is not None:
        save_deformation(out / "deformation.txt", result.deformation)
    click.echo(json.dumps({
        "method": result.method,
        "residual_rms_mm": result.residual_rms,
        "out": str(out),
    }, sort_keys=True))


@main.command()
@click.argument("case_dir", type=click.Path())
@click.argument("plate_id", required=False)
def register(case_dir, plate_id):
    """Landmark initial placement followed by posterior-stop alignment
    (all plates when PLATE_ID is omitted)."""
    session = CaseSession.open(case_dir)
    plate_ids = [plate_id] if plate_id else sorted(session.case.plates)
    summaries = []
    for pid in plate_ids:
        if pid not in session.case.plates:
            raise InvalidInputError(f"unknown plate {pid!r}")
        session.initial_align(pid)
        summaries.append(session.stop_align(pid))
    session.save()
    for s in summaries:
        click.echo(json.dumps({
            "plate_id": s["plate_id"],
            "collision_percent": s["collision"]["percent_text"],
            "edge_means_mm": s["edge_means_mm"],
        }, sort_keys=True))


@main.command()
@click.argument("case_dir", type=click.Path())
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="export root (defaults to the case directory)")
@click.option("--samples-per-curve", type=int, default=10, show_default=True)
def fit(case_dir, out_dir, samples_per_curve):
    """Compute fit reports for every plate and export the metrics tree."""
    session = CaseSession.open(case_dir)
    reports = [
        session.fit_report(pid, samples_per_curve=samples_per_curve)
        for pid in sorted(session.case.plates)
    ]
    ranking = rank_plates(reports)
    target = export_fit_outputs(
        session.case.case_id, reports, ranking,
        Path(out_dir) if out_dir else session.case.case_dir,
    )
    click.echo(str(target))


@main.command()
@click.argument("case_dir", type=click.Path())
@click.option("--samples-per-curve", type=int, default=10, show_default=True)
def rank(case_dir, samples_per_curve):
    """Print the plate ranking (same payload as ranking.json)."""
    session = CaseSession.open(case_dir)
    reports = [
        session.fit_report(pid, samples_per_curve=samples_per_curve)
        for pid in sorted(session.case.plates)
    ]
    ranking = rank_plates(reports)
    payload = {"case_id": session.case.case_id}
    payload.update(ranking_payload(ranking))
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


@main.command()
@click.argument("case_dir", type=click.Path())
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--static", "static_dir", type=click.Path(), default=None,
              help="viewer asset bundle to serve at /")
def serve(case_dir, port, host, static_dir):
    """Run the interactive viewer service."""
    from .service import serve as run_service

    run_service(case_dir, port=port, host=host, static_dir=static_dir)


@main.command()
@click.argument("case_dir", type=click.Path())
@click.option("--events", "events_path", type=click.Path(), default=None,
              help="event log (defaults to CASE_DIR/events.ndjson)")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="replay into a copy of the case instead of in place")
def replay(case_dir, events_path, out_dir):
    """Re-execute a recorded session from the initial case state."""
    case_dir = Path(case_dir)
    events_path = Path(events_path) if events_path else case_dir / "events.ndjson"
    events = read_events(events_path)
    if out_dir is not None:
        out_dir = Path(out_dir)
        if out_dir.exists():
            raise InvalidInputError(f"replay --out target already exists: {out_dir}")
        shutil.copytree(case_dir, out_dir)
        for stale in (out_dir / "state.json", out_dir / "events.ndjson"):
            stale.unlink(missing_ok=True)
        target_dir = out_dir
    else:
        target_dir = case_dir
    session = replay_events(target_dir, events)
    session.save()
    click.echo(json.dumps({
        "replayed_events": len(events),
        "revision": session.revision,
        "case_dir": str(target_dir),
    }, sort_keys=True))


def run():
    """Entry point with the documented exit-code contract."""
    try:
        main.main(standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        sys.exit(2)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.exceptions.Abort:
        sys.exit(1)
    except InvalidInputError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except (OrbitFitError, OSError, json.JSONDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    sys.exit(0)


if __name__ == "__main__":
    run()
