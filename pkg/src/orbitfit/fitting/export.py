"""Deterministic export of fit metrics, heatmaps, and rankings.

Creates <out_dir>/fit_output/fit_metrics/ with, per plate: the raw
plate-wide distance CSV, the edge distance CSV, the heatmap PLY, and the
histogram CSV; plus ranking.json and a manifest of file hashes. Floats in
CSVs are fixed at six decimals so re-exports are byte-identical.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

from ..errors import InvalidInputError, OrbitFitError
from .heatmap import DEFAULT_RANGE, generate_heatmap
from .ranking import PlateRanking

FIT_SUBDIR = Path("fit_output") / "fit_metrics"


def _write(path: Path, text: str):
    try:
        path.write_text(text)
    except OSError as exc:
        raise OrbitFitError(f"failed writing {path}: {exc}")


def _plate_wide_csv(report) -> str:
    lines = ["vertex_id,signed_distance_mm"]
    lines += [f"{i},{d:.6f}" for i, d in enumerate(report.plate_wide)]
    return "\n".join(lines) + "\n"


def _edge_csv(report) -> str:
    lines = ["curve,sample_index,distance_mm,projected_x_mm,projected_y_mm,projected_z_mm"]
    for edge in report.edge_reports:
        for k, (d, p) in enumerate(zip(edge.point_distances, edge.projected_points)):
            lines.append(
                f"{edge.curve_name},{k},{d:.6f},{p[0]:.6f},{p[1]:.6f},{p[2]:.6f}"
            )
    return "\n".join(lines) + "\n"


def ranking_payload(ranking: PlateRanking) -> dict:
    return {
        "ranking": [
            {"rank": e.rank, "plate_id": e.plate_id, "overall_edge_mean_mm": e.mean}
            for e in ranking.overall
        ],
        "per_edge": {
            name: [
                {"rank": e.rank, "plate_id": e.plate_id, "mean_mm": e.mean}
                for e in entries
            ]
            for name, entries in ranking.per_edge.items()
        },
    }


def export_fit_outputs(case_id, reports, ranking: PlateRanking, out_dir,
                       display_range=DEFAULT_RANGE) -> Path:
    """Write the full export tree; returns the fit_metrics directory."""
    reports = list(reports)
    if not reports:
        raise InvalidInputError("nothing to export: no fit reports")
    out_dir = Path(out_dir)
    target = out_dir / FIT_SUBDIR
    target.mkdir(parents=True, exist_ok=True)

    written = []
    for report in sorted(reports, key=lambda r: r.plate_id):
        base = report.plate_id
        wide_path = target / f"{base}_plate_distances.csv"
        _write(wide_path, _plate_wide_csv(report))
        edge_path = target / f"{base}_edge_distances.csv"
        _write(edge_path, _edge_csv(report))
        heat_path = target / f"{base}_heatmap.ply"
        hist_path = target / f"{base}_histogram.csv"
        generate_heatmap(
            report.plate_mesh, report.plate_wide, heat_path, hist_path,
            display_range=display_range,
        )
        written += [wide_path, edge_path, heat_path, hist_path]

    ranking_path = target / "ranking.json"
    payload = {"case_id": str(case_id)}
    payload.update(ranking_payload(ranking))
    _write(ranking_path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    written.append(ranking_path)

    manifest = {
        "case_id": str(case_id),
        "files": {
            p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in written
        },
    }
    _write(target / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return target
