"""Plate ranking by overall mean edge-specific distance."""
from __future__ import annotations

from dataclasses import dataclass

from ..errors import InvalidInputError
from .plate import CANONICAL_CURVES


@dataclass(frozen=True)
class RankedPlate:
    plate_id: str
    mean: float
    rank: int


@dataclass(frozen=True)
class PlateRanking:
    overall: tuple          # RankedPlate, ascending by overall_edge_mean
    per_edge: dict          # curve name -> tuple of RankedPlate

    def rank_of(self, plate_id) -> int:
        for entry in self.overall:
            if entry.plate_id == plate_id:
                return entry.rank
        raise KeyError(plate_id)


def _rank(pairs):
    """Competition ranking of (plate_id, mean) pairs: ascending by mean,
    ties share the lower rank and preserve input order."""
    order = sorted(range(len(pairs)), key=lambda i: (pairs[i][1], i))
    ranked = []
    rank = 0
    prev_mean = None
    for pos, i in enumerate(order, start=1):
        plate_id, mean = pairs[i]
        if prev_mean is None or mean != prev_mean:
            rank = pos
            prev_mean = mean
        ranked.append(RankedPlate(plate_id, float(mean), rank))
    return tuple(ranked)


def rank_plates(reports) -> PlateRanking:
    """Rank FitReports ascending by overall_edge_mean; per-edge rankings
    use each curve's own mean."""
    reports = list(reports)
    if not reports:
        raise InvalidInputError("cannot rank an empty report list")
    overall = _rank([(r.plate_id, r.overall_edge_mean) for r in reports])
    per_edge = {}
    for name in CANONICAL_CURVES:
        per_edge[name] = _rank(
            [(r.plate_id, r.edge_means()[name]) for r in reports]
        )
    return PlateRanking(overall=overall, per_edge=per_edge)
