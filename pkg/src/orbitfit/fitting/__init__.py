"""Plate placement, collision checking, fit metrics, ranking, export."""

from .collision import (
    CollisionReport,
    NonWatertightBoneWarning,
    check_bone_for_collisions,
    detect_collisions,
)
from .export import export_fit_outputs, ranking_payload
from .heatmap import (
    DEFAULT_RANGE,
    distance_colors,
    distance_histogram,
    generate_heatmap,
)
from .metrics import (
    DEFAULT_SAMPLES_PER_CURVE,
    EdgeReport,
    FitReport,
    compute_fit_report,
    edge_distances,
    plate_wide_distances,
)
from .placement import (
    HistoryEntry,
    Placement,
    initial_landmark_placement,
    nudge_translate,
    pivot_rotate,
    posterior_stop_align,
    reset_to_posterior_stop,
    set_initial_transform,
)
from .plate import (
    CANONICAL_CURVES,
    CURVE_SURFACE_TOL,
    PlateModel,
    load_plate,
    update_edge_curve,
)
from .ranking import PlateRanking, RankedPlate, rank_plates

__all__ = [
    "CANONICAL_CURVES",
    "CURVE_SURFACE_TOL",
    "CollisionReport",
    "DEFAULT_RANGE",
    "DEFAULT_SAMPLES_PER_CURVE",
    "EdgeReport",
    "FitReport",
    "HistoryEntry",
    "NonWatertightBoneWarning",
    "Placement",
    "PlateModel",
    "PlateRanking",
    "RankedPlate",
    "check_bone_for_collisions",
    "compute_fit_report",
    "detect_collisions",
    "initial_landmark_placement",
    "distance_colors",
    "distance_histogram",
    "edge_distances",
    "export_fit_outputs",
    "generate_heatmap",
    "load_plate",
    "nudge_translate",
    "pivot_rotate",
    "plate_wide_distances",
    "posterior_stop_align",
    "rank_plates",
    "ranking_payload",
    "reset_to_posterior_stop",
    "set_initial_transform",
    "update_edge_curve",
]
