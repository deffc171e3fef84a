// View models for the comparison panel: ranking table rows and the
// per-edge scatter. Pure data in, pure data out; main.ts renders.

import type { RankingPayload } from "./types.js";

export interface TableRow {
    rank: number;
    plateId: string;
    overallMeanMm: number;
}

export interface ScatterPoint {
    plateId: string;
    curve: string;
    meanMm: number;
    x: number; // curve slot, 0..4
    y: number; // normalized 0 (best) .. 1 (worst) within the panel
}

export const CURVE_ORDER = [
    "anterior_floor",
    "anterior_medial_wall",
    "lateral_floor",
    "superior_medial_wall",
    "floor_wall_junction",
];

export function rankingRows(ranking: RankingPayload): TableRow[] {
    return ranking.ranking.map((e) => ({
        rank: e.rank,
        plateId: e.plate_id,
        overallMeanMm: e.overall_edge_mean_mm ?? 0,
    }));
}

export function scatterPoints(ranking: RankingPayload): ScatterPoint[] {
    const points: ScatterPoint[] = [];
    let maxMean = 0;
    for (const curve of CURVE_ORDER) {
        for (const entry of ranking.per_edge[curve] ?? []) {
            maxMean = Math.max(maxMean, entry.mean_mm ?? 0);
        }
    }
    const scale = maxMean > 0 ? maxMean : 1;
    CURVE_ORDER.forEach((curve, slot) => {
        for (const entry of ranking.per_edge[curve] ?? []) {
            const mean = entry.mean_mm ?? 0;
            points.push({
                plateId: entry.plate_id,
                curve,
                meanMm: mean,
                x: slot,
                y: mean / scale,
            });
        }
    });
    return points;
}

/** Stable color per plate for table chips and scatter dots. */
export function plateColor(plateId: string, plateIds: string[]): string {
    const palette = ["#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];
    const idx = Math.max(0, plateIds.indexOf(plateId));
    return palette[idx % palette.length];
}
