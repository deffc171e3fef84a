// Payload shapes of the case service JSON API.

export type Matrix4 = number[][]; // 4x4 row-major
export type Vec3 = [number, number, number];

export interface CaseSummary {
    case_id: string;
    revision: number;
    plate_ids: string[];
    orbit_stop: Vec3;
    orbit_stop_label: string;
    bone_watertight: boolean;
    mesh_ids: string[];
}

export interface MeshPayload {
    id: string;
    vertices: number[][];
    triangles: number[][];
    normals: number[][];
    stop_point?: Vec3;
    edge_curves?: Record<string, number[][]>;
}

export interface CollisionSummary {
    count: number;
    total: number;
    percent: number;
    percent_text: string;
    collision_points: number[];
}

export interface LiveSummary {
    plate_id: string;
    revision: number;
    collision: CollisionSummary;
    edge_means_mm: Record<string, number>;
    matrix: Matrix4;
    stop_aligned: boolean;
}

export interface PlacementInfo {
    matrix: Matrix4;
    pivot: Vec3 | null;
    anchored: boolean;
    stop_aligned: boolean;
}

export interface EdgePayload {
    curve: string;
    mean_mm: number;
    distances_mm: number[];
    projected_points: number[][];
}

export interface FitPayload {
    plate_id: string;
    overall_edge_mean_mm: number;
    plate_wide_mm: number[];
    edges: EdgePayload[];
    collision: CollisionSummary;
}

export interface RankedEntry {
    rank: number;
    plate_id: string;
    overall_edge_mean_mm?: number;
    mean_mm?: number;
}

export interface RankingPayload {
    ranking: RankedEntry[];
    per_edge: Record<string, RankedEntry[]>;
}

export interface SessionEventRecord {
    timestamp: number;
    actor: string;
    action: string;
    payload: Record<string, unknown>;
}
