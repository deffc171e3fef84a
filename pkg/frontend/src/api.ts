import type {
    CaseSummary,
    FitPayload,
    LiveSummary,
    Matrix4,
    MeshPayload,
    PlacementInfo,
    RankingPayload,
    SessionEventRecord,
} from "./types.js";

export class ApiError extends Error {
    constructor(public status: number, public detail: string) {
        super(`HTTP ${status}: ${detail}`);
    }
}

async function toJson<T>(response: Response): Promise<T> {
    if (!response.ok) {
        let detail = response.statusText;
        try {
            const body = await response.json();
            if (body && typeof body.detail === "string") detail = body.detail;
        } catch {
            // non-JSON error body; keep statusText
        }
        throw new ApiError(response.status, detail);
    }
    return response.json() as Promise<T>;
}

/** Thin typed client; the viewer never computes metrics itself, it only
 *  displays what these calls return. */
export class ApiClient {
    constructor(private base: string = "") {}

    private url(path: string): string {
        return this.base + path;
    }

    getCase(): Promise<CaseSummary> {
        return fetch(this.url("/case")).then((r) => toJson<CaseSummary>(r));
    }

    getMesh(id: string): Promise<MeshPayload> {
        return fetch(this.url(`/meshes/${id}`)).then((r) => toJson<MeshPayload>(r));
    }

    getPlacements(): Promise<Record<string, PlacementInfo>> {
        return fetch(this.url("/placements")).then((r) =>
            toJson<Record<string, PlacementInfo>>(r),
        );
    }

    putPlacement(plateId: string, matrix: Matrix4, revision?: number): Promise<LiveSummary> {
        return fetch(this.url(`/placements/${plateId}`), {
            method: "PUT",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ matrix, revision: revision ?? null }),
        }).then((r) => toJson<LiveSummary>(r));
    }

    initialAlign(plateId: string): Promise<LiveSummary> {
        return fetch(this.url(`/placements/${plateId}/initial-align`), {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({}),
        }).then((r) => toJson<LiveSummary>(r));
    }

    stopAlign(plateId: string): Promise<LiveSummary> {
        return fetch(this.url(`/placements/${plateId}/stop-align`), {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({}),
        }).then((r) => toJson<LiveSummary>(r));
    }

    pivotRotate(plateId: string, axis: number[], angleRad: number): Promise<LiveSummary> {
        return fetch(this.url(`/placements/${plateId}/pivot-rotate`), {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ axis, angle_rad: angleRad }),
        }).then((r) => toJson<LiveSummary>(r));
    }

    resetPlacement(plateId: string): Promise<LiveSummary> {
        return fetch(this.url(`/placements/${plateId}/reset`), {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({}),
        }).then((r) => toJson<LiveSummary>(r));
    }

    getFit(plateId: string): Promise<FitPayload> {
        return fetch(this.url(`/fit/${plateId}`)).then((r) => toJson<FitPayload>(r));
    }

    getRanking(): Promise<RankingPayload> {
        return fetch(this.url("/ranking")).then((r) => toJson<RankingPayload>(r));
    }

    putCurve(plateId: string, curveName: string, points: number[][]): Promise<LiveSummary> {
        return fetch(this.url(`/plates/${plateId}/curves/${curveName}`), {
            method: "PUT",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ points }),
        }).then((r) => toJson<LiveSummary>(r));
    }

    getEvents(): Promise<SessionEventRecord[]> {
        return fetch(this.url("/events")).then((r) => toJson<SessionEventRecord[]>(r));
    }
}
