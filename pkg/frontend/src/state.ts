// Viewer state: what is visible, which plate owns the gizmo, the heatmap
// display range, and the in-flight request bookkeeping that drops stale
// responses.

import type { FitPayload, LiveSummary } from "./types.js";

export interface OverlayToggles {
    collisions: boolean;
    edgeCurves: boolean;
    projections: boolean;
}

export class ViewState {
    meshOpacity: Record<string, number> = {};
    activePlate: string | null = null;
    displayRange: [number, number] = [-5, 5];
    overlays: OverlayToggles = { collisions: true, edgeCurves: true, projections: true };
    lastSummary: Record<string, LiveSummary> = {};
    lastFit: Record<string, FitPayload> = {};

    setActivePlate(plateId: string): void {
        this.activePlate = plateId; // exactly one plate owns the gizmo
    }

    setDisplayRange(lo: number, hi: number): void {
        if (!(lo < hi)) throw new Error(`display range needs lo < hi, got ${lo}..${hi}`);
        this.displayRange = [lo, hi];
    }

    applySummary(summary: LiveSummary): void {
        this.lastSummary[summary.plate_id] = summary;
    }

    applyFit(fit: FitPayload): void {
        this.lastFit[fit.plate_id] = fit;
    }
}

/**
 * Sequence gate for streamed mutations: responses are applied only when
 * they belong to the newest request; superseded responses are discarded.
 */
export class SequenceGate {
    private next = 0;
    private newest = -1;

    issue(): number {
        this.newest = this.next;
        return this.next++;
    }

    accept(seq: number): boolean {
        return seq === this.newest;
    }
}
