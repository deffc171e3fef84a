// End-to-end loop against the real case service: scripted rotation-ring
// drag with debounced placement updates, service-side pivot verification
// through the event log, and the trim-and-rerotate workflow (curve
// repositioned medially, pose re-adjusted, overall mean improves).

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { RateLimiter, RingDrag, applyMat } from "../src/gizmo.js";
import { SequenceGate } from "../src/state.js";
import type { LiveSummary, Matrix4, Vec3 } from "../src/types.js";

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;
const PID = "vendor_a_small";

let server: ChildProcess;
let api: ApiClient;

function sleep(ms: number): Promise<void> {
    return new Promise((resolve) => setTimeout(resolve, ms));
}

async function waitForService(timeoutMs = 90_000): Promise<void> {
    const deadline = Date.now() + timeoutMs;
    while (Date.now() < deadline) {
        try {
            const r = await fetch(`${BASE}/case`);
            if (r.ok) return;
        } catch {
            // not up yet
        }
        await sleep(250);
    }
    throw new Error("case service did not come up");
}

beforeAll(async () => {
    const caseDir = mkdtempSync(join(tmpdir(), "orbitfit-ui-"));
    const synth = spawnSync(
        "python3", ["-m", "orbitfit.synthetic", caseDir, "--plates", "2"],
        { encoding: "utf-8" },
    );
    if (synth.status !== 0) throw new Error(`demo case failed: ${synth.stderr}`);
    server = spawn(
        "python3",
        ["-m", "orbitfit.session.cli", "serve", caseDir, "--port", String(PORT)],
        { stdio: "ignore" },
    );
    api = new ApiClient(BASE);
    await waitForService();
}, 120_000);

afterAll(() => {
    server?.kill();
});

describe("interactive loop", () => {
    let stopAligned: LiveSummary;
    let pivot: Vec3;
    let plateStop: Vec3;
    let orbitStop: Vec3;

    it("registers the plate through the API", async () => {
        await api.initialAlign(PID);
        stopAligned = await api.stopAlign(PID);
        const placements = await api.getPlacements();
        expect(placements[PID].stop_aligned).toBe(true);
        pivot = placements[PID].pivot as Vec3;
        const mesh = await api.getMesh(PID);
        plateStop = mesh.stop_point as Vec3;
        orbitStop = (await api.getCase()).orbit_stop;
        expect(pivot).toEqual(orbitStop);
    });

    it("drags a rotation ring with debounced updates", async () => {
        const drag = new RingDrag(stopAligned.matrix, pivot, [1, 0, 0]);
        const gate = new SequenceGate();
        const inflight: Promise<unknown>[] = [];
        let lastApplied: LiveSummary | null = null;
        let lastAppliedAt = 0;

        const limiter = new RateLimiter<Matrix4>((matrix) => {
            const seq = gate.issue();
            inflight.push(
                api.putPlacement(PID, matrix).then((summary) => {
                    if (!gate.accept(seq)) return; // stale response discarded
                    lastApplied = summary;
                    lastAppliedAt = Date.now();
                }),
            );
        }, 50);

        // ~400 ms drag from 0 to -0.08 rad at ~50 pointer events
        for (let k = 1; k <= 50; k++) {
            const pose = drag.update((-0.08 * k) / 50);
            expect(drag.pivotError(pose.matrix)).toBeLessThan(1e-9);
            limiter.push(pose.matrix);
            await sleep(8);
        }
        const dragEnd = Date.now();
        limiter.flush();
        await Promise.all(inflight);

        // debounce: ~400 ms at 20 Hz plus the trailing flush
        expect(limiter.sent).toBeLessThanOrEqual(12);
        expect(limiter.sent).toBeGreaterThanOrEqual(2);

        // live metrics landed within 200 ms of drag end
        expect(lastApplied).not.toBeNull();
        expect(lastAppliedAt - dragEnd).toBeLessThan(200);
        const summary = lastApplied as unknown as LiveSummary;
        expect(summary.collision.percent_text).toMatch(/^\d+\.\d\d$/);
        expect(Object.keys(summary.edge_means_mm).length).toBe(5);

        // service-side pivot verification: every transform the drag sent
        // keeps the plate stop on the orbital stop within 1e-6 mm
        const events = await api.getEvents();
        const moves = events.filter(
            (e) => e.action === "set_plate_transform" &&
                   (e.payload as { plate_id?: string }).plate_id === PID,
        );
        expect(moves.length).toBeGreaterThanOrEqual(limiter.sent);
        for (const move of moves.slice(-limiter.sent)) {
            const { matrix } = move.payload as { matrix: Matrix4 };
            const stopNow = applyMat(matrix, plateStop);
            const err = Math.hypot(
                stopNow[0] - orbitStop[0],
                stopNow[1] - orbitStop[1],
                stopNow[2] - orbitStop[2],
            );
            expect(err).toBeLessThan(1e-6);
        }
    }, 60_000);

    it("trim workflow: reposition curve, re-rotate, improved overall mean", async () => {
        await api.resetPlacement(PID);
        const before = await api.getFit(PID);

        // move the lateral sampling curve medially: reuse an interior
        // grid column of the plate (still on the surface)
        const mesh = await api.getMesh(PID);
        const nx = 14;
        const ny = 14;
        const column = 10;
        const medial: number[][] = [];
        for (let j = 0; j < ny; j++) medial.push(mesh.vertices[column * ny + j]);
        const afterCurve = await api.putCurve(PID, "lateral_floor", medial);
        expect(afterCurve.plate_id).toBe(PID);

        // the shortened margin allows further inferior rotation
        await api.pivotRotate(PID, [1, 0, 0], -0.03);
        const after = await api.getFit(PID);
        expect(after.overall_edge_mean_mm).toBeLessThan(before.overall_edge_mean_mm);
    }, 60_000);

    it("rejected transforms surface as errors the gizmo can snap back from", async () => {
        const bad: Matrix4 = [
            [0.9, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [0, 0, 0, 1],
        ];
        await expect(api.putPlacement(PID, bad)).rejects.toMatchObject({ status: 422 });
    });

    it("ranking flows through after fits", async () => {
        await api.initialAlign("vendor_b_small");
        await api.stopAlign("vendor_b_small");
        await api.getFit("vendor_b_small");
        await api.getFit(PID);
        const ranking = await api.getRanking();
        expect(ranking.ranking.map((r) => r.rank)).toEqual([1, 2]);
    });
});
