import { describe, expect, it, vi } from "vitest";

import {
    RateLimiter,
    RingDrag,
    applyMat,
    identity4,
    invertRigid,
    matMul,
    rotationAboutPivot,
} from "../src/gizmo.js";
import type { Matrix4, Vec3 } from "../src/types.js";

const PIVOT: Vec3 = [12.0, 37.0, 21.0];

function randomBase(seed: number): Matrix4 {
    // deterministic pseudo-random rigid base: rotation about a fixed axis
    const angle = Math.sin(seed * 12.9898) * Math.PI;
    const m = rotationAboutPivot([3, -1, 2], [0.3, 0.9, 0.3], angle);
    m[0][3] += seed;
    m[1][3] -= 2 * seed;
    return m;
}

describe("rotationAboutPivot", () => {
    it("fixes the pivot point", () => {
        const m = rotationAboutPivot(PIVOT, [0, 0, 1], 0.7);
        const moved = applyMat(m, PIVOT);
        expect(Math.hypot(moved[0] - PIVOT[0], moved[1] - PIVOT[1], moved[2] - PIVOT[2]))
            .toBeLessThan(1e-12);
    });

    it("rotates off-pivot points by the requested angle", () => {
        const m = rotationAboutPivot([0, 0, 0], [0, 0, 1], Math.PI / 2);
        const moved = applyMat(m, [1, 0, 0]);
        expect(moved[0]).toBeCloseTo(0, 12);
        expect(moved[1]).toBeCloseTo(1, 12);
    });
});

describe("RingDrag", () => {
    it("keeps the pivot fixed across a whole drag", () => {
        const base = randomBase(3);
        const drag = new RingDrag(base, PIVOT, [0.2, 1.0, -0.4]);
        for (let k = 0; k <= 50; k++) {
            const pose = drag.update((k / 50) * 2.0 - 1.0);
            expect(drag.pivotError(pose.matrix)).toBeLessThan(1e-6);
            expect(drag.pivotError(pose.matrix)).toBeLessThan(1e-9); // much tighter in practice
        }
    });

    it("rebuilds from the base pose so drags do not accumulate error", () => {
        const base = randomBase(1);
        const drag = new RingDrag(base, PIVOT, [0, 0, 1]);
        // a long wiggle ending at angle 0.5 equals a direct jump to 0.5
        let last = drag.update(0);
        for (let k = 0; k < 500; k++) last = drag.update(Math.sin(k) * 0.8);
        last = drag.update(0.5);
        const direct = matMul(rotationAboutPivot(PIVOT, [0, 0, 1], 0.5), base);
        for (let i = 0; i < 4; i++) {
            for (let j = 0; j < 4; j++) {
                expect(last.matrix[i][j]).toBeCloseTo(direct[i][j], 12);
            }
        }
    });

    it("two 45 degree updates equal one 90 degree update", () => {
        const base = identity4();
        const drag = new RingDrag(base, PIVOT, [0, 1, 0]);
        drag.update(Math.PI / 4);
        const twice = drag.update(Math.PI / 2); // absolute angle, same ring
        const direct = rotationAboutPivot(PIVOT, [0, 1, 0], Math.PI / 2);
        for (let i = 0; i < 3; i++) {
            for (let j = 0; j < 4; j++) {
                expect(twice.matrix[i][j]).toBeCloseTo(direct[i][j], 12);
            }
        }
    });
});

describe("invertRigid", () => {
    it("round-trips points", () => {
        const m = randomBase(7);
        const inv = invertRigid(m);
        const p: Vec3 = [4, -2, 9];
        const back = applyMat(inv, applyMat(m, p));
        expect(back[0]).toBeCloseTo(p[0], 10);
        expect(back[1]).toBeCloseTo(p[1], 10);
        expect(back[2]).toBeCloseTo(p[2], 10);
    });
});

describe("RateLimiter", () => {
    it("sends at most one payload per interval (20 Hz)", () => {
        vi.useFakeTimers();
        let now = 0;
        const sent: number[] = [];
        const limiter = new RateLimiter<number>((v) => sent.push(v), 50, () => now);
        for (let k = 0; k < 100; k++) {
            limiter.push(k);
            now += 5; // pushes every 5 ms for 500 ms
            vi.advanceTimersByTime(5);
        }
        limiter.flush();
        // 500 ms at 20 Hz: at most 11 sends (first fires immediately)
        expect(sent.length).toBeLessThanOrEqual(11);
        expect(sent[sent.length - 1]).toBe(99); // trailing payload always lands
        vi.useRealTimers();
    });

    it("flush forwards the pending payload immediately", () => {
        const sent: number[] = [];
        let now = 0;
        const limiter = new RateLimiter<number>((v) => sent.push(v), 50, () => now);
        limiter.push(1);
        limiter.push(2); // within the interval: pending
        expect(sent).toEqual([1]);
        limiter.flush();
        expect(sent).toEqual([1, 2]);
    });
});
