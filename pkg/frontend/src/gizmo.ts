// Pivot-locked rotation gizmo math. All matrices are 4x4 row-major
// nested arrays, matching the service wire format. During a ring drag
// we rebuild the pose as rotate(pivot, axis, angle) * basePose, so the
// pivot stays put no matter how far the drag goes.

import type { Matrix4, Vec3 } from "./types.js";

export function identity4(): Matrix4 {
    return [
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, 1, 0],
        [0, 0, 0, 1],
    ];
}

export function matMul(a: Matrix4, b: Matrix4): Matrix4 {
    const out = identity4();
    for (let i = 0; i < 4; i++) {
        for (let j = 0; j < 4; j++) {
            let s = 0;
            for (let k = 0; k < 4; k++) s += a[i][k] * b[k][j];
            out[i][j] = s;
        }
    }
    return out;
}

export function applyMat(m: Matrix4, p: Vec3): Vec3 {
    const out: Vec3 = [0, 0, 0];
    for (let i = 0; i < 3; i++) {
        out[i] = m[i][0] * p[0] + m[i][1] * p[1] + m[i][2] * p[2] + m[i][3];
    }
    return out;
}

export function rotationAboutAxis(axis: Vec3, angle: number): Matrix4 {
    const n = Math.hypot(axis[0], axis[1], axis[2]);
    if (n === 0) throw new Error("rotation axis has zero length");
    const [x, y, z] = [axis[0] / n, axis[1] / n, axis[2] / n];
    const c = Math.cos(angle);
    const s = Math.sin(angle);
    const cc = 1 - c;
    return [
        [c + x * x * cc, x * y * cc - z * s, x * z * cc + y * s, 0],
        [y * x * cc + z * s, c + y * y * cc, y * z * cc - x * s, 0],
        [z * x * cc - y * s, z * y * cc + x * s, c + z * z * cc, 0],
        [0, 0, 0, 1],
    ];
}

/** Rotation of `angle` about `axis` through `pivot`. */
export function rotationAboutPivot(pivot: Vec3, axis: Vec3, angle: number): Matrix4 {
    const r = rotationAboutAxis(axis, angle);
    const rp = applyMat(r, pivot);
    r[0][3] = pivot[0] - rp[0];
    r[1][3] = pivot[1] - rp[1];
    r[2][3] = pivot[2] - rp[2];
    return r;
}

export interface DragPose {
    matrix: Matrix4;
    angle: number;
}

/**
 * One rotation-ring drag. The base pose is frozen at drag start; every
 * pointer move rebuilds the absolute pose about the pivot, so errors do
 * not accumulate across move events and the pivot is invariant.
 */
export class RingDrag {
    private angle = 0;

    constructor(
        private base: Matrix4,
        private pivot: Vec3,
        private axis: Vec3,
    ) {}

    update(angle: number): DragPose {
        this.angle = angle;
        const delta = rotationAboutPivot(this.pivot, this.axis, angle);
        return { matrix: matMul(delta, this.base), angle };
    }

    pose(): DragPose {
        return this.update(this.angle);
    }

    pivotError(pose: Matrix4): number {
        // how far the pose moves the pivot relative to the base (should be ~0)
        const delta = matMul(pose, invertRigid(this.base));
        const moved = applyMat(delta, this.pivot);
        return Math.hypot(
            moved[0] - this.pivot[0],
            moved[1] - this.pivot[1],
            moved[2] - this.pivot[2],
        );
    }
}

export function invertRigid(m: Matrix4): Matrix4 {
    // transpose the rotation block, counter-rotate the translation
    const out = identity4();
    for (let i = 0; i < 3; i++) {
        for (let j = 0; j < 3; j++) out[i][j] = m[j][i];
    }
    for (let i = 0; i < 3; i++) {
        out[i][3] = -(out[i][0] * m[0][3] + out[i][1] * m[1][3] + out[i][2] * m[2][3]);
    }
    return out;
}

/**
 * Keeps only the newest payload and forwards it at most once per
 * `intervalMs` (50 ms = 20 Hz). `flush()` forces the trailing payload
 * out at drag end.
 */
export class RateLimiter<T> {
    private pending: T | null = null;
    private timer: ReturnType<typeof setTimeout> | null = null;
    private lastFire = -Infinity;
    public sent = 0;

    constructor(
        private send: (payload: T) => void,
        private intervalMs = 50,
        private now: () => number = () => Date.now(),
    ) {}

    push(payload: T): void {
        this.pending = payload;
        const wait = this.lastFire + this.intervalMs - this.now();
        if (wait <= 0) {
            this.fire();
        } else if (this.timer === null) {
            this.timer = setTimeout(() => this.fire(), wait);
        }
    }

    flush(): void {
        if (this.pending !== null) this.fire();
    }

    private fire(): void {
        if (this.timer !== null) {
            clearTimeout(this.timer);
            this.timer = null;
        }
        if (this.pending === null) return;
        const payload = this.pending;
        this.pending = null;
        this.lastFire = this.now();
        this.sent += 1;
        this.send(payload);
    }
}
