// Edge-curve editing support: dragging a control point snaps it back to
// the plate surface (within 1 mm) before it is committed. The snap is a
// display-side interaction aid; validation and metrics stay server-side.

import type { MeshPayload, Vec3 } from "./types.js";

const SNAP_TOLERANCE_MM = 1.0;

function sub(a: Vec3, b: Vec3): Vec3 {
    return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

function dot(a: Vec3, b: Vec3): number {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

function addScaled(a: Vec3, b: Vec3, s: number): Vec3 {
    return [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]];
}

/** Closest point on triangle abc to q (region walk). */
export function closestPointOnTriangle(a: Vec3, b: Vec3, c: Vec3, q: Vec3): Vec3 {
    const ab = sub(b, a);
    const ac = sub(c, a);
    const aq = sub(q, a);
    const d1 = dot(ab, aq);
    const d2 = dot(ac, aq);
    if (d1 <= 0 && d2 <= 0) return a;

    const bq = sub(q, b);
    const d3 = dot(ab, bq);
    const d4 = dot(ac, bq);
    if (d3 >= 0 && d4 <= d3) return b;

    const vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) {
        return addScaled(a, ab, d1 / (d1 - d3));
    }

    const cq = sub(q, c);
    const d5 = dot(ab, cq);
    const d6 = dot(ac, cq);
    if (d6 >= 0 && d5 <= d6) return c;

    const vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) {
        return addScaled(a, ac, d2 / (d2 - d6));
    }

    const va = d3 * d6 - d5 * d4;
    if (va <= 0 && d4 - d3 >= 0 && d5 - d6 >= 0) {
        const w = (d4 - d3) / (d4 - d3 + (d5 - d6));
        return addScaled(b, sub(c, b), w);
    }

    const denom = 1 / (va + vb + vc);
    const v = vb * denom;
    const w = vc * denom;
    return [
        a[0] + ab[0] * v + ac[0] * w,
        a[1] + ab[1] * v + ac[1] * w,
        a[2] + ab[2] * v + ac[2] * w,
    ];
}

export function closestPointOnMesh(mesh: MeshPayload, q: Vec3): { point: Vec3; distance: number } {
    let best: Vec3 = [0, 0, 0];
    let bestD2 = Infinity;
    for (const tri of mesh.triangles) {
        const p = closestPointOnTriangle(
            mesh.vertices[tri[0]] as Vec3,
            mesh.vertices[tri[1]] as Vec3,
            mesh.vertices[tri[2]] as Vec3,
            q,
        );
        const d = sub(q, p);
        const d2 = dot(d, d);
        if (d2 < bestD2) {
            bestD2 = d2;
            best = p;
        }
    }
    return { point: best, distance: Math.sqrt(bestD2) };
}

/**
 * Snap a dragged control point back onto the plate surface. Returns the
 * surface point when the drag stayed within tolerance, otherwise null
 * (caller reverts the point).
 */
export function snapToSurface(mesh: MeshPayload, dragged: Vec3,
                              tolerance = SNAP_TOLERANCE_MM): Vec3 | null {
    const { point, distance } = closestPointOnMesh(mesh, dragged);
    return distance <= tolerance ? point : null;
}
