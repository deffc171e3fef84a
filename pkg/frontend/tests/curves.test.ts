import { describe, expect, it } from "vitest";

import { closestPointOnMesh, closestPointOnTriangle, snapToSurface } from "../src/curves.js";
import type { MeshPayload, Vec3 } from "../src/types.js";

const FLAT: MeshPayload = {
    id: "flat",
    vertices: [
        [0, 0, 0], [10, 0, 0], [10, 10, 0], [0, 10, 0],
    ],
    triangles: [[0, 1, 2], [0, 2, 3]],
    normals: [[0, 0, 1], [0, 0, 1], [0, 0, 1], [0, 0, 1]],
};

describe("closestPointOnTriangle", () => {
    it("returns interior projections", () => {
        const p = closestPointOnTriangle([0, 0, 0], [4, 0, 0], [0, 4, 0], [1, 1, 3]);
        expect(p).toEqual([1, 1, 0]);
    });

    it("clamps to edges and vertices", () => {
        const p = closestPointOnTriangle([0, 0, 0], [4, 0, 0], [0, 4, 0], [-1, -1, 0]);
        expect(p).toEqual([0, 0, 0]);
        const e = closestPointOnTriangle([0, 0, 0], [4, 0, 0], [0, 4, 0], [2, -3, 0]);
        expect(e).toEqual([2, 0, 0]);
    });
});

describe("snapToSurface", () => {
    it("snaps a nearby drag onto the surface", () => {
        const snapped = snapToSurface(FLAT, [5, 5, 0.4] as Vec3);
        expect(snapped).not.toBeNull();
        expect(snapped![2]).toBeCloseTo(0, 12);
    });

    it("rejects drags beyond 1 mm so the caller reverts", () => {
        expect(snapToSurface(FLAT, [5, 5, 1.5] as Vec3)).toBeNull();
    });

    it("uses the closest point over all triangles", () => {
        const { point, distance } = closestPointOnMesh(FLAT, [20, 5, 0] as Vec3);
        expect(point).toEqual([10, 5, 0]);
        expect(distance).toBeCloseTo(10, 12);
    });
});
