// three.js scene graph: bone and orbit semi-transparent, plates opaque
// and colored, collision vertices highlighted, curve points paired with
// their orbital projections, and a rotation-ring gizmo pinned to the
// pivot of the active plate.

import * as THREE from "three";
import { distanceColors } from "./heatmap.js";
import type { FitPayload, LiveSummary, Matrix4, MeshPayload, Vec3 } from "./types.js";

export function toThreeMatrix(m: Matrix4): THREE.Matrix4 {
    const t = new THREE.Matrix4();
    // THREE.Matrix4.set takes row-major arguments
    t.set(
        m[0][0], m[0][1], m[0][2], m[0][3],
        m[1][0], m[1][1], m[1][2], m[1][3],
        m[2][0], m[2][1], m[2][2], m[2][3],
        m[3][0], m[3][1], m[3][2], m[3][3],
    );
    return t;
}

function buildGeometry(payload: MeshPayload): THREE.BufferGeometry {
    const geometry = new THREE.BufferGeometry();
    const positions = new Float32Array(payload.vertices.length * 3);
    payload.vertices.forEach((v, i) => positions.set(v, 3 * i));
    geometry.setAttribute("position", new THREE.BufferAttribute(positions, 3));
    const normals = new Float32Array(payload.normals.length * 3);
    payload.normals.forEach((n, i) => normals.set(n, 3 * i));
    geometry.setAttribute("normal", new THREE.BufferAttribute(normals, 3));
    const index = new Uint32Array(payload.triangles.length * 3);
    payload.triangles.forEach((t, i) => index.set(t, 3 * i));
    geometry.setIndex(new THREE.BufferAttribute(index, 1));
    return geometry;
}

export class ViewerScene {
    scene = new THREE.Scene();
    plateMeshes: Record<string, THREE.Mesh> = {};
    plateColors: Record<string, number> = {};
    private collisionMarkers: THREE.Points | null = null;
    private curveMarkers = new THREE.Group();
    private ringGroup = new THREE.Group();

    constructor() {
        this.scene.background = new THREE.Color(0x10141c);
        const key = new THREE.DirectionalLight(0xffffff, 2.0);
        key.position.set(60, -80, 120);
        this.scene.add(key, new THREE.AmbientLight(0xffffff, 0.55));
        this.scene.add(this.curveMarkers, this.ringGroup);
    }

    addBone(payload: MeshPayload): void {
        const material = new THREE.MeshStandardMaterial({
            color: 0xcfc4ae, transparent: true, opacity: 0.35,
            side: THREE.DoubleSide, depthWrite: false,
        });
        this.scene.add(new THREE.Mesh(buildGeometry(payload), material));
    }

    addOrbit(payload: MeshPayload): void {
        const material = new THREE.MeshStandardMaterial({
            color: 0xfff3c4, transparent: true, opacity: 0.55,
            side: THREE.DoubleSide,
        });
        this.scene.add(new THREE.Mesh(buildGeometry(payload), material));
    }

    addPlate(payload: MeshPayload, colorHex: number): void {
        const material = new THREE.MeshStandardMaterial({
            color: colorHex, side: THREE.DoubleSide, vertexColors: false,
        });
        const mesh = new THREE.Mesh(buildGeometry(payload), material);
        mesh.matrixAutoUpdate = false;
        this.plateMeshes[payload.id] = mesh;
        this.plateColors[payload.id] = colorHex;
        this.scene.add(mesh);
    }

    setPlacement(plateId: string, matrix: Matrix4): void {
        const mesh = this.plateMeshes[plateId];
        if (!mesh) return;
        mesh.matrix.copy(toThreeMatrix(matrix));
        mesh.matrixWorldNeedsUpdate = true;
    }

    /** Re-color one plate from raw scalars; pure client-side mapping. */
    applyHeatmap(plateId: string, scalars: number[], lo: number, hi: number): void {
        const mesh = this.plateMeshes[plateId];
        if (!mesh) return;
        const rgb = distanceColors(scalars, lo, hi);
        const colors = new Float32Array(rgb.length);
        for (let i = 0; i < rgb.length; i++) colors[i] = rgb[i] / 255;
        mesh.geometry.setAttribute("color", new THREE.BufferAttribute(colors, 3));
        (mesh.material as THREE.MeshStandardMaterial).vertexColors = true;
        (mesh.material as THREE.MeshStandardMaterial).color.set(0xffffff);
        (mesh.material as THREE.MeshStandardMaterial).needsUpdate = true;
    }

    clearHeatmap(plateId: string): void {
        const mesh = this.plateMeshes[plateId];
        if (!mesh) return;
        const material = mesh.material as THREE.MeshStandardMaterial;
        material.vertexColors = false;
        material.color.set(this.plateColors[plateId]);
        material.needsUpdate = true;
    }

    /** Yellow markers on colliding plate vertices (world positions). */
    showCollisions(payload: MeshPayload, summary: LiveSummary): void {
        if (this.collisionMarkers) this.scene.remove(this.collisionMarkers);
        this.collisionMarkers = null;
        const ids = summary.collision.collision_points;
        if (!ids.length) return;
        const m = toThreeMatrix(summary.matrix);
        const positions = new Float32Array(ids.length * 3);
        ids.forEach((id, i) => {
            const v = new THREE.Vector3(...(payload.vertices[id] as Vec3)).applyMatrix4(m);
            positions.set([v.x, v.y, v.z], 3 * i);
        });
        const geometry = new THREE.BufferGeometry();
        geometry.setAttribute("position", new THREE.BufferAttribute(positions, 3));
        this.collisionMarkers = new THREE.Points(
            geometry,
            new THREE.PointsMaterial({ color: 0xffe13b, size: 1.2 }),
        );
        this.scene.add(this.collisionMarkers);
    }

    /** Yellow curve sample points paired with red orbital projections. */
    showProjections(fit: FitPayload, matrix: Matrix4): void {
        this.curveMarkers.clear();
        const m = toThreeMatrix(matrix);
        for (const edge of fit.edges) {
            for (const p of edge.projected_points) {
                const dot = new THREE.Mesh(
                    new THREE.SphereGeometry(0.45, 8, 8),
                    new THREE.MeshBasicMaterial({ color: 0xf03030 }),
                );
                dot.position.set(p[0], p[1], p[2]);
                this.curveMarkers.add(dot);
            }
        }
        void m; // curve-side sample points are drawn by the curve overlay
    }

    showCurveOverlay(payload: MeshPayload, matrix: Matrix4): void {
        const m = toThreeMatrix(matrix);
        for (const [name, points] of Object.entries(payload.edge_curves ?? {})) {
            const worldPts = points.map((p) =>
                new THREE.Vector3(p[0], p[1], p[2]).applyMatrix4(m),
            );
            const geometry = new THREE.BufferGeometry().setFromPoints(worldPts);
            const line = new THREE.Line(
                geometry, new THREE.LineBasicMaterial({ color: 0xffe13b }),
            );
            line.name = `curve:${payload.id}:${name}`;
            this.curveMarkers.add(line);
        }
    }

    /** Three rotation rings centered on the pivot of the active plate. */
    showGizmo(pivot: Vec3, radius: number): void {
        this.ringGroup.clear();
        const axes: Array<[Vec3, number]> = [
            [[1, 0, 0], 0xd04040],
            [[0, 1, 0], 0x40c040],
            [[0, 0, 1], 0x4060e0],
        ];
        for (const [axis, color] of axes) {
            const ring = new THREE.Mesh(
                new THREE.TorusGeometry(radius, 0.25, 8, 64),
                new THREE.MeshBasicMaterial({ color, transparent: true, opacity: 0.8 }),
            );
            ring.position.set(pivot[0], pivot[1], pivot[2]);
            const normal = new THREE.Vector3(...axis);
            ring.quaternion.setFromUnitVectors(new THREE.Vector3(0, 0, 1), normal);
            ring.userData.axis = axis;
            this.ringGroup.add(ring);
        }
    }

    gizmoRings(): THREE.Object3D[] {
        return [...this.ringGroup.children];
    }
}
