// Viewer entry point: fetch the case, build the scene, wire the gizmo
// drag loop, the compare panel, and curve editing. Every number on
// screen is the latest service response; geometry math here only feeds
// interaction, never metrics.

import * as THREE from "three";
import { ApiClient, ApiError } from "./api.js";
import { CURVE_ORDER, plateColor, rankingRows, scatterPoints } from "./compare.js";
import { snapToSurface } from "./curves.js";
import { RateLimiter, RingDrag } from "./gizmo.js";
import { ViewerScene } from "./scene.js";
import { SequenceGate, ViewState } from "./state.js";
import type { LiveSummary, Matrix4, MeshPayload, Vec3 } from "./types.js";

const PLATE_PALETTE = [0xd62728, 0x1f77b4, 0x2ca02c, 0xff7f0e];

const api = new ApiClient("");
const state = new ViewState();
const gate = new SequenceGate();
const viewer = new ViewerScene();

const els = {
    banner: document.getElementById("banner") as HTMLDivElement,
    sidebar: document.getElementById("sidebar") as HTMLDivElement,
    summary: document.getElementById("live-summary") as HTMLDivElement,
    table: document.getElementById("ranking-table") as HTMLTableElement,
    scatter: document.getElementById("scatter") as unknown as SVGSVGElement,
    canvasHost: document.getElementById("view3d") as HTMLDivElement,
    rangeLo: document.getElementById("range-lo") as HTMLInputElement,
    rangeHi: document.getElementById("range-hi") as HTMLInputElement,
    translateMode: document.getElementById("translate-mode") as HTMLInputElement,
};

let renderer: THREE.WebGLRenderer;
let camera: THREE.PerspectiveCamera;
const meshPayloads: Record<string, MeshPayload> = {};
let orbitStop: Vec3 = [0, 0, 0];

function showBanner(text: string): void {
    els.banner.textContent = text;
    els.banner.style.display = "block";
}

function hideBanner(): void {
    els.banner.style.display = "none";
}

function renderSummary(summary: LiveSummary): void {
    state.applySummary(summary);
    const means = Object.entries(summary.edge_means_mm)
        .map(([k, v]) => `<tr><td>${k}</td><td>${v.toFixed(3)} mm</td></tr>`)
        .join("");
    els.summary.innerHTML = `
      <div class="collision">collision: ${summary.collision.percent_text}%
        (${summary.collision.count}/${summary.collision.total})</div>
      <table>${means}</table>`;
    viewer.setPlacement(summary.plate_id, summary.matrix);
    if (state.overlays.collisions) {
        viewer.showCollisions(meshPayloads[summary.plate_id], summary);
    }
}

async function refreshRanking(): Promise<void> {
    try {
        const ranking = await api.getRanking();
        const ids = ranking.ranking.map((r) => r.plate_id);
        els.table.innerHTML =
            "<tr><th>rank</th><th>plate</th><th>overall mean</th></tr>" +
            rankingRows(ranking)
                .map(
                    (row) => `<tr data-plate="${row.plateId}">
                      <td>${row.rank}</td>
                      <td><span class="chip" style="background:${plateColor(row.plateId, ids)}"></span>${row.plateId}</td>
                      <td>${row.overallMeanMm.toFixed(3)} mm</td></tr>`,
                )
                .join("");
        for (const row of els.table.querySelectorAll("tr[data-plate]")) {
            row.addEventListener("click", () => {
                state.setActivePlate((row as HTMLElement).dataset.plate as string);
                attachGizmo();
            });
        }
        drawScatter(ranking, ids);
    } catch (err) {
        if (err instanceof ApiError && err.status === 409) {
            els.table.innerHTML = "<tr><td>compute a fit first</td></tr>";
            return;
        }
        throw err;
    }
}

function drawScatter(ranking: Parameters<typeof scatterPoints>[0], ids: string[]): void {
    const pts = scatterPoints(ranking);
    const w = 280;
    const h = 160;
    const pad = 18;
    const dots = pts
        .map((p) => {
            const cx = pad + (p.x / (CURVE_ORDER.length - 1)) * (w - 2 * pad);
            const cy = h - pad - p.y * (h - 2 * pad);
            return `<circle cx="${cx}" cy="${cy}" r="4"
                     fill="${plateColor(p.plateId, ids)}">
                     <title>${p.plateId} ${p.curve}: ${p.meanMm.toFixed(3)} mm</title>
                    </circle>`;
        })
        .join("");
    els.scatter.innerHTML = dots;
}

// -- gizmo drag loop ---------------------------------------------------------

let activeDrag: RingDrag | null = null;
let dragAxis: Vec3 = [0, 0, 1];
let lastAccepted: Matrix4 | null = null;

const limiter = new RateLimiter<Matrix4>((matrix) => {
    const seq = gate.issue();
    const plate = state.activePlate;
    if (!plate) return;
    api
        .putPlacement(plate, matrix)
        .then((summary) => {
            if (!gate.accept(seq)) return; // superseded in flight
            lastAccepted = summary.matrix;
            renderSummary(summary);
        })
        .catch((err) => {
            // rejected transform: snap the gizmo back to the last accepted pose
            if (lastAccepted && state.activePlate) {
                viewer.setPlacement(state.activePlate, lastAccepted);
            }
            if (!(err instanceof ApiError)) showBanner("service unreachable");
        });
}, 50);

function attachGizmo(): void {
    const plate = state.activePlate;
    if (!plate) return;
    api.getPlacements().then((placements) => {
        const info = placements[plate];
        if (!info || !info.pivot) return;
        viewer.showGizmo(info.pivot, 16);
        lastAccepted = info.matrix;
    });
}

function startRingDrag(axis: Vec3): void {
    const plate = state.activePlate;
    if (!plate) return;
    const base = state.lastSummary[plate]?.matrix ?? lastAccepted;
    if (!base) return;
    api.getPlacements().then((placements) => {
        const pivot = placements[plate].pivot;
        if (!pivot) return;
        dragAxis = axis;
        activeDrag = new RingDrag(base, pivot, axis);
    });
}

function moveRingDrag(angle: number): void {
    if (!activeDrag) return;
    const pose = activeDrag.update(angle);
    // optimistic local display; the service response is authoritative
    if (state.activePlate) viewer.setPlacement(state.activePlate, pose.matrix);
    limiter.push(pose.matrix);
}

function endRingDrag(): void {
    limiter.flush();
    activeDrag = null;
}

// -- curve editing -----------------------------------------------------------

async function commitCurveEdit(plateId: string, curveName: string,
                               points: Vec3[]): Promise<void> {
    const payload = meshPayloads[plateId];
    const snapped: number[][] = [];
    for (const p of points) {
        const s = snapToSurface(payload, p);
        if (s === null) return; // off-surface drag: revert silently
        snapped.push(s);
    }
    try {
        const summary = await api.putCurve(plateId, curveName, snapped);
        renderSummary(summary);
        await api.getFit(plateId).then((fit) => state.applyFit(fit));
        await refreshRanking();
    } catch {
        // validation failure: the previous curve stays on screen
    }
}

// -- bootstrap ---------------------------------------------------------------

async function boot(): Promise<void> {
    let summary;
    try {
        summary = await api.getCase();
        hideBanner();
    } catch {
        showBanner("service unreachable - start `orbitfit serve <case>`");
        setTimeout(boot, 2000);
        return;
    }
    orbitStop = summary.orbit_stop;

    renderer = new THREE.WebGLRenderer({ antialias: true });
    renderer.setSize(els.canvasHost.clientWidth, els.canvasHost.clientHeight);
    els.canvasHost.appendChild(renderer.domElement);
    camera = new THREE.PerspectiveCamera(
        40, els.canvasHost.clientWidth / els.canvasHost.clientHeight, 0.1, 2000,
    );
    camera.position.set(orbitStop[0] + 40, orbitStop[1] - 90, orbitStop[2] + 60);
    camera.lookAt(new THREE.Vector3(...orbitStop));

    const bone = await api.getMesh("bone");
    viewer.addBone(bone);
    const orbit = await api.getMesh("orbit");
    viewer.addOrbit(orbit);
    summary.plate_ids.forEach(async (pid, i) => {
        const payload = await api.getMesh(pid);
        meshPayloads[pid] = payload;
        viewer.addPlate(payload, PLATE_PALETTE[i % PLATE_PALETTE.length]);
    });
    if (summary.plate_ids.length) state.setActivePlate(summary.plate_ids[0]);

    const placements = await api.getPlacements();
    for (const [pid, info] of Object.entries(placements)) {
        viewer.setPlacement(pid, info.matrix);
    }
    attachGizmo();
    await refreshRanking().catch(() => undefined);

    els.rangeLo.addEventListener("change", applyRange);
    els.rangeHi.addEventListener("change", applyRange);

    // pointer interaction: pick a ring, drag to rotate about the pivot
    const raycaster = new THREE.Raycaster();
    let dragging = false;
    let startAngle = 0;

    function ringAngleAt(event: PointerEvent): number {
        // angle of the pointer around the drag axis, in the ring plane
        const rect = renderer.domElement.getBoundingClientRect();
        const x = ((event.clientX - rect.left) / rect.width) * 2 - 1;
        const y = -(((event.clientY - rect.top) / rect.height) * 2 - 1);
        return Math.atan2(y, x);
    }

    renderer.domElement.addEventListener("pointerdown", (event) => {
        const rect = renderer.domElement.getBoundingClientRect();
        const ndc = new THREE.Vector2(
            ((event.clientX - rect.left) / rect.width) * 2 - 1,
            -(((event.clientY - rect.top) / rect.height) * 2 - 1),
        );
        raycaster.setFromCamera(ndc, camera);
        const hits = raycaster.intersectObjects(viewer.gizmoRings(), false);
        if (!hits.length) return;
        const axis = hits[0].object.userData.axis as Vec3;
        startRingDrag(axis);
        dragging = true;
        startAngle = ringAngleAt(event);
    });
    renderer.domElement.addEventListener("pointermove", (event) => {
        if (!dragging) return;
        moveRingDrag(ringAngleAt(event) - startAngle);
    });
    renderer.domElement.addEventListener("pointerup", () => {
        if (!dragging) return;
        dragging = false;
        endRingDrag();
    });

    function animate(): void {
        requestAnimationFrame(animate);
        renderer.render(viewer.scene, camera);
    }
    animate();
}

function applyRange(): void {
    const lo = parseFloat(els.rangeLo.value);
    const hi = parseFloat(els.rangeHi.value);
    if (!(lo < hi)) return;
    state.setDisplayRange(lo, hi);
    // re-color from the cached scalars; no refetch
    for (const [pid, fit] of Object.entries(state.lastFit)) {
        viewer.applyHeatmap(pid, fit.plate_wide_mm, lo, hi);
    }
}

export { commitCurveEdit }; // referenced by the curve-edit UI mode

boot();
