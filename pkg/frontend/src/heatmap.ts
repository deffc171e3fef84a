// Client-side heatmap coloring. Raw scalars arrive once per fit
// computation; changing the display range is a pure re-coloring with no
// round trip. Anchors match the exporter: lo = red, midpoint = green,
// hi = blue.

export function distanceColor(value: number, lo = -5, hi = 5): [number, number, number] {
    if (!(lo < hi)) throw new Error(`display range needs lo < hi, got ${lo}..${hi}`);
    let t = (value - lo) / (hi - lo);
    t = Math.min(1, Math.max(0, t));
    const r = Math.min(1, Math.max(0, 1 - 2 * t));
    const b = Math.min(1, Math.max(0, 2 * t - 1));
    const g = 1 - r - b;
    return [Math.round(255 * r), Math.round(255 * g), Math.round(255 * b)];
}

export function distanceColors(values: number[], lo = -5, hi = 5): Uint8Array {
    const out = new Uint8Array(values.length * 3);
    for (let i = 0; i < values.length; i++) {
        const [r, g, b] = distanceColor(values[i], lo, hi);
        out[3 * i] = r;
        out[3 * i + 1] = g;
        out[3 * i + 2] = b;
    }
    return out;
}
