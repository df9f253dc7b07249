import { describe, expect, it } from "vitest";

import { ancestorAt, bundlePath, renderGlobalScene } from "../src/globalView.js";
import { FADED_OPACITY, FULL_OPACITY } from "../src/styles.js";
import { applyQueryResult, createViewState, selectGraph } from "../src/state.js";
import type { OverviewWire } from "../src/types.js";

const OVERVIEW: OverviewWire = {
    circles: [
        { id: "root", x: 0, y: 0, r: 10, depth: 0 },
        { id: "root/chemical", x: -4, y: 0, r: 3, depth: 1 },
        { id: "root/protein", x: 4, y: 0, r: 4, depth: 1 },
        { id: "root/phenomenon", x: 0, y: 5, r: 2, depth: 1 },
    ],
    hyperEdges: [
        {
            id: "L1:root/chemical=>root/protein",
            level: 1,
            src: "root/chemical",
            dst: "root/protein",
            count: 2,
            brightness: 0.8,
            segments: [
                { kind: "cubic", p0: [-1, 0], c1: [0, 1], c2: [1, 1], p1: [2, 0] },
            ],
        },
        {
            id: "L1:root/protein=>root/phenomenon",
            level: 1,
            src: "root/protein",
            dst: "root/phenomenon",
            count: 1,
            brightness: 0.4,
            segments: [
                { kind: "arc", cx: 0, cy: 0, r: 10, start: 0, end: 1.2, ccw: true },
            ],
        },
    ],
};

const CATEGORIES = new Map([
    ["tocilizumab", "root/chemical/drug"],
    ["IL6", "root/protein/cytokine"],
    ["COVID-19", "root/phenomenon/disease"],
]);

function queriedState(nodes: string[], edges: string[]) {
    const state = selectGraph(createViewState(), "g", "v1");
    return applyQueryResult(
        state,
        "g",
        { nodes, edges, paths: null, trace: [], truncated: false },
        "v1",
    );
}

describe("renderGlobalScene", () => {
    it("fades nothing when no query is active", () => {
        const scene = renderGlobalScene(OVERVIEW, selectGraph(createViewState(), "g", "v1"), CATEGORIES);
        expect(scene.circles.every((c) => c.opacity === FULL_OPACITY)).toBe(true);
        expect(scene.bundles.every((b) => b.strokeOpacity > FADED_OPACITY)).toBe(true);
    });

    it("leaves only the highlight set at full opacity when a query is active", () => {
        const scene = renderGlobalScene(
            OVERVIEW,
            queriedState(["tocilizumab", "IL6"], ["tocilizumab|Inhibition|IL6"]),
            CATEGORIES,
        );
        const byId = new Map(scene.circles.map((c) => [c.id, c]));
        expect(byId.get("root/chemical")!.opacity).toBe(FULL_OPACITY);
        expect(byId.get("root/protein")!.opacity).toBe(FULL_OPACITY);
        expect(byId.get("root")!.opacity).toBe(FULL_OPACITY); // ancestor of highlights
        expect(byId.get("root/phenomenon")!.opacity).toBe(FADED_OPACITY);

        const bundles = new Map(scene.bundles.map((b) => [b.id, b]));
        const carrying = bundles.get("L1:root/chemical=>root/protein")!;
        const other = bundles.get("L1:root/protein=>root/phenomenon")!;
        expect(carrying.highlighted).toBe(true);
        expect(other.highlighted).toBe(false);
        expect(other.strokeOpacity).toBeLessThan(carrying.strokeOpacity * FADED_OPACITY * 2);
    });

    it("brightness scales bundle opacity", () => {
        const scene = renderGlobalScene(OVERVIEW, selectGraph(createViewState(), "g", "v1"), CATEGORIES);
        const [big, small] = scene.bundles;
        expect(big.strokeOpacity).toBeGreaterThan(small.strokeOpacity);
    });
});

describe("geometry helpers", () => {
    it("ancestorAt clamps to the path length", () => {
        expect(ancestorAt("root/protein/cytokine", 0)).toBe("root");
        expect(ancestorAt("root/protein/cytokine", 1)).toBe("root/protein");
        expect(ancestorAt("root/protein", 9)).toBe("root/protein");
    });

    it("bundlePath emits one move plus curve/arc commands", () => {
        const path = bundlePath(OVERVIEW.hyperEdges[0].segments);
        expect(path.startsWith("M ")).toBe(true);
        expect(path).toContain("C ");
        const arc = bundlePath(OVERVIEW.hyperEdges[1].segments);
        expect(arc).toContain("A 10 10");
    });
});
