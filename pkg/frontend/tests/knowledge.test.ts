import { describe, expect, it } from "vitest";

import { renderCards, renderClusterScene } from "../src/knowledge.js";
import {
    COARSE_BOUNDARY_OPACITY,
    FINE_BOUNDARY_OPACITY,
    NOISE_COLOR,
    hueColor,
} from "../src/styles.js";
import { renderLocalScene } from "../src/localView.js";
import type { ClusterExportWire, EdgeMeta, FlowLayoutWire } from "../src/types.js";

const EXPORT: ClusterExportWire = {
    points: [
        { doi: "10.1/a", x: 0, y: 0, cluster: 2 },
        { doi: "10.1/b", x: 1, y: 0, cluster: 2 },
        { doi: "10.1/c", x: 0, y: 1, cluster: 3 },
        { doi: "10.1/noise", x: 9, y: 9, cluster: null },
    ],
    clusters: [
        { id: 0, parent: null, level: "coarse", hue: 0, stability: 2.0,
          polygon: [[-1, -1], [2, -1], [2, 2], [-1, 2]] },
        { id: 2, parent: 0, level: "fine", hue: 0, stability: 1.5,
          polygon: [[-0.5, -0.5], [1.5, -0.5], [1.5, 0.5]] },
        { id: 3, parent: 0, level: "fine", hue: 0, stability: 1.0, polygon: null },
    ],
    noise: ["10.1/noise"],
};

describe("renderClusterScene", () => {
    it("renders noise points gray with no polygon", () => {
        const scene = renderClusterScene(EXPORT);
        const noise = scene.points.find((p) => p.doi === "10.1/noise")!;
        expect(noise.noise).toBe(true);
        expect(noise.color).toBe(NOISE_COLOR);
        // boundaries exist only for cluster records that carry a polygon
        expect(scene.boundaries.map((b) => b.clusterId)).toEqual([0, 2]);
    });

    it("preserves hue across levels with lower opacity on coarse", () => {
        const scene = renderClusterScene(EXPORT);
        const coarse = scene.boundaries.find((b) => b.level === "coarse")!;
        const fine = scene.boundaries.find((b) => b.level === "fine")!;
        expect(coarse.color).toBe(fine.color);
        expect(coarse.hue).toBe(fine.hue);
        expect(coarse.opacity).toBe(COARSE_BOUNDARY_OPACITY);
        expect(fine.opacity).toBe(FINE_BOUNDARY_OPACITY);
        expect(coarse.opacity).toBeLessThan(fine.opacity);
    });

    it("colors member points by their fine cluster hue", () => {
        const scene = renderClusterScene(EXPORT);
        const member = scene.points.find((p) => p.doi === "10.1/a")!;
        expect(member.color).toBe(hueColor(0));
        expect(member.noise).toBe(false);
    });
});

describe("renderCards", () => {
    it("shapes documents into cards", () => {
        const cards = renderCards([
            {
                doi: "10.1/a", title: "T", authors: ["A", "B"], publisher: "P",
                year: 2020, abstract: "", entities: [], figures: 2, tables: 1,
            },
        ]);
        expect(cards[0]).toEqual({
            doi: "10.1/a", title: "T", byline: "A, B - P", year: 2020, figures: 2, tables: 1,
        });
    });
});

describe("renderLocalScene", () => {
    const LAYOUT: FlowLayoutWire = {
        nodes: [
            { id: "tocilizumab", layer: 0, x: 0, y: 0 },
            { id: "IL6", layer: 1, x: 160, y: 0 },
        ],
        edges: [
            { id: "tocilizumab|Inhibition|IL6", points: [[0, 0], [160, 0]], reversed: false },
        ],
        crossings: 0,
    };
    const META = new Map<string, EdgeMeta>([
        [
            "tocilizumab|Inhibition|IL6",
            {
                id: "tocilizumab|Inhibition|IL6",
                subj: "tocilizumab",
                obj: "IL6",
                polarity: "negative",
                curated: true,
                directed: true,
                evidenceCount: 39,
            },
        ],
    ]);

    it("every rendered edge's tokens equal edgeStyle of its data", () => {
        const scene = renderLocalScene(LAYOUT, META, null, null);
        expect(scene.edges[0].style).toEqual({
            color: "negative-red",
            curationMarker: "filled-circle",
            arrowhead: "filled-arrow",
        });
        expect(scene.edges[0].evidenceCount).toBe(39);
        expect(scene.crossings).toBe(0);
    });
});
