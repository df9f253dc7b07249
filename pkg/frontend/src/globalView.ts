/**
 * Global View scene: packed ontology circles plus routed hyper-edge paths,
 * with contrast-based highlighting. The scene is plain data; the DOM layer
 * turns it into SVG, and tests assert on it directly.
 */

import { FADED_OPACITY, FULL_OPACITY } from "./styles.js";
import type { OverviewWire, SegmentWire } from "./types.js";
import type { ViewState } from "./state.js";

export interface CircleElement {
    kind: "circle";
    id: string;
    x: number;
    y: number;
    r: number;
    depth: number;
    /** Group rings render hollow; leaves render filled. */
    leaf: boolean;
    opacity: number;
    highlighted: boolean;
}

export interface BundleElement {
    kind: "bundle";
    id: string;
    src: string;
    dst: string;
    count: number;
    path: string; // SVG path data
    /** Brightness encodes bundle size; fading multiplies on top. */
    strokeOpacity: number;
    highlighted: boolean;
}

export interface GlobalScene {
    circles: CircleElement[];
    bundles: BundleElement[];
}

function segmentPath(segment: SegmentWire, first: boolean): string {
    if (segment.kind === "cubic") {
        const move = first ? `M ${segment.p0[0]} ${segment.p0[1]} ` : "";
        return (
            move +
            `C ${segment.c1[0]} ${segment.c1[1]}, ${segment.c2[0]} ${segment.c2[1]}, ` +
            `${segment.p1[0]} ${segment.p1[1]}`
        );
    }
    const sx = segment.cx + segment.r * Math.cos(segment.start);
    const sy = segment.cy + segment.r * Math.sin(segment.start);
    const ex = segment.cx + segment.r * Math.cos(segment.end);
    const ey = segment.cy + segment.r * Math.sin(segment.end);
    const span = Math.abs(segment.end - segment.start);
    const largeArc = span > Math.PI ? 1 : 0;
    const sweep = segment.ccw ? 1 : 0;
    const move = first ? `M ${sx} ${sy} ` : "";
    return move + `A ${segment.r} ${segment.r} 0 ${largeArc} ${sweep} ${ex} ${ey}`;
}

export function bundlePath(segments: SegmentWire[]): string {
    return segments.map((segment, i) => segmentPath(segment, i === 0)).join(" ");
}

/** Prefix of a slash path with depth+1 segments, clamped to the full path. */
export function ancestorAt(categoryPath: string, depth: number): string {
    const parts = categoryPath.split("/");
    return parts.slice(0, Math.min(depth + 1, parts.length)).join("/");
}

function ancestors(categoryPath: string): string[] {
    const parts = categoryPath.split("/");
    const out: string[] = [];
    for (let i = 1; i <= parts.length; i++) {
        out.push(parts.slice(0, i).join("/"));
    }
    return out;
}

/**
 * Build the Global View scene from an overview payload and the node-id ->
 * category-path mapping of the active graph. With a query active, only the
 * highlight set keeps full opacity: a bundle stays bright iff it carries a
 * highlighted edge (its category pair matches the edge endpoints' ancestors
 * at the bundle's level), a circle iff a highlighted agent grounds inside it
 * or a bright bundle touches it.
 */
export function renderGlobalScene(
    overview: OverviewWire,
    state: ViewState,
    nodeCategories: Map<string, string>,
): GlobalScene {
    const fading = state.queryResult !== null;
    const brightCategories = new Set<string>();
    if (fading) {
        for (const nodeId of state.highlightNodes) {
            const category = nodeCategories.get(nodeId);
            if (category) {
                for (const ancestor of ancestors(category)) {
                    brightCategories.add(ancestor);
                }
            }
        }
    }

    const bundles: BundleElement[] = overview.hyperEdges.map((hyper) => {
        const carries = fading && bundleCarriesHighlight(hyper.level, hyper.src, hyper.dst,
            state.highlightEdges, nodeCategories);
        const base = 0.2 + 0.8 * hyper.brightness;
        return {
            kind: "bundle",
            id: hyper.id,
            src: hyper.src,
            dst: hyper.dst,
            count: hyper.count,
            path: bundlePath(hyper.segments),
            strokeOpacity: fading && !carries ? base * FADED_OPACITY : base,
            highlighted: carries,
        };
    });

    const circles: CircleElement[] = overview.circles.map((circle) => {
        const leaf = !overview.circles.some(
            (other) => other.id !== circle.id && other.id.startsWith(circle.id + "/"),
        );
        const bright = !fading || brightCategories.has(circle.id);
        return {
            kind: "circle",
            id: circle.id,
            x: circle.x,
            y: circle.y,
            r: circle.r,
            depth: circle.depth,
            leaf,
            opacity: bright ? FULL_OPACITY : FADED_OPACITY,
            highlighted: fading && bright,
        };
    });

    return { circles, bundles };
}

function bundleCarriesHighlight(
    level: number,
    src: string,
    dst: string,
    highlightEdges: string[],
    nodeCategories: Map<string, string>,
): boolean {
    for (const edgeId of highlightEdges) {
        const parts = edgeId.split("|");
        if (parts.length !== 3) {
            continue;
        }
        const subjCategory = nodeCategories.get(parts[0]);
        const objCategory = nodeCategories.get(parts[2]);
        if (!subjCategory || !objCategory) {
            continue;
        }
        if (ancestorAt(subjCategory, level) === src && ancestorAt(objCategory, level) === dst) {
            return true;
        }
    }
    return false;
}
