/**
 * Local View scene: the flow-layout subgraph with fully encoded edges.
 * Every rendered edge derives its tokens from edgeStyle, so the visual
 * encoding (polarity color, curation circle, arrowhead form) is a pure
 * function of the data.
 */

import { edgeStyle, TOKEN_COLORS, type EdgeStyle } from "./styles.js";
import type { EdgeMeta, FlowLayoutWire } from "./types.js";

export interface LocalNodeElement {
    kind: "node";
    id: string;
    x: number;
    y: number;
    layer: number;
    selected: boolean;
}

export interface LocalEdgeElement {
    kind: "edge";
    id: string;
    points: [number, number][];
    /** Drawn against original direction when the layout reversed it. */
    reversedInLayout: boolean;
    style: EdgeStyle;
    color: string;
    evidenceCount: number;
    selected: boolean;
}

export interface LocalScene {
    nodes: LocalNodeElement[];
    edges: LocalEdgeElement[];
    crossings: number;
}

export function renderLocalScene(
    layout: FlowLayoutWire,
    edgeMeta: Map<string, EdgeMeta>,
    selectedNode: string | null,
    selectedEdge: string | null,
): LocalScene {
    const nodes: LocalNodeElement[] = layout.nodes.map((node) => ({
        kind: "node",
        id: node.id,
        x: node.x,
        y: node.y,
        layer: node.layer,
        selected: node.id === selectedNode,
    }));
    const edges: LocalEdgeElement[] = layout.edges.map((edge) => {
        const meta = edgeMeta.get(edge.id);
        const style = meta
            ? edgeStyle(meta.polarity, meta.curated, meta.directed)
            : edgeStyle("unknown", false, false);
        return {
            kind: "edge",
            id: edge.id,
            points: edge.points,
            reversedInLayout: edge.reversed,
            style,
            color: TOKEN_COLORS[style.color],
            evidenceCount: meta?.evidenceCount ?? 0,
            selected: edge.id === selectedEdge,
        };
    });
    return { nodes, edges, crossings: layout.crossings };
}
