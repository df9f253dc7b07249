/**
 * Wire types for the atlas JSON API. Field names mirror the server payloads
 * exactly; everything here is plain data.
 */

export type Polarity = "positive" | "negative" | "unknown";

export interface GraphSummary {
    id: string;
    name: string;
    nodes: number;
    edges: number;
    maxDepth: number;
}

export interface CircleWire {
    id: string;
    x: number;
    y: number;
    r: number;
    depth: number;
}

export interface ArcSegmentWire {
    kind: "arc";
    cx: number;
    cy: number;
    r: number;
    start: number;
    end: number;
    ccw: boolean;
}

export interface CubicSegmentWire {
    kind: "cubic";
    p0: [number, number];
    c1: [number, number];
    c2: [number, number];
    p1: [number, number];
}

export type SegmentWire = ArcSegmentWire | CubicSegmentWire;

export interface HyperEdgeWire {
    id: string;
    level: number;
    src: string;
    dst: string;
    count: number;
    brightness: number;
    segments: SegmentWire[];
}

export interface OverviewWire {
    circles: CircleWire[];
    hyperEdges: HyperEdgeWire[];
}

export interface PathWire {
    nodes: string[];
    edges: string[];
    polarity: Polarity;
    score: number;
}

export interface TraceEntryWire {
    facet: string;
    nodes: number;
    edges: number;
}

export interface QueryResultWire {
    nodes: string[];
    edges: string[];
    paths: PathWire[] | null;
    trace: TraceEntryWire[];
    truncated: boolean;
}

export interface SuggestionWire {
    edge: string;
    neighbor: { id: string; name: string };
    polarity: Polarity;
    evidence_count: number;
    curated: boolean;
    directed: boolean;
}

export interface NodeInfoWire {
    id: string;
    name: string;
    category: string;
    description: string | null;
    degree: number;
    in_degree: number;
    out_degree: number;
    suggestions: SuggestionWire[];
}

export interface DocumentWire {
    doi: string;
    title: string;
    authors: string[];
    publisher: string;
    year: number;
    abstract: string;
    entities: string[];
    figures: number;
    tables: number;
}

export interface EvidenceItemWire {
    text: string;
    doi: string;
    source: string;
    document: DocumentWire | null;
    neighbors: string[];
}

export interface FlowNodeWire {
    id: string;
    layer: number;
    x: number;
    y: number;
}

export interface FlowEdgeWire {
    id: string;
    points: [number, number][];
    reversed: boolean;
}

export interface FlowLayoutWire {
    nodes: FlowNodeWire[];
    edges: FlowEdgeWire[];
    crossings: number;
}

export interface DocumentPageWire {
    total: number;
    page: number;
    page_size: number;
    documents: DocumentWire[];
}

export interface ClusterPointWire {
    doi: string;
    x: number;
    y: number;
    cluster: number | null;
}

export interface ClusterWire {
    id: number;
    parent: number | null;
    level: "coarse" | "fine";
    hue: number;
    stability: number;
    polygon: [number, number][] | null;
}

export interface ClusterExportWire {
    points: ClusterPointWire[];
    clusters: ClusterWire[];
    noise: string[];
}

/** Metadata the local view needs per edge to style it. */
export interface EdgeMeta {
    id: string;
    subj: string;
    obj: string;
    polarity: Polarity;
    curated: boolean;
    directed: boolean;
    evidenceCount: number;
}
