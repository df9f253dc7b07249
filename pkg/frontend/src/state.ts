/**
 * View state and its transitions. The state is an immutable value: every
 * transition returns a new object, so "apply then clear" restores the exact
 * pre-query state and snapshots compare structurally.
 *
 * Coordination model: query results drive highlight sets mirrored by the
 * Global View (fading everything else); the Local View holds an explicit
 * subgraph that suggestions extend; each extension re-requests a flow
 * layout for exactly the current subgraph ids.
 */

import type { QueryResultWire, SuggestionWire } from "./types.js";

export type KnowledgeMode = "cards" | "clusters";
export type DrillTab = "Preview" | "Graphs" | "Entities";

export interface KnowledgeState {
    mode: KnowledgeMode;
    facets: Record<string, string | number | boolean>;
    page: number;
    selectedDoi: string | null;
    drillTab: DrillTab;
}

export interface ViewState {
    activeGraph: string | null;
    datasetVersion: string | null;
    zoom: { scale: number; panX: number; panY: number };
    /** Last applied query result; highlight sets mirror it. */
    queryResult: QueryResultWire | null;
    highlightNodes: string[];
    highlightEdges: string[];
    /** Sandbox subgraph shown in the Local View; sorted unique ids. */
    localNodes: string[];
    localEdges: string[];
    selectedNode: string | null;
    selectedEdge: string | null;
    notice: string | null;
    knowledge: KnowledgeState;
}

export function createViewState(): ViewState {
    return {
        activeGraph: null,
        datasetVersion: null,
        zoom: { scale: 1, panX: 0, panY: 0 },
        queryResult: null,
        highlightNodes: [],
        highlightEdges: [],
        localNodes: [],
        localEdges: [],
        selectedNode: null,
        selectedEdge: null,
        notice: null,
        knowledge: {
            mode: "cards",
            facets: {},
            page: 1,
            selectedDoi: null,
            drillTab: "Preview",
        },
    };
}

export function selectGraph(state: ViewState, graphId: string, version: string): ViewState {
    return {
        ...createViewState(),
        knowledge: state.knowledge,
        activeGraph: graphId,
        datasetVersion: version,
    };
}

function sortedUnique(values: Iterable<string>): string[] {
    return Array.from(new Set(values)).sort();
}

/**
 * Fold a query result into the state: highlight sets mirror the result and
 * the rest of the Global View fades. Results for a different graph (or a
 * different dataset version) are stale and discarded with a notice.
 */
export function applyQueryResult(
    state: ViewState,
    graphId: string,
    result: QueryResultWire,
    version: string,
): ViewState {
    if (graphId !== state.activeGraph || (state.datasetVersion !== null && version !== state.datasetVersion)) {
        return { ...state, notice: `discarded stale query result for ${graphId}` };
    }
    return {
        ...state,
        queryResult: result,
        highlightNodes: sortedUnique(result.nodes),
        highlightEdges: sortedUnique(result.edges),
        notice: null,
    };
}

/** Drop the query highlight; inverse of applyQueryResult. */
export function clearQuery(state: ViewState): ViewState {
    return {
        ...state,
        queryResult: null,
        highlightNodes: [],
        highlightEdges: [],
        notice: null,
    };
}

/** "Open Local View" is offered only when the last query found something. */
export function canOpenLocalView(state: ViewState): boolean {
    return state.queryResult !== null && state.highlightEdges.length + state.highlightNodes.length > 0;
}

/** Iteratively add the current query result to the Local View sandbox. */
export function addResultToLocal(state: ViewState): ViewState {
    if (!canOpenLocalView(state)) {
        return state;
    }
    return {
        ...state,
        localNodes: sortedUnique([...state.localNodes, ...state.highlightNodes]),
        localEdges: sortedUnique([...state.localEdges, ...state.highlightEdges]),
    };
}

/**
 * Add one neighborhood suggestion (edge plus neighbor) to the local
 * subgraph. Adding an edge that is already present is a no-op, so repeated
 * clicks are harmless; callers re-request the flow layout afterwards with
 * relayoutRequestBody and highlight the neighbor in the Global View.
 */
export function addSuggestion(
    state: ViewState,
    forNode: string,
    suggestion: SuggestionWire,
): ViewState {
    if (state.localEdges.includes(suggestion.edge)) {
        return state;
    }
    return {
        ...state,
        localNodes: sortedUnique([...state.localNodes, forNode, suggestion.neighbor.id]),
        localEdges: sortedUnique([...state.localEdges, suggestion.edge]),
        highlightNodes: sortedUnique([...state.highlightNodes, suggestion.neighbor.id]),
    };
}

/** Body for the layout route: exactly the current local subgraph ids. */
export function relayoutRequestBody(state: ViewState): { nodes: string[]; edges: string[] } {
    return { nodes: [...state.localNodes], edges: [...state.localEdges] };
}

export function selectNode(state: ViewState, nodeId: string | null): ViewState {
    return { ...state, selectedNode: nodeId, selectedEdge: null };
}

export function selectEdge(state: ViewState, edgeId: string | null): ViewState {
    return { ...state, selectedEdge: edgeId, selectedNode: null };
}

export function setKnowledge(state: ViewState, patch: Partial<KnowledgeState>): ViewState {
    return { ...state, knowledge: { ...state.knowledge, ...patch } };
}
