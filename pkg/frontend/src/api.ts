/**
 * Typed client for every /api route. All calls are asynchronous; responses
 * carry an X-Dataset-Version header that callers use to discard stale
 * results after a dataset change.
 */

import type {
    ClusterExportWire,
    DocumentPageWire,
    DocumentWire,
    EvidenceItemWire,
    FlowLayoutWire,
    GraphSummary,
    NodeInfoWire,
    OverviewWire,
    QueryResultWire,
} from "./types.js";

export class ApiError extends Error {
    constructor(
        readonly status: number,
        message: string,
    ) {
        super(message);
    }
}

export interface Versioned<T> {
    body: T;
    version: string;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface DocumentSearchParams {
    text?: string;
    author?: string;
    publisher?: string;
    year_min?: number;
    year_max?: number;
    has_figures?: boolean;
    has_tables?: boolean;
    entity?: string;
    page?: number;
    page_size?: number;
}

export class ApiClient {
    private readonly fetchImpl: FetchLike;

    constructor(
        readonly baseUrl: string,
        fetchImpl?: FetchLike,
    ) {
        this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
    }

    private async request<T>(path: string, init?: RequestInit): Promise<Versioned<T>> {
        const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
        const version = response.headers.get("x-dataset-version") ?? "";
        if (!response.ok) {
            let message = `${response.status}`;
            try {
                const body = (await response.json()) as { error?: string };
                message = body.error ?? message;
            } catch {
                // non-JSON error body: keep the status text
            }
            throw new ApiError(response.status, message);
        }
        return { body: (await response.json()) as T, version };
    }

    graphs(): Promise<Versioned<GraphSummary[]>> {
        return this.request("/api/graphs");
    }

    overview(graphId: string, depth: number): Promise<Versioned<OverviewWire>> {
        return this.request(`/api/graphs/${graphId}/overview?depth=${depth}`);
    }

    query(graphId: string, chainDocument: string): Promise<Versioned<QueryResultWire>> {
        return this.request(`/api/graphs/${graphId}/query`, {
            method: "POST",
            body: chainDocument,
            headers: { "content-type": "application/json" },
        });
    }

    node(
        graphId: string,
        nodeId: string,
        direction: "in" | "out",
        subgraphEdges: string[] = [],
    ): Promise<Versioned<NodeInfoWire>> {
        const subgraph = encodeURIComponent(subgraphEdges.join(","));
        return this.request(
            `/api/graphs/${graphId}/nodes/${encodeURIComponent(nodeId)}` +
                `?direction=${direction}&subgraph=${subgraph}`,
        );
    }

    evidence(graphId: string, edgeId: string): Promise<Versioned<EvidenceItemWire[]>> {
        return this.request(`/api/graphs/${graphId}/edges/${edgeId}/evidence`);
    }

    layout(
        graphId: string,
        body: { nodes: string[]; edges: string[] },
    ): Promise<Versioned<FlowLayoutWire>> {
        return this.request(`/api/graphs/${graphId}/layout`, {
            method: "POST",
            body: JSON.stringify(body),
            headers: { "content-type": "application/json" },
        });
    }

    searchDocuments(params: DocumentSearchParams): Promise<Versioned<DocumentPageWire>> {
        const query = Object.entries(params)
            .filter(([, value]) => value !== undefined)
            .map(([key, value]) => `${key}=${encodeURIComponent(String(value))}`)
            .join("&");
        return this.request(`/api/corpus/documents${query ? "?" + query : ""}`);
    }

    clusters(level?: "coarse" | "fine"): Promise<Versioned<ClusterExportWire>> {
        return this.request(`/api/corpus/clusters${level ? "?level=" + level : ""}`);
    }

    document(doi: string): Promise<Versioned<DocumentWire>> {
        return this.request(`/api/corpus/documents/${doi}`);
    }

    documentNeighbors(
        doi: string,
        k: number,
    ): Promise<Versioned<{ doi: string; neighbors: { doi: string; title: string; year: number; similarity: number }[] }>> {
        return this.request(`/api/corpus/documents/${doi}/neighbors?k=${k}`);
    }

    documentGraphs(doi: string): Promise<Versioned<{ graph: string; edges: string[] }[]>> {
        return this.request(`/api/corpus/documents/${doi}/graphs`);
    }
}
