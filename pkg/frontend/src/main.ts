/**
 * Browser entry: wires the API client, view state, and scene renderers into
 * the two coordinated spaces (Graphs, Knowledge). All data flows through
 * the JSON API; this layer only reflects scenes into SVG/HTML.
 */

import { ApiClient } from "./api.js";
import { chainDocument, type FacetChip } from "./chain.js";
import { renderGlobalScene } from "./globalView.js";
import { renderCards, renderClusterScene } from "./knowledge.js";
import { renderLocalScene } from "./localView.js";
import {
    addSuggestion,
    applyQueryResult,
    addResultToLocal,
    canOpenLocalView,
    clearQuery,
    createViewState,
    relayoutRequestBody,
    selectGraph,
    selectNode,
    type ViewState,
} from "./state.js";
import { TOKEN_COLORS } from "./styles.js";
import type { EdgeMeta, FlowLayoutWire, Polarity } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

class ExplorerApp {
    private state: ViewState = createViewState();
    private api = new ApiClient("");
    private chips: FacetChip[] = [];
    private nodeCategories = new Map<string, string>();
    private edgeMeta = new Map<string, EdgeMeta>();
    private layoutWire: FlowLayoutWire | null = null;

    constructor(private root: HTMLElement) {}

    async start(): Promise<void> {
        const graphs = await this.api.graphs();
        if (graphs.body.length > 0) {
            this.state = selectGraph(this.state, graphs.body[0].id, graphs.version);
        }
        await this.refreshGlobal();
        await this.refreshKnowledge();
    }

    private el(tag: string, attrs: Record<string, string> = {}): SVGElement {
        const node = document.createElementNS(SVG_NS, tag) as SVGElement;
        for (const [key, value] of Object.entries(attrs)) {
            node.setAttribute(key, value);
        }
        return node;
    }

    private async refreshGlobal(): Promise<void> {
        if (!this.state.activeGraph) {
            return;
        }
        const overview = await this.api.overview(this.state.activeGraph, 2);
        const scene = renderGlobalScene(overview.body, this.state, this.nodeCategories);
        const svg = this.root.querySelector("#global-view") as SVGSVGElement | null;
        if (!svg) {
            return;
        }
        svg.replaceChildren();
        for (const bundle of scene.bundles) {
            svg.appendChild(
                this.el("path", {
                    d: bundle.path,
                    fill: "none",
                    stroke: "#1a202c",
                    "stroke-opacity": String(bundle.strokeOpacity),
                    "data-bundle": bundle.id,
                }),
            );
        }
        for (const circle of scene.circles) {
            svg.appendChild(
                this.el("circle", {
                    cx: String(circle.x),
                    cy: String(circle.y),
                    r: String(circle.r),
                    fill: circle.leaf ? "#f6ad55" : "none",
                    stroke: "#2c5282",
                    opacity: String(circle.opacity),
                    "data-category": circle.id,
                }),
            );
        }
    }

    async runQuery(): Promise<void> {
        if (!this.state.activeGraph) {
            return;
        }
        const result = await this.api.query(this.state.activeGraph, chainDocument(this.chips));
        this.state = applyQueryResult(
            this.state,
            this.state.activeGraph,
            result.body,
            result.version,
        );
        await this.refreshGlobal();
        const openButton = this.root.querySelector("#open-local") as HTMLButtonElement | null;
        if (openButton) {
            openButton.disabled = !canOpenLocalView(this.state);
        }
    }

    async clear(): Promise<void> {
        this.state = clearQuery(this.state);
        await this.refreshGlobal();
    }

    async openLocalView(): Promise<void> {
        this.state = addResultToLocal(this.state);
        await this.relayout();
    }

    async pickSuggestion(forNode: string, index: number): Promise<void> {
        if (!this.state.activeGraph) {
            return;
        }
        const info = await this.api.node(
            this.state.activeGraph,
            forNode,
            "in",
            this.state.localEdges,
        );
        const suggestion = info.body.suggestions[index];
        if (!suggestion) {
            return;
        }
        this.state = addSuggestion(this.state, forNode, suggestion);
        await this.relayout();
        await this.refreshGlobal(); // suggestions highlight in the Global View too
    }

    private async relayout(): Promise<void> {
        if (!this.state.activeGraph || this.state.localNodes.length === 0) {
            return;
        }
        const layout = await this.api.layout(
            this.state.activeGraph,
            relayoutRequestBody(this.state),
        );
        this.layoutWire = layout.body;
        this.renderLocal();
    }

    private renderLocal(): void {
        const svg = this.root.querySelector("#local-view") as SVGSVGElement | null;
        if (!svg || !this.layoutWire) {
            return;
        }
        const scene = renderLocalScene(
            this.layoutWire,
            this.edgeMeta,
            this.state.selectedNode,
            this.state.selectedEdge,
        );
        svg.replaceChildren();
        for (const edge of scene.edges) {
            const points = edge.points.map(([x, y]) => `${x},${y}`).join(" ");
            svg.appendChild(
                this.el("polyline", {
                    points,
                    fill: "none",
                    stroke: edge.color,
                    "data-edge": edge.id,
                    "data-color-token": edge.style.color,
                    "data-curation": edge.style.curationMarker,
                    "data-arrowhead": edge.style.arrowhead,
                }),
            );
        }
        for (const node of scene.nodes) {
            const dot = this.el("circle", {
                cx: String(node.x),
                cy: String(node.y),
                r: "6",
                fill: "#2d3748",
                "data-node": node.id,
            });
            dot.addEventListener("click", () => {
                this.state = selectNode(this.state, node.id);
                void this.openDrillDown(node.id);
            });
            svg.appendChild(dot);
        }
    }

    private async openDrillDown(nodeId: string): Promise<void> {
        if (!this.state.activeGraph) {
            return;
        }
        const panel = this.root.querySelector("#drill-down") as HTMLElement | null;
        if (!panel) {
            return;
        }
        const info = await this.api.node(this.state.activeGraph, nodeId, "in", this.state.localEdges);
        panel.replaceChildren();
        const heading = document.createElement("h3");
        heading.textContent = `${info.body.name} (${info.body.category})`;
        panel.appendChild(heading);
        const list = document.createElement("ol");
        for (const suggestion of info.body.suggestions.slice(0, 20)) {
            const item = document.createElement("li");
            item.textContent =
                `${suggestion.neighbor.name} [${suggestion.polarity}] ` +
                `(${suggestion.evidence_count} evidence)`;
            item.style.color = TOKEN_COLORS[colorTokenOf(suggestion.polarity)];
            list.appendChild(item);
        }
        panel.appendChild(list);
    }

    private async refreshKnowledge(): Promise<void> {
        const clusters = await this.api.clusters();
        const scene = renderClusterScene(clusters.body);
        const svg = this.root.querySelector("#clusters-view") as SVGSVGElement | null;
        if (svg) {
            svg.replaceChildren();
            for (const boundary of scene.boundaries) {
                const points = boundary.polygon.map(([x, y]) => `${x},${y}`).join(" ");
                svg.appendChild(
                    this.el("polygon", {
                        points,
                        fill: boundary.color,
                        "fill-opacity": String(boundary.opacity * 0.3),
                        stroke: boundary.color,
                        "stroke-opacity": String(boundary.opacity),
                        "data-cluster": String(boundary.clusterId),
                        "data-level": boundary.level,
                    }),
                );
            }
            for (const point of scene.points) {
                svg.appendChild(
                    this.el("circle", {
                        cx: String(point.x),
                        cy: String(point.y),
                        r: "3",
                        fill: point.color,
                        "data-doi": point.doi,
                        "data-noise": String(point.noise),
                    }),
                );
            }
        }
        const cardsHost = this.root.querySelector("#cards-view") as HTMLElement | null;
        if (cardsHost) {
            const page = await this.api.searchDocuments({ page: 1, page_size: 24 });
            cardsHost.replaceChildren();
            for (const card of renderCards(page.body.documents)) {
                const div = document.createElement("div");
                div.className = "card";
                div.innerHTML = `<strong>${card.title}</strong><br>${card.byline} (${card.year})`;
                cardsHost.appendChild(div);
            }
        }
    }
}

function colorTokenOf(polarity: Polarity): "positive-blue" | "negative-red" | "unknown-gray" {
    return polarity === "positive"
        ? "positive-blue"
        : polarity === "negative"
          ? "negative-red"
          : "unknown-gray";
}

const host = document.getElementById("app");
if (host) {
    const app = new ExplorerApp(host);
    void app.start();
    (window as unknown as { atlasApp: ExplorerApp }).atlasApp = app;
}
