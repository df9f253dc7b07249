/**
 * Query chain builder. The search box works with structured facet chips,
 * not free grammar; this module turns chips into the wire format the query
 * route accepts.
 */

export interface NodeChip {
    facet: "node";
    field: "id" | "name" | "category" | "degree" | "in_degree" | "out_degree";
    op: "=" | "!=" | "<" | "<=" | ">" | ">=" | "contains";
    value: string | number;
}

export interface EdgeChip {
    facet: "edge";
    field: "type" | "polarity" | "curated" | "evidence_count" | "belief";
    op: "=" | "!=" | "<" | "<=" | ">" | ">=" | "contains";
    value: string | number | boolean;
}

export interface DocChip {
    facet: "doc";
    dois: string[];
}

export interface PathChip {
    facet: "path";
    sources: string[];
    targets: string[];
    maxLen?: number;
    cap?: number;
}

export type FacetChip = NodeChip | EdgeChip | DocChip | PathChip;

const NUMERIC_NODE_FIELDS = new Set(["degree", "in_degree", "out_degree"]);
const NUMERIC_EDGE_FIELDS = new Set(["evidence_count", "belief"]);
const ORDER_OPS = new Set(["<", "<=", ">", ">="]);

/** Client-side validation mirroring the server's facet rules. */
export function validateChip(chip: FacetChip): string | null {
    if (chip.facet === "doc") {
        return chip.dois.length > 0 ? null : "doc facet needs at least one DOI";
    }
    if (chip.facet === "path") {
        if (chip.sources.length === 0 || chip.targets.length === 0) {
            return "path facet needs sources and targets";
        }
        if (chip.maxLen !== undefined && (chip.maxLen < 1 || chip.maxLen > 8)) {
            return "path length must be between 1 and 8";
        }
        return null;
    }
    const numeric =
        chip.facet === "node"
            ? NUMERIC_NODE_FIELDS.has(chip.field)
            : NUMERIC_EDGE_FIELDS.has(chip.field);
    if (numeric && chip.op === "contains") {
        return `'contains' does not apply to ${chip.field}`;
    }
    if (numeric && typeof chip.value !== "number") {
        return `${chip.field} needs a numeric value`;
    }
    if (!numeric && chip.field !== "curated" && ORDER_OPS.has(chip.op)) {
        return `'${chip.op}' does not apply to ${chip.field}`;
    }
    if (chip.field === "curated" && typeof chip.value !== "boolean") {
        return "curated needs true or false";
    }
    return null;
}

/** Serialize chips into the chain document POSTed to the query route. */
export function chainDocument(chips: FacetChip[]): string {
    const chain = chips.map((chip) => {
        if (chip.facet === "doc") {
            return { facet: "doc", dois: chip.dois };
        }
        if (chip.facet === "path") {
            return {
                facet: "path",
                sources: chip.sources,
                targets: chip.targets,
                max_len: chip.maxLen ?? 4,
                cap: chip.cap ?? 1000,
            };
        }
        return { facet: chip.facet, field: chip.field, op: chip.op, value: chip.value };
    });
    return JSON.stringify({ chain });
}
