/**
 * Knowledge space scenes: document cards and the 2D cluster topology.
 * Cluster members share their cluster's hue; noise points render gray with
 * no boundary; coarse boundaries carry the shared hue at lower opacity than
 * the fine boundaries nested inside them.
 */

import {
    COARSE_BOUNDARY_OPACITY,
    FINE_BOUNDARY_OPACITY,
    NOISE_COLOR,
    hueColor,
} from "./styles.js";
import type { ClusterExportWire, DocumentWire } from "./types.js";

export interface ClusterPointElement {
    kind: "point";
    doi: string;
    x: number;
    y: number;
    cluster: number | null;
    color: string;
    noise: boolean;
}

export interface ClusterBoundaryElement {
    kind: "boundary";
    clusterId: number;
    level: "coarse" | "fine";
    hue: number;
    color: string;
    opacity: number;
    polygon: [number, number][];
}

export interface ClusterScene {
    points: ClusterPointElement[];
    boundaries: ClusterBoundaryElement[];
}

export function renderClusterScene(exportWire: ClusterExportWire): ClusterScene {
    const hueOfCluster = new Map<number, number>();
    for (const cluster of exportWire.clusters) {
        hueOfCluster.set(cluster.id, cluster.hue);
    }
    const noiseDois = new Set(exportWire.noise);

    const points: ClusterPointElement[] = exportWire.points.map((point) => {
        const noise = point.cluster === null || noiseDois.has(point.doi);
        const hue = point.cluster !== null ? hueOfCluster.get(point.cluster) : undefined;
        return {
            kind: "point",
            doi: point.doi,
            x: point.x,
            y: point.y,
            cluster: point.cluster,
            color: noise || hue === undefined ? NOISE_COLOR : hueColor(hue),
            noise,
        };
    });

    const boundaries: ClusterBoundaryElement[] = [];
    for (const cluster of exportWire.clusters) {
        if (cluster.polygon === null) {
            continue; // no boundary for this cluster (and never for noise)
        }
        boundaries.push({
            kind: "boundary",
            clusterId: cluster.id,
            level: cluster.level,
            hue: cluster.hue,
            color: hueColor(cluster.hue),
            opacity: cluster.level === "coarse" ? COARSE_BOUNDARY_OPACITY : FINE_BOUNDARY_OPACITY,
            polygon: cluster.polygon,
        });
    }
    return { points, boundaries };
}

export interface DocumentCard {
    doi: string;
    title: string;
    byline: string;
    year: number;
    /** Artifact badge counts shown on the card face. */
    figures: number;
    tables: number;
}

export function renderCards(documents: DocumentWire[]): DocumentCard[] {
    return documents.map((doc) => ({
        doi: doc.doi,
        title: doc.title,
        byline: `${doc.authors.join(", ")} - ${doc.publisher}`,
        year: doc.year,
        figures: doc.figures,
        tables: doc.tables,
    }));
}
