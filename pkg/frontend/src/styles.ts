/**
 * Visual token tables. Every rendered edge and cluster element derives its
 * appearance from these total functions, so conformance tests can assert on
 * tokens instead of pixels.
 */

import type { Polarity } from "./types.js";

export type ColorToken = "positive-blue" | "negative-red" | "unknown-gray";
export type CurationMarker = "filled-circle" | "empty-circle";
export type Arrowhead = "filled-arrow" | "filled-box";

export interface EdgeStyle {
    color: ColorToken;
    curationMarker: CurationMarker;
    arrowhead: Arrowhead;
}

const COLOR_OF_POLARITY: Record<Polarity, ColorToken> = {
    positive: "positive-blue",
    negative: "negative-red",
    unknown: "unknown-gray",
};

/** Color comes from polarity, the circle from curation, the head from directedness. */
export function edgeStyle(polarity: Polarity, curated: boolean, directed: boolean): EdgeStyle {
    return {
        color: COLOR_OF_POLARITY[polarity],
        curationMarker: curated ? "filled-circle" : "empty-circle",
        arrowhead: directed ? "filled-arrow" : "filled-box",
    };
}

export const TOKEN_COLORS: Record<ColorToken, string> = {
    "positive-blue": "#2b6cb0",
    "negative-red": "#c53030",
    "unknown-gray": "#718096",
};

/** Opacity applied to global-view elements outside the highlight set. */
export const FADED_OPACITY = 0.15;
export const FULL_OPACITY = 1.0;

export const NOISE_COLOR = "#a0aec0"; // gray, no boundary

const HUE_CYCLE = [
    "#2b6cb0",
    "#c05621",
    "#2f855a",
    "#6b46c1",
    "#b83280",
    "#0987a0",
    "#975a16",
    "#702459",
];

export function hueColor(hue: number): string {
    return HUE_CYCLE[((hue % HUE_CYCLE.length) + HUE_CYCLE.length) % HUE_CYCLE.length];
}

/** Coarse boundaries carry the shared hue at reduced opacity. */
export const COARSE_BOUNDARY_OPACITY = 0.3;
export const FINE_BOUNDARY_OPACITY = 0.75;
