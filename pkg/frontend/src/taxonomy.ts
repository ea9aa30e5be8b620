/**
 * Error taxonomy mirrored from the backend wire format. The pickers are
 * built from these tables, so the UI cannot assemble a draft whose subtype
 * is invalid for its dimension; 422s can only come from forged requests.
 */

export type Dimension = "accuracy" | "fluency" | "style";
export type Severity = "major" | "minor";
export type SpanSide = "hypothesis" | "source";

export const DIMENSIONS: readonly Dimension[] = ["accuracy", "fluency", "style"];
export const SEVERITIES: readonly Severity[] = ["major", "minor"];

/** Canonical subtype labels per dimension, as the service expects them. */
export const SUBTYPES: Readonly<Record<Dimension, readonly string[]>> = {
  accuracy: [
    "addition",
    "omission",
    "shift in meaning",
    "mistranslation",
    "untranslated text",
  ],
  fluency: [
    "grammar",
    "spelling",
    "punctuation",
    "encoding",
    "formatting",
    "unnaturalness",
    "untranslated text",
  ],
  style: ["formality", "structure"],
};

export function subtypesFor(dimension: Dimension): readonly string[] {
  return SUBTYPES[dimension];
}

export function isValidSubtype(dimension: Dimension, subtype: string): boolean {
  return SUBTYPES[dimension].includes(subtype);
}

/**
 * Source-side spans exist only for accuracy omissions (the missing words
 * can only be pointed at in the source sentence).
 */
export function isValidSide(
  dimension: Dimension,
  subtype: string,
  side: SpanSide,
): boolean {
  if (side === "hypothesis") return true;
  return dimension === "accuracy" && subtype === "omission";
}

export interface ErrorDraft {
  dimension: Dimension;
  subtype: string;
  severity: Severity;
  span_text: string;
  span_side: SpanSide;
}

/** Assemble one error entry, refusing anything the pickers would not offer. */
export function makeError(
  dimension: Dimension,
  subtype: string,
  severity: Severity,
  spanText: string,
  side: SpanSide = "hypothesis",
): ErrorDraft {
  if (!isValidSubtype(dimension, subtype)) {
    throw new Error(`"${subtype}" is not a ${dimension} sub-error type`);
  }
  if (!isValidSide(dimension, subtype, side)) {
    throw new Error(`${dimension}/${subtype} spans cannot sit in the source`);
  }
  if (!SEVERITIES.includes(severity)) {
    throw new Error(`unknown severity "${severity}"`);
  }
  if (spanText.trim().length === 0) {
    throw new Error("span text is empty");
  }
  return { dimension, subtype, severity, span_text: spanText, span_side: side };
}
