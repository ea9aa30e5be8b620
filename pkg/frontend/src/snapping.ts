/**
 * Selection-to-span snapping.
 *
 * Penalty scores count whitespace tokens, so a span must cover whole
 * tokens: a free character selection would be scored differently by the
 * backend than what the annotator sees highlighted. Selections are
 * therefore snapped *outward* to the nearest whitespace-token boundaries
 * of a single sentence panel.
 */

export interface SnappedSpan {
  text: string;
  start: number;
  end: number;
}

function isSpace(ch: string): boolean {
  return /\s/.test(ch);
}

/**
 * Snap [start, end) within `sentence` outward to token boundaries.
 * Returns null for empty or whitespace-only selections (a no-op in the
 * UI). Offsets outside the sentence are clamped to it; the caller is
 * responsible for never handing over a selection that crosses panels.
 */
export function snapToTokenBoundaries(
  sentence: string,
  start: number,
  end: number,
): SnappedSpan | null {
  if (end < start) [start, end] = [end, start];
  start = Math.max(0, Math.min(start, sentence.length));
  end = Math.max(0, Math.min(end, sentence.length));
  if (start === end) return null;

  let text = sentence.slice(start, end);
  if (text.trim().length === 0) return null;

  // shrink leading/trailing whitespace inside the selection first, so a
  // sloppy selection ending in a gap does not swallow the next token
  while (start < end && isSpace(sentence[start])) start += 1;
  while (end > start && isSpace(sentence[end - 1])) end -= 1;

  // grow outward to whole tokens
  while (start > 0 && !isSpace(sentence[start - 1])) start -= 1;
  while (end < sentence.length && !isSpace(sentence[end])) end += 1;

  text = sentence.slice(start, end);
  return { text, start, end };
}

/** True when the snapped span consists of whole whitespace tokens. */
export function isTokenAligned(sentence: string, span: SnappedSpan): boolean {
  const before = span.start === 0 || isSpace(sentence[span.start - 1]);
  const after = span.end === sentence.length || isSpace(sentence[span.end]);
  const trimmed =
    !isSpace(sentence[span.start]) && !isSpace(sentence[span.end - 1]);
  return before && after && trimmed;
}
