/**
 * End-to-end: the UI pipeline (span snapping -> picker-constrained error
 * construction -> API client) drives the real annotation service, and the
 * resulting export is read back and scored by the backend parser/scorer.
 */

import { execFile, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { snapToTokenBoundaries } from "../src/snapping.js";
import { Dimension, ErrorDraft, Severity, SpanSide, makeError } from "../src/taxonomy.js";

const execFileAsync = promisify(execFile);

const PORT = 8639;
const BASE = `http://127.0.0.1:${PORT}`;

const SOURCE = "And demonstrations also occurred in Ni'lin.";
const HYPOTHESIS = "Ni'lin은 또한 시위가 일어나는 것을 목격했습니다.";

let server: ChildProcess;
let workDir: string;

async function waitForService(): Promise<void> {
  for (let attempt = 0; attempt < 60; attempt += 1) {
    try {
      const response = await fetch(`${BASE}/progress`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("annotation service did not come up");
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "mqm-ui-e2e-"));
  const dataset = join(workDir, "units.jsonl");
  writeFileSync(
    dataset,
    JSON.stringify({ id: "nilin", source: SOURCE, hypothesis: HYPOTHESIS }) + "\n",
  );
  server = spawn(
    "mqmkit",
    ["serve", "--dataset", dataset, "--log", join(workDir, "log.jsonl"), "--port", String(PORT)],
    { stdio: "ignore" },
  );
  await waitForService();
}, 30000);

afterAll(() => {
  server?.kill();
});

/**
 * Annotate exactly as the browser flow would: each span comes out of a
 * (deliberately sloppy) character selection that the snapper fixes, and
 * each error goes through the picker-constrained constructor.
 */
function annotateLikeTheUi(): ErrorDraft[] {
  const make = (
    sentence: string,
    sloppy: string,
    dimension: Dimension,
    subtype: string,
    severity: Severity,
    side: SpanSide,
  ): ErrorDraft => {
    const at = sentence.indexOf(sloppy);
    const snapped = snapToTokenBoundaries(sentence, at, at + sloppy.length);
    if (!snapped) throw new Error(`selection collapsed: ${sloppy}`);
    return makeError(dimension, subtype, severity, snapped.text, side);
  };

  const nilinToken = HYPOTHESIS.split(" ")[0]; // "Ni'lin은"
  return [
    // the annotator typed/trimmed the exact foreign substring for the
    // untranslated-text pair, as the guideline's worked example records it
    makeError("accuracy", "untranslated text", "major", "Ni'lin"),
    make(SOURCE, "An", "accuracy", "omission", "minor", "source"),
    make(HYPOTHESIS, "격했습니다", "accuracy", "mistranslation", "major", "hypothesis"),
    makeError("fluency", "untranslated text", "major", "Ni'lin"),
    make(HYPOTHESIS, "또한", "fluency", "unnaturalness", "minor", "hypothesis"),
    make(HYPOTHESIS, HYPOTHESIS, "style", "structure", "major", "hypothesis"),
  ].map((error, index) => {
    if (index === 1) expect(error.span_text).toBe("And");
    if (index === 2) expect(error.span_text).toBe("목격했습니다.");
    if (index === 5) expect(error.span_text).toBe(HYPOTHESIS);
    void nilinToken;
    return error;
  });
}

describe("annotating the worked example through the UI pipeline", () => {
  it("previews, submits, exports and scores as 11/6/5/22", async () => {
    const client = new ApiClient(BASE);

    const errors = annotateLikeTheUi();

    // preview must equal what the service will score (no client math)
    const preview = await client.previewScore("nilin", errors);
    expect("score" in preview && preview.score).toEqual({
      accuracy: 11,
      fluency: 6,
      style: 5,
      total: 22,
    });

    const put = await client.putAnnotation("nilin", errors, "primary", 0);
    expect(put.ok).toBe(true);
    if (put.ok) {
      expect(put.score).toEqual({ accuracy: 11, fluency: 6, style: 5, total: 22 });
      expect(put.task.status).toBe("done");
    }

    // forged request (bypassing the picker) is rejected with 422
    const forged = [...errors, { ...errors[0], dimension: "style" as Dimension }];
    const rejected = await client.putAnnotation("nilin", forged, "primary");
    expect(rejected.ok).toBe(false);
    if (!rejected.ok) {
      expect(rejected.status).toBe(422);
      expect(rejected.violations.map((v) => v.code)).toContain(
        "SUBTYPE_DIMENSION_MISMATCH",
      );
    }

    // the export round-trips through the backend parser and scorer
    const exportText = await client.exportText();
    expect(exportText).toContain("Ni'lin(untranslated text/major)");
    const exportPath = join(workDir, "export.mqm");
    writeFileSync(exportPath, exportText);

    const { stdout } = await execFileAsync("mqmkit", [
      "score",
      "--annotations",
      exportPath,
      "--format",
      "json",
    ]);
    const report = JSON.parse(stdout);
    expect(report.units).toHaveLength(1);
    expect(report.units[0]).toMatchObject({
      accuracy: 11,
      fluency: 6,
      style: 5,
      total: 22,
    });
  }, 30000);

  it("stale revision tokens get 409", async () => {
    const client = new ApiClient(BASE);
    const result = await client.putAnnotation("nilin", [], "primary", 0);
    expect(result.ok).toBe(false);
    if (!result.ok) expect(result.status).toBe(409);
  });
});
