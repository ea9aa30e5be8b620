/**
 * Typed client for the annotation service HTTP API. The only
 * configuration is the service base URL; `fetch` is injectable for tests.
 */

import type { ErrorDraft } from "./taxonomy.js";

export interface UnitPayload {
  id: string;
  source: string;
  hypothesis?: string;
  reference?: string;
  corpus?: string;
}

export interface TaskSummary {
  unit_id: string;
  status: "unannotated" | "in_progress" | "done";
  annotator_id: string | null;
  revision: number;
  updated_at: number | null;
}

export interface TaskDetail extends TaskSummary {
  annotation: { unit_id: string; errors: ErrorDraft[] } | null;
}

export interface Score {
  accuracy: number;
  fluency: number;
  style: number;
  total: number;
}

export interface Violation {
  code: string;
  message: string;
  span_text: string;
  warning: boolean;
}

export interface UnitPage {
  total: number;
  offset: number;
  limit: number;
  tasks: TaskSummary[];
}

export interface PutResult {
  ok: true;
  task: TaskDetail;
  score: Score;
}

export interface PutRejected {
  ok: false;
  status: number;
  violations: Violation[];
  message: string;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn: FetchLike = fetch) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn;
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(`${this.base}${path}`);
    if (!response.ok) {
      throw new Error(`GET ${path} failed: ${response.status}`);
    }
    return (await response.json()) as T;
  }

  listUnits(offset = 0, limit = 50, status?: string): Promise<UnitPage> {
    const params = new URLSearchParams({ offset: String(offset), limit: String(limit) });
    if (status) params.set("status", status);
    return this.getJson(`/units?${params}`);
  }

  getUnit(unitId: string): Promise<{ unit: UnitPayload; task: TaskDetail }> {
    return this.getJson(`/units/${encodeURIComponent(unitId)}`);
  }

  progress(): Promise<Record<string, number>> {
    return this.getJson("/progress");
  }

  async exportText(): Promise<string> {
    const response = await this.fetchFn(`${this.base}/export?format=mqm-text`);
    if (!response.ok) throw new Error(`export failed: ${response.status}`);
    return response.text();
  }

  /**
   * Store an annotation. Resolves with the live score on 200 and with the
   * violation list on 422/409 (`ok: false`); rejects only on transport
   * failure, so callers can keep the draft for retry.
   */
  async putAnnotation(
    unitId: string,
    errors: ErrorDraft[],
    annotatorId: string,
    revision?: number,
    done = true,
  ): Promise<PutResult | PutRejected> {
    const body: Record<string, unknown> = {
      annotation: { unit_id: unitId, errors },
      annotator_id: annotatorId,
      done,
    };
    if (revision !== undefined) body.revision = revision;
    const response = await this.fetchFn(
      `${this.base}/units/${encodeURIComponent(unitId)}/annotation`,
      {
        method: "PUT",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      },
    );
    if (response.ok) {
      const payload = (await response.json()) as { task: TaskDetail; score: Score };
      return { ok: true, ...payload };
    }
    const detail = await response.json().catch(() => ({ detail: "unreadable error" }));
    const violations = Array.isArray(detail.detail) ? (detail.detail as Violation[]) : [];
    return {
      ok: false,
      status: response.status,
      violations,
      message: typeof detail.detail === "string" ? detail.detail : "validation failed",
    };
  }

  async previewScore(
    unitId: string,
    errors: ErrorDraft[],
  ): Promise<{ score: Score; warnings: Violation[] } | PutRejected> {
    const response = await this.fetchFn(
      `${this.base}/units/${encodeURIComponent(unitId)}/preview-score`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ annotation: { unit_id: unitId, errors } }),
      },
    );
    if (response.ok) {
      return (await response.json()) as { score: Score; warnings: Violation[] };
    }
    const detail = await response.json().catch(() => ({ detail: "unreadable error" }));
    return {
      ok: false,
      status: response.status,
      violations: Array.isArray(detail.detail) ? (detail.detail as Violation[]) : [],
      message: "validation failed",
    };
  }
}
