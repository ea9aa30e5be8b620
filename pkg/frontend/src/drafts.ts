/**
 * Local draft persistence. Drafts survive page reloads and failed
 * submissions (network loss keeps the draft retriable); a successful
 * submit clears the unit's draft.
 */

import type { ErrorDraft } from "./taxonomy.js";

export interface Draft {
  unitId: string;
  errors: ErrorDraft[];
  /** revision token observed when the draft was opened, for optimistic concurrency */
  revision: number;
  state: "pending" | "submitted";
}

/** Minimal slice of the Web Storage interface, so tests can fake it. */
export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export class MemoryStorage implements StorageLike {
  private map = new Map<string, string>();
  getItem(key: string): string | null {
    return this.map.has(key) ? (this.map.get(key) as string) : null;
  }
  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }
  removeItem(key: string): void {
    this.map.delete(key);
  }
}

const PREFIX = "mqm-draft:";

export class DraftStore {
  constructor(private readonly storage: StorageLike) {}

  save(draft: Draft): void {
    this.storage.setItem(PREFIX + draft.unitId, JSON.stringify(draft));
  }

  load(unitId: string): Draft | null {
    const raw = this.storage.getItem(PREFIX + unitId);
    if (raw === null) return null;
    try {
      return JSON.parse(raw) as Draft;
    } catch {
      this.storage.removeItem(PREFIX + unitId);
      return null;
    }
  }

  clear(unitId: string): void {
    this.storage.removeItem(PREFIX + unitId);
  }
}
