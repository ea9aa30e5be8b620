/**
 * Annotation workbench. Wires the pure modules (snapping, taxonomy,
 * drafts, api) to the DOM: pick a unit, select a span in the hypothesis
 * panel (or the source panel for omissions), choose subtype/severity on
 * one of the three dimension tabs, submit, and watch the score preview
 * the service computed. No score math happens client-side.
 */

import { ApiClient, Score, UnitPayload, Violation } from "./api.js";
import { Draft, DraftStore } from "./drafts.js";
import { snapToTokenBoundaries } from "./snapping.js";
import {
  DIMENSIONS,
  Dimension,
  ErrorDraft,
  SEVERITIES,
  Severity,
  SpanSide,
  makeError,
  subtypesFor,
} from "./taxonomy.js";

interface Selection {
  side: SpanSide;
  text: string;
}

export class App {
  private api: ApiClient;
  private drafts: DraftStore;
  private annotatorId: string;
  private unitIds: string[] = [];
  private cursor = 0;
  private unit: UnitPayload | null = null;
  private revision = 0;
  private errors: ErrorDraft[] = [];
  private dimension: Dimension = "accuracy";
  private selection: Selection | null = null;

  constructor(
    private root: HTMLElement,
    baseUrl: string,
    storage: Storage,
    annotatorId: string,
  ) {
    this.api = new ApiClient(baseUrl);
    this.drafts = new DraftStore(storage);
    this.annotatorId = annotatorId;
  }

  async start(): Promise<void> {
    const page = await this.api.listUnits(0, 500);
    this.unitIds = page.tasks.map((t) => t.unit_id);
    if (this.unitIds.length === 0) {
      this.root.textContent = "Dataset is empty.";
      return;
    }
    await this.openUnit(0);
  }

  private async openUnit(index: number): Promise<void> {
    this.cursor = Math.max(0, Math.min(index, this.unitIds.length - 1));
    const { unit, task } = await this.api.getUnit(this.unitIds[this.cursor]);
    this.unit = unit;
    this.revision = task.revision;
    const draft = this.drafts.load(unit.id);
    this.errors = draft ? draft.errors : task.annotation ? task.annotation.errors : [];
    this.selection = null;
    this.render();
  }

  private persistDraft(): void {
    if (!this.unit) return;
    const draft: Draft = {
      unitId: this.unit.id,
      errors: this.errors,
      revision: this.revision,
      state: "pending",
    };
    this.drafts.save(draft);
  }

  private handleSelection(side: SpanSide, panel: HTMLElement): void {
    const selection = window.getSelection();
    if (!selection || selection.rangeCount === 0 || !this.unit) return;
    const range = selection.getRangeAt(0);
    const textNode = panel.firstChild;
    // reject selections that leave the sentence panel
    if (
      !textNode ||
      range.startContainer !== textNode ||
      range.endContainer !== textNode
    ) {
      return;
    }
    const sentence = side === "source" ? this.unit.source : this.unit.hypothesis ?? "";
    const snapped = snapToTokenBoundaries(sentence, range.startOffset, range.endOffset);
    if (!snapped) return;
    this.selection = { side, text: snapped.text };
    this.render();
  }

  private addError(subtype: string, severity: Severity): void {
    if (!this.selection) return;
    try {
      const error = makeError(
        this.dimension,
        subtype,
        severity,
        this.selection.text,
        this.selection.side,
      );
      this.errors = [...this.errors, error];
      this.selection = null;
      this.persistDraft();
      this.render();
    } catch (err) {
      this.renderNotice(String(err), "error");
    }
  }

  private removeError(index: number): void {
    this.errors = this.errors.filter((_, i) => i !== index);
    this.persistDraft();
    this.render();
  }

  private async submit(): Promise<void> {
    if (!this.unit) return;
    try {
      const result = await this.api.putAnnotation(
        this.unit.id,
        this.errors,
        this.annotatorId,
        this.revision,
      );
      if (result.ok) {
        this.revision = result.task.revision;
        this.drafts.clear(this.unit.id);
        this.renderScore(result.score);
      } else if (result.status === 409) {
        this.renderNotice("Someone else annotated this unit; reload to continue.", "error");
      } else {
        this.renderViolations(result.violations);
      }
    } catch {
      this.persistDraft();
      this.renderNotice("Network failure: draft saved locally, retry when online.", "warn");
    }
  }

  // -- rendering ---------------------------------------------------------

  private el(tag: string, cls?: string, text?: string): HTMLElement {
    const node = document.createElement(tag);
    if (cls) node.className = cls;
    if (text !== undefined) node.textContent = text;
    return node;
  }

  private render(): void {
    if (!this.unit) return;
    this.root.textContent = "";

    const nav = this.el("div", "nav");
    const prev = this.el("button", "", "◀ prev") as HTMLButtonElement;
    prev.onclick = () => void this.openUnit(this.cursor - 1);
    const next = this.el("button", "", "next ▶") as HTMLButtonElement;
    next.onclick = () => void this.openUnit(this.cursor + 1);
    nav.append(
      prev,
      this.el("span", "counter", `${this.cursor + 1} / ${this.unitIds.length} — ${this.unit.id}`),
      next,
    );
    this.root.append(nav);

    const source = this.el("p", "panel source", this.unit.source);
    source.onmouseup = () => this.handleSelection("source", source);
    const hypothesis = this.el("p", "panel hypothesis", this.unit.hypothesis ?? "");
    hypothesis.onmouseup = () => this.handleSelection("hypothesis", hypothesis);
    this.root.append(this.el("h3", "", "Source"), source);
    this.root.append(this.el("h3", "", "Hypothesis"), hypothesis);

    const tabs = this.el("div", "tabs");
    for (const dim of DIMENSIONS) {
      const tab = this.el(
        "button",
        dim === this.dimension ? "tab active" : "tab",
        dim,
      ) as HTMLButtonElement;
      tab.onclick = () => {
        this.dimension = dim;
        this.render();
      };
      tabs.append(tab);
    }
    this.root.append(tabs);

    const picker = this.el("div", "picker");
    if (this.selection) {
      picker.append(
        this.el("span", "selected-span", `「${this.selection.text}」 (${this.selection.side})`),
      );
      const subtypeSelect = this.el("select") as HTMLSelectElement;
      for (const subtype of subtypesFor(this.dimension)) {
        const option = this.el("option", "", subtype) as HTMLOptionElement;
        option.value = subtype;
        subtypeSelect.append(option);
      }
      const severitySelect = this.el("select") as HTMLSelectElement;
      for (const severity of SEVERITIES) {
        const option = this.el("option", "", severity) as HTMLOptionElement;
        option.value = severity;
        severitySelect.append(option);
      }
      const add = this.el("button", "", "add error") as HTMLButtonElement;
      add.onclick = () =>
        this.addError(subtypeSelect.value, severitySelect.value as Severity);
      picker.append(subtypeSelect, severitySelect, add);
    } else {
      picker.append(
        this.el(
          "span",
          "hint",
          "Select a span in the hypothesis (or in the source for omissions).",
        ),
      );
    }
    this.root.append(picker);

    const list = this.el("ul", "errors");
    this.errors.forEach((error, index) => {
      const item = this.el(
        "li",
        `err ${error.dimension}`,
        `${error.dimension}: ${error.span_text} (${error.subtype}/${error.severity})`,
      );
      const remove = this.el("button", "remove", "✕") as HTMLButtonElement;
      remove.onclick = () => this.removeError(index);
      item.append(remove);
      list.append(item);
    });
    this.root.append(list);

    const submit = this.el("button", "submit", "Submit annotation") as HTMLButtonElement;
    submit.onclick = () => void this.submit();
    this.root.append(submit);
    this.root.append(this.el("div", "notice"));
    this.root.append(this.el("div", "score"));
  }

  private renderScore(score: Score): void {
    const box = this.root.querySelector(".score");
    if (box) {
      box.textContent =
        `accuracy ${score.accuracy} · fluency ${score.fluency} · ` +
        `style ${score.style} · total ${score.total}`;
    }
  }

  private renderNotice(message: string, level: "warn" | "error"): void {
    const box = this.root.querySelector(".notice");
    if (box) {
      box.textContent = message;
      (box as HTMLElement).dataset.level = level;
    }
  }

  private renderViolations(violations: Violation[]): void {
    this.renderNotice(
      violations.map((v) => `${v.code}: ${v.message} [${v.span_text}]`).join("\n") ||
        "validation failed",
      "error",
    );
  }
}

export function mount(): void {
  const params = new URLSearchParams(window.location.search);
  const baseUrl = params.get("service") ?? "http://127.0.0.1:8571";
  const annotator = params.get("annotator") ?? "primary";
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const app = new App(root, baseUrl, window.localStorage, annotator);
  void app.start();
}
