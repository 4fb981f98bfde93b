/** Labeling session state machine, UI-agnostic so tests can drive it. */

import { AnnotationApi, ApiError, Category, Item } from "./api.js";

export type Phase =
  | "idle"
  | "loading"
  | "labeling"
  | "submitting"
  | "retry"
  | "done"
  | "fatal";

export interface PendingLabel {
  itemId: string;
  choice: string;
}

export interface Snapshot {
  phase: Phase;
  rater: string;
  guideline: string;
  categories: Category[];
  item: Item | null;
  done: number;
  total: number;
  /** The choice awaiting (re)submission; kept across failures so no label is lost. */
  pending: PendingLabel | null;
  error: string | null;
}

export type Lang = "en" | "ko";

export function detectLang(search: string, navigatorLanguage: string): Lang {
  const fromQuery = new URLSearchParams(search).get("lang");
  if (fromQuery === "ko" || fromQuery === "en") return fromQuery;
  return navigatorLanguage.toLowerCase().startsWith("ko") ? "ko" : "en";
}

export function categoryName(category: Category, lang: Lang): string {
  return lang === "ko" ? category.name_ko : category.name_en;
}

export function categoryDesc(category: Category, lang: Lang): string {
  return lang === "ko" ? category.desc_ko : category.desc_en;
}

/** A submit failure we may recover from: network trouble or a 5xx. */
function isRetryable(err: unknown): boolean {
  if (err instanceof ApiError) return err.status >= 500;
  return true;
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `service error ${err.status}: ${err.message}`;
  return err instanceof Error ? err.message : String(err);
}

export class SessionController {
  private phase: Phase = "idle";
  private guideline = "";
  private categories: Category[] = [];
  private item: Item | null = null;
  private done = 0;
  private total = 0;
  private pending: PendingLabel | null = null;
  private error: string | null = null;
  private listeners: Array<(s: Snapshot) => void> = [];

  constructor(
    private readonly client: AnnotationApi,
    readonly rater: string,
  ) {}

  get snapshot(): Snapshot {
    return {
      phase: this.phase,
      rater: this.rater,
      guideline: this.guideline,
      categories: [...this.categories],
      item: this.item,
      done: this.done,
      total: this.total,
      pending: this.pending,
      error: this.error,
    };
  }

  subscribe(listener: (s: Snapshot) => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    const snap = this.snapshot;
    for (const listener of this.listeners) listener(snap);
  }

  /** Map a keyboard key to a category index: "1".."7" pick in session order. */
  choiceForKey(key: string): number | null {
    const idx = Number.parseInt(key, 10) - 1;
    if (Number.isNaN(idx) || idx < 0 || idx >= this.categories.length) return null;
    return idx;
  }

  async start(): Promise<void> {
    this.phase = "loading";
    this.notify();
    try {
      const session = await this.client.session(this.rater);
      this.guideline = session.guideline;
      this.categories = session.categories;
      const progress = await this.client.progress();
      this.done = progress.raters[this.rater]?.done ?? 0;
      this.total = progress.total_items;
      await this.advance();
    } catch (err) {
      this.phase = "fatal";
      this.error = describe(err);
      this.notify();
    }
  }

  async choose(index: number): Promise<void> {
    if (this.phase !== "labeling" || this.item === null) return;
    if (index < 0 || index >= this.categories.length) return;
    this.pending = { itemId: this.item.item_id, choice: this.categories[index].token };
    await this.flush();
  }

  /** Resubmit the pending label after a recoverable failure. */
  async retry(): Promise<void> {
    if (this.phase !== "retry" || this.pending === null) return;
    await this.flush();
  }

  private async flush(): Promise<void> {
    const pending = this.pending;
    if (pending === null) return;
    this.phase = "submitting";
    this.error = null;
    this.notify();
    try {
      await this.client.submitLabel(pending.itemId, this.rater, pending.choice);
    } catch (err) {
      // the label stays in `pending`; retry() sends the same choice again
      // (the server keeps the last write per item+rater, so a resend after
      // an ambiguous failure cannot corrupt the export)
      this.phase = isRetryable(err) ? "retry" : "fatal";
      this.error = describe(err);
      this.notify();
      return;
    }
    this.pending = null;
    this.done += 1;
    await this.advance();
  }

  private async advance(): Promise<void> {
    try {
      this.item = await this.client.nextItem(this.rater);
    } catch (err) {
      this.phase = "fatal";
      this.error = describe(err);
      this.notify();
      return;
    }
    this.phase = this.item === null ? "done" : "labeling";
    this.error = null;
    this.notify();
  }
}
