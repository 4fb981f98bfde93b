/** Typed client for the annotation service JSON API. */

export interface Category {
  token: string;
  name_en: string;
  name_ko: string;
  desc_en: string;
  desc_ko: string;
}

export interface Session {
  guideline: string;
  categories: Category[];
  rater_id: string;
}

export interface Item {
  item_id: string;
  title: string;
  thumbnail_url: string;
}

export interface RaterProgress {
  done: number;
  total: number;
}

export interface Progress {
  total_items: number;
  raters: Record<string, RaterProgress>;
}

export interface ExportGrid {
  item_ids: string[];
  raters: string[];
  cells: (string | null)[][];
}

/** Non-2xx response; `status` distinguishes client bugs from server trouble. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** What a labeling session needs from the service. */
export interface AnnotationApi {
  session(rater: string): Promise<Session>;
  nextItem(rater: string): Promise<Item | null>;
  submitLabel(itemId: string, rater: string, choice: string): Promise<number>;
  progress(): Promise<Progress>;
}

export class ApiClient implements AnnotationApi {
  private readonly fetchFn: FetchLike;

  constructor(
    private readonly baseUrl: string = "",
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => globalThis.fetch(input, init));
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const res = await this.fetchFn(this.baseUrl + path, init);
    if (!res.ok) {
      let detail = res.statusText;
      try {
        const body = (await res.json()) as { detail?: unknown };
        if (typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(res.status, detail);
    }
    return res;
  }

  async session(rater: string): Promise<Session> {
    const res = await this.request(`/api/session?rater=${encodeURIComponent(rater)}`);
    return (await res.json()) as Session;
  }

  /** The rater's next unlabeled item, or null when they are done (204). */
  async nextItem(rater: string): Promise<Item | null> {
    const res = await this.request(`/api/items/next?rater=${encodeURIComponent(rater)}`);
    if (res.status === 204) return null;
    return (await res.json()) as Item;
  }

  async submitLabel(itemId: string, rater: string, choice: string): Promise<number> {
    const res = await this.request("/api/labels", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ item_id: itemId, rater, choice }),
    });
    const body = (await res.json()) as { seq: number };
    return body.seq;
  }

  async progress(): Promise<Progress> {
    const res = await this.request("/api/progress");
    return (await res.json()) as Progress;
  }

  async exportGrid(): Promise<ExportGrid> {
    const res = await this.request("/api/export");
    return (await res.json()) as ExportGrid;
  }
}
