/**
 * Thin fetch client for the framesift service.
 *
 * Searches follow a latest-wins policy: issuing a new search aborts the one
 * still in flight, so a slow early reply can never overwrite a newer one.
 * (The store double-checks with request ids; the abort just frees the wire.)
 */

import type {
  CatalogSummary,
  NeighborsResponse,
  SearchRequestBody,
  SearchResponse,
  Submission,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, message: string) {
    super(message);
    this.name = "ApiError";
    this.status = status;
  }
}

async function errorDetail(res: Response): Promise<string> {
  try {
    const body = (await res.json()) as { detail?: unknown; error?: unknown };
    const detail = body.detail ?? body.error;
    if (typeof detail === "string") return detail;
    if (detail !== undefined) return JSON.stringify(detail);
  } catch {
    // fall through to the generic message
  }
  return `request failed with status ${res.status}`;
}

async function asJson<T>(res: Response): Promise<T> {
  if (!res.ok) throw new ApiError(res.status, await errorDetail(res));
  return (await res.json()) as T;
}

/** URL for a catalog-relative media path, served by the service's /media mount. */
export function mediaUrl(path: string): string {
  const encoded = path
    .split("/")
    .map((segment) => encodeURIComponent(segment))
    .join("/");
  return `/media/${encoded}`;
}

export class ApiClient {
  private readonly baseUrl: string;
  private searchController: AbortController | null = null;

  constructor(baseUrl = "") {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  /** POST /api/search, aborting any search still in flight. */
  async search(body: SearchRequestBody): Promise<SearchResponse> {
    this.searchController?.abort();
    const controller = new AbortController();
    this.searchController = controller;
    const res = await fetch(`${this.baseUrl}/api/search`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal: controller.signal,
    });
    return asJson<SearchResponse>(res);
  }

  async neighbors(frameId: number, radius = 4): Promise<NeighborsResponse> {
    const res = await fetch(
      `${this.baseUrl}/api/frames/${frameId}/neighbors?radius=${radius}`,
    );
    return asJson<NeighborsResponse>(res);
  }

  async submit(frameId: number, queryText: string): Promise<Submission> {
    const res = await fetch(`${this.baseUrl}/api/submissions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ frame_id: frameId, query_text: queryText }),
    });
    return asJson<Submission>(res);
  }

  async submissions(): Promise<Submission[]> {
    const res = await fetch(`${this.baseUrl}/api/submissions`);
    const body = await asJson<{ submissions: Submission[] }>(res);
    return body.submissions;
  }

  async catalog(): Promise<CatalogSummary> {
    const res = await fetch(`${this.baseUrl}/api/catalog`);
    return asJson<CatalogSummary>(res);
  }
}
