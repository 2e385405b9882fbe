/**
 * Orchestration between the API client and the store. Controllers are the
 * only code that talks to the network; they publish results exclusively by
 * dispatching actions, so every view change still flows through the reducer.
 */

import { ApiClient } from "./api.js";
import { Store } from "./state.js";
import type { SearchHit, SearchRequestBody } from "./types.js";

export const NEIGHBOR_RADIUS = 4;
const TOAST_MS = 4000;

function messageOf(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}

function isAbort(err: unknown): boolean {
  return err instanceof DOMException && err.name === "AbortError";
}

export class ConsoleController {
  private readonly store: Store;
  private readonly api: ApiClient;
  private nextRequestId = 1;
  private lastOpener: HTMLElement | null = null;
  private toastTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(store: Store, api: ApiClient) {
    this.store = store;
    this.api = api;
  }

  /** Fetch the catalog summary and the submission history at startup. */
  async loadInitial(): Promise<void> {
    const [catalog, submissions] = await Promise.allSettled([
      this.api.catalog(),
      this.api.submissions(),
    ]);
    if (catalog.status === "fulfilled") {
      this.store.dispatch({ kind: "catalog-loaded", catalog: catalog.value });
    } else {
      this.showToast(`Catalog unavailable: ${messageOf(catalog.reason)}`);
    }
    if (submissions.status === "fulfilled") {
      this.store.dispatch({ kind: "submissions-loaded", submissions: submissions.value });
    } else {
      this.showToast(`Could not load submissions: ${messageOf(submissions.reason)}`);
    }
  }

  buildSearchBody(): SearchRequestBody {
    const state = this.store.get();
    const body: SearchRequestBody = {
      query_text: state.queryText,
      fusion: state.fusion,
      t: state.t,
      include_timings: true,
    };
    if (state.selectedSpaces.length > 0) body.spaces = [...state.selectedSpaces];
    if (state.classesFromText) {
      body.classes_from_text = true;
      body.match_mode = state.matchMode;
    }
    return body;
  }

  /**
   * Issue a search. Each call gets a fresh request id; the reducer ignores
   * replies that no longer carry the latest id, and the API client aborts the
   * superseded connection, so the last search always wins.
   */
  async runSearch(): Promise<void> {
    if (this.store.get().queryText.trim() === "") {
      this.showToast("Type a query first.");
      return;
    }
    const requestId = this.nextRequestId;
    this.nextRequestId += 1;
    const body = this.buildSearchBody();
    this.store.dispatch({ kind: "search-started", requestId });
    try {
      const response = await this.api.search(body);
      this.store.dispatch({ kind: "search-succeeded", requestId, response });
    } catch (err) {
      if (isAbort(err)) return; // superseded by a newer search
      this.store.dispatch({ kind: "search-failed", requestId, message: messageOf(err) });
    }
  }

  /** Open the modal for a tile and fetch its temporal neighbors. */
  async openFrameModal(
    hit: SearchHit,
    videoId: string,
    opener?: HTMLElement | null,
  ): Promise<void> {
    const active = document.activeElement;
    this.lastOpener = opener ?? (active instanceof HTMLElement ? active : null);
    this.store.dispatch({
      kind: "modal-opened",
      frameId: hit.frame_id,
      videoId,
      timestampMs: hit.timestamp_ms,
    });
    try {
      const neighbors = await this.api.neighbors(hit.frame_id, NEIGHBOR_RADIUS);
      this.store.dispatch({ kind: "neighbors-loaded", frameId: hit.frame_id, neighbors });
    } catch (err) {
      this.store.dispatch({
        kind: "neighbors-failed",
        frameId: hit.frame_id,
        message: messageOf(err),
      });
    }
  }

  /** Close the modal and hand focus back to the tile that opened it. */
  closeModal(): void {
    this.store.dispatch({ kind: "modal-closed" });
    const opener = this.lastOpener;
    this.lastOpener = null;
    opener?.focus();
  }

  /**
   * Submit a frame as the answer for the current query. On success the new
   * record is appended to the panel straight from the 201 response — no
   * refetch, no reload. On failure only a toast appears; the panel (and the
   * modal, if open) stay as they were.
   */
  async chooseThis(frameId: number): Promise<void> {
    const state = this.store.get();
    const queryText = state.response?.query_text ?? state.queryText;
    try {
      const submission = await this.api.submit(frameId, queryText ?? "");
      this.store.dispatch({ kind: "submission-created", submission });
      this.showToast(`Saved submission #${submission.submission_id}`);
    } catch (err) {
      this.showToast(`Submission failed: ${messageOf(err)}`);
    }
  }

  showToast(message: string): void {
    if (this.toastTimer !== null) clearTimeout(this.toastTimer);
    this.store.dispatch({ kind: "toast-shown", message });
    this.toastTimer = setTimeout(() => {
      this.toastTimer = null;
      this.store.dispatch({ kind: "toast-cleared" });
    }, TOAST_MS);
  }

  /** Escape closes the modal (when one is open) and restores focus. */
  handleKeydown(event: KeyboardEvent): void {
    if (event.key === "Escape" && this.store.get().modal !== null) {
      event.preventDefault();
      this.closeModal();
    }
  }
}
