/**
 * Entry point: wires the static page to the store, the renderers, and the
 * controller. Loaded as a module script, so the DOM is parsed by the time
 * this runs.
 */

import { ApiClient } from "./api.js";
import { ConsoleController } from "./controller.js";
import { renderModal } from "./modal.js";
import {
  renderResults,
  renderSearchError,
  renderSubmissions,
  renderToast,
  type ResultHandlers,
} from "./render.js";
import { initialState, Store, TILE_PAGE } from "./state.js";
import type { CatalogSummary, SessionState } from "./types.js";

function mustGet<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`console page is missing #${id}`);
  return el as T;
}

function totalTiles(state: SessionState): number {
  if (state.response === null) return 0;
  return state.response.groups.reduce((n, g) => n + g.hits.length, 0);
}

export function boot(): void {
  const store = new Store(initialState());
  const api = new ApiClient();
  const controller = new ConsoleController(store, api);

  const form = mustGet<HTMLFormElement>("search-form");
  const queryInput = mustGet<HTMLInputElement>("query-input");
  const fusionSelect = mustGet<HTMLSelectElement>("fusion-select");
  const tInput = mustGet<HTMLInputElement>("t-input");
  const classesToggle = mustGet<HTMLInputElement>("classes-from-text");
  const matchModeSelect = mustGet<HTMLSelectElement>("match-mode");
  const spacesBox = mustGet<HTMLElement>("spaces-control");
  const statusLine = mustGet<HTMLElement>("catalog-status");
  const results = mustGet<HTMLElement>("results");
  const errorBox = mustGet<HTMLElement>("search-error");
  const submissionsPanel = mustGet<HTMLElement>("submissions-panel");
  const modalRoot = mustGet<HTMLElement>("modal-root");
  const toastRoot = mustGet<HTMLElement>("toast-root");

  const resultHandlers: ResultHandlers = {
    onTileClick: (hit, videoId) => {
      void controller.openFrameModal(hit, videoId);
    },
  };
  const modalHandlers = {
    onChoose: (frameId: number) => {
      void controller.chooseThis(frameId);
    },
    onClose: () => controller.closeModal(),
  };

  function renderSpacesControl(catalog: CatalogSummary): void {
    spacesBox.textContent = "";
    for (const spaceId of catalog.spaces) {
      const label = document.createElement("label");
      label.className = "space-choice";
      const box = document.createElement("input");
      box.type = "checkbox";
      box.value = spaceId;
      box.checked = true;
      box.addEventListener("change", () => {
        const chosen = Array.from(
          spacesBox.querySelectorAll<HTMLInputElement>("input:checked"),
          (el) => el.value,
        );
        // All boxes ticked means "no restriction": the field is omitted and
        // the server searches every space, same as choosing them all.
        store.dispatch({
          kind: "set-spaces",
          spaces: chosen.length === catalog.spaces.length ? [] : chosen,
        });
      });
      label.appendChild(box);
      label.appendChild(document.createTextNode(spaceId));
      spacesBox.appendChild(label);
    }
  }

  store.subscribe((state, previous) => {
    if (
      state.response !== previous.response ||
      state.visibleTiles !== previous.visibleTiles ||
      state.searching !== previous.searching
    ) {
      renderResults(results, state, resultHandlers);
    }
    if (state.searchError !== previous.searchError) renderSearchError(errorBox, state);
    if (state.modal !== previous.modal) renderModal(modalRoot, state.modal, modalHandlers);
    if (state.submissions !== previous.submissions) {
      renderSubmissions(submissionsPanel, state.submissions);
    }
    if (state.toast !== previous.toast) renderToast(toastRoot, state.toast);
    if (state.catalog !== previous.catalog && state.catalog !== null) {
      renderSpacesControl(state.catalog);
      const c = state.catalog;
      statusLine.textContent =
        `${c.frame_count} frames in ${c.videos.length} videos — ` +
        `${c.clip_count} clips, ${c.dedup_removed} near-duplicates removed`;
    }
  });

  queryInput.addEventListener("input", () => {
    store.dispatch({ kind: "set-query", text: queryInput.value });
  });
  fusionSelect.addEventListener("change", () => {
    store.dispatch({
      kind: "set-fusion",
      fusion: fusionSelect.value === "unique" ? "unique" : "sum",
    });
  });
  tInput.addEventListener("change", () => {
    const t = Number.parseInt(tInput.value, 10);
    if (Number.isFinite(t) && t >= 1) store.dispatch({ kind: "set-t", t });
  });
  classesToggle.addEventListener("change", () => {
    store.dispatch({ kind: "set-classes-from-text", enabled: classesToggle.checked });
    matchModeSelect.disabled = !classesToggle.checked;
  });
  matchModeSelect.addEventListener("change", () => {
    store.dispatch({
      kind: "set-match-mode",
      matchMode: matchModeSelect.value === "any" ? "any" : "all",
    });
  });

  // Enter inside the query field and the Search button both submit the form.
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void controller.runSearch();
  });

  document.addEventListener("keydown", (event) => controller.handleKeydown(event));

  window.addEventListener(
    "scroll",
    () => {
      const nearBottom =
        window.innerHeight + window.scrollY >= document.body.scrollHeight - 600;
      if (!nearBottom) return;
      const state = store.get();
      if (state.visibleTiles < totalTiles(state)) {
        store.dispatch({ kind: "show-more-tiles", count: TILE_PAGE });
      }
    },
    { passive: true },
  );

  renderResults(results, store.get(), resultHandlers);
  renderSubmissions(submissionsPanel, store.get().submissions);
  matchModeSelect.disabled = true;
  void controller.loadInitial();
}

boot();
