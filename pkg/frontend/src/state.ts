/**
 * Session state container: a pure reducer plus a minimal subscribe/dispatch
 * store. Renderers read state and never write it; event handlers dispatch
 * typed actions and never touch the DOM the renderers own.
 */

import type { Action, SessionState } from "./types.js";

/** Tiles rendered per page; scrolling near the bottom adds another page. */
export const TILE_PAGE = 100;

export function initialState(): SessionState {
  return {
    queryText: "",
    selectedSpaces: [],
    fusion: "sum",
    t: 100,
    classesFromText: false,
    matchMode: "all",
    requestId: 0,
    searching: false,
    response: null,
    searchError: null,
    visibleTiles: TILE_PAGE,
    modal: null,
    submissions: [],
    toast: null,
    catalog: null,
  };
}

/**
 * Pure transition function. Returns the input object unchanged (same
 * reference) when the action is a no-op, e.g. a reply from a superseded
 * search: only the latest `requestId` may publish results.
 */
export function reduce(state: SessionState, action: Action): SessionState {
  switch (action.kind) {
    case "set-query":
      return { ...state, queryText: action.text };
    case "set-spaces":
      return { ...state, selectedSpaces: [...action.spaces] };
    case "set-fusion":
      return { ...state, fusion: action.fusion };
    case "set-t":
      return { ...state, t: action.t };
    case "set-classes-from-text":
      return { ...state, classesFromText: action.enabled };
    case "set-match-mode":
      return { ...state, matchMode: action.matchMode };

    case "search-started":
      return {
        ...state,
        requestId: action.requestId,
        searching: true,
        searchError: null,
        visibleTiles: TILE_PAGE,
      };
    case "search-succeeded":
      if (action.requestId !== state.requestId) return state;
      return { ...state, searching: false, response: action.response, searchError: null };
    case "search-failed":
      if (action.requestId !== state.requestId) return state;
      return { ...state, searching: false, searchError: action.message };

    case "show-more-tiles":
      return { ...state, visibleTiles: state.visibleTiles + action.count };

    case "modal-opened":
      return {
        ...state,
        modal: {
          frameId: action.frameId,
          videoId: action.videoId,
          timestampMs: action.timestampMs,
          neighbors: null,
          error: null,
        },
      };
    case "neighbors-loaded":
      if (state.modal === null || state.modal.frameId !== action.frameId) return state;
      return { ...state, modal: { ...state.modal, neighbors: action.neighbors, error: null } };
    case "neighbors-failed":
      if (state.modal === null || state.modal.frameId !== action.frameId) return state;
      return { ...state, modal: { ...state.modal, error: action.message } };
    case "modal-closed":
      if (state.modal === null) return state;
      return { ...state, modal: null };

    case "submissions-loaded":
      return { ...state, submissions: [...action.submissions] };
    case "submission-created":
      return { ...state, submissions: [...state.submissions, action.submission] };

    case "catalog-loaded":
      return { ...state, catalog: action.catalog };

    case "toast-shown":
      return { ...state, toast: action.message };
    case "toast-cleared":
      if (state.toast === null) return state;
      return { ...state, toast: null };
  }
}

export type Listener = (state: SessionState, previous: SessionState) => void;

/** Holds the current state and notifies listeners after each real change. */
export class Store {
  private state: SessionState;
  private readonly listeners: Listener[] = [];

  constructor(initial: SessionState = initialState()) {
    this.state = initial;
  }

  get(): SessionState {
    return this.state;
  }

  dispatch(action: Action): void {
    const previous = this.state;
    const next = reduce(previous, action);
    if (next === previous) return;
    this.state = next;
    for (const listener of [...this.listeners]) listener(next, previous);
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      const i = this.listeners.indexOf(listener);
      if (i >= 0) this.listeners.splice(i, 1);
    };
  }
}
