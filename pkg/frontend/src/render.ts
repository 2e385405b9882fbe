/**
 * DOM renderers. Each one rebuilds its container from the current state and
 * nothing else, so calling it twice with the same state yields the same DOM.
 *
 * Results are shown exactly as the server grouped and ordered them: the row
 * order is the group order in the response, the tile order inside a row is
 * the hit order inside that group, and no client-side filtering is applied.
 */

import { mediaUrl } from "./api.js";
import { colorFor } from "./palette.js";
import type { SearchHit, SessionState, Submission } from "./types.js";

export interface ResultHandlers {
  onTileClick: (hit: SearchHit, videoId: string) => void;
}

/** 83250 -> "1:23.250" */
export function formatTimestamp(ms: number): string {
  const total = Math.max(0, Math.round(ms));
  const minutes = Math.floor(total / 60000);
  const seconds = Math.floor((total % 60000) / 1000);
  const millis = total % 1000;
  return `${minutes}:${String(seconds).padStart(2, "0")}.${String(millis).padStart(3, "0")}`;
}

function placeholder(text: string): HTMLParagraphElement {
  const p = document.createElement("p");
  p.className = "placeholder";
  p.textContent = text;
  return p;
}

function buildTile(
  hit: SearchHit,
  videoId: string,
  handlers: ResultHandlers,
): HTMLButtonElement {
  const tile = document.createElement("button");
  tile.type = "button";
  tile.className = "tile";
  tile.dataset["frameId"] = String(hit.frame_id);
  tile.title = `frame ${hit.frame_index} @ ${formatTimestamp(hit.timestamp_ms)}`;

  const img = document.createElement("img");
  img.className = "tile-thumb";
  img.setAttribute("loading", "lazy");
  img.setAttribute("decoding", "async");
  img.alt = `${videoId} frame ${hit.frame_index}`;
  if (hit.image_path) img.src = mediaUrl(hit.image_path);
  tile.appendChild(img);

  const caption = document.createElement("span");
  caption.className = "tile-caption";

  const rank = document.createElement("span");
  rank.className = "tile-rank";
  rank.textContent = `#${hit.rank}`;
  caption.appendChild(rank);

  const score = document.createElement("span");
  score.className = "tile-score";
  score.textContent = hit.score.toFixed(3);
  caption.appendChild(score);

  if (hit.clip_inherited) {
    const badge = document.createElement("span");
    badge.className = "tile-badge";
    badge.textContent = "clip";
    caption.appendChild(badge);
  }

  tile.appendChild(caption);
  tile.addEventListener("click", () => handlers.onTileClick(hit, videoId));
  return tile;
}

export function renderResults(
  container: HTMLElement,
  state: SessionState,
  handlers: ResultHandlers,
): void {
  container.textContent = "";
  const { response } = state;

  if (response === null) {
    container.appendChild(
      placeholder(state.searching ? "Searching…" : "Run a search to see results."),
    );
    return;
  }
  if (response.groups.length === 0 || response.total_hits === 0) {
    container.appendChild(placeholder("No results."));
    return;
  }

  const meta = document.createElement("p");
  meta.className = "results-meta";
  let metaText =
    `${response.total_hits} hits in ${response.groups.length} videos ` +
    `(${response.total_candidates} candidates)`;
  if (response.object_filter !== null) {
    const names = response.object_filter.class_names;
    const shown = names ?? response.object_filter.class_ids.map(String);
    metaText += ` — classes ${response.object_filter.match_mode}: ${shown.join(", ")}`;
  }
  if (response.timings_ms !== undefined) {
    metaText += ` — ${response.timings_ms.total.toFixed(1)} ms`;
  }
  meta.textContent = metaText;
  container.appendChild(meta);

  let budget = state.visibleTiles;
  for (const group of response.groups) {
    if (budget <= 0) break;
    const row = document.createElement("section");
    row.className = "video-group";
    row.dataset["videoId"] = group.video_id;
    row.style.borderLeftColor = colorFor(group.color_index);

    const header = document.createElement("h3");
    header.className = "video-group-title";
    header.textContent = `${group.video_id} (${group.hits.length})`;
    row.appendChild(header);

    const strip = document.createElement("div");
    strip.className = "tile-strip";
    for (const hit of group.hits) {
      if (budget <= 0) break;
      strip.appendChild(buildTile(hit, group.video_id, handlers));
      budget -= 1;
    }
    row.appendChild(strip);
    container.appendChild(row);
  }

  const totalTiles = response.groups.reduce((n, g) => n + g.hits.length, 0);
  if (state.visibleTiles < totalTiles) {
    const more = document.createElement("p");
    more.className = "results-more";
    more.textContent = `Showing ${state.visibleTiles} of ${totalTiles} tiles — scroll for more.`;
    container.appendChild(more);
  }
}

export function renderSearchError(container: HTMLElement, state: SessionState): void {
  container.textContent = "";
  if (state.searchError !== null) {
    const p = document.createElement("p");
    p.className = "search-error";
    p.textContent = state.searchError;
    container.appendChild(p);
  }
}

export function renderSubmissions(panel: HTMLElement, submissions: Submission[]): void {
  panel.textContent = "";

  const header = document.createElement("h2");
  header.className = "submissions-title";
  header.textContent = `Submissions (${submissions.length})`;
  panel.appendChild(header);

  if (submissions.length === 0) {
    panel.appendChild(placeholder("Nothing submitted yet."));
    return;
  }

  const list = document.createElement("ul");
  list.className = "submissions-list";
  for (const sub of submissions) {
    const item = document.createElement("li");
    item.className = "submission";
    item.dataset["submissionId"] = String(sub.submission_id);

    const where = document.createElement("span");
    where.className = "submission-where";
    where.textContent = `${sub.video_id} @ ${formatTimestamp(sub.timestamp_ms)}`;
    item.appendChild(where);

    const what = document.createElement("span");
    what.className = "submission-query";
    what.textContent = sub.query_text === "" ? `frame ${sub.frame_id}` : sub.query_text;
    item.appendChild(what);

    list.appendChild(item);
  }
  panel.appendChild(list);
}

export function renderToast(root: HTMLElement, toast: string | null): void {
  root.textContent = "";
  if (toast !== null) {
    const div = document.createElement("div");
    div.className = "toast";
    div.setAttribute("role", "status");
    div.textContent = toast;
    root.appendChild(div);
  }
}
