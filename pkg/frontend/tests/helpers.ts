/** Shared fixtures and stubs for the console test suites. */

import type {
  CatalogSummary,
  NeighborFrame,
  NeighborsResponse,
  SearchHit,
  SearchResponse,
  Submission,
  VideoGroup,
} from "../src/types.js";

export function makeHit(over: Partial<SearchHit> = {}): SearchHit {
  return {
    frame_id: 1,
    rank: 1,
    score: 0.9,
    frame_index: 10,
    timestamp_ms: 4250,
    image_path: "frames/v/000010.jpg",
    spaces: ["visual"],
    clip_inherited: false,
    ...over,
  };
}

export function makeGroup(
  videoId: string,
  colorIndex: number,
  hits: SearchHit[],
): VideoGroup {
  return { video_id: videoId, color_index: colorIndex, hits };
}

export function makeResponse(
  groups: VideoGroup[],
  over: Partial<SearchResponse> = {},
): SearchResponse {
  const totalHits = groups.reduce((n, g) => n + g.hits.length, 0);
  return {
    query_text: "red car",
    spaces: ["visual"],
    fusion: "sum",
    normalization: "none",
    t: 100,
    match_mode: "all",
    include_deduped: false,
    object_filter: null,
    total_candidates: 500,
    total_hits: totalHits,
    groups,
    ...over,
  };
}

/**
 * Consecutive neighbor frames around `anchorId`, `before` on the left and
 * `after` on the right, mirroring what the service returns for a radius.
 */
export function neighborRun(
  anchorId: number,
  before: number,
  after: number,
): NeighborFrame[] {
  const frames: NeighborFrame[] = [];
  for (let id = anchorId - before; id <= anchorId + after; id += 1) {
    frames.push({
      frame_id: id,
      frame_index: id,
      timestamp_ms: id * 500,
      image_path: `frames/v/${String(id).padStart(6, "0")}.jpg`,
      is_anchor: id === anchorId,
    });
  }
  return frames;
}

export function makeNeighbors(
  anchorId: number,
  frames: NeighborFrame[],
  over: Partial<NeighborsResponse> = {},
): NeighborsResponse {
  return {
    anchor_frame_id: anchorId,
    radius: 4,
    video_id: "beach",
    video_path: "videos/beach.mp4",
    timestamp_ms: 4250,
    frames,
    ...over,
  };
}

export function makeSubmission(
  submissionId: number,
  frameId: number,
  over: Partial<Submission> = {},
): Submission {
  return {
    submission_id: submissionId,
    frame_id: frameId,
    video_id: "beach",
    timestamp_ms: frameId * 500,
    created_at: "2026-08-16T12:00:00Z",
    query_text: "red car",
    ...over,
  };
}

export function makeCatalog(over: Partial<CatalogSummary> = {}): CatalogSummary {
  return {
    videos: [
      {
        video_id: "beach",
        frame_count: 21,
        clip_count: 3,
        first_frame_id: 0,
        video_path: "videos/beach.mp4",
        color_index: 0,
        has_transcript: true,
      },
      {
        video_id: "city",
        frame_count: 14,
        clip_count: 2,
        first_frame_id: 21,
        video_path: null,
        color_index: 1,
        has_transcript: false,
      },
    ],
    frame_count: 35,
    clip_count: 5,
    dedup_removed: 1,
    num_classes: 7,
    palette_size: 12,
    spaces: ["visual", "textual"],
    ...over,
  };
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

export interface Deferred<T> {
  promise: Promise<T>;
  resolve: (value: T) => void;
  reject: (reason?: unknown) => void;
}

export function deferred<T>(): Deferred<T> {
  let resolve!: (value: T) => void;
  let reject!: (reason?: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

/** Recursively freeze a value so reducer mutations throw under strict mode. */
export function deepFreeze<T>(value: T): T {
  if (value !== null && typeof value === "object") {
    for (const key of Object.getOwnPropertyNames(value)) {
      deepFreeze((value as Record<string, unknown>)[key]);
    }
    Object.freeze(value);
  }
  return value;
}
