/**
 * Wire types for the framesift HTTP API, plus the console's session state.
 *
 * The API shapes mirror the service's JSON responses field for field; the
 * console treats them as read-only and never reorders or filters what the
 * server returned.
 */

// --- search ---

export interface SearchHit {
  frame_id: number;
  rank: number;
  score: number;
  frame_index: number;
  timestamp_ms: number;
  image_path: string;
  spaces: string[];
  clip_inherited: boolean;
}

export interface VideoGroup {
  video_id: string;
  color_index: number;
  hits: SearchHit[];
}

export interface ObjectFilterInfo {
  source: "explicit" | "text";
  match_mode: string;
  class_ids: number[];
  class_names: string[] | null;
}

export interface SearchTimings {
  embed: number;
  filter: number;
  scan: number;
  fuse: number;
  group: number;
  total: number;
}

export interface SearchResponse {
  query_text: string | null;
  spaces: string[];
  fusion: string;
  normalization: string;
  t: number;
  match_mode: string;
  include_deduped: boolean;
  object_filter: ObjectFilterInfo | null;
  total_candidates: number;
  total_hits: number;
  groups: VideoGroup[];
  timings_ms?: SearchTimings;
}

/** Body for POST /api/search; unset fields fall back to server defaults. */
export interface SearchRequestBody {
  query_text?: string;
  spaces?: string[];
  query_vectors?: Record<string, number[]>;
  fusion?: "sum" | "unique";
  normalization?: "none" | "minmax";
  t?: number;
  object_classes?: number[];
  classes_from_text?: boolean;
  match_mode?: "all" | "any";
  include_deduped?: boolean;
  include_timings?: boolean;
}

// --- neighbors ---

export interface NeighborFrame {
  frame_id: number;
  frame_index: number;
  timestamp_ms: number;
  image_path: string;
  is_anchor: boolean;
}

export interface NeighborsResponse {
  anchor_frame_id: number;
  radius: number;
  video_id: string;
  video_path: string | null;
  timestamp_ms: number;
  frames: NeighborFrame[];
}

// --- submissions ---

export interface Submission {
  submission_id: number;
  frame_id: number;
  video_id: string;
  timestamp_ms: number;
  created_at: string;
  query_text: string;
}

// --- catalog ---

export interface VideoSummary {
  video_id: string;
  frame_count: number;
  clip_count: number;
  first_frame_id: number;
  video_path: string | null;
  color_index: number;
  has_transcript: boolean;
}

export interface CatalogSummary {
  videos: VideoSummary[];
  frame_count: number;
  clip_count: number;
  dedup_removed: number;
  num_classes: number;
  palette_size: number;
  spaces: string[];
}

// --- session state ---

/** Everything a modal needs; `neighbors` is null until the fetch lands. */
export interface ModalState {
  frameId: number;
  videoId: string;
  timestampMs: number;
  neighbors: NeighborsResponse | null;
  error: string | null;
}

/**
 * The single source of truth for the console. Renderers are pure functions
 * of this object; every change goes through a typed {@link Action}.
 */
export interface SessionState {
  queryText: string;
  selectedSpaces: string[];
  fusion: "sum" | "unique";
  t: number;
  classesFromText: boolean;
  matchMode: "all" | "any";
  /** Monotonic id of the most recent search; stale replies are dropped. */
  requestId: number;
  searching: boolean;
  response: SearchResponse | null;
  searchError: string | null;
  /** How many tiles (across all groups) are currently rendered. */
  visibleTiles: number;
  modal: ModalState | null;
  submissions: Submission[];
  toast: string | null;
  catalog: CatalogSummary | null;
}

export type Action =
  | { kind: "set-query"; text: string }
  | { kind: "set-spaces"; spaces: string[] }
  | { kind: "set-fusion"; fusion: "sum" | "unique" }
  | { kind: "set-t"; t: number }
  | { kind: "set-classes-from-text"; enabled: boolean }
  | { kind: "set-match-mode"; matchMode: "all" | "any" }
  | { kind: "search-started"; requestId: number }
  | { kind: "search-succeeded"; requestId: number; response: SearchResponse }
  | { kind: "search-failed"; requestId: number; message: string }
  | { kind: "show-more-tiles"; count: number }
  | { kind: "modal-opened"; frameId: number; videoId: string; timestampMs: number }
  | { kind: "neighbors-loaded"; frameId: number; neighbors: NeighborsResponse }
  | { kind: "neighbors-failed"; frameId: number; message: string }
  | { kind: "modal-closed" }
  | { kind: "submissions-loaded"; submissions: Submission[] }
  | { kind: "submission-created"; submission: Submission }
  | { kind: "catalog-loaded"; catalog: CatalogSummary }
  | { kind: "toast-shown"; message: string }
  | { kind: "toast-cleared" };
