"""The search engine behind both the CLI and the HTTP service.

Loads a catalog directory (catalog, embeddings, optional indexes, object
vectors, transcripts, submissions) and answers queries end to end: embed,
filter, score per space, fuse, group by video.  Both front ends call the same
code paths, so a CLI search and an API search rank identically.

Error contract: ValueError marks a bad request (HTTP 400), NotFoundError an
unknown frame/video id (404), EmbedderError an upstream embedding failure
(502).
"""

from __future__ import annotations

import time
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .catalog import (
    GRANULARITY_FRAME,
    Catalog,
    neighbors as catalog_neighbors,
)
from .config import ServiceConfig
from .embedder import EmbedderPool, HttpTextTransform
from .errors import FormatError, NotFoundError
from .fusion import (
    FUSE_SUM,
    FUSE_UNIQUE,
    NORM_MINMAX,
    NORM_NONE,
    FusedHit,
    ScoreVector,
    expand_clip_scores,
    frame_to_clip_map,
    fuse_sum,
    fuse_unique,
)
from .objects import (
    MATCH_ALL,
    MATCH_ANY,
    ClassVocabulary,
    ObjectStore,
    QueryClassVector,
    classes_from_text,
)
from .store import (
    INDEXES_DIR,
    OBJECTS_JSONL,
    SUBMISSIONS_JSONL,
    TRANSCRIPTS_JSONL,
    VOCAB_TXT,
    EmbeddingMatrix,
    SubmissionLog,
    SubmissionRecord,
    TranscriptSegment,
    load_catalog,
    load_object_vectors,
    load_transcripts,
    read_emb,
    space_emb_path,
)
from .vindex import (
    KIND_FLAT,
    KIND_IVF,
    KIND_IVFPQ,
    IndexBundle,
    load_index,
    scan_flat,
    scan_ivf,
    scan_ivfpq,
)


def load_index_bundles(catalog_dir: str | Path, catalog: Catalog) -> dict[str, IndexBundle]:
    """Load every indexes/*.vidx file and cross-check it against the catalog."""
    index_dir = Path(catalog_dir) / INDEXES_DIR
    bundles: dict[str, IndexBundle] = {}
    if not index_dir.is_dir():
        return bundles
    for path in sorted(index_dir.glob("*.vidx")):
        bundle = load_index(path)
        sid = bundle.space_id
        try:
            space = catalog.space(sid)
        except NotFoundError:
            raise FormatError(f"{path}: index is for unknown space {sid!r}") from None
        expected = (catalog.expected_rows(space), space.dim)
        if (bundle.count, bundle.dim) != expected:
            raise FormatError(
                f"{path}: index covers {bundle.count} rows of dim {bundle.dim}, "
                f"catalog expects {expected[0]} rows of dim {expected[1]}"
            )
        if sid in bundles:
            raise FormatError(f"{path}: second index for space {sid!r}")
        bundles[sid] = bundle
    return bundles


@dataclass
class SearchRequest:
    """One search, as the engine sees it (the service maps its JSON onto this)."""

    spaces: list[str] | None = None  # None: query every catalog space
    query_text: str | None = None
    query_vectors: dict[str, list[float]] | None = None
    fusion: str = FUSE_SUM
    normalization: str = NORM_NONE
    t: int | None = None  # None: service default
    object_classes: list[int] | None = None
    classes_from_text: bool = False
    match_mode: str = MATCH_ALL
    include_deduped: bool = False
    include_timings: bool = True


def color_index(video_id: str, palette_size: int) -> int:
    """Stable per-video palette slot: same video, same color, across restarts."""
    return zlib.crc32(video_id.encode("utf-8")) % palette_size


class SearchEngine:
    def __init__(self, catalog_dir: str | Path, config: ServiceConfig | None = None):
        self.catalog_dir = Path(catalog_dir)
        self.config = config if config is not None else ServiceConfig()
        self.catalog: Catalog = load_catalog(self.catalog_dir)
        self.matrices: dict[str, EmbeddingMatrix] = {}
        for space in self.catalog.spaces:
            path = space_emb_path(self.catalog_dir, space.space_id)
            if not path.exists():
                raise FormatError(f"missing embeddings for space {space.space_id!r} at {path}")
            rows = read_emb(path)
            expected = (self.catalog.expected_rows(space), space.dim)
            if rows.shape != expected:
                raise FormatError(
                    f"space {space.space_id!r}: embeddings are {rows.shape}, catalog expects {expected}"
                )
            self.matrices[space.space_id] = EmbeddingMatrix(space_id=space.space_id, rows=rows)
        self.indexes: dict[str, IndexBundle] = load_index_bundles(self.catalog_dir, self.catalog)
        self.objects: ObjectStore | None = None
        objects_path = self.catalog_dir / OBJECTS_JSONL
        if objects_path.exists():
            self.objects = load_object_vectors(
                objects_path, self.catalog.num_classes, self.catalog.frame_count
            )
        self.vocab: ClassVocabulary | None = None
        vocab_path = self.catalog_dir / VOCAB_TXT
        if vocab_path.exists():
            self.vocab = ClassVocabulary.load(vocab_path)
        transcripts_path = self.catalog_dir / TRANSCRIPTS_JSONL
        self.transcripts: dict[str, list[TranscriptSegment]] = (
            load_transcripts(transcripts_path) if transcripts_path.exists() else {}
        )
        self.submissions = SubmissionLog(self.catalog_dir / SUBMISSIONS_JSONL)
        self.embedders = EmbedderPool(self.config)
        self.text_transform = (
            HttpTextTransform(self.config.text_transform) if self.config.text_transform else None
        )
        self._frame_to_clip = frame_to_clip_map(self.catalog)
        self._removed = np.fromiter(sorted(self.catalog.dedup_removed), dtype=np.int64)

    # --- query preparation ---

    def _resolve_spaces(self, req: SearchRequest) -> list[str]:
        if req.spaces is None:
            return [s.space_id for s in self.catalog.spaces]
        if not req.spaces:
            raise ValueError("spaces list is empty; omit it to query every space")
        known = {s.space_id for s in self.catalog.spaces}
        for sid in req.spaces:
            if sid not in known:
                raise ValueError(f"unknown space {sid!r}")
        if len(set(req.spaces)) != len(req.spaces):
            raise ValueError("spaces list repeats a space")
        return list(req.spaces)

    def _query_vector(self, sid: str, req: SearchRequest, text: str | None) -> np.ndarray:
        space = self.catalog.space(sid)
        supplied = (req.query_vectors or {}).get(sid)
        if supplied is not None:
            vec = np.asarray(supplied, dtype=np.float64).reshape(-1)
            if vec.shape[0] != space.dim:
                raise ValueError(
                    f"query vector for space {sid!r} has dim {vec.shape[0]}, expected {space.dim}"
                )
            if not np.all(np.isfinite(vec)):
                raise ValueError(f"query vector for space {sid!r} contains non-finite values")
            norm = float(np.linalg.norm(vec))
            return (vec / norm).astype(np.float32) if norm > 0 else vec.astype(np.float32)
        if text is None:
            raise ValueError(f"no query for space {sid!r}: pass query_text or a query_vectors entry")
        return self.embedders.embed(sid, text, space.dim)

    def _object_query(
        self, req: SearchRequest
    ) -> tuple[QueryClassVector | None, dict | None]:
        """Resolve the class filter; returns (query-or-None, response diagnostics)."""
        if req.match_mode not in (MATCH_ALL, MATCH_ANY):
            raise ValueError(f"unknown match_mode {req.match_mode!r}")
        if req.object_classes is not None and req.classes_from_text:
            raise ValueError("pass object_classes or classes_from_text, not both")
        if req.object_classes is not None:
            if not req.object_classes:
                raise ValueError("object_classes is empty; omit it to disable filtering")
            qcv = QueryClassVector(tuple(req.object_classes), match_mode=req.match_mode)
            info = {
                "source": "explicit",
                "match_mode": req.match_mode,
                "class_ids": list(qcv.class_ids),
                "class_names": [self.vocab.names[c] for c in qcv.class_ids]
                if self.vocab is not None and all(c < len(self.vocab) for c in qcv.class_ids)
                else None,
            }
            return qcv, info
        if req.classes_from_text:
            if req.query_text is None:
                raise ValueError("classes_from_text requires query_text")
            if self.vocab is None:
                raise ValueError("classes_from_text requires a class vocabulary in the catalog")
            qcv, report = classes_from_text(req.query_text, self.vocab)
            qcv = QueryClassVector(qcv.class_ids, match_mode=req.match_mode)
            info = {
                "source": "text",
                "match_mode": req.match_mode,
                "class_ids": list(qcv.class_ids),
                "class_names": [name for _cid, name in report.matched],
            }
            return (qcv if qcv else None), info
        return None, None

    def _candidate_frames(self, req: SearchRequest, qcv: QueryClassVector | None) -> np.ndarray:
        mask = np.ones(self.catalog.frame_count, dtype=bool)
        if not req.include_deduped and len(self._removed):
            mask[self._removed] = False
        if qcv is not None:
            if self.objects is None:
                raise ValueError("object filtering requested but the catalog has no object vectors")
            mask &= self.objects.filter_frames(qcv)
        return np.flatnonzero(mask)

    # --- scoring ---

    def _scan_space(
        self, sid: str, query: np.ndarray, domain: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """Scores over `domain` rows of the space's matrix; unscanned rows score 0."""
        matrix = self.matrices[sid]
        bundle = self.indexes.get(sid)
        if bundle is None or bundle.kind == KIND_FLAT:
            _, scores = scan_flat(matrix, query, domain)
            return domain, scores.astype(np.float64)
        if bundle.kind == KIND_IVF:
            rows, scores = scan_ivf(bundle.ivf, matrix, query, bundle.nprobe, domain)
        elif bundle.kind == KIND_IVFPQ:
            rows, scores = scan_ivfpq(
                bundle.ivf, bundle.pq, bundle.codes, query, bundle.nprobe, domain
            )
        else:  # pragma: no cover - load_index rejects unknown kinds
            raise FormatError(f"unknown index kind {bundle.kind!r}")
        full = np.zeros(len(domain), dtype=np.float64)
        full[np.searchsorted(domain, rows)] = scores
        return domain, full

    def _space_scores(self, sid: str, query: np.ndarray, cand_frames: np.ndarray) -> ScoreVector:
        space = self.catalog.space(sid)
        if space.granularity == GRANULARITY_FRAME:
            ids, scores = self._scan_space(sid, query, cand_frames)
            return ScoreVector(space_id=sid, ids=ids, scores=scores)
        cand_clips = np.unique(self._frame_to_clip[cand_frames]) if len(cand_frames) else (
            np.empty(0, dtype=np.int64)
        )
        clip_ids, clip_scores = self._scan_space(sid, query, cand_clips)
        sv = ScoreVector(space_id=sid, ids=clip_ids, scores=clip_scores, granularity="clip8")
        return expand_clip_scores(sv, cand_frames, self._frame_to_clip, self.catalog.clip_count)

    # --- the pipeline ---

    def search(self, req: SearchRequest) -> dict:
        t_start = time.perf_counter()
        spaces = self._resolve_spaces(req)
        t = self.config.default_t if req.t is None else req.t
        if t < 1:
            raise ValueError(f"t must be >= 1, got {t}")
        if req.fusion not in (FUSE_SUM, FUSE_UNIQUE):
            raise ValueError(f"unknown fusion rule {req.fusion!r}")
        if req.normalization not in (NORM_NONE, NORM_MINMAX):
            raise ValueError(f"unknown normalization {req.normalization!r}")
        if req.query_text is None and not req.query_vectors:
            raise ValueError("request needs query_text or query_vectors")

        t0 = time.perf_counter()
        text = req.query_text
        if text is not None and self.text_transform is not None:
            text = self.text_transform.transform(text)
        queries = {sid: self._query_vector(sid, req, text) for sid in spaces}
        t_embed = time.perf_counter() - t0

        t0 = time.perf_counter()
        qcv, filter_info = self._object_query(req)
        cand_frames = self._candidate_frames(req, qcv)
        t_filter = time.perf_counter() - t0

        t0 = time.perf_counter()
        vectors = [self._space_scores(sid, queries[sid], cand_frames) for sid in spaces]
        t_scan = time.perf_counter() - t0

        t0 = time.perf_counter()
        if req.fusion == FUSE_SUM:
            hits = fuse_sum(vectors, t, normalization=req.normalization)
        else:
            hits = fuse_unique(vectors, t)
        t_fuse = time.perf_counter() - t0

        t0 = time.perf_counter()
        groups = self._group_hits(hits, req.fusion)
        t_group = time.perf_counter() - t0

        response = {
            "query_text": req.query_text,
            "spaces": spaces,
            "fusion": req.fusion,
            "normalization": req.normalization,
            "t": t,
            "match_mode": req.match_mode,
            "include_deduped": req.include_deduped,
            "object_filter": filter_info,
            "total_candidates": int(len(cand_frames)),
            "total_hits": len(hits),
            "groups": groups,
        }
        if req.include_timings:
            response["timings_ms"] = {
                "embed": round(t_embed * 1000, 3),
                "filter": round(t_filter * 1000, 3),
                "scan": round(t_scan * 1000, 3),
                "fuse": round(t_fuse * 1000, 3),
                "group": round(t_group * 1000, 3),
                "total": round((time.perf_counter() - t_start) * 1000, 3),
            }
        return response

    def _group_hits(self, hits: list[FusedHit], fusion: str) -> list[dict]:
        groups: dict[str, dict] = {}
        for rank, hit in enumerate(hits, start=1):
            frame = self.catalog.frame(hit.id)
            entry = {
                "frame_id": frame.frame_id,
                "rank": rank,
                "score": float(hit.score),
                "frame_index": frame.frame_index,
                "timestamp_ms": frame.timestamp_ms,
                "image_path": frame.image_path,
                "spaces": list(hit.contributing),
                "clip_inherited": hit.clip_inherited,
            }
            if fusion == FUSE_UNIQUE:
                entry["model_ranks"] = {sid: r for sid, r in hit.model_ranks}
            group = groups.get(frame.video_id)
            if group is None:
                group = {
                    "video_id": frame.video_id,
                    "color_index": color_index(frame.video_id, self.config.palette_size),
                    "hits": [],
                }
                groups[frame.video_id] = group
            group["hits"].append(entry)
        return list(groups.values())

    # --- the other endpoints ---

    def neighbors(self, frame_id: int, radius: int | None = None) -> dict:
        radius = self.config.neighbor_radius if radius is None else radius
        if radius < 0:
            raise ValueError(f"radius must be >= 0, got {radius}")
        window, anchor_pos = catalog_neighbors(self.catalog, frame_id, radius)
        anchor = window[anchor_pos]
        video = self.catalog.video(anchor.video_id)
        return {
            "anchor_frame_id": frame_id,
            "radius": radius,
            "video_id": video.video_id,
            "video_path": video.video_path,
            "timestamp_ms": anchor.timestamp_ms,
            "frames": [
                {
                    "frame_id": f.frame_id,
                    "frame_index": f.frame_index,
                    "timestamp_ms": f.timestamp_ms,
                    "image_path": f.image_path,
                    "is_anchor": i == anchor_pos,
                }
                for i, f in enumerate(window)
            ],
        }

    def submit(self, frame_id: int, query_text: str = "") -> SubmissionRecord:
        frame = self.catalog.frame(frame_id)
        return self.submissions.append(
            frame_id=frame.frame_id,
            video_id=frame.video_id,
            timestamp_ms=frame.timestamp_ms,
            query_text=query_text,
        )

    def transcript(self, video_id: str) -> list[TranscriptSegment]:
        self.catalog.video(video_id)  # 404 on unknown id
        return self.transcripts.get(video_id, [])

    def spaces_summary(self) -> list[dict]:
        out = []
        for space in self.catalog.spaces:
            bundle = self.indexes.get(space.space_id)
            out.append(
                {
                    "space_id": space.space_id,
                    "dim": space.dim,
                    "granularity": space.granularity,
                    "metric": space.metric,
                    "rows": self.matrices[space.space_id].count,
                    "index_kind": bundle.kind if bundle else KIND_FLAT,
                    "nprobe": bundle.nprobe if bundle and bundle.kind != KIND_FLAT else None,
                }
            )
        return out

    def catalog_summary(self) -> dict:
        return {
            "videos": [
                {
                    "video_id": v.video_id,
                    "frame_count": v.frame_count,
                    "clip_count": v.clip_count,
                    "first_frame_id": v.first_frame_id,
                    "video_path": v.video_path,
                    "color_index": color_index(v.video_id, self.config.palette_size),
                    "has_transcript": v.video_id in self.transcripts,
                }
                for v in self.catalog.videos
            ],
            "frame_count": self.catalog.frame_count,
            "clip_count": self.catalog.clip_count,
            "dedup_removed": len(self.catalog.dedup_removed),
            "num_classes": self.catalog.num_classes,
            "palette_size": self.config.palette_size,
            "spaces": self.spaces_summary(),
        }

    def health(self) -> dict:
        return {
            "status": "ok",
            "frames": self.catalog.frame_count,
            "videos": len(self.catalog.videos),
            "clips": self.catalog.clip_count,
            "spaces": len(self.catalog.spaces),
            "dedup_removed": len(self.catalog.dedup_removed),
            "submissions": len(self.submissions.list()),
        }
