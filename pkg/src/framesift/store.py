"""On-disk formats: binary embeddings, JSONL metadata, submissions, catalog dirs.

Every format round-trips losslessly; the embedding file is bit-exact.  Row
normalization is an explicit ingest step, never an I/O side effect.
"""

from __future__ import annotations

import json
import os
import struct
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable

import numpy as np

from .catalog import (
    Catalog,
    FrameMeta,
    FrameRecord,
    ModelSpace,
    build_catalog,
)
from .errors import FormatError, IngestError, NotFoundError
from .objects import DEFAULT_NUM_CLASSES, ClassVocabulary, ObjectStore

EMB_MAGIC = b"VEMB"
EMB_VERSION = 1
EMB_DTYPE_FLOAT32 = 0
_EMB_HEADER = struct.Struct("<4sIIQI")  # magic, version, dtype, count, dim


@dataclass
class EmbeddingMatrix:
    """Dense row store of one model space's vectors.

    row_ids maps row position to frame_id (frame granularity) or clip_id
    (clip granularity); None means the identity mapping.
    """

    space_id: str
    rows: np.ndarray
    row_ids: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.rows = np.ascontiguousarray(self.rows, dtype=np.float32)
        if self.rows.ndim != 2:
            raise ValueError(f"space {self.space_id!r}: rows must be 2-D")
        self._index: dict[int, int] | None = None

    @property
    def count(self) -> int:
        return self.rows.shape[0]

    @property
    def dim(self) -> int:
        return self.rows.shape[1]

    def ids(self) -> np.ndarray:
        if self.row_ids is None:
            return np.arange(self.count, dtype=np.int64)
        return self.row_ids

    def row_index(self, entity_id: int) -> int:
        if self.row_ids is None:
            if 0 <= entity_id < self.count:
                return int(entity_id)
            raise NotFoundError(f"space {self.space_id!r}: no embedding row for id {entity_id}")
        if self._index is None:
            self._index = {int(v): i for i, v in enumerate(self.row_ids)}
        try:
            return self._index[int(entity_id)]
        except KeyError:
            raise NotFoundError(
                f"space {self.space_id!r}: no embedding row for id {entity_id}"
            ) from None

    def row_for(self, entity_id: int) -> np.ndarray:
        return self.rows[self.row_index(entity_id)]


def write_emb(path: str | Path, rows: np.ndarray) -> None:
    """Write a float32 row-major embedding file (little-endian, 24-byte header)."""
    rows = np.ascontiguousarray(rows, dtype="<f4")
    if rows.ndim != 2:
        raise ValueError("embedding matrix must be 2-D")
    count, dim = rows.shape
    with open(path, "wb") as fh:
        fh.write(_EMB_HEADER.pack(EMB_MAGIC, EMB_VERSION, EMB_DTYPE_FLOAT32, count, dim))
        fh.write(rows.tobytes())


def read_emb(path: str | Path) -> np.ndarray:
    """Read an embedding file; rejects bad headers and size mismatches."""
    data = Path(path).read_bytes()
    if len(data) < _EMB_HEADER.size:
        raise FormatError(f"{path}: truncated header, file ends at byte {len(data)} of {_EMB_HEADER.size}")
    magic, version, dtype, count, dim = _EMB_HEADER.unpack_from(data, 0)
    if magic != EMB_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r} at byte 0")
    if version != EMB_VERSION:
        raise FormatError(f"{path}: unsupported version {version} at byte 4")
    if dtype != EMB_DTYPE_FLOAT32:
        raise FormatError(f"{path}: unsupported dtype code {dtype} at byte 8")
    expected = _EMB_HEADER.size + count * dim * 4
    if len(data) != expected:
        raise FormatError(
            f"{path}: payload size mismatch, file ends at byte {len(data)} expected {expected}"
        )
    flat = np.frombuffer(data, dtype="<f4", offset=_EMB_HEADER.size)
    return flat.reshape(count, dim).copy()


def normalize_rows(rows: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Scale each nonzero row to unit L2 norm; zero rows pass through unchanged.

    Returns (normalized float32 matrix, indices of zero rows).
    """
    rows64 = np.asarray(rows, dtype=np.float64)
    norms = np.linalg.norm(rows64, axis=1)
    zero_rows = np.flatnonzero(norms == 0.0)
    safe = np.where(norms == 0.0, 1.0, norms)
    out = (rows64 / safe[:, None]).astype(np.float32)
    return out, zero_rows.tolist()


# --- JSONL frame metadata ---


def _read_jsonl(path: str | Path, what: str) -> Iterable[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{what} line {lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise FormatError(f"{what} line {lineno}: expected a JSON object")
            yield lineno, obj


def _dump_line(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":")) + "\n"


def read_frame_meta(path: str | Path) -> list[FrameMeta]:
    """Parse a frames JSONL file (frame_id optional on input)."""
    metas: list[FrameMeta] = []
    for lineno, obj in _read_jsonl(path, "frames"):
        try:
            meta = FrameMeta(
                video_id=str(obj["video_id"]),
                frame_index=int(obj["frame_index"]),
                timestamp_ms=int(obj["timestamp_ms"]),
                image_path=str(obj["image_path"]),
                frame_id=int(obj["frame_id"]) if "frame_id" in obj else None,
            )
        except KeyError as exc:
            raise IngestError(f"frames line {lineno}: missing key {exc.args[0]!r}") from None
        except (TypeError, ValueError):
            raise IngestError(f"frames line {lineno}: malformed field types") from None
        metas.append(meta)
    return metas


def write_frame_meta(path: str | Path, frames: Iterable[FrameRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for f in frames:
            fh.write(
                _dump_line(
                    {
                        "frame_id": f.frame_id,
                        "video_id": f.video_id,
                        "frame_index": f.frame_index,
                        "timestamp_ms": f.timestamp_ms,
                        "image_path": f.image_path,
                    }
                )
            )


# --- object vectors ---


def load_object_vectors(
    path: str | Path, num_classes: int, frame_count: int
) -> ObjectStore:
    """Load per-frame class-id lists into a bitset store.

    Frames absent from the file keep the empty set.  Rejects out-of-range,
    unsorted, or duplicate class indices, naming the offending line.
    """
    store = ObjectStore(frame_count, num_classes)
    seen: set[int] = set()
    for lineno, obj in _read_jsonl(path, "objects"):
        try:
            frame_id = int(obj["frame_id"])
            classes = list(obj["classes"])
        except (KeyError, TypeError):
            raise IngestError(f"objects line {lineno}: need frame_id and classes") from None
        if frame_id in seen:
            raise IngestError(f"objects line {lineno}: duplicate frame_id {frame_id}")
        seen.add(frame_id)
        if not 0 <= frame_id < frame_count:
            raise IngestError(f"objects line {lineno}: frame_id {frame_id} not in catalog")
        prev = -1
        for c in classes:
            if not isinstance(c, int):
                raise IngestError(f"objects line {lineno}: non-integer class index {c!r}")
            if c <= prev:
                raise IngestError(f"objects line {lineno}: class indices not strictly ascending")
            if not 0 <= c < num_classes:
                raise IngestError(
                    f"objects line {lineno}: class index {c} out of range 0..{num_classes - 1}"
                )
            prev = c
        store.set_classes(frame_id, classes)
    return store


def write_object_vectors(path: str | Path, store: ObjectStore) -> None:
    """Write the canonical form: ascending frame_id, ascending class indices."""
    with open(path, "w", encoding="utf-8") as fh:
        for frame_id in store.nonempty_frame_ids():
            fh.write(_dump_line({"frame_id": frame_id, "classes": store.classes_of(frame_id)}))


# --- transcripts ---


@dataclass(frozen=True)
class TranscriptSegment:
    video_id: str
    start_ms: int
    end_ms: int
    text: str


def load_transcripts(path: str | Path) -> dict[str, list[TranscriptSegment]]:
    """Per-video transcript segments, sorted by start time."""
    by_video: dict[str, list[TranscriptSegment]] = {}
    for lineno, obj in _read_jsonl(path, "transcripts"):
        try:
            seg = TranscriptSegment(
                video_id=str(obj["video_id"]),
                start_ms=int(obj["start_ms"]),
                end_ms=int(obj["end_ms"]),
                text=str(obj["text"]),
            )
        except (KeyError, TypeError, ValueError):
            raise IngestError(f"transcripts line {lineno}: malformed segment") from None
        if seg.start_ms >= seg.end_ms:
            raise IngestError(f"transcripts line {lineno}: start_ms must be < end_ms")
        if not seg.text:
            raise IngestError(f"transcripts line {lineno}: empty text")
        by_video.setdefault(seg.video_id, []).append(seg)
    for segs in by_video.values():
        segs.sort(key=lambda s: (s.start_ms, s.end_ms))
    return by_video


def write_transcripts(path: str | Path, by_video: dict[str, list[TranscriptSegment]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for video_id in sorted(by_video):
            for s in by_video[video_id]:
                fh.write(
                    _dump_line(
                        {
                            "video_id": s.video_id,
                            "start_ms": s.start_ms,
                            "end_ms": s.end_ms,
                            "text": s.text,
                        }
                    )
                )


# --- submissions ---


@dataclass(frozen=True)
class SubmissionRecord:
    submission_id: int
    frame_id: int
    video_id: str
    timestamp_ms: int
    created_at: str
    query_text: str

    def to_dict(self) -> dict:
        return {
            "submission_id": self.submission_id,
            "frame_id": self.frame_id,
            "video_id": self.video_id,
            "timestamp_ms": self.timestamp_ms,
            "created_at": self.created_at,
            "query_text": self.query_text,
        }


class SubmissionLog:
    """Append-only durable log of chosen frames; ids are monotonic."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._records: list[SubmissionRecord] = []
        if self.path.exists():
            for lineno, obj in _read_jsonl(self.path, "submissions"):
                try:
                    rec = SubmissionRecord(
                        submission_id=int(obj["submission_id"]),
                        frame_id=int(obj["frame_id"]),
                        video_id=str(obj["video_id"]),
                        timestamp_ms=int(obj["timestamp_ms"]),
                        created_at=str(obj["created_at"]),
                        query_text=str(obj["query_text"]),
                    )
                except (KeyError, TypeError, ValueError):
                    raise FormatError(f"submissions line {lineno}: malformed record") from None
                if self._records and rec.submission_id <= self._records[-1].submission_id:
                    raise FormatError(f"submissions line {lineno}: ids not increasing")
                self._records.append(rec)

    def append(self, frame_id: int, video_id: str, timestamp_ms: int, query_text: str) -> SubmissionRecord:
        with self._lock:
            next_id = self._records[-1].submission_id + 1 if self._records else 0
            rec = SubmissionRecord(
                submission_id=next_id,
                frame_id=frame_id,
                video_id=video_id,
                timestamp_ms=timestamp_ms,
                created_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
                query_text=query_text,
            )
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(_dump_line(rec.to_dict()))
                fh.flush()
                os.fsync(fh.fileno())
            self._records.append(rec)
            return rec

    def list(self) -> list[SubmissionRecord]:
        with self._lock:
            return list(self._records)


# --- manifest and catalog directory ---


@dataclass(frozen=True)
class ManifestSpace:
    space: ModelSpace
    emb_path: Path


@dataclass
class Manifest:
    videos: list[tuple[str, str | None]]  # (video_id, optional video path), ingest order
    spaces: list[ManifestSpace]
    frames_path: Path
    objects_path: Path | None = None
    transcripts_path: Path | None = None
    vocab_path: Path | None = None
    num_classes: int = DEFAULT_NUM_CLASSES


def load_manifest(path: str | Path) -> Manifest:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise IngestError(f"manifest: invalid JSON ({exc.msg})") from None
    base = path.parent

    def resolve(p: str) -> Path:
        return base / p

    videos: list[tuple[str, str | None]] = []
    for entry in doc.get("videos", []):
        if isinstance(entry, str):
            videos.append((entry, None))
        elif isinstance(entry, dict) and "video_id" in entry:
            videos.append((str(entry["video_id"]), entry.get("video_path")))
        else:
            raise IngestError(f"manifest: malformed videos entry {entry!r}")

    spaces: list[ManifestSpace] = []
    for entry in doc.get("spaces", []):
        try:
            space = ModelSpace(
                space_id=str(entry["space_id"]),
                dim=int(entry["dim"]),
                granularity=entry.get("granularity", "frame"),
            )
            spaces.append(ManifestSpace(space=space, emb_path=resolve(entry["emb_path"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise IngestError(f"manifest: malformed space entry {entry!r} ({exc})") from None
    if len({ms.space.space_id for ms in spaces}) != len(spaces):
        raise IngestError("manifest: duplicate space_id")

    if "frames_path" not in doc:
        raise IngestError("manifest: missing frames_path")
    return Manifest(
        videos=videos,
        spaces=spaces,
        frames_path=resolve(doc["frames_path"]),
        objects_path=resolve(doc["objects_path"]) if doc.get("objects_path") else None,
        transcripts_path=resolve(doc["transcripts_path"]) if doc.get("transcripts_path") else None,
        vocab_path=resolve(doc["vocab_path"]) if doc.get("vocab_path") else None,
        num_classes=int(doc.get("num_classes", DEFAULT_NUM_CLASSES)),
    )


CATALOG_JSON = "catalog.json"
FRAMES_JSONL = "frames.jsonl"
OBJECTS_JSONL = "objects.jsonl"
TRANSCRIPTS_JSONL = "transcripts.jsonl"
VOCAB_TXT = "vocab.txt"
SUBMISSIONS_JSONL = "submissions.jsonl"
SPACES_DIR = "spaces"
INDEXES_DIR = "indexes"


def space_emb_path(catalog_dir: str | Path, space_id: str) -> Path:
    return Path(catalog_dir) / SPACES_DIR / f"{space_id}.vemb"


def save_catalog(catalog: Catalog, catalog_dir: str | Path) -> None:
    catalog_dir = Path(catalog_dir)
    catalog_dir.mkdir(parents=True, exist_ok=True)
    doc = {
        "version": 1,
        "videos": [
            {"video_id": v.video_id, "frame_count": v.frame_count, "video_path": v.video_path}
            for v in catalog.videos
        ],
        "spaces": [
            {"space_id": s.space_id, "dim": s.dim, "granularity": s.granularity, "metric": s.metric}
            for s in catalog.spaces
        ],
        "num_classes": catalog.num_classes,
        "dedup_removed": sorted(catalog.dedup_removed),
    }
    (catalog_dir / CATALOG_JSON).write_text(
        json.dumps(doc, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    write_frame_meta(catalog_dir / FRAMES_JSONL, catalog.frames)


def load_catalog(catalog_dir: str | Path) -> Catalog:
    catalog_dir = Path(catalog_dir)
    doc_path = catalog_dir / CATALOG_JSON
    if not doc_path.exists():
        raise NotFoundError(f"no catalog at {catalog_dir}")
    doc = json.loads(doc_path.read_text(encoding="utf-8"))
    spaces = [
        ModelSpace(
            space_id=s["space_id"],
            dim=s["dim"],
            granularity=s["granularity"],
            metric=s.get("metric", "ip"),
        )
        for s in doc.get("spaces", [])
    ]
    video_paths = {v["video_id"]: v["video_path"] for v in doc["videos"] if v.get("video_path")}
    metas = read_frame_meta(catalog_dir / FRAMES_JSONL)
    catalog = build_catalog(metas, spaces=spaces, video_paths=video_paths)
    catalog.dedup_removed = set(doc.get("dedup_removed", []))
    catalog.num_classes = int(doc.get("num_classes", DEFAULT_NUM_CLASSES))
    expected = {v["video_id"]: v["frame_count"] for v in doc["videos"]}
    actual = {v.video_id: v.frame_count for v in catalog.videos}
    if expected != actual:
        raise FormatError(f"{doc_path}: video list disagrees with {FRAMES_JSONL}")
    return catalog


@dataclass
class IngestResult:
    catalog: Catalog
    catalog_dir: Path
    zero_rows: dict[str, list[int]] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)


def run_ingest(manifest_path: str | Path, out_dir: str | Path) -> IngestResult:
    """Compile a manifest into a self-contained catalog directory.

    Embedding rows are unit-normalized here (the one normalization point in
    the pipeline); all other files are validated and rewritten canonically.
    Re-running over identical inputs yields identical outputs.
    """
    manifest = load_manifest(manifest_path)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    metas = read_frame_meta(manifest.frames_path)
    if manifest.videos:
        order = {vid: i for i, (vid, _) in enumerate(manifest.videos)}
        unknown = sorted({m.video_id for m in metas} - set(order))
        if unknown:
            raise IngestError(f"frames reference videos missing from manifest: {unknown}")
        groups: dict[str, list[FrameMeta]] = {vid: [] for vid, _ in manifest.videos}
        for m in metas:
            groups[m.video_id].append(m)
        empty = [vid for vid, g in groups.items() if not g]
        if empty:
            raise IngestError(f"manifest videos have no frames: {empty}")
        metas = [m for vid, _ in manifest.videos for m in groups[vid]]
        video_paths = {vid: p for vid, p in manifest.videos if p}
    else:
        video_paths = {}

    # Input frame ids (if any) refer to the pre-ingest ordering; drop them so
    # ids are always assigned by manifest order.
    metas = [
        FrameMeta(m.video_id, m.frame_index, m.timestamp_ms, m.image_path, frame_id=None)
        for m in metas
    ]
    catalog = build_catalog(metas, spaces=[ms.space for ms in manifest.spaces], video_paths=video_paths)

    result = IngestResult(catalog=catalog, catalog_dir=out_dir)

    (out_dir / SPACES_DIR).mkdir(exist_ok=True)
    for ms in manifest.spaces:
        rows = read_emb(ms.emb_path)
        if rows.shape[1] != ms.space.dim:
            raise IngestError(
                f"space {ms.space.space_id!r}: file dim {rows.shape[1]} != declared {ms.space.dim}"
            )
        expected = catalog.expected_rows(ms.space)
        if rows.shape[0] != expected:
            raise IngestError(
                f"space {ms.space.space_id!r}: {rows.shape[0]} rows, catalog expects {expected} "
                f"for {ms.space.granularity} granularity"
            )
        normalized, zeros = normalize_rows(rows)
        if zeros:
            result.zero_rows[ms.space.space_id] = zeros
            result.warnings.append(
                f"space {ms.space.space_id!r}: {len(zeros)} zero rows left unnormalized"
            )
        write_emb(space_emb_path(out_dir, ms.space.space_id), normalized)

    num_classes = manifest.num_classes
    if manifest.vocab_path:
        vocab = ClassVocabulary.load(manifest.vocab_path)
        num_classes = len(vocab)
        vocab.save(out_dir / VOCAB_TXT)
    if manifest.objects_path:
        obj_store = load_object_vectors(manifest.objects_path, num_classes, catalog.frame_count)
        write_object_vectors(out_dir / OBJECTS_JSONL, obj_store)

    if manifest.transcripts_path:
        by_video = load_transcripts(manifest.transcripts_path)
        orphans = sorted(vid for vid in by_video if not catalog.has_video(vid))
        for vid in orphans:
            del by_video[vid]
        if orphans:
            result.warnings.append(f"transcripts for unknown videos dropped: {orphans}")
        write_transcripts(out_dir / TRANSCRIPTS_JSONL, by_video)

    catalog.num_classes = num_classes
    save_catalog(catalog, out_dir)
    return result
