"""Near-duplicate keyframe removal within each video.

Greedy scan in temporal order: a frame is dropped iff its cosine similarity
with any previously KEPT frame of the same video exceeds the threshold, so a
kept frame acts as the retained representative of everything it absorbs.
Videos never share comparisons.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .catalog import GRANULARITY_FRAME, Catalog
from .errors import NotFoundError
from .store import EmbeddingMatrix, normalize_rows

DEFAULT_DELTA = 0.9


@dataclass(frozen=True)
class DedupConfig:
    space_id: str
    delta: float = DEFAULT_DELTA

    def __post_init__(self) -> None:
        if not -1.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must be in [-1, 1], got {self.delta}")


@dataclass
class VideoDedupReport:
    video_id: str
    kept: list[int]
    removed: list[int]
    pairs_examined: int
    max_similarity: float | None
    mean_similarity: float | None

    def to_dict(self) -> dict:
        return {
            "video_id": self.video_id,
            "kept": self.kept,
            "removed": self.removed,
            "pairs_examined": self.pairs_examined,
            "max_similarity": self.max_similarity,
            "mean_similarity": self.mean_similarity,
        }


@dataclass
class DedupReport:
    space_id: str
    delta: float
    videos: list[VideoDedupReport] = field(default_factory=list)

    @property
    def removed(self) -> set[int]:
        return {f for v in self.videos for f in v.removed}

    @property
    def kept(self) -> set[int]:
        return {f for v in self.videos for f in v.kept}

    def to_dict(self) -> dict:
        return {
            "space_id": self.space_id,
            "delta": self.delta,
            "total_kept": sum(len(v.kept) for v in self.videos),
            "total_removed": sum(len(v.removed) for v in self.videos),
            "videos": [v.to_dict() for v in self.videos],
        }


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity; a zero vector compares as 0 (and warns) so it never
    looks like a duplicate of anything."""
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape:
        raise ValueError(f"dim mismatch: {u.shape[0]} vs {v.shape[0]}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        warnings.warn("cosine of a zero vector defined as 0", RuntimeWarning, stacklevel=2)
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def _unit_rows(vectors: np.ndarray) -> np.ndarray:
    unit, _ = normalize_rows(vectors)  # zero rows stay zero: cosine 0, never removed
    return unit


def dedup_video(
    frame_ids: list[int], matrix: EmbeddingMatrix, config: DedupConfig, video_id: str = ""
) -> VideoDedupReport:
    """Greedy kept-set-only dedup over one video's frames in temporal order.

    The first frame is always kept.  Raises if any frame lacks an embedding row.
    """
    rows = np.empty((len(frame_ids), matrix.dim), dtype=np.float32)
    for i, fid in enumerate(frame_ids):
        try:
            rows[i] = matrix.row_for(fid)
        except NotFoundError:
            raise NotFoundError(
                f"dedup: frame {fid} has no embedding in space {matrix.space_id!r}"
            ) from None
    unit = _unit_rows(rows)

    kept_pos: list[int] = []
    removed_pos: list[int] = []
    pairs = 0
    sim_sum = 0.0
    sim_max: float | None = None
    for j in range(len(frame_ids)):
        if kept_pos:
            sims = unit[kept_pos] @ unit[j]
            pairs += len(kept_pos)
            sim_sum += float(sims.sum())
            m = float(sims.max())
            sim_max = m if sim_max is None else max(sim_max, m)
            if m > config.delta:
                removed_pos.append(j)
                continue
        kept_pos.append(j)

    return VideoDedupReport(
        video_id=video_id,
        kept=[frame_ids[p] for p in kept_pos],
        removed=[frame_ids[p] for p in removed_pos],
        pairs_examined=pairs,
        max_similarity=sim_max,
        mean_similarity=(sim_sum / pairs) if pairs else None,
    )


def dedup_catalog(catalog: Catalog, matrix: EmbeddingMatrix, config: DedupConfig) -> DedupReport:
    """Run per-video dedup and install the removed set on the catalog.

    Replaces any prior dedup result.  Comparisons never cross video boundaries.
    """
    space = catalog.space(config.space_id)
    if space.granularity != GRANULARITY_FRAME:
        raise ValueError(f"dedup space {config.space_id!r} must have frame granularity")
    if matrix.space_id != config.space_id:
        raise ValueError(
            f"matrix is for space {matrix.space_id!r}, config wants {config.space_id!r}"
        )
    report = DedupReport(space_id=config.space_id, delta=config.delta)
    for video in catalog.videos:
        ids = list(range(video.first_frame_id, video.first_frame_id + video.frame_count))
        report.videos.append(dedup_video(ids, matrix, config, video_id=video.video_id))
    catalog.dedup_removed = report.removed
    return report
