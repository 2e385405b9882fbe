"""Late fusion of per-model score vectors, and clip-to-frame mapping.

Two rules: summing confidences (consensus frames rise) and unique-frame
selection (the union of every model's top list, so one model's find is never
drowned out).  Clip-granularity scores are mapped back onto their frames
before or after fusion as the caller needs.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .catalog import Catalog
from .vindex import top_t

FUSE_SUM = "sum"
FUSE_UNIQUE = "unique"
NORM_NONE = "none"
NORM_MINMAX = "minmax"


@dataclass
class ScoreVector:
    """Per-candidate confidences from one model space, over an explicit id domain."""

    space_id: str
    ids: np.ndarray  # int64, strictly ascending
    scores: np.ndarray  # float32/float64, same length
    granularity: str = "frame"
    clip_inherited: bool = False

    def __post_init__(self) -> None:
        self.ids = np.asarray(self.ids, dtype=np.int64)
        self.scores = np.asarray(self.scores)
        if self.ids.shape != self.scores.shape:
            raise ValueError(
                f"space {self.space_id!r}: {len(self.ids)} ids vs {len(self.scores)} scores"
            )


@dataclass(frozen=True)
class FusedHit:
    """One ranked result: candidate id plus fusion provenance."""

    id: int
    score: float
    contributing: tuple[str, ...]
    best_rank: int | None = None
    model_ranks: tuple[tuple[str, int], ...] = ()
    clip_inherited: bool = False


def _check_domains(vectors: list[ScoreVector]) -> np.ndarray:
    if not vectors:
        raise ValueError("no score vectors to fuse")
    base = vectors[0].ids
    for v in vectors[1:]:
        if len(v.ids) != len(base):
            raise ValueError(
                f"score vector length mismatch: {vectors[0].space_id!r} has {len(base)}, "
                f"{v.space_id!r} has {len(v.ids)}"
            )
        if not np.array_equal(v.ids, base):
            raise ValueError(
                f"score vectors disagree on candidate ids: {vectors[0].space_id!r} vs {v.space_id!r}"
            )
    return base


def _minmax(scores: np.ndarray) -> np.ndarray:
    s = scores.astype(np.float64)
    lo, hi = s.min(), s.max()
    if hi == lo:
        return np.zeros_like(s)
    return (s - lo) / (hi - lo)


def fuse_sum(vectors: list[ScoreVector], t: int, normalization: str = NORM_NONE) -> list[FusedHit]:
    """Elementwise score sum, top-t descending, ascending-id tie-break.

    Permutation-invariant over the model list; minmax normalization rescales
    each model to [0, 1] first.
    """
    ids = _check_domains(vectors)
    if normalization not in (NORM_NONE, NORM_MINMAX):
        raise ValueError(f"unknown normalization {normalization!r}")
    total = np.zeros(len(ids), dtype=np.float64)
    # canonical model order keeps the float sums identical however the caller
    # happened to order the list
    for v in sorted(vectors, key=lambda v: v.space_id):
        total += _minmax(v.scores) if normalization == NORM_MINMAX else v.scores.astype(np.float64)
    contributing = tuple(sorted(v.space_id for v in vectors))
    inherited = any(v.clip_inherited for v in vectors)
    return [
        FusedHit(id=i, score=s, contributing=contributing, clip_inherited=inherited)
        for i, s in top_t(ids, total, t)
    ]


def fuse_unique(vectors: list[ScoreVector], t: int) -> list[FusedHit]:
    """Union of every model's top-t set.

    Each hit is annotated with all contributing models and its per-model
    ranks; ordering is best (minimum) rank first, then ascending id.  The
    reported score is the best contributing model's score.
    """
    _check_domains(vectors)
    by_space = {v.space_id: v for v in vectors}
    hits: dict[int, dict[str, int]] = {}
    for v in vectors:
        for rank, (cand_id, _score) in enumerate(top_t(v.ids, v.scores, t)):
            hits.setdefault(cand_id, {})[v.space_id] = rank

    def best_score(cand_id: int, spaces: dict[str, int]) -> float:
        vals = []
        for sid in spaces:
            v = by_space[sid]
            pos = int(np.searchsorted(v.ids, cand_id))
            vals.append(float(v.scores[pos]))
        return max(vals)

    ordered = sorted(hits.items(), key=lambda kv: (min(kv[1].values()), kv[0]))
    return [
        FusedHit(
            id=cand_id,
            score=best_score(cand_id, spaces),
            contributing=tuple(sorted(spaces)),
            best_rank=min(spaces.values()),
            model_ranks=tuple(sorted(spaces.items())),
            clip_inherited=any(by_space[s].clip_inherited for s in spaces),
        )
        for cand_id, spaces in ordered
    ]


def expand_clips(hits: list[FusedHit], catalog: Catalog) -> list[FusedHit]:
    """Replace each clip-domain hit with its frames, in temporal order.

    Frames inherit the clip's score and annotations; hit order is preserved.
    """
    out: list[FusedHit] = []
    for hit in hits:
        for fid in catalog.clip_frame_ids(hit.id):
            out.append(replace(hit, id=fid, clip_inherited=True))
    return out


def frame_to_clip_map(catalog: Catalog) -> np.ndarray:
    """frame_id -> clip_id lookup array."""
    out = np.empty(catalog.frame_count, dtype=np.int64)
    for v in catalog.videos:
        fids = np.arange(v.frame_count, dtype=np.int64)
        out[v.first_frame_id : v.first_frame_id + v.frame_count] = v.first_clip_id + fids // 8
    return out


def expand_clip_scores(
    sv: ScoreVector, frame_ids: np.ndarray, frame_to_clip: np.ndarray, clip_count: int
) -> ScoreVector:
    """Clip-domain scores -> frame-domain scores over the given frame ids.

    Frames whose clip is outside the vector's domain score 0 (unscanned under
    an approximate index).
    """
    full = np.zeros(clip_count, dtype=np.float64)
    full[sv.ids] = sv.scores
    frame_ids = np.asarray(frame_ids, dtype=np.int64)
    return ScoreVector(
        space_id=sv.space_id,
        ids=frame_ids,
        scores=full[frame_to_clip[frame_ids]],
        granularity="frame",
        clip_inherited=True,
    )
