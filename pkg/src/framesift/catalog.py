"""Domain model: videos, keyframes, 8-frame clips, and embedding spaces.

The catalog is built once at ingest and is immutable afterwards; every other
module (dedup, indexing, fusion, service) reads from it concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Literal

from .errors import IngestError, NotFoundError

CLIP_LEN = 8

Granularity = Literal["frame", "clip8"]

GRANULARITY_FRAME: Granularity = "frame"
GRANULARITY_CLIP8: Granularity = "clip8"


@dataclass(frozen=True)
class FrameRecord:
    """One keyframe: identity plus provenance."""

    frame_id: int
    video_id: str
    frame_index: int
    timestamp_ms: int
    image_path: str


@dataclass(frozen=True)
class ClipRecord:
    """A tile of up to 8 consecutive frames of one video (inclusive bounds)."""

    clip_id: int
    video_id: str
    start_frame_index: int
    end_frame_index: int


@dataclass(frozen=True)
class ModelSpace:
    """A named embedding family: one upstream model's vector space."""

    space_id: str
    dim: int
    granularity: Granularity = GRANULARITY_FRAME
    metric: str = "ip"

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"space {self.space_id!r}: dim must be >= 1, got {self.dim}")
        if self.granularity not in (GRANULARITY_FRAME, GRANULARITY_CLIP8):
            raise ValueError(f"space {self.space_id!r}: unknown granularity {self.granularity!r}")


@dataclass(frozen=True)
class VideoInfo:
    """Per-video bookkeeping; frame/clip ids of one video are contiguous."""

    video_id: str
    frame_count: int
    first_frame_id: int
    first_clip_id: int
    video_path: str | None = None

    @property
    def clip_count(self) -> int:
        return (self.frame_count + CLIP_LEN - 1) // CLIP_LEN


@dataclass
class Catalog:
    """Immutable-after-build registry of videos, frames, clips, and spaces."""

    videos: list[VideoInfo] = field(default_factory=list)
    frames: list[FrameRecord] = field(default_factory=list)
    clips: list[ClipRecord] = field(default_factory=list)
    spaces: list[ModelSpace] = field(default_factory=list)
    dedup_removed: set[int] = field(default_factory=set)
    num_classes: int = 600  # size of the object-detector class vocabulary

    def __post_init__(self) -> None:
        self._video_by_id = {v.video_id: v for v in self.videos}
        self._space_by_id = {s.space_id: s for s in self.spaces}

    @property
    def frame_count(self) -> int:
        return len(self.frames)

    @property
    def clip_count(self) -> int:
        return len(self.clips)

    def video(self, video_id: str) -> VideoInfo:
        try:
            return self._video_by_id[video_id]
        except KeyError:
            raise NotFoundError(f"unknown video_id {video_id!r}") from None

    def has_video(self, video_id: str) -> bool:
        return video_id in self._video_by_id

    def space(self, space_id: str) -> ModelSpace:
        try:
            return self._space_by_id[space_id]
        except KeyError:
            raise NotFoundError(f"unknown space_id {space_id!r}") from None

    def frame(self, frame_id: int) -> FrameRecord:
        if not 0 <= frame_id < len(self.frames):
            raise NotFoundError(f"unknown frame_id {frame_id}")
        return self.frames[frame_id]

    def clip(self, clip_id: int) -> ClipRecord:
        if not 0 <= clip_id < len(self.clips):
            raise NotFoundError(f"unknown clip_id {clip_id}")
        return self.clips[clip_id]

    def video_frames(self, video_id: str) -> list[FrameRecord]:
        v = self.video(video_id)
        return self.frames[v.first_frame_id : v.first_frame_id + v.frame_count]

    def video_clips(self, video_id: str) -> list[ClipRecord]:
        v = self.video(video_id)
        return self.clips[v.first_clip_id : v.first_clip_id + v.clip_count]

    def clip_frame_ids(self, clip_id: int) -> range:
        """Frame ids covered by one clip, in temporal order."""
        c = self.clip(clip_id)
        v = self.video(c.video_id)
        ordinal = clip_id - v.first_clip_id
        start = ordinal * CLIP_LEN
        end = min(start + CLIP_LEN, v.frame_count)
        return range(v.first_frame_id + start, v.first_frame_id + end)

    def clip_id_of_frame(self, frame_id: int) -> int:
        f = self.frame(frame_id)
        v = self.video(f.video_id)
        return v.first_clip_id + (frame_id - v.first_frame_id) // CLIP_LEN

    def expected_rows(self, space: ModelSpace) -> int:
        return self.frame_count if space.granularity == GRANULARITY_FRAME else self.clip_count

    def surviving_frame_ids(self) -> list[int]:
        """Frame ids that dedup kept (all frames when dedup never ran)."""
        if not self.dedup_removed:
            return list(range(self.frame_count))
        return [i for i in range(self.frame_count) if i not in self.dedup_removed]


@dataclass(frozen=True)
class FrameMeta:
    """Pre-ingest frame metadata, before frame_id assignment."""

    video_id: str
    frame_index: int
    timestamp_ms: int
    image_path: str
    frame_id: int | None = None


def build_catalog(
    frame_stream: Iterable[FrameMeta],
    spaces: Iterable[ModelSpace] = (),
    video_paths: dict[str, str] | None = None,
) -> Catalog:
    """Assign dense frame ids and tile each video's frames into 8-frame clips.

    The stream must arrive grouped by video and temporally ordered within each
    video; violations are rejected rather than silently reordered.  If an input
    record carries a frame_id it must match the id being assigned (guards
    against object-vector files authored for a different ordering).
    """
    video_paths = video_paths or {}
    videos: list[VideoInfo] = []
    frames: list[FrameRecord] = []
    clips: list[ClipRecord] = []
    seen_videos: set[str] = set()

    current: str | None = None
    group: list[FrameRecord] = []

    def close_group() -> None:
        if current is None:
            return
        videos.append(
            VideoInfo(
                video_id=current,
                frame_count=len(group),
                first_frame_id=group[0].frame_id,
                first_clip_id=len(clips),
                video_path=video_paths.get(current),
            )
        )
        for start in range(0, len(group), CLIP_LEN):
            tile = group[start : start + CLIP_LEN]
            clips.append(
                ClipRecord(
                    clip_id=len(clips),
                    video_id=current,
                    start_frame_index=tile[0].frame_index,
                    end_frame_index=tile[-1].frame_index,
                )
            )
        group.clear()

    for meta in frame_stream:
        if meta.timestamp_ms < 0:
            raise IngestError(
                f"frame ({meta.video_id!r}, {meta.frame_index}): negative timestamp_ms"
            )
        if meta.video_id != current:
            if meta.video_id in seen_videos:
                raise IngestError(
                    f"video {meta.video_id!r} appears twice in the stream; "
                    "frames must be grouped by video"
                )
            close_group()
            current = meta.video_id
            seen_videos.add(current)
        elif group:
            prev = group[-1]
            if meta.frame_index == prev.frame_index:
                raise IngestError(
                    f"duplicate (video_id, frame_index) pair ({meta.video_id!r}, {meta.frame_index})"
                )
            if meta.frame_index < prev.frame_index:
                raise IngestError(
                    f"video {meta.video_id!r}: frame_index {meta.frame_index} "
                    f"not increasing after {prev.frame_index}"
                )
            if meta.timestamp_ms < prev.timestamp_ms:
                raise IngestError(
                    f"video {meta.video_id!r}: timestamp_ms decreases at frame_index {meta.frame_index}"
                )
        frame_id = len(frames)
        if meta.frame_id is not None and meta.frame_id != frame_id:
            raise IngestError(
                f"frame ({meta.video_id!r}, {meta.frame_index}): declared frame_id "
                f"{meta.frame_id} != assigned {frame_id}"
            )
        frames.append(
            FrameRecord(
                frame_id=frame_id,
                video_id=meta.video_id,
                frame_index=meta.frame_index,
                timestamp_ms=meta.timestamp_ms,
                image_path=meta.image_path,
            )
        )
        group.append(frames[-1])
    close_group()

    return Catalog(videos=videos, frames=frames, clips=clips, spaces=list(spaces))


def neighbors(catalog: Catalog, frame_id: int, radius: int = 4) -> tuple[list[FrameRecord], int]:
    """Temporal context of a frame: up to `radius` frames each side, same video.

    Returns the window (anchor included) and the anchor's position in it.
    """
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    anchor = catalog.frame(frame_id)
    v = catalog.video(anchor.video_id)
    lo = max(v.first_frame_id, frame_id - radius)
    hi = min(v.first_frame_id + v.frame_count - 1, frame_id + radius)
    window = catalog.frames[lo : hi + 1]
    return list(window), frame_id - lo


def iter_video_frame_ids(catalog: Catalog) -> Iterator[tuple[VideoInfo, range]]:
    """(video, frame id range) pairs in catalog order."""
    for v in catalog.videos:
        yield v, range(v.first_frame_id, v.first_frame_id + v.frame_count)
