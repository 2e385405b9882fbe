"""Catalog construction, clip tiling, and temporal neighbor windows."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from framesift.catalog import (
    CLIP_LEN,
    FrameMeta,
    ModelSpace,
    build_catalog,
    neighbors,
)
from framesift.errors import IngestError, NotFoundError


def metas_for(layout: list[tuple[str, int]]) -> list[FrameMeta]:
    return [
        FrameMeta(vid, idx, idx * 1000, f"{vid}/{idx}.jpg")
        for vid, count in layout
        for idx in range(count)
    ]


class TestBuildCatalog:
    def test_dense_ids_in_input_order(self):
        catalog = build_catalog(metas_for([("a", 3), ("b", 2)]), spaces=[])
        assert [f.frame_id for f in catalog.frames] == [0, 1, 2, 3, 4]
        assert [f.video_id for f in catalog.frames] == ["a", "a", "a", "b", "b"]
        assert catalog.video("a").first_frame_id == 0
        assert catalog.video("b").first_frame_id == 3

    def test_video_cannot_reappear(self):
        metas = metas_for([("a", 2), ("b", 1)]) + [FrameMeta("a", 5, 9000, "x.jpg")]
        with pytest.raises(IngestError, match="'a'"):
            build_catalog(metas, spaces=[])

    def test_frame_index_strictly_increasing(self):
        metas = [FrameMeta("a", 0, 0, "x"), FrameMeta("a", 0, 100, "y")]
        with pytest.raises(IngestError, match="frame_index"):
            build_catalog(metas, spaces=[])

    def test_timestamps_non_decreasing(self):
        metas = [FrameMeta("a", 0, 500, "x"), FrameMeta("a", 1, 400, "y")]
        with pytest.raises(IngestError, match="timestamp"):
            build_catalog(metas, spaces=[])

    def test_negative_timestamp_rejected(self):
        with pytest.raises(IngestError, match="timestamp"):
            build_catalog([FrameMeta("a", 0, -1, "x")], spaces=[])

    def test_declared_frame_id_must_match_assigned(self):
        metas = [FrameMeta("a", 0, 0, "x", frame_id=5)]
        with pytest.raises(IngestError, match="frame_id"):
            build_catalog(metas, spaces=[])

    def test_empty_input_gives_empty_catalog(self):
        catalog = build_catalog([], spaces=[])
        assert catalog.frame_count == 0
        assert catalog.clip_count == 0
        assert catalog.videos == []


class TestClipTiling:
    @pytest.mark.parametrize(
        "count,expected_clips",
        [(1, 1), (7, 1), (8, 1), (9, 2), (16, 2), (17, 3), (20, 3), (100, 13)],
    )
    def test_clip_count_is_ceil_over_eight(self, count, expected_clips):
        catalog = build_catalog(metas_for([("v", count)]), spaces=[])
        assert catalog.video("v").clip_count == expected_clips
        assert len(catalog.video_clips("v")) == expected_clips

    def test_tiles_are_contiguous_and_cover_all_frames(self):
        catalog = build_catalog(metas_for([("a", 20), ("b", 9)]), spaces=[])
        covered = []
        for clip in catalog.clips:
            frame_ids = list(catalog.clip_frame_ids(clip.clip_id))
            assert 1 <= len(frame_ids) <= CLIP_LEN
            covered.extend(frame_ids)
            indices = [catalog.frame(f).frame_index for f in frame_ids]
            assert indices == list(range(clip.start_frame_index, clip.end_frame_index + 1))
        assert covered == list(range(catalog.frame_count))

    def test_short_last_tile(self):
        catalog = build_catalog(metas_for([("v", 20)]), spaces=[])
        last = catalog.video_clips("v")[-1]
        assert (last.start_frame_index, last.end_frame_index) == (16, 19)
        assert list(catalog.clip_frame_ids(last.clip_id)) == [16, 17, 18, 19]

    def test_clip_of_frame_round_trip(self):
        catalog = build_catalog(metas_for([("a", 11), ("b", 5)]), spaces=[])
        for frame in catalog.frames:
            clip_id = catalog.clip_id_of_frame(frame.frame_id)
            assert frame.frame_id in catalog.clip_frame_ids(clip_id)
            assert catalog.clip(clip_id).video_id == frame.video_id


class TestExpectedRows:
    def test_frame_vs_clip_granularity(self):
        catalog = build_catalog(metas_for([("a", 20), ("b", 9)]), spaces=[])
        assert catalog.expected_rows(ModelSpace("f", 4)) == 29
        assert catalog.expected_rows(ModelSpace("c", 4, granularity="clip8")) == 5


class TestNeighbors:
    def make(self):
        return build_catalog(metas_for([("a", 12), ("b", 3)]), spaces=[])

    def test_middle_frame_full_window(self):
        catalog = self.make()
        window, anchor = neighbors(catalog, 6, radius=4)
        assert [f.frame_id for f in window] == [2, 3, 4, 5, 6, 7, 8, 9, 10]
        assert window[anchor].frame_id == 6

    def test_start_of_video_clips_left(self):
        catalog = self.make()
        window, anchor = neighbors(catalog, 1, radius=4)
        assert [f.frame_id for f in window] == [0, 1, 2, 3, 4, 5]
        assert anchor == 1

    def test_end_of_video_clips_right(self):
        catalog = self.make()
        window, anchor = neighbors(catalog, 11, radius=4)
        assert [f.frame_id for f in window] == [7, 8, 9, 10, 11]
        assert window[anchor].frame_id == 11

    def test_never_crosses_video_boundary(self):
        catalog = self.make()
        window, _ = neighbors(catalog, 12, radius=4)  # first frame of b
        assert all(f.video_id == "b" for f in window)
        assert [f.frame_id for f in window] == [12, 13, 14]

    def test_radius_zero_returns_anchor_only(self):
        catalog = self.make()
        window, anchor = neighbors(catalog, 5, radius=0)
        assert [f.frame_id for f in window] == [5]
        assert anchor == 0

    def test_radius_larger_than_video(self):
        catalog = self.make()
        window, _ = neighbors(catalog, 13, radius=100)
        assert [f.frame_id for f in window] == [12, 13, 14]

    def test_unknown_frame(self):
        with pytest.raises(NotFoundError, match="99"):
            neighbors(self.make(), 99, radius=4)

    @given(st.integers(1, 40), st.integers(0, 39), st.integers(0, 6))
    @settings(max_examples=80, deadline=None)
    def test_window_is_contiguous_slice_around_anchor(self, count, fid, radius):
        catalog = build_catalog(metas_for([("v", count)]), spaces=[])
        fid = fid % count
        window, anchor = neighbors(catalog, fid, radius=radius)
        ids = [f.frame_id for f in window]
        assert ids == sorted(ids)
        assert ids == list(range(ids[0], ids[-1] + 1))
        assert window[anchor].frame_id == fid
        assert len(ids) <= 2 * radius + 1
        assert max(0, fid - radius) == ids[0]
        assert min(count - 1, fid + radius) == ids[-1]


class TestSurvivors:
    def test_surviving_frames_exclude_removed(self):
        catalog = build_catalog(metas_for([("a", 5)]), spaces=[])
        catalog.dedup_removed = {1, 3}
        assert catalog.surviving_frame_ids() == [0, 2, 4]
