"""Shared synthetic corpus: five small videos, three spaces, objects, transcripts.

Layout (frame ids are dense in manifest order):
  v_alpha  20 frames, ids  0..19, 3 clips, has video_path + transcript
  v_beta   16 frames, ids 20..35, 2 clips, planted near-duplicates 23/24/25
  v_gamma   9 frames, ids 36..44, 2 clips, has transcript
  v_delta   1 frame,  id  45,     1 clip,  zero textual row (ingest warning)
  v_echo    7 frames, ids 46..52, 1 clip,  frame 47 copies frame 23's visual row

Spaces: visual (frame, d=16, dedup target), textual (frame, d=8),
clipvec (clip8, d=12).  Vocabulary has 8 classes; "traffic light" overlaps
"light" to exercise longest-match-first extraction.
"""

from __future__ import annotations

import json
from pathlib import Path
from types import SimpleNamespace

import numpy as np
import pytest

from framesift.store import run_ingest, write_emb

VIDEO_LAYOUT = [
    ("v_alpha", 20, "media/v_alpha.mp4"),
    ("v_beta", 16, None),
    ("v_gamma", 9, "media/v_gamma.mp4"),
    ("v_delta", 1, None),
    ("v_echo", 7, None),
]
TOTAL_FRAMES = sum(n for _, n, _ in VIDEO_LAYOUT)  # 53
TOTAL_CLIPS = sum((n + 7) // 8 for _, n, _ in VIDEO_LAYOUT)  # 9

VOCAB = ["person", "dog", "car", "tree", "bird", "man", "traffic light", "light"]

DUP_GROUP = (23, 24, 25)  # near-identical visual rows inside v_beta
CROSS_COPY = (23, 47)  # identical visual rows in different videos
ZERO_TEXTUAL_ROW = 45

CORPUS_SEED = 7


def frame_classes(frame_id: int) -> list[int]:
    """Deterministic object assignment; frames 0 mod 7 get {bird, man}."""
    if frame_id % 3 == 2:
        return []  # absent from objects.jsonl -> empty set
    classes = {frame_id % 8}
    if frame_id % 7 == 0:
        classes |= {4, 5}
    return sorted(classes)


def write_corpus_inputs(root: Path, seed: int = CORPUS_SEED) -> SimpleNamespace:
    root.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    frames = []
    fid = 0
    for video_id, count, _path in VIDEO_LAYOUT:
        for idx in range(count):
            frames.append(
                {
                    "video_id": video_id,
                    "frame_index": idx,
                    "timestamp_ms": idx * 500,
                    "image_path": f"thumbs/{video_id}/{idx:04d}.jpg",
                }
            )
            fid += 1
    (root / "frames.jsonl").write_text(
        "".join(json.dumps(f) + "\n" for f in frames), encoding="utf-8"
    )

    visual = rng.standard_normal((TOTAL_FRAMES, 16)).astype(np.float32)
    visual[24] = visual[23] + 0.01 * rng.standard_normal(16).astype(np.float32)
    visual[25] = visual[23] + 0.01 * rng.standard_normal(16).astype(np.float32)
    visual[47] = visual[23]
    textual = rng.standard_normal((TOTAL_FRAMES, 8)).astype(np.float32)
    textual[ZERO_TEXTUAL_ROW] = 0.0
    clipvec = rng.standard_normal((TOTAL_CLIPS, 12)).astype(np.float32)
    write_emb(root / "visual.vemb", visual)
    write_emb(root / "textual.vemb", textual)
    write_emb(root / "clipvec.vemb", clipvec)

    objects = [
        {"frame_id": f, "classes": frame_classes(f)}
        for f in range(TOTAL_FRAMES)
        if frame_classes(f)
    ]
    (root / "objects.jsonl").write_text(
        "".join(json.dumps(o) + "\n" for o in objects), encoding="utf-8"
    )
    (root / "vocab.txt").write_text("".join(name + "\n" for name in VOCAB), encoding="utf-8")

    transcripts = [
        {"video_id": "v_alpha", "start_ms": 0, "end_ms": 2000, "text": "a man walks a dog"},
        {"video_id": "v_alpha", "start_ms": 2000, "end_ms": 5000, "text": "a purple bird lands"},
        {"video_id": "v_alpha", "start_ms": 5000, "end_ms": 8000, "text": "the traffic light turns red"},
        {"video_id": "v_gamma", "start_ms": 100, "end_ms": 900, "text": "cars pass by"},
    ]
    (root / "transcripts.jsonl").write_text(
        "".join(json.dumps(t) + "\n" for t in transcripts), encoding="utf-8"
    )

    manifest = {
        "videos": [
            {"video_id": vid, "video_path": path} if path else vid
            for vid, _count, path in VIDEO_LAYOUT
        ],
        "spaces": [
            {"space_id": "visual", "dim": 16, "granularity": "frame", "emb_path": "visual.vemb"},
            {"space_id": "textual", "dim": 8, "granularity": "frame", "emb_path": "textual.vemb"},
            {"space_id": "clipvec", "dim": 12, "granularity": "clip8", "emb_path": "clipvec.vemb"},
        ],
        "frames_path": "frames.jsonl",
        "objects_path": "objects.jsonl",
        "transcripts_path": "transcripts.jsonl",
        "vocab_path": "vocab.txt",
    }
    manifest_path = root / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")

    return SimpleNamespace(
        root=root,
        manifest=manifest_path,
        visual=visual,
        textual=textual,
        clipvec=clipvec,
        frames=frames,
    )


@pytest.fixture
def corpus_inputs(tmp_path):
    return write_corpus_inputs(tmp_path / "src")


@pytest.fixture
def corpus(tmp_path, corpus_inputs):
    catalog_dir = tmp_path / "catalog"
    result = run_ingest(corpus_inputs.manifest, catalog_dir)
    return SimpleNamespace(
        **vars(corpus_inputs),
        catalog_dir=catalog_dir,
        catalog=result.catalog,
        result=result,
    )
