"""Object-class prefiltering: per-frame detected-class bitsets and query matching.

Detector output (one class-id list per frame) is ingested into a packed bitset
store; a query's named classes restrict dense search to frames containing all
(or any) of them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import IngestError

DEFAULT_NUM_CLASSES = 600

MATCH_ALL = "all"
MATCH_ANY = "any"

_WORD_RE = re.compile(r"[a-z0-9]+")


def _tokenize(text: str) -> list[str]:
    return _WORD_RE.findall(text.lower())


class ClassVocabulary:
    """Ordered class names; list position is the class id."""

    def __init__(self, names: list[str]):
        lowered = [n.strip().lower() for n in names]
        seen: dict[str, int] = {}
        for i, name in enumerate(lowered):
            if not name:
                raise ValueError(f"class {i}: empty name")
            if name in seen:
                raise ValueError(f"class names collide case-insensitively: {i} and {seen[name]}")
            seen[name] = i
        self.names = [n.strip() for n in names]
        self._id_by_lower = seen

    def __len__(self) -> int:
        return len(self.names)

    def class_id(self, name: str) -> int | None:
        return self._id_by_lower.get(name.strip().lower())

    @classmethod
    def load(cls, path) -> "ClassVocabulary":
        with open(path, encoding="utf-8") as fh:
            names = [line.rstrip("\n") for line in fh]
        while names and not names[-1].strip():
            names.pop()
        return cls(names)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for name in self.names:
                fh.write(name + "\n")


@dataclass
class QueryClassVector:
    """Query-side class presence set plus the containment/overlap mode."""

    class_ids: tuple[int, ...]
    match_mode: str = MATCH_ALL

    def __post_init__(self) -> None:
        self.class_ids = tuple(sorted(set(self.class_ids)))
        if self.match_mode not in (MATCH_ALL, MATCH_ANY):
            raise ValueError(f"unknown match_mode {self.match_mode!r}")

    def __bool__(self) -> bool:
        return bool(self.class_ids)


@dataclass
class TextMatchReport:
    """Which vocabulary entries a free-text query mentioned."""

    matched: list[tuple[int, str]] = field(default_factory=list)


class ObjectStore:
    """Packed per-frame class bitsets: frame f has class c iff bit c of row f is set."""

    def __init__(self, frame_count: int, num_classes: int = DEFAULT_NUM_CLASSES):
        if num_classes < 1:
            raise ValueError("num_classes must be >= 1")
        self.frame_count = frame_count
        self.num_classes = num_classes
        self._bits = np.zeros((frame_count, (num_classes + 7) // 8), dtype=np.uint8)

    def set_classes(self, frame_id: int, class_ids: list[int]) -> None:
        if not 0 <= frame_id < self.frame_count:
            raise IngestError(f"frame_id {frame_id} out of range 0..{self.frame_count - 1}")
        for c in class_ids:
            if not 0 <= c < self.num_classes:
                raise IngestError(f"class index {c} out of range 0..{self.num_classes - 1}")
            self._bits[frame_id, c >> 3] |= np.uint8(1 << (c & 7))

    def classes_of(self, frame_id: int) -> list[int]:
        row = np.unpackbits(self._bits[frame_id], bitorder="little")
        return np.flatnonzero(row[: self.num_classes]).tolist()

    def nonempty_frame_ids(self) -> list[int]:
        return np.flatnonzero(self._bits.any(axis=1)).tolist()

    def _pack_query(self, class_ids: tuple[int, ...]) -> np.ndarray:
        bits = np.zeros(self._bits.shape[1] * 8, dtype=np.uint8)
        for c in class_ids:
            if not 0 <= c < self.num_classes:
                raise ValueError(f"class index {c} out of range 0..{self.num_classes - 1}")
            bits[c] = 1
        return np.packbits(bits, bitorder="little")

    def filter_frames(self, query: QueryClassVector) -> np.ndarray:
        """Boolean mask over frame ids; usable as a search candidate mask."""
        if not query.class_ids:
            raise ValueError("empty query class set; disable filtering instead")
        q = self._pack_query(query.class_ids)
        if query.match_mode == MATCH_ALL:
            return ((self._bits & q) == q).all(axis=1)
        return ((self._bits & q) != 0).any(axis=1)


def classes_from_text(text: str, vocab: ClassVocabulary) -> tuple[QueryClassVector, TextMatchReport]:
    """Deterministic lexical class extraction from a query sentence.

    Case-insensitive whole-word matching; multi-word vocabulary entries are
    matched longest-first and consume their word positions, so "traffic light"
    wins over a separate "light" entry on the same words.
    """
    if len(vocab) == 0:
        raise ValueError("empty vocabulary")
    words = _tokenize(text)
    entries = [(cid, _tokenize(name)) for cid, name in enumerate(vocab.names)]
    entries = [(cid, toks) for cid, toks in entries if toks]
    entries.sort(key=lambda e: (-len(e[1]), e[0]))

    consumed = [False] * len(words)
    report = TextMatchReport()
    hit_ids: list[int] = []
    for cid, toks in entries:
        n = len(toks)
        found = False
        for start in range(0, len(words) - n + 1):
            if any(consumed[start : start + n]):
                continue
            if words[start : start + n] == toks:
                for p in range(start, start + n):
                    consumed[p] = True
                found = True
        if found:
            hit_ids.append(cid)
            report.matched.append((cid, vocab.names[cid]))
    report.matched.sort()
    return QueryClassVector(class_ids=tuple(hit_ids)), report


def filter_frames(store: ObjectStore, query: QueryClassVector) -> np.ndarray:
    """Module-level alias for ObjectStore.filter_frames."""
    return store.filter_frames(query)
