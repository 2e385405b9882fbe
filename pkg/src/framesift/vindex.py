"""Top-T inner-product search: exact flat scan, IVF cell probing, and IVF-PQ.

All rankings break ties by ascending id so results are reproducible and
oracle-comparable.  Indexes are immutable once trained; queries only allocate
per-query scratch (candidate buffers, PQ lookup tables).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError
from .kmeans import DEFAULT_ITERS, kmeans
from .store import EmbeddingMatrix

PQ_KSUB = 256  # one byte per subspace code

IDX_MAGIC = b"VIDX"
IDX_VERSION = 1
KIND_FLAT = "flat"
KIND_IVF = "ivf"
KIND_IVFPQ = "ivfpq"
_KIND_CODES = {KIND_FLAT: 0, KIND_IVF: 1, KIND_IVFPQ: 2}
_KIND_NAMES = {v: k for k, v in _KIND_CODES.items()}


@dataclass
class IvfIndex:
    """Coarse k-means partition: centroid table plus one row-id list per cell."""

    centroids: np.ndarray  # (k, d) float32
    lists: list[np.ndarray]  # int64 row positions per cell, ascending
    seed: int
    iters: int

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    @property
    def dim(self) -> int:
        return self.centroids.shape[1]


@dataclass
class PqCodebook:
    """Per-subspace centroid tables; code b in subspace s means centroids[s, b]."""

    centroids: np.ndarray  # (m, 256, dsub) float32
    seed: int
    iters: int

    @property
    def m(self) -> int:
        return self.centroids.shape[0]

    @property
    def dsub(self) -> int:
        return self.centroids.shape[2]

    @property
    def dim(self) -> int:
        return self.m * self.dsub


def _check_query(query: np.ndarray, dim: int) -> np.ndarray:
    q = np.asarray(query, dtype=np.float32).ravel()
    if q.shape[0] != dim:
        raise ValueError(f"query dim {q.shape[0]} != index dim {dim}")
    return q


def _resolve_mask(n: int, candidate_mask) -> np.ndarray | None:
    """Normalize a bool mask / index array over row positions to sorted indices."""
    if candidate_mask is None:
        return None
    mask = np.asarray(candidate_mask)
    if mask.dtype == bool:
        if mask.shape != (n,):
            raise ValueError(f"boolean mask length {mask.shape} != row count {n}")
        return np.flatnonzero(mask)
    idx = np.unique(mask.astype(np.int64))
    if len(idx) and (idx[0] < 0 or idx[-1] >= n):
        raise ValueError("candidate index out of range")
    return idx


def top_t(ids: np.ndarray, scores: np.ndarray, t: int) -> list[tuple[int, float]]:
    """Top-t by score descending, ties by ascending id; returns all when short."""
    if t < 1:
        raise ValueError(f"T must be >= 1, got {t}")
    n = len(ids)
    if n == 0:
        return []
    if n > t:
        part = np.argpartition(-scores, t - 1)[:t]
        thresh = scores[part].min()
        above = np.flatnonzero(scores > thresh)
        ties = np.flatnonzero(scores == thresh)
        need = t - len(above)
        ties = ties[np.argsort(ids[ties], kind="stable")[:need]]
        pick = np.concatenate([above, ties])
    else:
        pick = np.arange(n)
    order = np.lexsort((ids[pick], -scores[pick]))
    pick = pick[order[: min(t, n)]]
    return [(int(ids[p]), float(scores[p])) for p in pick]


def scan_flat(
    matrix: EmbeddingMatrix, query: np.ndarray, candidate_rows: np.ndarray | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Exact inner-product scores for every candidate row; returns (rows, scores)."""
    q = _check_query(query, matrix.dim)
    if candidate_rows is None:
        return np.arange(matrix.count, dtype=np.int64), matrix.rows @ q
    return candidate_rows, matrix.rows[candidate_rows] @ q


def search_flat(
    matrix: EmbeddingMatrix, query: np.ndarray, t: int, candidate_mask=None
) -> list[tuple[int, float]]:
    """Exact top-t (id, score) over the whole space or a masked candidate subset."""
    cand = _resolve_mask(matrix.count, candidate_mask)
    rows, scores = scan_flat(matrix, query, cand)
    return top_t(matrix.ids()[rows], scores, t)


def train_ivf(matrix: EmbeddingMatrix, k: int, seed: int, iters: int = DEFAULT_ITERS) -> IvfIndex:
    """Cluster rows into k cells with seeded k-means; rows partition the lists."""
    if not 1 <= k <= matrix.count:
        raise ValueError(f"nlist must be in 1..{matrix.count}, got {k}")
    rng = np.random.default_rng(seed)
    centroids, assign = kmeans(matrix.rows, k, rng, iters=iters)
    lists = [np.flatnonzero(assign == c).astype(np.int64) for c in range(k)]
    return IvfIndex(centroids=centroids, lists=lists, seed=seed, iters=iters)


def _probe_cells(index: IvfIndex, q: np.ndarray, nprobe: int) -> np.ndarray:
    if not 1 <= nprobe <= index.k:
        raise ValueError(f"nprobe must be in 1..{index.k}, got {nprobe}")
    cell_scores = index.centroids @ q
    order = np.lexsort((np.arange(index.k), -cell_scores))
    return order[:nprobe]


def scan_ivf(
    index: IvfIndex,
    matrix: EmbeddingMatrix,
    query: np.ndarray,
    nprobe: int,
    candidate_rows: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Exact scores over the rows of the nprobe best cells (by query inner product)."""
    q = _check_query(query, matrix.dim)
    cells = _probe_cells(index, q, nprobe)
    rows = np.concatenate([index.lists[c] for c in cells]) if len(cells) else np.empty(0, np.int64)
    if candidate_rows is not None:
        keep = np.zeros(matrix.count, dtype=bool)
        keep[candidate_rows] = True
        rows = rows[keep[rows]]
    return rows, matrix.rows[rows] @ q


def search_ivf(
    index: IvfIndex,
    matrix: EmbeddingMatrix,
    query: np.ndarray,
    t: int,
    nprobe: int,
    candidate_mask=None,
) -> list[tuple[int, float]]:
    cand = _resolve_mask(matrix.count, candidate_mask)
    rows, scores = scan_ivf(index, matrix, query, nprobe, cand)
    return top_t(matrix.ids()[rows], scores, t)


def train_pq(matrix: EmbeddingMatrix, m: int, seed: int, iters: int = DEFAULT_ITERS) -> PqCodebook:
    """One 256-centroid k-means per subspace of width dim/m.

    With fewer distinct rows than 256, surplus codebook slots duplicate the
    first centroid; argmin ties keep them unreachable at encode time.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if matrix.dim % m != 0:
        raise ValueError(f"dim {matrix.dim} not divisible by m {m}")
    dsub = matrix.dim // m
    books = np.empty((m, PQ_KSUB, dsub), dtype=np.float32)
    seeds = np.random.SeedSequence(seed).spawn(m)
    for s in range(m):
        sub = np.ascontiguousarray(matrix.rows[:, s * dsub : (s + 1) * dsub])
        k_eff = min(PQ_KSUB, matrix.count)
        centroids, _ = kmeans(sub, k_eff, np.random.default_rng(seeds[s]), iters=iters)
        books[s, :k_eff] = centroids
        if k_eff < PQ_KSUB:
            books[s, k_eff:] = centroids[0]
    return PqCodebook(centroids=books, seed=seed, iters=iters)


def encode_pq(codebook: PqCodebook, matrix: EmbeddingMatrix, chunk: int = 16384) -> np.ndarray:
    """Quantize every row to m one-byte codes (nearest subspace centroid)."""
    if matrix.dim != codebook.dim:
        raise ValueError(f"matrix dim {matrix.dim} != codebook dim {codebook.dim}")
    m, dsub = codebook.m, codebook.dsub
    codes = np.empty((matrix.count, m), dtype=np.uint8)
    for s in range(m):
        book = codebook.centroids[s]
        bn = np.einsum("ij,ij->i", book, book)
        for start in range(0, matrix.count, chunk):
            sub = matrix.rows[start : start + chunk, s * dsub : (s + 1) * dsub]
            proxy = bn[None, :] - 2.0 * (sub @ book.T)
            codes[start : start + chunk, s] = np.argmin(proxy, axis=1).astype(np.uint8)
    return codes


def reconstruct_pq(codebook: PqCodebook, codes: np.ndarray) -> np.ndarray:
    """Decode rows back to float vectors (concatenated subspace centroids)."""
    parts = [codebook.centroids[s][codes[:, s]] for s in range(codebook.m)]
    return np.concatenate(parts, axis=1)


def pq_lookup_tables(codebook: PqCodebook, query: np.ndarray) -> np.ndarray:
    """(m, 256) inner products between query subvectors and subspace centroids."""
    q = _check_query(query, codebook.dim)
    qsub = q.reshape(codebook.m, codebook.dsub)
    return np.einsum("mkd,md->mk", codebook.centroids, qsub)


def scan_ivfpq(
    index: IvfIndex,
    codebook: PqCodebook,
    codes: np.ndarray,
    query: np.ndarray,
    nprobe: int,
    candidate_rows: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Approximate scores via per-query lookup tables over the probed cells."""
    q = _check_query(query, codebook.dim)
    cells = _probe_cells(index, q, nprobe)
    rows = np.concatenate([index.lists[c] for c in cells]) if len(cells) else np.empty(0, np.int64)
    if candidate_rows is not None:
        keep = np.zeros(codes.shape[0], dtype=bool)
        keep[candidate_rows] = True
        rows = rows[keep[rows]]
    luts = pq_lookup_tables(codebook, q)
    picked = codes[rows]  # (n, m)
    scores = luts[np.arange(codebook.m)[None, :], picked].sum(axis=1).astype(np.float32)
    return rows, scores


def search_ivfpq(
    index: IvfIndex,
    codebook: PqCodebook,
    codes: np.ndarray,
    query: np.ndarray,
    t: int,
    nprobe: int,
    candidate_mask=None,
    row_ids: np.ndarray | None = None,
) -> list[tuple[int, float]]:
    cand = _resolve_mask(codes.shape[0], candidate_mask)
    rows, scores = scan_ivfpq(index, codebook, codes, query, nprobe, cand)
    ids = rows if row_ids is None else row_ids[rows]
    return top_t(ids, scores, t)


# --- persistence ---


@dataclass
class IndexBundle:
    """Everything one space's search path needs, as built by the CLI."""

    kind: str
    space_id: str
    dim: int
    count: int
    nprobe: int = 16
    ivf: IvfIndex | None = None
    pq: PqCodebook | None = None
    codes: np.ndarray | None = None


def save_index(path: str | Path, bundle: IndexBundle) -> None:
    """Single versioned binary file; layout documented in docs/formats.md."""
    if bundle.kind not in _KIND_CODES:
        raise ValueError(f"unknown index kind {bundle.kind!r}")
    sid = bundle.space_id.encode("utf-8")
    out = bytearray()
    out += struct.pack("<4sII", IDX_MAGIC, IDX_VERSION, _KIND_CODES[bundle.kind])
    out += struct.pack("<I", len(sid)) + sid
    out += struct.pack("<IQI", bundle.dim, bundle.count, bundle.nprobe)
    if bundle.kind in (KIND_IVF, KIND_IVFPQ):
        ivf = bundle.ivf
        if ivf is None:
            raise ValueError(f"{bundle.kind} bundle missing ivf index")
        out += struct.pack("<IqI", ivf.k, ivf.seed, ivf.iters)
        out += np.ascontiguousarray(ivf.centroids, dtype="<f4").tobytes()
        out += np.array([len(l) for l in ivf.lists], dtype="<u8").tobytes()
        for l in ivf.lists:
            out += np.ascontiguousarray(l, dtype="<u8").tobytes()
    if bundle.kind == KIND_IVFPQ:
        pq, codes = bundle.pq, bundle.codes
        if pq is None or codes is None:
            raise ValueError("ivfpq bundle missing codebook or codes")
        out += struct.pack("<IIqI", pq.m, pq.dsub, pq.seed, pq.iters)
        out += np.ascontiguousarray(pq.centroids, dtype="<f4").tobytes()
        out += np.ascontiguousarray(codes, dtype=np.uint8).tobytes()
    Path(path).write_bytes(bytes(out))


class _Reader:
    def __init__(self, data: bytes, path):
        self.data = data
        self.off = 0
        self.path = path

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.off + size > len(self.data):
            raise FormatError(f"{self.path}: truncated at byte {self.off}")
        vals = struct.unpack_from(fmt, self.data, self.off)
        self.off += size
        return vals

    def array(self, dtype: str, count: int) -> np.ndarray:
        size = np.dtype(dtype).itemsize * count
        if self.off + size > len(self.data):
            raise FormatError(f"{self.path}: truncated at byte {self.off}")
        arr = np.frombuffer(self.data, dtype=dtype, count=count, offset=self.off).copy()
        self.off += size
        return arr


def load_index(path: str | Path) -> IndexBundle:
    rd = _Reader(Path(path).read_bytes(), path)
    magic, version, kind_code = rd.take("<4sII")
    if magic != IDX_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r} at byte 0")
    if version != IDX_VERSION:
        raise FormatError(f"{path}: unsupported version {version} at byte 4")
    if kind_code not in _KIND_NAMES:
        raise FormatError(f"{path}: unknown kind code {kind_code} at byte 8")
    kind = _KIND_NAMES[kind_code]
    (sid_len,) = rd.take("<I")
    sid = bytes(rd.take(f"<{sid_len}s")[0]).decode("utf-8")
    dim, count, nprobe = rd.take("<IQI")
    bundle = IndexBundle(kind=kind, space_id=sid, dim=dim, count=count, nprobe=nprobe)
    if kind in (KIND_IVF, KIND_IVFPQ):
        k, seed, iters = rd.take("<IqI")
        centroids = rd.array("<f4", k * dim).reshape(k, dim)
        lens = rd.array("<u8", k)
        lists = [rd.array("<u8", int(n)).astype(np.int64) for n in lens]
        bundle.ivf = IvfIndex(centroids=centroids, lists=lists, seed=seed, iters=iters)
    if kind == KIND_IVFPQ:
        m, dsub, seed, iters = rd.take("<IIqI")
        books = rd.array("<f4", m * PQ_KSUB * dsub).reshape(m, PQ_KSUB, dsub)
        codes = rd.array("u1", count * m).reshape(count, m)
        bundle.pq = PqCodebook(centroids=books, seed=seed, iters=iters)
        bundle.codes = codes
    if rd.off != len(rd.data):
        raise FormatError(f"{path}: trailing bytes after offset {rd.off}")
    return bundle
