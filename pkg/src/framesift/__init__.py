"""framesift: interactive multimodal video retrieval.

Keyframe near-duplicate removal, multi-space embedding search (flat, IVF,
IVF-PQ), object-class filtering, late fusion across models, and an HTTP
search console backend — all deterministic and reproducible by seed.
"""

from .catalog import (
    CLIP_LEN,
    Catalog,
    ClipRecord,
    FrameMeta,
    FrameRecord,
    ModelSpace,
    VideoInfo,
    build_catalog,
    neighbors,
)
from .config import ServiceConfig, load_config
from .dedup import DedupConfig, DedupReport, cosine, dedup_catalog, dedup_video
from .engine import SearchEngine, SearchRequest, color_index
from .errors import (
    EmbedderError,
    FormatError,
    FramesiftError,
    IngestError,
    NotFoundError,
)
from .fusion import FusedHit, ScoreVector, expand_clips, fuse_sum, fuse_unique
from .objects import (
    ClassVocabulary,
    ObjectStore,
    QueryClassVector,
    classes_from_text,
    filter_frames,
)
from .service import create_app
from .store import (
    EmbeddingMatrix,
    SubmissionLog,
    load_catalog,
    normalize_rows,
    read_emb,
    run_ingest,
    save_catalog,
    write_emb,
)
from .vindex import (
    IndexBundle,
    encode_pq,
    load_index,
    save_index,
    search_flat,
    search_ivf,
    search_ivfpq,
    train_ivf,
    train_pq,
)

__version__ = "0.1.0"

__all__ = [
    "CLIP_LEN",
    "Catalog",
    "ClassVocabulary",
    "ClipRecord",
    "DedupConfig",
    "DedupReport",
    "EmbedderError",
    "EmbeddingMatrix",
    "FormatError",
    "FrameMeta",
    "FrameRecord",
    "FramesiftError",
    "FusedHit",
    "IndexBundle",
    "IngestError",
    "ModelSpace",
    "NotFoundError",
    "ObjectStore",
    "QueryClassVector",
    "ScoreVector",
    "SearchEngine",
    "SearchRequest",
    "ServiceConfig",
    "SubmissionLog",
    "VideoInfo",
    "build_catalog",
    "classes_from_text",
    "color_index",
    "cosine",
    "create_app",
    "dedup_catalog",
    "dedup_video",
    "encode_pq",
    "expand_clips",
    "filter_frames",
    "fuse_sum",
    "fuse_unique",
    "load_catalog",
    "load_config",
    "load_index",
    "neighbors",
    "normalize_rows",
    "read_emb",
    "run_ingest",
    "save_catalog",
    "save_index",
    "search_flat",
    "search_ivf",
    "search_ivfpq",
    "train_ivf",
    "train_pq",
    "write_emb",
    "__version__",
]
