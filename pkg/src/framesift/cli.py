"""Command-line front end: ingest, dedup, build-index, search, serve.

Machine-first output: every stdout line is a JSON object unless --pretty is
given.  Failures print one JSON error line to stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .config import ServiceConfig, load_config
from .dedup import DEFAULT_DELTA, DedupConfig, dedup_catalog
from .engine import SearchEngine, SearchRequest
from .errors import FramesiftError
from .store import (
    INDEXES_DIR,
    EmbeddingMatrix,
    load_catalog,
    read_emb,
    run_ingest,
    save_catalog,
    space_emb_path,
)
from .vindex import (
    KIND_FLAT,
    KIND_IVF,
    KIND_IVFPQ,
    IndexBundle,
    encode_pq,
    save_index,
    train_ivf,
    train_pq,
)


def _emit(obj: dict) -> None:
    sys.stdout.write(json.dumps(obj, ensure_ascii=False) + "\n")


def _fail(message: str) -> int:
    sys.stderr.write(json.dumps({"error": message}, ensure_ascii=False) + "\n")
    return 1


def _table(rows: list[dict], columns: list[str]) -> str:
    widths = {c: max(len(c), *(len(str(r.get(c, ""))) for r in rows)) if rows else len(c) for c in columns}
    lines = [
        "  ".join(c.ljust(widths[c]) for c in columns),
        "  ".join("-" * widths[c] for c in columns),
    ]
    for r in rows:
        lines.append("  ".join(str(r.get(c, "")).ljust(widths[c]) for c in columns))
    return "\n".join(lines)


# --- subcommands ---


def cmd_ingest(args: argparse.Namespace) -> int:
    result = run_ingest(args.manifest, args.out)
    catalog = result.catalog
    _emit(
        {
            "catalog_dir": str(result.catalog_dir),
            "videos": len(catalog.videos),
            "frames": catalog.frame_count,
            "clips": catalog.clip_count,
            "spaces": [s.space_id for s in catalog.spaces],
            "zero_rows": {sid: len(rows) for sid, rows in result.zero_rows.items() if rows},
            "warnings": result.warnings,
        }
    )
    return 0


def cmd_dedup(args: argparse.Namespace) -> int:
    catalog = load_catalog(args.catalog)
    space = catalog.space(args.space)
    rows = read_emb(space_emb_path(args.catalog, space.space_id))
    matrix = EmbeddingMatrix(space_id=space.space_id, rows=rows)
    report = dedup_catalog(catalog, matrix, DedupConfig(space_id=space.space_id, delta=args.delta))
    save_catalog(catalog, args.catalog)
    if args.pretty:
        rows_out = [
            {"video_id": v.video_id, "kept": len(v.kept), "removed": len(v.removed)}
            for v in report.videos
        ]
        print(_table(rows_out, ["video_id", "kept", "removed"]))
    summary = report.to_dict()
    summary.pop("videos", None)
    _emit(summary)
    return 0


def _default_nlist(count: int) -> int:
    return max(1, min(count, round(math.sqrt(count))))


def cmd_build_index(args: argparse.Namespace) -> int:
    catalog = load_catalog(args.catalog)
    space = catalog.space(args.space)
    rows = read_emb(space_emb_path(args.catalog, space.space_id))
    matrix = EmbeddingMatrix(space_id=space.space_id, rows=rows)
    kind = args.kind
    nlist = args.nlist if args.nlist is not None else _default_nlist(matrix.count)
    nprobe = args.nprobe if args.nprobe is not None else min(16, nlist)
    bundle = IndexBundle(
        kind=kind, space_id=space.space_id, dim=matrix.dim, count=matrix.count, nprobe=nprobe
    )
    if kind in (KIND_IVF, KIND_IVFPQ):
        bundle.ivf = train_ivf(matrix, nlist, seed=args.seed, iters=args.iters)
    if kind == KIND_IVFPQ:
        if args.m is not None:
            m = args.m
        elif matrix.dim % 8 == 0:
            m = matrix.dim // 8
        else:
            raise ValueError(f"dim {matrix.dim} is not divisible by 8; pass --m explicitly")
        bundle.pq = train_pq(matrix, m, seed=args.seed, iters=args.iters)
        bundle.codes = encode_pq(bundle.pq, matrix)
    out_dir = Path(args.catalog) / INDEXES_DIR
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{space.space_id}.vidx"
    save_index(out_path, bundle)
    _emit(
        {
            "index_path": str(out_path),
            "space_id": space.space_id,
            "kind": kind,
            "rows": matrix.count,
            "dim": matrix.dim,
            "nlist": bundle.ivf.k if bundle.ivf else None,
            "nprobe": nprobe if kind != KIND_FLAT else None,
            "m": bundle.pq.m if bundle.pq else None,
            "seed": args.seed if kind != KIND_FLAT else None,
        }
    )
    return 0


def _parse_query_vectors(raw: str) -> dict[str, list[float]]:
    text = raw if raw.lstrip().startswith("{") else Path(raw).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"--query-vec: invalid JSON ({exc.msg})") from None
    if not isinstance(doc, dict) or not all(isinstance(v, list) for v in doc.values()):
        raise ValueError('--query-vec: expected {"space_id": [floats, ...], ...}')
    return doc


def cmd_search(args: argparse.Namespace) -> int:
    if args.query_text is None and args.query_vec is None:
        raise ValueError("pass --query-text and/or --query-vec")
    config = load_config(args.config) if args.config else ServiceConfig()
    engine = SearchEngine(args.catalog, config)
    req = SearchRequest(
        spaces=args.spaces.split(",") if args.spaces else None,
        query_text=args.query_text,
        query_vectors=_parse_query_vectors(args.query_vec) if args.query_vec else None,
        fusion=args.fusion,
        normalization=args.normalization,
        t=args.top,
        object_classes=[int(c) for c in args.object_classes.split(",")]
        if args.object_classes
        else None,
        classes_from_text=args.classes_from_text,
        match_mode=args.match_mode,
        include_deduped=args.include_deduped,
        include_timings=False,
    )
    response = engine.search(req)
    hits = [
        {**hit, "video_id": group["video_id"], "color_index": group["color_index"]}
        for group in response["groups"]
        for hit in group["hits"]
    ]
    hits.sort(key=lambda h: h["rank"])
    if args.pretty:
        cols = ["rank", "frame_id", "video_id", "score", "timestamp_ms", "spaces"]
        rows = [{**h, "score": f"{h['score']:.6f}", "spaces": ",".join(h["spaces"])} for h in hits]
        print(_table(rows, cols))
    else:
        for h in hits:
            _emit(h)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    config = load_config(args.config) if args.config else load_config(None)
    if args.host:
        config.host = args.host
    if args.port is not None:
        config.port = args.port
    app = create_app(args.catalog, config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


# --- parser wiring ---


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="framesift",
        description="Interactive multimodal video retrieval: ingest, dedup, index, search, serve.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="compile a manifest into a catalog directory")
    p.add_argument("--manifest", required=True, help="manifest JSON path")
    p.add_argument("--out", required=True, help="catalog directory to create")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("dedup", help="mark near-duplicate frames in one embedding space")
    p.add_argument("--catalog", required=True)
    p.add_argument("--space", required=True, help="frame-granularity space to measure in")
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA, help="cosine threshold")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_dedup)

    p = sub.add_parser("build-index", help="train and persist a search index for one space")
    p.add_argument("--catalog", required=True)
    p.add_argument("--space", required=True)
    p.add_argument("--kind", choices=[KIND_FLAT, KIND_IVF, KIND_IVFPQ], required=True)
    p.add_argument("--nlist", type=int, default=None, help="IVF cells (default sqrt(N))")
    p.add_argument("--nprobe", type=int, default=None, help="cells probed at query time")
    p.add_argument("--m", type=int, default=None, help="PQ subspaces (default dim/8)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iters", type=int, default=25, help="k-means iterations")
    p.set_defaults(func=cmd_build_index)

    p = sub.add_parser("search", help="run one query against a catalog")
    p.add_argument("--catalog", required=True)
    p.add_argument("--spaces", default=None, help="comma-separated space ids (default: all)")
    p.add_argument("--query-text", default=None)
    p.add_argument("--query-vec", default=None, help='JSON or path: {"space_id": [floats]}')
    p.add_argument("--fusion", choices=["sum", "unique"], default="sum")
    p.add_argument("--normalization", choices=["none", "minmax"], default="none")
    p.add_argument("--top", type=int, default=None, help="result count T (default 100)")
    p.add_argument("--object-classes", default=None, help="comma-separated class ids")
    p.add_argument("--classes-from-text", action="store_true")
    p.add_argument("--match-mode", choices=["all", "any"], default="all")
    p.add_argument("--include-deduped", action="store_true")
    p.add_argument("--config", default=None, help="service config JSON")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("serve", help="run the HTTP search console backend")
    p.add_argument("--catalog", required=True)
    p.add_argument("--config", default=None, help="service config JSON")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FramesiftError, ValueError, OSError) as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
