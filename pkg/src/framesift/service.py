"""HTTP search console backend.

A thin FastAPI layer over SearchEngine: routes parse and validate transport,
the engine does the work.  Responses are plain dicts serialized with compact
separators, so identical requests produce byte-identical bodies.

Error mapping: ValueError 400, NotFoundError 404, EmbedderError 502,
FormatError 500, engine not loaded 503.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict

from .config import ServiceConfig
from .engine import SearchEngine, SearchRequest
from .errors import EmbedderError, FormatError, FramesiftError, NotFoundError


class SearchBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    spaces: list[str] | None = None
    query_text: str | None = None
    query_vectors: dict[str, list[float]] | None = None
    fusion: str = "sum"
    normalization: str = "none"
    t: int | None = None
    object_classes: list[int] | None = None
    classes_from_text: bool = False
    match_mode: str = "all"
    include_deduped: bool = False
    include_timings: bool = True

    def to_request(self) -> SearchRequest:
        return SearchRequest(
            spaces=self.spaces,
            query_text=self.query_text,
            query_vectors=self.query_vectors,
            fusion=self.fusion,
            normalization=self.normalization,
            t=self.t,
            object_classes=self.object_classes,
            classes_from_text=self.classes_from_text,
            match_mode=self.match_mode,
            include_deduped=self.include_deduped,
            include_timings=self.include_timings,
        )


class SubmissionBody(BaseModel):
    model_config = ConfigDict(extra="forbid")

    frame_id: int
    query_text: str = ""


def create_app(
    catalog_dir: str | Path,
    config: ServiceConfig | None = None,
    engine: SearchEngine | None = None,
) -> FastAPI:
    """Build the app; without a catalog at catalog_dir it serves 503s until one exists."""
    config = config if config is not None else ServiceConfig()
    app = FastAPI(title="framesift", docs_url=None, redoc_url=None, openapi_url=None)

    if engine is None:
        try:
            engine = SearchEngine(catalog_dir, config)
        except NotFoundError:
            engine = None
    app.state.engine = engine
    app.state.config = config

    class ServiceUnavailable(FramesiftError):
        pass

    def need_engine() -> SearchEngine:
        if app.state.engine is None:
            raise ServiceUnavailable(f"no catalog loaded from {catalog_dir}")
        return app.state.engine

    @app.exception_handler(ServiceUnavailable)
    async def _unavailable(_req: Request, exc: ServiceUnavailable):
        return JSONResponse({"error": str(exc)}, status_code=503)

    @app.exception_handler(ValueError)
    async def _bad_request(_req: Request, exc: ValueError):
        return JSONResponse({"error": str(exc)}, status_code=400)

    @app.exception_handler(NotFoundError)
    async def _not_found(_req: Request, exc: NotFoundError):
        return JSONResponse({"error": str(exc)}, status_code=404)

    @app.exception_handler(EmbedderError)
    async def _bad_upstream(_req: Request, exc: EmbedderError):
        return JSONResponse({"error": str(exc)}, status_code=502)

    @app.exception_handler(FormatError)
    async def _corrupt(_req: Request, exc: FormatError):
        return JSONResponse({"error": str(exc)}, status_code=500)

    @app.get("/api/health")
    async def health():
        if app.state.engine is None:
            return JSONResponse(
                {"status": "unavailable", "error": "no catalog loaded"}, status_code=503
            )
        return JSONResponse(app.state.engine.health())

    @app.post("/api/search")
    async def search(body: SearchBody):
        return JSONResponse(need_engine().search(body.to_request()))

    @app.get("/api/frames/{frame_id}/neighbors")
    async def neighbors(frame_id: int, radius: int | None = None):
        return JSONResponse(need_engine().neighbors(frame_id, radius))

    @app.post("/api/submissions", status_code=201)
    async def submit(body: SubmissionBody):
        rec = need_engine().submit(body.frame_id, body.query_text)
        return JSONResponse(rec.to_dict(), status_code=201)

    @app.get("/api/submissions")
    async def submissions():
        eng = need_engine()
        return JSONResponse({"submissions": [r.to_dict() for r in eng.submissions.list()]})

    @app.get("/api/catalog")
    async def catalog_summary():
        return JSONResponse(need_engine().catalog_summary())

    @app.get("/api/spaces")
    async def spaces():
        return JSONResponse({"spaces": need_engine().spaces_summary()})

    @app.get("/api/videos/{video_id}/transcript")
    async def transcript(video_id: str):
        segs = need_engine().transcript(video_id)
        return JSONResponse(
            {
                "video_id": video_id,
                "segments": [
                    {"start_ms": s.start_ms, "end_ms": s.end_ms, "text": s.text} for s in segs
                ],
            }
        )

    if config.media_root and Path(config.media_root).is_dir():
        app.mount("/media", StaticFiles(directory=config.media_root), name="media")
    if config.frontend_dist and Path(config.frontend_dist).is_dir():
        app.mount("/", StaticFiles(directory=config.frontend_dist, html=True), name="console")
    else:

        @app.get("/")
        async def root():
            return JSONResponse({"service": "framesift", "api": "/api"})

    return app
