"""Read-only HTTP query layer over a corpus store.

Every endpoint is idempotent; derived models are computed lazily and
cached by the store under a single-flight guarantee.  Errors use one
envelope: {"code", "message", "path"}.
"""

from __future__ import annotations

from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.responses import FileResponse, JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from . import analytics, fusion, projection, prosody, wire
from .ingest import CorpusStore
from .model import EmotionCategory

STAGES = ("face-text", "text-audio")


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message


def _not_found(message: str) -> ApiError:
    return ApiError(404, "not_found", message)


def _usage(message: str) -> ApiError:
    return ApiError(400, "usage", message)


# -- selection request body --------------------------------------------------


class LinkSelector(BaseModel):
    stage: str
    source: str = Field(alias="from")
    target: str = Field(alias="to")


class NodeSelector(BaseModel):
    channel: str
    category: str


class BrushRectangle(BaseModel):
    x0: float
    y0: float
    x1: float
    y1: float


class ProjectionQuery(BaseModel):
    mode: str = projection.CONCAT
    perplexity: float = projection.DEFAULT_PERPLEXITY
    iterations: int = projection.DEFAULT_ITERATIONS
    seed: int = 0


class SelectionRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    link: LinkSelector | None = None
    node: NodeSelector | None = None
    segment_id: int | None = Field(default=None, alias="segmentId")
    brush: BrushRectangle | None = None
    projection: ProjectionQuery | None = None  # parameters for brush resolution


class ModelService:
    """Derived-model access with caching; shared by HTTP and the CLI."""

    def __init__(self, store: CorpusStore, min_hold_frames: int = fusion.DEFAULT_MIN_HOLD_FRAMES):
        self.store = store
        self.min_hold_frames = min_hold_frames

    def video(self, video_id: str):
        try:
            return self.store.get(video_id)
        except KeyError:
            raise _not_found(f"unknown video {video_id!r}") from None

    def fusions(self, video_id: str) -> tuple[fusion.SentenceFusion, ...]:
        video = self.video(video_id)
        return self.store.derived(
            video_id,
            "fusions",
            {"minHoldFrames": self.min_hold_frames},
            lambda: fusion.fuse_video(video, self.min_hold_frames),
        )

    def prosody_series(self, video_id: str) -> dict[str, prosody.ProsodySeries] | None:
        video = self.video(video_id)
        if video.audio is None:
            return None
        return self.store.derived(
            video_id, "prosody", {}, lambda: prosody.extract_all(video.audio)
        )

    def summary(self, video_id: str) -> dict[str, Any]:
        video = self.video(video_id)
        return self.store.derived(
            video_id,
            "summary",
            {},
            lambda: wire.summary_body(analytics.build_summary(video, self.fusions(video_id))),
            cache_json=True,
        )

    def sankey(self, video_id: str) -> dict[str, Any]:
        video = self.video(video_id)
        return self.store.derived(
            video_id,
            "sankey",
            {},
            lambda: wire.sankey_body(
                analytics.build_sankey(video, self.fusions(video_id), self.prosody_series(video_id))
            ),
            cache_json=True,
        )

    def projection(self, video_id: str, params: projection.ProjectionParams) -> dict[str, Any]:
        video = self.video(video_id)
        if params.mode not in projection.VECTOR_MODES:
            raise _usage(f"unknown projection mode {params.mode!r}")
        return self.store.derived(
            video_id,
            "projection",
            {
                "mode": params.mode,
                "perplexity": params.perplexity,
                "iterations": params.iterations,
                "seed": params.seed,
                "learningRate": params.learning_rate,
            },
            lambda: wire.projection_body(
                projection.build_projection(video, self.fusions(video_id), params)
            ),
            cache_json=True,
        )

    def words(self, video_id: str, sort_key: str, query: str) -> dict[str, Any]:
        video = self.video(video_id)
        word_fusions = self.store.derived(
            video_id, "wordFusions", {}, lambda: fusion.fuse_words(video)
        )
        try:
            stats = analytics.word_table(word_fusions, sort_key, query)
        except analytics.UsageError as exc:
            raise _usage(str(exc)) from None
        return wire.words_body(video_id, stats)

    def sentence(self, video_id: str, segment_id: int) -> dict[str, Any]:
        video = self.video(video_id)
        if not (0 <= segment_id < len(video.segments)):
            raise _not_found(f"video {video_id!r} has no sentence {segment_id}")
        series = self.prosody_series(video_id)
        span = video.segments[segment_id].span
        slices = (
            None
            if series is None
            else {k: prosody.slice_series(s, span) for k, s in series.items()}
        )
        return wire.sentence_body(video, self.fusions(video_id), segment_id, slices)

    def list_videos(self, sort_key: str, order: str | None, query: str) -> list[dict[str, Any]]:
        summaries = [self.summary(vid) for vid in self.store.ids()]
        if query:
            q = query.lower()
            summaries = [
                s for s in summaries if q in s["title"].lower() or q in s["category"].lower()
            ]

        def metric(s: dict[str, Any], key: str):
            if key == "coherence":
                return s["metrics"]["coherenceScore"]
            if key == "diversity":
                return s["metrics"]["diversity"]
            if key.startswith("percentage:"):
                parts = key.split(":")
                if len(parts) != 3:
                    raise _usage("percentage sort key is percentage:<channel>:<category>")
                _, channel, category = parts
                if channel not in analytics.CHANNELS:
                    raise _usage(f"unknown channel {channel!r}")
                try:
                    EmotionCategory(category)
                except ValueError:
                    raise _usage(f"unknown category {category!r}") from None
                return s["metrics"]["percentage"][channel].get(category, 0.0)
            raise _usage(f"unknown sort key {key!r}")

        if order not in (None, "asc", "desc"):
            raise _usage(f"order must be asc or desc, not {order!r}")
        if sort_key == "title":
            reverse = order == "desc"
            summaries.sort(key=lambda s: (s["title"], s["videoId"]), reverse=reverse)
        else:
            reverse = order != "asc"  # metrics default to descending
            present = [s for s in summaries if metric(s, sort_key) is not None]
            missing = [s for s in summaries if metric(s, sort_key) is None]
            present.sort(key=lambda s: s["videoId"])
            present.sort(key=lambda s: metric(s, sort_key), reverse=reverse)
            missing.sort(key=lambda s: s["videoId"])
            summaries = present + missing
        return summaries

    def resolve_selection(self, video_id: str, request: SelectionRequest) -> list[int]:
        self.video(video_id)
        selectors = [
            s for s in (request.link, request.node, request.segment_id, request.brush)
            if s is not None
        ]
        if len(selectors) != 1:
            raise _usage("exactly one of link, node, segmentId or brush is required")

        if request.segment_id is not None:
            video = self.video(video_id)
            if not (0 <= request.segment_id < len(video.segments)):
                raise _not_found(f"video {video_id!r} has no sentence {request.segment_id}")
            return [request.segment_id]

        if request.brush is not None:
            q = request.projection or ProjectionQuery()
            body = self.projection(
                video_id,
                projection.ProjectionParams(
                    mode=q.mode, perplexity=q.perplexity, iterations=q.iterations, seed=q.seed
                ),
            )
            x_lo, x_hi = sorted((request.brush.x0, request.brush.x1))
            y_lo, y_hi = sorted((request.brush.y0, request.brush.y1))
            return [
                p["segmentId"]
                for p in body["points"]
                if x_lo <= p["x"] <= x_hi and y_lo <= p["y"] <= y_hi
            ]

        sankey = self.sankey(video_id)
        if request.link is not None:
            if request.link.stage not in STAGES:
                raise _not_found(f"unknown stage {request.link.stage!r}")
            self._category(request.link.source)
            self._category(request.link.target)
            links = sankey["links"]["faceText" if request.link.stage == "face-text" else "textAudio"]
            for link in links:
                if link["from"] == request.link.source and link["to"] == request.link.target:
                    return list(link["sentenceIds"])
            return []

        assert request.node is not None
        if request.node.channel not in analytics.CHANNELS:
            raise _not_found(f"unknown channel {request.node.channel!r}")
        self._category(request.node.category)
        for node in sankey["nodes"][request.node.channel]:
            if node["category"] == request.node.category:
                return list(node["sentenceIds"])
        return []

    @staticmethod
    def _category(name: str) -> EmotionCategory:
        try:
            return EmotionCategory(name)
        except ValueError:
            raise _not_found(f"unknown emotion category {name!r}") from None


# -- HTTP app -----------------------------------------------------------------


def create_app(store: CorpusStore) -> FastAPI:
    app = FastAPI(title="emoscope", docs_url=None, redoc_url=None)
    svc = ModelService(store)
    app.state.service = svc

    @app.exception_handler(ApiError)
    async def api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "path": request.url.path},
        )

    @app.get("/videos")
    def list_videos(sort: str = "title", order: str | None = None, q: str = ""):
        return svc.list_videos(sort, order, q)

    @app.get("/videos/{video_id}")
    def video_summary(video_id: str):
        return svc.summary(video_id)

    @app.get("/videos/{video_id}/sankey")
    def video_sankey(video_id: str):
        return svc.sankey(video_id)

    @app.get("/videos/{video_id}/projection")
    def video_projection(
        video_id: str,
        mode: str = projection.CONCAT,
        perplexity: float = projection.DEFAULT_PERPLEXITY,
        iterations: int = projection.DEFAULT_ITERATIONS,
        seed: int = 0,
    ):
        return svc.projection(
            video_id,
            projection.ProjectionParams(
                mode=mode, perplexity=perplexity, iterations=iterations, seed=seed
            ),
        )

    @app.get("/videos/{video_id}/sentences/{segment_id}")
    def video_sentence(video_id: str, segment_id: int):
        return svc.sentence(video_id, segment_id)

    @app.get("/videos/{video_id}/words")
    def video_words(video_id: str, sort: str = "frequency", q: str = ""):
        return svc.words(video_id, sort, q)

    @app.post("/videos/{video_id}/selection")
    def video_selection(video_id: str, request: SelectionRequest):
        return {"videoId": video_id, "sentenceIds": svc.resolve_selection(video_id, request)}

    @app.get("/media/{video_id}")
    def media(video_id: str, request: Request):
        svc.video(video_id)
        path = store.media_path(video_id)
        if path is None:
            raise _not_found(f"video {video_id!r} has no media file")
        size = path.stat().st_size
        range_header = request.headers.get("range")
        if not range_header:
            return FileResponse(path, media_type="audio/wav", headers={"Accept-Ranges": "bytes"})
        try:
            unit, _, spec = range_header.partition("=")
            if unit.strip() != "bytes":
                raise ValueError
            start_s, _, end_s = spec.strip().partition("-")
            start = int(start_s) if start_s else 0
            end = int(end_s) if end_s else size - 1
        except ValueError:
            raise _usage(f"malformed Range header {range_header!r} ") from None
        if start >= size:
            return Response(
                status_code=416, headers={"Content-Range": f"bytes */{size}"}
            )
        end = min(end, size - 1)
        with open(path, "rb") as fh:
            fh.seek(start)
            chunk = fh.read(end - start + 1)
        return Response(
            content=chunk,
            status_code=206,
            media_type="audio/wav",
            headers={
                "Content-Range": f"bytes {start}-{end}/{size}",
                "Accept-Ranges": "bytes",
            },
        )

    return app
