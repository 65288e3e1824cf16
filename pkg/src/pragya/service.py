"""HTTP API binding the pipeline into a deployable service.

All state (corpus, both indexes) is built or loaded at startup and immutable
afterwards; request handling is freely concurrent. Every 4xx/5xx body is
``{"error": {"code", "message"}}`` and every response carries the corpus
content hash so clients can detect corpus swaps.
"""

from __future__ import annotations

import datetime
import os
import socket
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .corpus import Corpus, corpus_digest, load_corpus, verses_by_tag
from .embedding import Embedder, EmbedderConfig
from .errors import PragyaError
from .keyword_index import KeywordIndex, build_keyword_index
from .rag import (
    Generator,
    GeneratorConfig,
    Pipeline,
    QueryRequest,
    VersePresentation,
    answer_query,
    daily_verse,
    index_corpus,
)
from .vector_index import VectorIndex, load_index, save_index

ENV_PORT = "PRAGYA_PORT"
ENV_CORPUS = "PRAGYA_CORPUS"
ENV_EMBED_URL = "PRAGYA_EMBED_URL"
ENV_EMBED_MODEL = "PRAGYA_EMBED_MODEL"
ENV_GEN_URL = "PRAGYA_GEN_URL"
ENV_GEN_MODEL = "PRAGYA_GEN_MODEL"

CORPUS_HASH_HEADER = "X-Pragya-Corpus-Hash"
SHUTDOWN_GRACE_SECONDS = 5


class StartupError(PragyaError):
    code = "startup_error"


def bundled_corpus_path() -> Path:
    """Path of the sample corpus shipped with the package."""
    return Path(resources.files("pragya").joinpath("data/sample_corpus.csv"))


def bundled_queries_path() -> Path:
    """Path of the sample judged-query set shipped with the package."""
    return Path(resources.files("pragya").joinpath("data/sample_queries.csv"))


@dataclass(frozen=True)
class ServiceConfig:
    corpus_path: Path
    index_path: Path | None = None
    port: int = 8080
    embedder: EmbedderConfig = EmbedderConfig.hashing()
    generator: GeneratorConfig | None = None
    cors_allowed_origin: str = "*"

    def __post_init__(self):
        if not 1 <= self.port <= 65535:
            raise StartupError(f"port {self.port} out of range")


def _parse_config_file(path: Path) -> dict[str, str]:
    """Parse a flat TOML-style ``key = value`` file (comments with #)."""
    values: dict[str, str] = {}
    for line_num, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise StartupError(f"{path}:{line_num}: expected key = value")
        key, _, value = line.partition("=")
        value = value.strip().strip("\"'")
        values[key.strip()] = value
    return values


def load_service_config(
    config_file: Path | None = None,
    env: Mapping[str, str] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> ServiceConfig:
    """Resolve configuration: flags override env, env overrides file."""
    env = os.environ if env is None else env
    settings: dict[str, Any] = {}
    if config_file is not None:
        if not config_file.is_file():
            raise StartupError(f"config file not found: {config_file}")
        settings.update(_parse_config_file(config_file))
    env_map = {
        "port": env.get(ENV_PORT),
        "corpus": env.get(ENV_CORPUS),
        "embed_url": env.get(ENV_EMBED_URL),
        "embed_model": env.get(ENV_EMBED_MODEL),
        "gen_url": env.get(ENV_GEN_URL),
        "gen_model": env.get(ENV_GEN_MODEL),
    }
    settings.update({k: v for k, v in env_map.items() if v})
    if overrides:
        settings.update({k: v for k, v in overrides.items() if v is not None})

    try:
        port = int(settings.get("port", 8080))
    except ValueError as exc:
        raise StartupError(f"port is not an integer: {settings['port']!r}") from exc

    corpus_path = Path(settings["corpus"]) if settings.get("corpus") else bundled_corpus_path()

    kind = settings.get("embedder", "remote" if settings.get("embed_url") else "hashing")
    try:
        if kind == "remote":
            if not settings.get("embed_url") or not settings.get("embed_model"):
                raise StartupError("remote embedder needs embed_url and embed_model")
            embedder = EmbedderConfig(
                kind="remote",
                endpoint_url=settings["embed_url"],
                model_name=settings["embed_model"],
            )
        elif kind == "hashing":
            embedder = EmbedderConfig.hashing(dim=int(settings.get("embed_dim", 256)))
        else:
            raise StartupError(f"unknown embedder kind {kind!r}")
    except ValueError as exc:
        raise StartupError(str(exc)) from exc

    generator = None
    if settings.get("gen_url") and settings.get("gen_model"):
        generator = GeneratorConfig(
            endpoint_url=settings["gen_url"], model_name=settings["gen_model"]
        )

    return ServiceConfig(
        corpus_path=corpus_path,
        index_path=Path(settings["index"]) if settings.get("index") else None,
        port=port,
        embedder=embedder,
        generator=generator,
        cors_allowed_origin=settings.get("cors_origin", "*"),
    )


@dataclass(frozen=True)
class BuildInfo:
    corpus_hash: str
    built_at: str


@dataclass
class AppState:
    corpus: Corpus
    vector_index: VectorIndex
    keyword_index: KeywordIndex
    pipeline: Pipeline
    config: ServiceConfig
    build_info: BuildInfo


def build_state(config: ServiceConfig) -> AppState:
    """Load the corpus and build or load both indexes."""
    try:
        corpus = load_corpus(config.corpus_path)
    except PragyaError as exc:
        raise StartupError(f"cannot load corpus: {exc}") from exc

    embedder = Embedder(config.embedder)
    if config.index_path is not None and config.index_path.exists():
        vector_index = load_index(config.index_path)
        stored = set(int(i) for i in vector_index.ids)
        expected = set(v.id for v in corpus.verses)
        if stored != expected:
            raise StartupError(
                f"index at {config.index_path} does not cover this corpus "
                f"({len(stored)} indexed ids vs {len(expected)} verses)"
            )
    else:
        vector_index = index_corpus(corpus, embedder)
        if config.index_path is not None:
            save_index(vector_index, config.index_path)

    keyword_index = build_keyword_index(corpus)
    generator = Generator(config.generator) if config.generator else None
    pipeline = Pipeline(
        corpus=corpus,
        vector_index=vector_index,
        keyword_index=keyword_index,
        embedder=embedder,
        generator=generator,
    )
    build_info = BuildInfo(
        corpus_hash=corpus_digest(corpus),
        built_at=datetime.datetime.now(datetime.timezone.utc).isoformat(),
    )
    return AppState(
        corpus=corpus,
        vector_index=vector_index,
        keyword_index=keyword_index,
        pipeline=pipeline,
        config=config,
        build_info=build_info,
    )


def _error_body(code: str, message: str) -> dict:
    return {"error": {"code": code, "message": message}}


_STATUS_BY_CODE = {
    "empty_query": 400,
    "unknown_verse": 404,
    "missing_file": 404,
}


def create_app(state: AppState) -> FastAPI:
    app = FastAPI(title="pragya", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[state.config.cors_allowed_origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.middleware("http")
    async def add_corpus_hash(request: Request, call_next):
        response = await call_next(request)
        response.headers[CORPUS_HASH_HEADER] = state.build_info.corpus_hash
        return response

    @app.exception_handler(PragyaError)
    async def handle_domain_error(request: Request, exc: PragyaError):
        status = _STATUS_BY_CODE.get(exc.code, 400)
        return JSONResponse(status_code=status, content=_error_body(exc.code, str(exc)))

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content=_error_body("invalid_request", str(exc.errors())),
        )

    @app.exception_handler(Exception)
    async def handle_unexpected(request: Request, exc: Exception):
        return JSONResponse(
            status_code=500, content=_error_body("internal", str(exc))
        )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "verses": len(state.corpus)}

    @app.post("/api/query")
    def query(body: dict) -> dict:
        if not isinstance(body, dict):
            return JSONResponse(
                status_code=400,
                content=_error_body("invalid_request", "body must be a JSON object"),
            )
        try:
            request = QueryRequest(
                text=str(body.get("text", "")),
                k=int(body.get("k", 3)),
                mode=body.get("mode", "semantic"),
                generate=bool(body.get("generate", True)),
            )
        except (ValueError, TypeError) as exc:
            return JSONResponse(
                status_code=400, content=_error_body("invalid_request", str(exc))
            )
        response = answer_query(request, state.pipeline)
        return response.to_dict()

    def present(record) -> dict:
        return VersePresentation.from_verse(record, score=1.0, rank=1).to_dict(
            include_ranking=False
        )

    @app.get("/api/verses/{verse_id}")
    def verse(verse_id: int) -> dict:
        return present(state.corpus.verse(verse_id))

    @app.get("/api/verses")
    def verses(tag: str = "") -> list[dict]:
        matches = verses_by_tag(state.corpus, tag.lower()) if tag else list(state.corpus.verses)
        return [present(v) for v in matches]

    @app.get("/api/tags")
    def tags() -> list[dict]:
        return [
            {"tag": tag, "count": count}
            for tag, count in sorted(state.corpus.tag_counts.items())
        ]

    @app.get("/api/daily")
    def daily() -> dict:
        presentation = daily_verse(state.corpus, datetime.date.today())
        return presentation.to_dict()

    return app


def _check_port_free(port: int) -> None:
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as probe:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            probe.bind(("0.0.0.0", port))
        except OSError as exc:
            raise StartupError(f"port {port} is busy: {exc}") from exc


def serve(config: ServiceConfig) -> None:
    """Build state and run the HTTP server until terminated."""
    import uvicorn

    state = build_state(config)
    _check_port_free(config.port)
    app = create_app(state)
    uvicorn.run(
        app,
        host="0.0.0.0",
        port=config.port,
        timeout_graceful_shutdown=SHUTDOWN_GRACE_SECONDS,
        log_level="info",
    )
