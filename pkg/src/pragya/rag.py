"""End-to-end query pipeline: retrieve, present, and (optionally) explain.

Retrieval is primary and generation is additive: a failed or unconfigured
generation service degrades the response to retrieval-only output (results
intact, ``explanation`` absent, ``degraded`` set) instead of failing the
query.
"""

from __future__ import annotations

import datetime
import os
import threading
import time
from dataclasses import dataclass
from typing import Literal

import httpx

from .corpus import Corpus, EmptyCorpus, UnknownVerseId, VerseRecord, iter_chunks
from .embedding import Embedder, fnv1a_64
from .errors import PragyaError, RemoteMalformed, RemoteUnavailable
from .keyword_index import KeywordIndex, keyword_search
from .transliteration import transliterate
from .vector_index import ScoredHit, VectorIndex, build_index, search

ENV_GEN_URL = "PRAGYA_GEN_URL"
ENV_GEN_MODEL = "PRAGYA_GEN_MODEL"

MAX_K = 20
MAX_INFLIGHT_GENERATIONS = 2  # local LLM servers serialize poorly

DEFAULT_PROMPT_TEMPLATE = (
    "You are a Sanskrit scholar. A user asks: {query}\n"
    "Relevant Subhāṣitas:\n"
    "{verses}\n"
    "Explain in 3-5 sentences how these verses address the user's question, "
    "in modern, accessible language."
)

Mode = Literal["semantic", "keyword"]


class RagError(PragyaError):
    code = "rag_error"


class EmptyQuery(RagError):
    code = "empty_query"


class IndexCorpusMismatch(RagError):
    code = "index_corpus_mismatch"


class NoVerses(RagError):
    code = "no_verses"


class BadTemplate(RagError):
    code = "bad_template"


class EmptyGeneration(RagError):
    code = "empty_generation"


@dataclass(frozen=True)
class QueryRequest:
    text: str
    k: int = 3
    mode: Mode = "semantic"
    generate: bool = True

    def __post_init__(self):
        if not self.text or not self.text.strip():
            raise EmptyQuery("query text is empty")
        if not 1 <= self.k <= MAX_K:
            raise ValueError(f"k must be in 1..{MAX_K}, got {self.k}")
        if self.mode not in ("semantic", "keyword"):
            raise ValueError(f"unknown retrieval mode {self.mode!r}")


@dataclass(frozen=True)
class VersePresentation:
    """One retrieved verse ready for display: original text, transliteration,
    both translations, tags, and its ranking."""

    verse_id: int
    devanagari: str
    iast: str
    marathi: str
    english: str
    tags: tuple[str, ...]
    score: float
    rank: int

    @classmethod
    def from_verse(cls, verse: VerseRecord, score: float, rank: int) -> "VersePresentation":
        return cls(
            verse_id=verse.id,
            devanagari=verse.devanagari,
            iast=transliterate(verse.devanagari),
            marathi=verse.marathi,
            english=verse.english,
            tags=verse.tags,
            score=score,
            rank=rank,
        )

    def to_dict(self, include_ranking: bool = True) -> dict:
        data = {
            "verse_id": self.verse_id,
            "devanagari": self.devanagari,
            "iast": self.iast,
            "marathi": self.marathi,
            "english": self.english,
            "tags": list(self.tags),
        }
        if include_ranking:
            data["score"] = self.score
            data["rank"] = self.rank
        return data


@dataclass(frozen=True)
class RagResponse:
    results: tuple[VersePresentation, ...]
    explanation: str | None
    retrieval_ms: float
    generation_ms: float | None
    mode: str
    degraded: bool = False

    def to_dict(self) -> dict:
        data = {
            "results": [r.to_dict() for r in self.results],
            "retrieval_ms": self.retrieval_ms,
            "mode": self.mode,
            "degraded": self.degraded,
        }
        if self.explanation is not None:
            data["explanation"] = self.explanation
        if self.generation_ms is not None:
            data["generation_ms"] = self.generation_ms
        return data


@dataclass(frozen=True)
class GeneratorConfig:
    endpoint_url: str
    model_name: str
    timeout: float = 60.0
    max_context_verses: int | None = None  # None: use the request's k
    prompt_template: str = DEFAULT_PROMPT_TEMPLATE

    def __post_init__(self):
        _check_template(self.prompt_template)

    @classmethod
    def from_env(cls, **kwargs) -> "GeneratorConfig | None":
        """Config from PRAGYA_GEN_URL / PRAGYA_GEN_MODEL, or None if unset."""
        url = os.environ.get(ENV_GEN_URL)
        model = os.environ.get(ENV_GEN_MODEL)
        if not url or not model:
            return None
        return cls(endpoint_url=url, model_name=model, **kwargs)


def _check_template(template: str) -> None:
    for placeholder in ("{query}", "{verses}"):
        if placeholder not in template:
            raise BadTemplate(f"prompt template is missing {placeholder}")


def build_prompt(
    query: str,
    verses: list[VersePresentation],
    template: str = DEFAULT_PROMPT_TEMPLATE,
) -> str:
    """Render the generation prompt by literal placeholder substitution."""
    if not verses:
        raise NoVerses("cannot build a prompt with no verses")
    _check_template(template)
    lines = [
        f"Verse {v.rank} ({v.iast}): {v.devanagari} — English: {v.english}"
        for v in verses
    ]
    return template.replace("{query}", query).replace("{verses}", "\n".join(lines))


class Generator:
    """Client for the local generation server (one blocking call per prompt).

    Wire format: POST {endpoint_url}/api/generate with
    {"model", "prompt", "stream": false}; response {"response": "<text>"}.
    """

    def __init__(self, config: GeneratorConfig):
        self.config = config
        self._inflight = threading.BoundedSemaphore(MAX_INFLIGHT_GENERATIONS)
        self._client = httpx.Client(timeout=config.timeout)

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "Generator":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def generate(self, prompt: str) -> str:
        if not prompt:
            raise ValueError("prompt must be non-empty")
        url = self.config.endpoint_url.rstrip("/") + "/api/generate"
        payload = {"model": self.config.model_name, "prompt": prompt, "stream": False}
        try:
            with self._inflight:
                response = self._client.post(url, json=payload)
        except (httpx.ConnectError, httpx.TimeoutException) as exc:
            raise RemoteUnavailable(f"generation server unreachable: {exc}") from exc
        if 400 <= response.status_code < 500:
            raise RemoteMalformed(f"generation server returned HTTP {response.status_code}")
        if response.status_code != 200:
            raise RemoteUnavailable(f"generation server returned HTTP {response.status_code}")
        try:
            text = response.json()["response"]
        except (ValueError, KeyError, TypeError) as exc:
            raise RemoteMalformed(f"generation response is not valid JSON with 'response': {exc}") from exc
        if not isinstance(text, str):
            raise RemoteMalformed("generation response field 'response' is not a string")
        text = text.strip()
        if not text:
            raise EmptyGeneration("generation server returned blank text")
        return text


def generate_explanation(config: GeneratorConfig, prompt: str) -> str:
    """One-shot generation; prefer a long-lived Generator for repeated calls."""
    with Generator(config) as generator:
        return generator.generate(prompt)


@dataclass
class Pipeline:
    """Immutable dependency bundle the orchestrator runs over."""

    corpus: Corpus
    vector_index: VectorIndex | None = None
    keyword_index: KeywordIndex | None = None
    embedder: Embedder | None = None
    generator: Generator | None = None


def index_corpus(corpus: Corpus, embedder: Embedder) -> VectorIndex:
    """Embed every verse chunk and build the vector index over them."""
    chunks = list(iter_chunks(corpus))
    vectors = embedder.embed_batch([chunk.text for chunk in chunks])
    dim = vectors[0].dim if vectors else (embedder.dim or 0)
    return build_index(dim, list(zip((c.verse_id for c in chunks), vectors)))


def _retrieve(req: QueryRequest, pipe: Pipeline) -> list[ScoredHit]:
    if req.mode == "semantic":
        if pipe.embedder is None or pipe.vector_index is None:
            raise ValueError("semantic mode needs an embedder and a vector index")
        query_vector = pipe.embedder.embed(req.text)
        return search(pipe.vector_index, query_vector, req.k)
    if pipe.keyword_index is None:
        raise ValueError("keyword mode needs a keyword index")
    return keyword_search(pipe.keyword_index, req.text, req.k)


def answer_query(req: QueryRequest, pipe: Pipeline) -> RagResponse:
    """Run the full pipeline for one query.

    Embedder errors propagate (semantic mode); generation errors never do.
    """
    t_retrieve = time.perf_counter()
    hits = _retrieve(req, pipe)
    retrieval_ms = (time.perf_counter() - t_retrieve) * 1000.0

    results = []
    for rank, hit in enumerate(hits, start=1):
        try:
            verse = pipe.corpus.verse(hit.verse_id)
        except UnknownVerseId as exc:
            raise IndexCorpusMismatch(
                f"index returned verse id {hit.verse_id} absent from the corpus"
            ) from exc
        results.append(VersePresentation.from_verse(verse, hit.score, rank))

    explanation: str | None = None
    generation_ms: float | None = None
    degraded = False
    if req.generate and results:
        if pipe.generator is None:
            degraded = True
        else:
            cfg = pipe.generator.config
            limit = cfg.max_context_verses or req.k
            t_generate = time.perf_counter()
            try:
                prompt = build_prompt(req.text, results[:limit], cfg.prompt_template)
                explanation = pipe.generator.generate(prompt)
            except (RemoteUnavailable, RemoteMalformed, EmptyGeneration):
                degraded = True
            generation_ms = (time.perf_counter() - t_generate) * 1000.0

    return RagResponse(
        results=tuple(results),
        explanation=explanation,
        retrieval_ms=retrieval_ms,
        generation_ms=generation_ms,
        mode=req.mode,
        degraded=degraded,
    )


def daily_verse(corpus: Corpus, date: datetime.date) -> VersePresentation:
    """The date's verse: FNV-1a of the ISO date string, mod corpus size.

    A date hash (not randomness) so every user and every restart agree on
    the same verse for the same day.
    """
    if len(corpus) == 0:
        raise EmptyCorpus("cannot pick a daily verse from an empty corpus")
    verse_id = fnv1a_64(date.isoformat().encode("utf-8")) % len(corpus)
    return VersePresentation.from_verse(corpus.verse(verse_id), score=1.0, rank=1)
