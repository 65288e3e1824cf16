"""Pragya: semantic recommendation of Sanskrit Subhāṣitas.

Corpus ingestion, Devanagari transliteration, embedding-based and BM25
retrieval, explanation generation via a local model server, an evaluation
harness, and an HTTP service tying it together.
"""

from .corpus import Corpus, VerseRecord, chunk_text, load_corpus, save_corpus, verses_by_tag
from .embedding import Embedder, EmbedderConfig, EmbeddingVector, embed, embed_batch
from .errors import PragyaError
from .evaluation import EvalReport, JudgedQuery, render_report, run_eval
from .keyword_index import build_keyword_index, keyword_search, tokenize
from .rag import (
    Pipeline,
    QueryRequest,
    RagResponse,
    VersePresentation,
    answer_query,
    build_prompt,
    daily_verse,
    index_corpus,
)
from .transliteration import is_devanagari_ratio, transliterate
from .vector_index import ScoredHit, VectorIndex, build_index, load_index, save_index, search

__version__ = "0.1.0"

__all__ = [
    "Corpus",
    "VerseRecord",
    "chunk_text",
    "load_corpus",
    "save_corpus",
    "verses_by_tag",
    "Embedder",
    "EmbedderConfig",
    "EmbeddingVector",
    "embed",
    "embed_batch",
    "PragyaError",
    "EvalReport",
    "JudgedQuery",
    "render_report",
    "run_eval",
    "build_keyword_index",
    "keyword_search",
    "tokenize",
    "Pipeline",
    "QueryRequest",
    "RagResponse",
    "VersePresentation",
    "answer_query",
    "build_prompt",
    "daily_verse",
    "index_corpus",
    "is_devanagari_ratio",
    "transliterate",
    "ScoredHit",
    "VectorIndex",
    "build_index",
    "load_index",
    "save_index",
    "search",
    "__version__",
]
