"""BM25 keyword-search baseline over verse text.

The baseline arm of the semantic-vs-keyword comparison. Indexes the same
english+tags text the embedding documents use (minus template words) so the
two arms see identical content. Standard Okapi BM25 with k1=1.2, b=0.75 and
idf(t) = ln(1 + (N - df + 0.5)/(df + 0.5)).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .corpus import Corpus, EmptyCorpus
from .embedding import tokenize
from .vector_index import ScoredHit

__all__ = ["KeywordIndex", "tokenize", "build_keyword_index", "keyword_search"]

K1 = 1.2
B = 0.75


@dataclass(frozen=True)
class KeywordIndex:
    postings: dict[str, list[tuple[int, int]]]  # token -> [(verse_id, tf)]
    doc_lengths: dict[int, int]
    avg_doc_length: float
    n_docs: int
    k1: float = K1
    b: float = B


def _searchable_text(english: str, tags: tuple[str, ...]) -> str:
    return f"{english} {', '.join(tags)}"


def build_keyword_index(corpus: Corpus) -> KeywordIndex:
    if len(corpus) == 0:
        raise EmptyCorpus("cannot build a keyword index over an empty corpus")
    postings: dict[str, list[tuple[int, int]]] = {}
    doc_lengths: dict[int, int] = {}
    for verse in corpus.verses:
        tokens = tokenize(_searchable_text(verse.english, verse.tags))
        doc_lengths[verse.id] = len(tokens)
        for token, tf in sorted(Counter(tokens).items()):
            postings.setdefault(token, []).append((verse.id, tf))
    avg = sum(doc_lengths.values()) / len(doc_lengths)
    return KeywordIndex(
        postings=postings,
        doc_lengths=doc_lengths,
        avg_doc_length=avg,
        n_docs=len(corpus),
    )


def _idf(index: KeywordIndex, token: str) -> float:
    df = len(index.postings.get(token, ()))
    if df == 0:
        return 0.0
    return math.log(1.0 + (index.n_docs - df + 0.5) / (df + 0.5))


def keyword_search(index: KeywordIndex, query: str, k: int) -> list[ScoredHit]:
    """Top-k BM25 hits; zero-score verses are excluded, ties go to lower id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    scores: dict[int, float] = {}
    for token in tokenize(query):
        idf = _idf(index, token)
        if idf == 0.0:
            continue
        for verse_id, tf in index.postings[token]:
            length_norm = 1.0 - index.b + index.b * index.doc_lengths[verse_id] / index.avg_doc_length
            contribution = idf * tf * (index.k1 + 1.0) / (tf + index.k1 * length_norm)
            scores[verse_id] = scores.get(verse_id, 0.0) + contribution
    ranked = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return [ScoredHit(verse_id, score) for verse_id, score in ranked[:k] if score > 0.0]
