"""Orchestrator tests.

The pipeline-vs-oracle test recomputes the whole semantic route by hand:
an inline FNV-1a bag-of-words embedder and a pure-Python cosine ranking
over the chunk template, with no calls into the embedding or index modules.
"""

from __future__ import annotations

import datetime
import math
import re
import time

import pytest

from pragya.corpus import EmptyCorpus
from pragya.embedding import Embedder, EmbedderConfig
from pragya.errors import RemoteMalformed, RemoteUnavailable
from pragya.keyword_index import build_keyword_index
from pragya.rag import (
    DEFAULT_PROMPT_TEMPLATE,
    BadTemplate,
    EmptyGeneration,
    EmptyQuery,
    Generator,
    GeneratorConfig,
    IndexCorpusMismatch,
    NoVerses,
    Pipeline,
    QueryRequest,
    RagResponse,
    VersePresentation,
    answer_query,
    build_prompt,
    daily_verse,
    generate_explanation,
    index_corpus,
)
from pragya.service import bundled_corpus_path
from pragya.corpus import Corpus, VerseRecord, load_corpus
from pragya.transliteration import transliterate
from pragya.vector_index import build_index
from tests.conftest import make_corpus


@pytest.fixture(scope="module")
def sample_corpus():
    return load_corpus(bundled_corpus_path())


@pytest.fixture(scope="module")
def hash_pipeline(sample_corpus):
    embedder = Embedder(EmbedderConfig.hashing(dim=256))
    return Pipeline(
        corpus=sample_corpus,
        vector_index=index_corpus(sample_corpus, embedder),
        keyword_index=build_keyword_index(sample_corpus),
        embedder=embedder,
    )


# --- QueryRequest ------------------------------------------------------------


def test_query_request_rejects_empty_text():
    with pytest.raises(EmptyQuery):
        QueryRequest(text="   ")


def test_query_request_k_bounds():
    with pytest.raises(ValueError):
        QueryRequest(text="x", k=0)
    with pytest.raises(ValueError):
        QueryRequest(text="x", k=21)
    with pytest.raises(ValueError):
        QueryRequest(text="x", mode="psychic")


# --- build_prompt ------------------------------------------------------------


def presentation(verse_id=0, rank=1, devanagari="धर्मः", english="Dharma wins"):
    return VersePresentation(
        verse_id=verse_id,
        devanagari=devanagari,
        iast=transliterate(devanagari),
        marathi="",
        english=english,
        tags=("ethics",),
        score=0.9,
        rank=rank,
    )


def test_build_prompt_contains_query_and_verse_once():
    prompt = build_prompt("courage", [presentation()])
    assert prompt.count("courage") == 1
    assert prompt.count("धर्मः") == 1
    assert "dharmaḥ" in prompt


def test_build_prompt_template_guard():
    with pytest.raises(BadTemplate):
        build_prompt("q", [presentation()], template="no placeholders {verses}")
    with pytest.raises(BadTemplate):
        build_prompt("q", [presentation()], template="only {query}")


def test_build_prompt_requires_verses():
    with pytest.raises(NoVerses):
        build_prompt("q", [])


def test_build_prompt_renders_ranked_lines():
    verses = [presentation(verse_id=i, rank=i + 1, english=f"verse {i}") for i in range(3)]
    prompt = build_prompt("q", verses)
    block = prompt.split("Relevant Subhāṣitas:\n")[1].split("\nExplain")[0]
    lines = block.splitlines()
    assert len(lines) == 3
    for i, line in enumerate(lines):
        assert line.startswith(f"Verse {i + 1} ")
        assert f"verse {i}" in line


def test_default_template_has_placeholders():
    assert "{query}" in DEFAULT_PROMPT_TEMPLATE
    assert "{verses}" in DEFAULT_PROMPT_TEMPLATE


def test_generator_config_validates_template():
    with pytest.raises(BadTemplate):
        GeneratorConfig(endpoint_url="http://x", model_name="m", prompt_template="{query} only")


# --- generate_explanation ----------------------------------------------------


def gen_config(base_url, **kwargs):
    return GeneratorConfig(endpoint_url=base_url, model_name="test-gen", **kwargs)


def test_generation_passthrough(stub_server):
    def behavior(path, payload):
        assert path == "/api/generate"
        assert payload["model"] == "test-gen"
        assert payload["stream"] is False
        return 200, {"response": "  These verses teach loyalty.  "}

    base_url, server = stub_server(behavior)
    text = generate_explanation(gen_config(base_url), "some prompt")
    assert text == "These verses teach loyalty."
    assert len(server.requests) == 1


def test_generation_blank_response(stub_server):
    base_url, _ = stub_server(lambda path, payload: (200, {"response": ""}))
    with pytest.raises(EmptyGeneration):
        generate_explanation(gen_config(base_url), "prompt")


def test_generation_timeout(stub_server):
    def behavior(path, payload):
        time.sleep(0.5)
        return 200, {"response": "too late"}

    base_url, _ = stub_server(behavior)
    with pytest.raises(RemoteUnavailable):
        generate_explanation(gen_config(base_url, timeout=0.05), "prompt")


def test_generation_unreachable(closed_port_url):
    with pytest.raises(RemoteUnavailable):
        generate_explanation(gen_config(closed_port_url), "prompt")


def test_generation_bad_body(stub_server):
    base_url, _ = stub_server(lambda path, payload: (200, {"output": "x"}))
    with pytest.raises(RemoteMalformed):
        generate_explanation(gen_config(base_url), "prompt")


def test_generation_concurrency_bounded(stub_server):
    import threading

    peak = {"now": 0, "max": 0}
    lock = threading.Lock()

    def behavior(path, payload):
        with lock:
            peak["now"] += 1
            peak["max"] = max(peak["max"], peak["now"])
        time.sleep(0.05)
        with lock:
            peak["now"] -= 1
        return 200, {"response": "ok"}

    base_url, _ = stub_server(behavior)
    with Generator(gen_config(base_url)) as generator:
        threads = [
            threading.Thread(target=generator.generate, args=(f"p{i}",)) for i in range(6)
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
    assert peak["max"] <= 2


# --- answer_query ------------------------------------------------------------


def test_answer_semantic_no_generation(hash_pipeline):
    response = answer_query(
        QueryRequest(text="teachings about friendship", k=3, generate=False),
        hash_pipeline,
    )
    assert len(response.results) == 3
    assert response.explanation is None
    assert response.generation_ms is None
    assert response.degraded is False
    assert response.mode == "semantic"
    assert response.retrieval_ms >= 0
    ranks = [r.rank for r in response.results]
    assert ranks == [1, 2, 3]
    scores = [r.score for r in response.results]
    assert scores == sorted(scores, reverse=True)


def test_answer_keyword_no_match(hash_pipeline):
    response = answer_query(
        QueryRequest(text="zzzunmatchable", mode="keyword", generate=True),
        hash_pipeline,
    )
    assert response.results == ()
    assert response.explanation is None
    assert response.generation_ms is None


def test_answer_iast_matches_transliteration(hash_pipeline):
    response = answer_query(
        QueryRequest(text="importance of truth", generate=False), hash_pipeline
    )
    for result in response.results:
        assert result.iast == transliterate(result.devanagari)


def test_answer_deterministic(hash_pipeline):
    req = QueryRequest(text="guidance on courage", generate=False)
    first = answer_query(req, hash_pipeline)
    second = answer_query(req, hash_pipeline)
    assert [(r.verse_id, r.score) for r in first.results] == [
        (r.verse_id, r.score) for r in second.results
    ]


def test_pipeline_matches_composed_oracle(sample_corpus, hash_pipeline):
    """Full pipeline vs hand-composed embed + brute-force cosine ranking."""
    dim = 256

    def fnv(data: bytes) -> int:
        h = 0xCBF29CE484222325
        for byte in data:
            h = ((h ^ byte) * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
        return h

    def embed_by_hand(text: str) -> list[float]:
        vec = [0.0] * dim
        for tok in re.findall(r"[^\W_]+", text.lower()):
            h = fnv(tok.encode("utf-8"))
            vec[h % dim] += 1.0 if h < 2**63 else -1.0
        norm = math.sqrt(sum(v * v for v in vec))
        return [v / norm for v in vec]

    query = "loyal friends"
    qvec = embed_by_hand(query)
    scored = []
    for verse in sample_corpus.verses:
        doc = f"{verse.english}. themes: {', '.join(verse.tags)}"
        dvec = embed_by_hand(doc)
        score = sum(a * b for a, b in zip(qvec, dvec))
        scored.append((verse.id, score))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    want_ids = [vid for vid, _ in scored[:3]]

    response = answer_query(QueryRequest(text=query, k=3, generate=False), hash_pipeline)
    assert [r.verse_id for r in response.results] == want_ids


def test_answer_generation_success(sample_corpus, stub_server):
    base_url, server = stub_server(lambda p, b: (200, {"response": "Wisdom applies."}))
    embedder = Embedder(EmbedderConfig.hashing(dim=64))
    pipeline = Pipeline(
        corpus=sample_corpus,
        vector_index=index_corpus(sample_corpus, embedder),
        embedder=embedder,
        generator=Generator(gen_config(base_url)),
    )
    response = answer_query(QueryRequest(text="importance of truth"), pipeline)
    assert response.explanation == "Wisdom applies."
    assert response.degraded is False
    assert response.generation_ms is not None and response.generation_ms >= 0
    # the prompt carried the query and ranked verse lines
    _, payload = server.requests[0]
    assert "importance of truth" in payload["prompt"]
    assert "Verse 1" in payload["prompt"]


def test_answer_generation_failure_degrades(sample_corpus, closed_port_url):
    embedder = Embedder(EmbedderConfig.hashing(dim=64))
    pipeline = Pipeline(
        corpus=sample_corpus,
        vector_index=index_corpus(sample_corpus, embedder),
        embedder=embedder,
        generator=Generator(gen_config(closed_port_url, timeout=0.2)),
    )
    response = answer_query(QueryRequest(text="importance of truth"), pipeline)
    assert len(response.results) == 3
    assert response.explanation is None
    assert response.degraded is True
    assert response.generation_ms is not None


def test_answer_generate_without_generator_degrades(hash_pipeline):
    response = answer_query(QueryRequest(text="importance of truth"), hash_pipeline)
    assert len(response.results) == 3
    assert response.explanation is None
    assert response.degraded is True
    assert response.generation_ms is None  # no call was made


def test_results_independent_of_generation(sample_corpus, stub_server, closed_port_url):
    embedder = Embedder(EmbedderConfig.hashing(dim=64))
    vector_index = index_corpus(sample_corpus, embedder)
    ok_url, _ = stub_server(lambda p, b: (200, {"response": "fine"}))

    def ids(generator, generate=True):
        pipeline = Pipeline(
            corpus=sample_corpus,
            vector_index=vector_index,
            embedder=embedder,
            generator=generator,
        )
        req = QueryRequest(text="dangers of greed", generate=generate)
        return [r.verse_id for r in answer_query(req, pipeline).results]

    baseline = ids(None, generate=False)
    assert ids(Generator(gen_config(ok_url))) == baseline
    assert ids(Generator(gen_config(closed_port_url, timeout=0.2))) == baseline


def test_index_corpus_mismatch(sample_corpus):
    embedder = Embedder(EmbedderConfig.hashing(dim=32))
    vec = embedder.embed("anything")
    rogue_index = build_index(32, [(999, vec)])
    pipeline = Pipeline(corpus=sample_corpus, vector_index=rogue_index, embedder=embedder)
    with pytest.raises(IndexCorpusMismatch):
        answer_query(QueryRequest(text="anything", generate=False), pipeline)


def test_response_to_dict_omits_absent_fields(hash_pipeline):
    response = answer_query(QueryRequest(text="wisdom", generate=False), hash_pipeline)
    data = response.to_dict()
    assert "explanation" not in data
    assert "generation_ms" not in data
    assert data["mode"] == "semantic"
    assert {"verse_id", "devanagari", "iast", "marathi", "english", "tags", "score", "rank"} \
        <= set(data["results"][0].keys())


# --- daily_verse -------------------------------------------------------------


def test_daily_same_date_same_verse(sample_corpus):
    date = datetime.date(2025, 3, 15)
    assert daily_verse(sample_corpus, date).verse_id == daily_verse(sample_corpus, date).verse_id


def test_daily_single_verse_corpus():
    corpus = make_corpus([("only one", ["t"])])
    assert daily_verse(corpus, datetime.date(2030, 12, 31)).verse_id == 0


def test_daily_hash_oracle():
    # FNV-1a64("2025-01-01") = 17360951466034994662 (independent script);
    # mod 40 -> 22
    corpus = make_corpus([(f"verse {i}", ["t"]) for i in range(40)])
    picked = daily_verse(corpus, datetime.date(2025, 1, 1))
    assert 17360951466034994662 % 40 == 22
    assert picked.verse_id == 22
    assert picked.score == 1.0
    assert picked.rank == 1


def test_daily_empty_corpus():
    with pytest.raises(EmptyCorpus):
        daily_verse(Corpus.from_verses([]), datetime.date(2025, 1, 1))
