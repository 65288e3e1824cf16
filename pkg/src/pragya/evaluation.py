"""Retrieval evaluation: top-k precision, coverage, and latency per arm.

Relevance is operationalized as a tag match: a hit is relevant iff the
judged query's expected theme tag appears on the retrieved verse. Latency
covers retrieval only (generation, when configured, is a separate concern).
"""

from __future__ import annotations

import csv
import io
import json
import statistics
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .corpus import Corpus, MissingFile
from .errors import PragyaError
from .vector_index import ScoredHit

QUERY_FILE_HEADER = ("query", "expected_tag")

# A retrieval arm: (query text, k) -> ranked hits
Retriever = Callable[[str, int], list[ScoredHit]]


class EvalError(PragyaError):
    code = "eval_error"


class NoQueries(EvalError):
    code = "no_queries"


class TagNotInCorpus(EvalError):
    code = "tag_not_in_corpus"

    def __init__(self, tag: str):
        super().__init__(f"expected_tag {tag!r} does not occur in the corpus")
        self.tag = tag


@dataclass(frozen=True)
class JudgedQuery:
    text: str
    expected_tag: str


@dataclass(frozen=True)
class QueryDetail:
    query: str
    expected_tag: str
    hit_ids: tuple[int, ...]
    relevant_flags: tuple[bool, ...]


@dataclass(frozen=True)
class ArmReport:
    mode: str
    k: int
    n_queries: int
    topk_precision: float
    coverage: float
    mean_latency_ms: float
    per_query_detail: tuple[QueryDetail, ...]


@dataclass(frozen=True)
class EvalReport:
    arms: tuple[ArmReport, ...]

    def arm(self, mode: str) -> ArmReport:
        for arm in self.arms:
            if arm.mode == mode:
                return arm
        raise KeyError(mode)


def judge_relevance(hit: ScoredHit, query: JudgedQuery, corpus: Corpus) -> bool:
    """True iff the hit verse carries the query's expected theme tag."""
    verse = corpus.verse(hit.verse_id)  # raises UnknownVerseId
    return query.expected_tag in verse.tags


def metrics_from_details(details: Sequence[QueryDetail], k: int) -> tuple[float, float]:
    """(topk_precision, coverage) recomputed from per-query detail alone."""
    precisions = []
    covered = 0
    for detail in details:
        flags = detail.relevant_flags[:k]
        if not flags:
            precisions.append(0.0)
            continue
        precisions.append(sum(flags) / min(k, len(flags)))
        if any(flags):
            covered += 1
    return sum(precisions) / len(precisions), covered / len(details)


def _time_arm(
    retriever: Retriever,
    queries: Sequence[JudgedQuery],
    k: int,
    repetitions: int,
) -> float:
    """Median over repetitions of the mean per-query wall-clock, in ms."""
    rep_means = []
    for _ in range(repetitions):
        start = time.perf_counter()
        for query in queries:
            retriever(query.text, k)
        elapsed = time.perf_counter() - start
        rep_means.append(elapsed / len(queries) * 1000.0)
    return statistics.median(rep_means)


def run_eval(
    queries: Sequence[JudgedQuery],
    corpus: Corpus,
    retrievers: Mapping[str, Retriever],
    k: int = 3,
    repetitions: int = 3,
) -> EvalReport:
    """Run every query against every arm and aggregate the metric suite."""
    if not queries:
        raise NoQueries("need at least one judged query")
    for query in queries:
        if query.expected_tag not in corpus.tag_counts:
            raise TagNotInCorpus(query.expected_tag)

    arms = []
    for mode, retriever in retrievers.items():
        details = []
        for query in queries:
            hits = retriever(query.text, k)[:k]
            flags = tuple(judge_relevance(hit, query, corpus) for hit in hits)
            details.append(
                QueryDetail(
                    query=query.text,
                    expected_tag=query.expected_tag,
                    hit_ids=tuple(hit.verse_id for hit in hits),
                    relevant_flags=flags,
                )
            )
        precision, coverage = metrics_from_details(details, k)
        latency_ms = _time_arm(retriever, queries, k, repetitions)
        arms.append(
            ArmReport(
                mode=mode,
                k=k,
                n_queries=len(queries),
                topk_precision=precision,
                coverage=coverage,
                mean_latency_ms=latency_ms,
                per_query_detail=tuple(details),
            )
        )
    return EvalReport(arms=tuple(arms))


def load_queries(path: str | Path) -> list[JudgedQuery]:
    """Load a judged query CSV with header ``query,expected_tag``."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"query file not found: {path}")
    queries = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(cell.strip() for cell in header) != QUERY_FILE_HEADER:
            raise EvalError(
                f"query file must start with header {','.join(QUERY_FILE_HEADER)!r}"
            )
        for row in reader:
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2 or not row[0].strip() or not row[1].strip():
                raise EvalError(f"bad query row at line {reader.line_num}: {row!r}")
            queries.append(JudgedQuery(text=row[0].strip(), expected_tag=row[1].strip().lower()))
    if not queries:
        raise NoQueries(f"no queries in {path}")
    return queries


def _arm_to_dict(arm: ArmReport) -> dict:
    return {
        "mode": arm.mode,
        "k": arm.k,
        "n_queries": arm.n_queries,
        "topk_precision": arm.topk_precision,
        "coverage": arm.coverage,
        "mean_latency_ms": arm.mean_latency_ms,
        "per_query_detail": [
            {
                "query": d.query,
                "expected_tag": d.expected_tag,
                "hit_ids": list(d.hit_ids),
                "relevant_flags": list(d.relevant_flags),
            }
            for d in arm.per_query_detail
        ],
    }


def report_from_json(text: str) -> EvalReport:
    data = json.loads(text)
    arms = []
    for arm in data["arms"]:
        details = tuple(
            QueryDetail(
                query=d["query"],
                expected_tag=d["expected_tag"],
                hit_ids=tuple(d["hit_ids"]),
                relevant_flags=tuple(bool(f) for f in d["relevant_flags"]),
            )
            for d in arm["per_query_detail"]
        )
        arms.append(
            ArmReport(
                mode=arm["mode"],
                k=arm["k"],
                n_queries=arm["n_queries"],
                topk_precision=arm["topk_precision"],
                coverage=arm["coverage"],
                mean_latency_ms=arm["mean_latency_ms"],
                per_query_detail=details,
            )
        )
    return EvalReport(arms=tuple(arms))


def _render_table(report: EvalReport) -> str:
    arms = report.arms
    k = arms[0].k if arms else 3
    headers = ["Metric"] + [arm.mode for arm in arms]
    rows = [
        [f"Top-{k} Precision"] + [f"{arm.topk_precision:.1%}" for arm in arms],
        ["Coverage (at least 1 relevant result)"] + [f"{arm.coverage:.1%}" for arm in arms],
        ["Latency per Query (ms)"] + [f"{arm.mean_latency_ms:.3f}" for arm in arms],
        ["Queries"] + [str(arm.n_queries) for arm in arms],
    ]
    widths = [max(len(row[col]) for row in [headers] + rows) for col in range(len(headers))]
    def fmt(row: list[str]) -> str:
        return " | ".join(cell.ljust(width) for cell, width in zip(row, widths))
    separator = "-+-".join("-" * width for width in widths)
    return "\n".join([fmt(headers), separator] + [fmt(row) for row in rows])


def _render_csv(report: EvalReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        ["record", "mode", "k", "n_queries", "topk_precision", "coverage",
         "mean_latency_ms", "query", "expected_tag", "hit_ids", "relevant_flags"]
    )
    for arm in report.arms:
        writer.writerow(
            ["summary", arm.mode, arm.k, arm.n_queries, repr(arm.topk_precision),
             repr(arm.coverage), repr(arm.mean_latency_ms), "", "", "", ""]
        )
        for d in arm.per_query_detail:
            writer.writerow(
                ["detail", arm.mode, "", "", "", "", "", d.query, d.expected_tag,
                 ";".join(str(i) for i in d.hit_ids),
                 ";".join(str(f).lower() for f in d.relevant_flags)]
            )
    return buf.getvalue()


def render_report(report: EvalReport, format: str = "table") -> str:
    """Render as a Table-1-style text table, JSON, or CSV."""
    if format == "table":
        return _render_table(report)
    if format == "json":
        return json.dumps({"arms": [_arm_to_dict(arm) for arm in report.arms]}, indent=2)
    if format == "csv":
        return _render_csv(report)
    raise ValueError(f"unknown report format {format!r}")
