"""Command-line entrypoints: index, query, serve, eval, transliterate, daily.

Exit codes: 0 success, 1 domain error, 2 usage error (argparse default).
``--format json`` switches the query/daily/eval output to machine-readable
JSON on stdout.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from pathlib import Path

from . import evaluation, rag, service
from .corpus import load_corpus
from .embedding import Embedder, EmbedderConfig
from .errors import PragyaError
from .keyword_index import build_keyword_index, keyword_search
from .rag import Pipeline, QueryRequest, answer_query
from .transliteration import transliterate
from .vector_index import save_index, search


def _embedder_config(args: argparse.Namespace) -> EmbedderConfig:
    if args.embedder == "remote":
        from .embedding import ENV_EMBED_MODEL, ENV_EMBED_URL

        if not os.environ.get(ENV_EMBED_URL) or not os.environ.get(ENV_EMBED_MODEL):
            raise PragyaError(
                "remote embedder needs PRAGYA_EMBED_URL and PRAGYA_EMBED_MODEL"
            )
        return EmbedderConfig.remote()
    return EmbedderConfig.hashing(dim=args.dim)


def _corpus_path(args: argparse.Namespace) -> Path:
    if args.corpus:
        return Path(args.corpus)
    env_path = os.environ.get(service.ENV_CORPUS)
    if env_path:
        return Path(env_path)
    return service.bundled_corpus_path()


def _add_common(parser: argparse.ArgumentParser, with_embedder: bool = True) -> None:
    parser.add_argument("--corpus", help="corpus CSV (default: $PRAGYA_CORPUS or the bundled sample)")
    if with_embedder:
        parser.add_argument("--embedder", choices=["hash", "remote"], default="hash")
        parser.add_argument("--dim", type=int, default=256, help="hashing embedder dimension")


def _cmd_index(args: argparse.Namespace) -> int:
    corpus = load_corpus(_corpus_path(args))
    embedder = Embedder(_embedder_config(args))
    index = rag.index_corpus(corpus, embedder)
    save_index(index, args.out)
    print(f"indexed {len(index)} verses (dim={index.dim}) -> {args.out}")
    return 0


def _cmd_query(args: argparse.Namespace) -> int:
    corpus = load_corpus(_corpus_path(args))
    embedder = Embedder(_embedder_config(args))
    generator = None
    if args.generate:
        generator_config = rag.GeneratorConfig.from_env()
        if generator_config is not None:
            generator = rag.Generator(generator_config)
    pipeline = Pipeline(
        corpus=corpus,
        vector_index=rag.index_corpus(corpus, embedder),
        keyword_index=build_keyword_index(corpus),
        embedder=embedder,
        generator=generator,
    )
    request = QueryRequest(text=args.text, k=args.k, mode=args.mode, generate=args.generate)
    response = answer_query(request, pipeline)
    if args.format == "json":
        print(json.dumps(response.to_dict(), ensure_ascii=False, indent=2))
        return 0
    if not response.results:
        print("no results")
        return 0
    for result in response.results:
        print(f"#{result.rank}  [{result.score:.4f}]  verse {result.verse_id}")
        print(f"  {result.devanagari}")
        print(f"  {result.iast}")
        if result.marathi:
            print(f"  Marathi: {result.marathi}")
        print(f"  English: {result.english}")
        print(f"  tags: {', '.join(result.tags)}")
    if response.explanation:
        print(f"\nExplanation:\n{response.explanation}")
    elif request.generate and response.degraded:
        print("\n(explanation unavailable)")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    overrides = {
        "port": args.port,
        "corpus": args.corpus,
        "index": args.index,
        "embed_dim": args.dim,
    }
    if args.embedder:
        overrides["embedder"] = {"hash": "hashing", "remote": "remote"}[args.embedder]
    config = service.load_service_config(
        config_file=Path(args.config) if args.config else None,
        overrides=overrides,
    )
    service.serve(config)
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    corpus = load_corpus(_corpus_path(args))
    queries = evaluation.load_queries(args.queries)
    embedder = Embedder(_embedder_config(args))
    vector_index = rag.index_corpus(corpus, embedder)
    keyword_index = build_keyword_index(corpus)
    retrievers = {
        "semantic": lambda text, k: search(vector_index, embedder.embed(text), k),
        "keyword": lambda text, k: keyword_search(keyword_index, text, k),
    }
    report = evaluation.run_eval(
        queries, corpus, retrievers, k=args.k, repetitions=args.repetitions
    )
    print(evaluation.render_report(report, format=args.format))
    return 0


def _cmd_transliterate(args: argparse.Namespace) -> int:
    print(transliterate(args.text))
    return 0


def _cmd_daily(args: argparse.Namespace) -> int:
    corpus = load_corpus(_corpus_path(args))
    date = datetime.date.fromisoformat(args.date) if args.date else datetime.date.today()
    presentation = rag.daily_verse(corpus, date)
    if args.format == "json":
        print(json.dumps(presentation.to_dict(), ensure_ascii=False, indent=2))
    else:
        print(f"Daily verse for {date.isoformat()} (verse {presentation.verse_id}):")
        print(f"  {presentation.devanagari}")
        print(f"  {presentation.iast}")
        if presentation.marathi:
            print(f"  Marathi: {presentation.marathi}")
        print(f"  English: {presentation.english}")
        print(f"  tags: {', '.join(presentation.tags)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pragya",
        description="Semantic recommendation of Sanskrit Subhāṣitas",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_index = sub.add_parser("index", help="embed a corpus and write the vector index")
    _add_common(p_index)
    p_index.add_argument("--out", required=True, help="output index file")
    p_index.set_defaults(func=_cmd_index)

    p_query = sub.add_parser("query", help="retrieve verses for a natural-language query")
    p_query.add_argument("text")
    p_query.add_argument("-k", type=int, default=3)
    p_query.add_argument("--mode", choices=["semantic", "keyword"], default="semantic")
    p_query.add_argument("--generate", action="store_true",
                         help="ask the generation server for an explanation")
    p_query.add_argument("--format", choices=["text", "json"], default="text")
    _add_common(p_query)
    p_query.set_defaults(func=_cmd_query)

    p_serve = sub.add_parser("serve", help="run the HTTP API")
    p_serve.add_argument("--port", type=int)
    p_serve.add_argument("--config", help="TOML-style key=value config file")
    p_serve.add_argument("--index", help="index file to load or create")
    p_serve.add_argument("--corpus", help="corpus CSV (default: $PRAGYA_CORPUS or the bundled sample)")
    p_serve.add_argument("--embedder", choices=["hash", "remote"], default=None)
    p_serve.add_argument("--dim", type=int, default=None, help="hashing embedder dimension")
    p_serve.set_defaults(func=_cmd_serve)

    p_eval = sub.add_parser("eval", help="compare semantic vs keyword retrieval")
    p_eval.add_argument("--queries", required=True, help="judged query CSV")
    p_eval.add_argument("--k", type=int, default=3)
    p_eval.add_argument("--repetitions", type=int, default=3)
    p_eval.add_argument("--format", choices=["table", "json", "csv"], default="table")
    _add_common(p_eval)
    p_eval.set_defaults(func=_cmd_eval)

    p_translit = sub.add_parser("transliterate", help="romanize Devanagari text (IAST)")
    p_translit.add_argument("text")
    p_translit.set_defaults(func=_cmd_transliterate)

    p_daily = sub.add_parser("daily", help="print the verse of the day")
    p_daily.add_argument("--date", help="ISO date, default today")
    p_daily.add_argument("--format", choices=["text", "json"], default="text")
    _add_common(p_daily, with_embedder=False)
    p_daily.set_defaults(func=_cmd_daily)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PragyaError as exc:
        print(f"error ({exc.code}): {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
