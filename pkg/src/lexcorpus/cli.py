"""Command-line entry point: ingestion runs, serving, exports, analytics.

Exit codes: 0 success, 1 operational failure, 2 usage error. Every report is
byte-identical across runs on an unchanged corpus — acquisition timestamps
live in the data, never in report bodies. Scheduling is deliberately not
built in: point cron (or similar) at `ingest` daily for feeds and weekly for
the law repository.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from datetime import date
from pathlib import Path
from typing import Optional

import yaml

from .analytics import (
    digest_to_script,
    extremes_view,
    median_wordcount_by_judge,
    readability_trend,
    render_memo,
    weekly_digest,
    weekly_volume,
)
from .errors import LexCorpusError
from .ingest import (
    FeedState,
    IngestReport,
    UrlFetcher,
    import_file_drop,
    ingest_batch,
    load_registry,
    parse_listing,
    poll_feed,
    sync_law_repo,
)
from .parquet_io import export_parquet
from .records import validate_record
from .store import CorpusStore, coverage_stats, coverage_to_dict
from .tokenizers import WORD_FALLBACK, register_bpe_scheme

PROG = "lexcorpus"


def _add_common(parser: argparse.ArgumentParser, out: bool = True) -> None:
    parser.add_argument("--corpus", help="corpus directory (holds store/, state/)")
    parser.add_argument("--config", help="optional YAML config file; flags override it")
    if out:
        parser.add_argument("--out", help="write the report here instead of stdout")
        parser.add_argument(
            "--format",
            choices=("tsv", "json"),
            default="tsv",
            help="machine-readable output format (default tsv)",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Open legal-data corpus: ingest, serve, export, analyze.",
    )
    parser.add_argument("--version", action="version", version=f"{PROG} 0.1.0")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("ingest", help="run ingestion for sources in a registry")
    _add_common(p)
    p.add_argument("--registry", help="source registry file (multi-document YAML)")
    p.add_argument("--channel", help="only sources on this channel")
    p.add_argument("--dataset", action="append", help="only these dataset codes (repeatable)")
    p.add_argument(
        "--politeness-delay",
        type=float,
        default=None,
        help="seconds between fetches to one host (overrides per-source value)",
    )

    p = sub.add_parser("serve-api", help="serve the read-only JSON API")
    _add_common(p, out=False)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--tokenizer", default=WORD_FALLBACK)

    p = sub.add_parser("serve-mcp", help="serve the agent tool protocol")
    _add_common(p, out=False)
    p.add_argument("--http", action="store_true", help="serve over HTTP instead of stdio")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8081)
    p.add_argument("--truncate-limit", type=int, default=None, help="per-response text limit (chars)")
    p.add_argument("--tokenizer", default=WORD_FALLBACK)

    p = sub.add_parser("export-parquet", help="write the bulk columnar export")
    _add_common(p, out=False)
    p.add_argument("--out-dir", required=True, help="export directory (cases/, laws/, README.md)")
    p.add_argument("--tokenizer", default=WORD_FALLBACK)
    p.add_argument("--bpe-merges", help="merge-table file; registers tokenizer scheme 'bpe'")

    p = sub.add_parser("stats", help="per-dataset coverage table")
    _add_common(p)
    p.add_argument("--tokenizer", default=WORD_FALLBACK)
    p.add_argument("--bpe-merges", help="merge-table file; registers tokenizer scheme 'bpe'")

    p = sub.add_parser("readability", help="per-year median readability trend")
    _add_common(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--from-year", type=int, required=True)
    p.add_argument("--to-year", type=int, required=True)

    p = sub.add_parser("wordcount-by-judge", help="median decision word count per judge")
    _add_common(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--topic", help="topic filter name, e.g. immigration")
    p.add_argument("--date-from", help="ISO date lower bound")
    p.add_argument("--date-to", help="ISO date upper bound")
    p.add_argument(
        "--extremes",
        type=int,
        default=None,
        metavar="N",
        help="print only the N lowest + N highest medians (the published cut)",
    )

    p = sub.add_parser("weekly-volume", help="words released per ISO week, with yearly medians")
    _add_common(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--topic", help="topic filter name")

    p = sub.add_parser("digest", help="weekly digest memorandum (and podcast script)")
    _add_common(p, out=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--week", required=True, help="ISO week, e.g. 2025-W32")
    p.add_argument("--script", action="store_true", help="also render the podcast script")
    p.add_argument("--classifier", default="keyword")
    p.add_argument("--summarizer", default="template")
    p.add_argument("--topic", help="topic filter name")

    p = sub.add_parser("validate", help="validate every stored record; exit 1 on violations")
    _add_common(p)
    p.add_argument("--registry", help="also validate this source registry")

    return parser


def _load_config(args) -> dict:
    path = getattr(args, "config", None)
    if not path:
        return {}
    loaded = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    if not isinstance(loaded, dict):
        raise LexCorpusError(f"config file {path} must be a mapping")
    return loaded


def _corpus_dir(args, config: dict, parser: argparse.ArgumentParser) -> Path:
    corpus = args.corpus or config.get("corpus")
    if not corpus:
        parser.error(f"{args.command}: --corpus is required (or 'corpus' in --config)")
    return Path(corpus)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _tsv(rows: list[list], header: list[str], comments: list[str] = ()) -> str:
    lines = ["\t".join(header)]
    for row in rows:
        lines.append("\t".join("" if v is None else str(v) for v in row))
    lines.extend(f"# {c}" for c in comments)
    return "\n".join(lines) + "\n"


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False, sort_keys=False) + "\n"


def _fmt_median(value: float) -> str:
    return f"{value:g}"


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_ingest(args, config, parser) -> int:
    corpus = _corpus_dir(args, config, parser)
    registry_path = args.registry or config.get("registry")
    if not registry_path:
        parser.error("ingest: --registry is required (or 'registry' in --config)")
    store = CorpusStore(corpus)
    sources = load_registry(registry_path)
    if args.channel:
        sources = [s for s in sources if s.channel == args.channel]
    if args.dataset:
        wanted = set(args.dataset)
        sources = [s for s in sources if s.dataset in wanted]

    results: list[tuple[str, str, IngestReport]] = []
    for source in sources:
        delay = args.politeness_delay
        if delay is None:
            delay = config.get("politeness_delay", source.politeness_delay)
        fetcher = UrlFetcher(politeness_delay=delay)
        if source.channel == "listing-scrape":
            listing = fetcher(source.listing_url)
            stubs, notes = parse_listing(listing, source)
            report = ingest_batch(stubs, fetcher, source, store)
            report = dataclasses.replace(report, notes=tuple(notes) + report.notes)
        elif source.channel == "rss":
            state_path = corpus / "state" / "feeds" / f"{source.dataset}-{source.language}.json"
            state = (
                FeedState.from_json(json.loads(state_path.read_text(encoding="utf-8")))
                if state_path.exists()
                else FeedState.empty()
            )
            poll = poll_feed(fetcher(source.feed_url), state, source=source)
            report = ingest_batch(list(poll.stubs), fetcher, source, store)
            report = dataclasses.replace(report, notes=poll.notes + report.notes)
            if poll.state is not state:  # only rewrite state when it grew
                state_path.parent.mkdir(parents=True, exist_ok=True)
                state_path.write_text(
                    json.dumps(poll.state.to_json(), sort_keys=True) + "\n", encoding="utf-8"
                )
        elif source.channel == "law-repo-sync":
            report = sync_law_repo(source, store)
        elif source.channel == "file-drop":
            report = import_file_drop(source.drop_path, source, store)
        else:  # unreachable: registry validation restricts channels
            raise LexCorpusError(f"unhandled channel {source.channel}")
        results.append((source.dataset, source.channel, report))

    if args.format == "json":
        payload = [
            {"dataset": d, "channel": c, **r.as_dict()} for d, c, r in results
        ]
        _emit(_json_text(payload), args.out)
    else:
        header = ["dataset", "channel", "fetched", "new", "updated", "duplicate", "skipped", "failed"]
        rows = [
            [d, c, r.fetched, r.new, r.updated, r.duplicate, r.skipped, r.failed]
            for d, c, r in results
        ]
        comments = [f"{d}: {note}" for d, c, r in results for note in r.notes]
        _emit(_tsv(rows, header, comments), args.out)
    return 0


def _cmd_serve_api(args, config, parser) -> int:
    import uvicorn

    from .api import create_app

    corpus = _corpus_dir(args, config, parser)
    app = create_app(CorpusStore(corpus), tokenizer=args.tokenizer)
    uvicorn.run(app, host=args.host or config.get("host", "127.0.0.1"), port=args.port)
    return 0


def _cmd_serve_mcp(args, config, parser) -> int:
    from .mcp import DEFAULT_TRUNCATE_LIMIT, McpServer, create_mcp_app, serve_stdio

    corpus = _corpus_dir(args, config, parser)
    limit = args.truncate_limit or config.get("truncate_limit", DEFAULT_TRUNCATE_LIMIT)
    server = McpServer(CorpusStore(corpus), truncate_limit=limit, tokenizer=args.tokenizer)
    if args.http:
        import uvicorn

        uvicorn.run(create_mcp_app(server), host=args.host, port=args.port)
    else:
        serve_stdio(server)
    return 0


def _maybe_register_bpe(args) -> str:
    if getattr(args, "bpe_merges", None):
        register_bpe_scheme("bpe", args.bpe_merges)
        if args.tokenizer == WORD_FALLBACK:
            return "bpe"
    return args.tokenizer


def _cmd_export_parquet(args, config, parser) -> int:
    corpus = _corpus_dir(args, config, parser)
    tokenizer = _maybe_register_bpe(args)
    store = CorpusStore(corpus)
    manifest = export_parquet(store.snapshot(), args.out_dir, tokenizer=tokenizer)
    sys.stdout.write(
        f"wrote {manifest.case_rows} case row(s), {manifest.law_rows} law row(s) "
        f"to {args.out_dir}\n"
    )
    return 0


def _cmd_stats(args, config, parser) -> int:
    corpus = _corpus_dir(args, config, parser)
    tokenizer = _maybe_register_bpe(args)
    snapshot = CorpusStore(corpus).snapshot()
    rows, totals = coverage_stats(snapshot, tokenizer=tokenizer)
    if args.format == "json":
        _emit(_json_text(coverage_to_dict(rows, totals)), args.out)
    else:
        body = [
            [r.dataset, r.earliest.isoformat() if r.earliest else None,
             r.latest.isoformat() if r.latest else None, r.documents, r.tokens]
            for r in rows
        ]
        body.append(["TOTAL", None, None, totals.documents, totals.tokens])
        _emit(_tsv(body, ["dataset", "earliest", "latest", "documents", "tokens"]), args.out)
    return 0


def _cmd_readability(args, config, parser) -> int:
    corpus = _corpus_dir(args, config, parser)
    snapshot = CorpusStore(corpus).snapshot()
    rows = readability_trend(snapshot, args.dataset, args.from_year, args.to_year)
    if args.format == "json":
        payload = [
            {"year": r.year, "median_score": r.median_score, "decisions": r.decisions}
            for r in rows
        ]
        _emit(_json_text(payload), args.out)
    else:
        body = [
            [r.year, f"{r.median_score:.3f}" if r.median_score is not None else None, r.decisions]
            for r in rows
        ]
        _emit(_tsv(body, ["year", "median_score", "decisions"]), args.out)
    return 0


def _cmd_wordcount_by_judge(args, config, parser) -> int:
    corpus = _corpus_dir(args, config, parser)
    snapshot = CorpusStore(corpus).snapshot()
    report = median_wordcount_by_judge(
        snapshot,
        args.dataset,
        topic=args.topic,
        date_from=date.fromisoformat(args.date_from) if args.date_from else None,
        date_to=date.fromisoformat(args.date_to) if args.date_to else None,
    )
    rows = extremes_view(report, args.extremes) if args.extremes else report.rows
    if args.format == "json":
        payload = {
            "rows": [
                {"judge": r.judge, "median_words": r.median_words, "decisions": r.decisions}
                for r in rows
            ],
            "unknown_decisions": report.unknown_decisions,
        }
        _emit(_json_text(payload), args.out)
    else:
        body = [[r.judge, _fmt_median(r.median_words), r.decisions] for r in rows]
        _emit(
            _tsv(
                body,
                ["judge", "median_words", "decisions"],
                [f"excluded (unknown judge): {report.unknown_decisions}"],
            ),
            args.out,
        )
    return 0


def _cmd_weekly_volume(args, config, parser) -> int:
    corpus = _corpus_dir(args, config, parser)
    snapshot = CorpusStore(corpus).snapshot()
    weeks, yearly = weekly_volume(snapshot, args.dataset, topic=args.topic)
    if args.format == "json":
        payload = {
            "weeks": [{"week": w.week, "words": w.words, "decisions": w.decisions} for w in weeks],
            "yearly": [
                {"year": y.year, "median_weekly_words": y.median_weekly_words, "weeks": y.weeks}
                for y in yearly
            ],
        }
        _emit(_json_text(payload), args.out)
    else:
        lines = [_tsv([[w.week, w.words, w.decisions] for w in weeks], ["week", "words", "decisions"])]
        lines.append(
            _tsv(
                [[y.year, _fmt_median(y.median_weekly_words), y.weeks] for y in yearly],
                ["year", "median_weekly_words", "weeks"],
            )
        )
        _emit("\n".join(lines), args.out)
    return 0


def _cmd_digest(args, config, parser) -> int:
    corpus = _corpus_dir(args, config, parser)
    snapshot = CorpusStore(corpus).snapshot()
    memo = weekly_digest(
        snapshot,
        args.dataset,
        args.week,
        classifier=args.classifier,
        summarizer=args.summarizer,
        topic=args.topic,
    )
    memo_text = render_memo(memo, dataset=args.dataset)
    script_text = digest_to_script(memo) if args.script else None
    if args.out:
        out_path = Path(args.out)
        out_path.write_text(memo_text, encoding="utf-8")
        if script_text is not None:
            script_path = out_path.with_suffix(".script" + (out_path.suffix or ".txt"))
            script_path.write_text(script_text, encoding="utf-8")
    else:
        sys.stdout.write(memo_text)
        if script_text is not None:
            sys.stdout.write("\n=== PODCAST SCRIPT ===\n\n")
            sys.stdout.write(script_text)
    return 0


def _cmd_validate(args, config, parser) -> int:
    corpus = _corpus_dir(args, config, parser)
    snapshot = CorpusStore(corpus).snapshot()
    problems: list[str] = []
    for record in snapshot.records:
        for violation in validate_record(record):
            label = record.primary_citation() or "<no citation>"
            problems.append(f"{record.dataset}/{label}: {violation}")
    if args.registry:
        try:
            load_registry(args.registry)
        except LexCorpusError as exc:
            problems.append(f"registry: {exc}")
    if problems:
        _emit("\n".join(problems) + "\n", args.out)
        return 1
    _emit(f"OK: {len(snapshot.records)} record(s) valid\n", args.out)
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "serve-api": _cmd_serve_api,
    "serve-mcp": _cmd_serve_mcp,
    "export-parquet": _cmd_export_parquet,
    "stats": _cmd_stats,
    "readability": _cmd_readability,
    "wordcount-by-judge": _cmd_wordcount_by_judge,
    "weekly-volume": _cmd_weekly_volume,
    "digest": _cmd_digest,
    "validate": _cmd_validate,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_usage(sys.stderr)
        return 2
    try:
        config = _load_config(args)
        return _COMMANDS[args.command](args, config, parser)
    except LexCorpusError as exc:
        sys.stderr.write(f"{PROG} {args.command}: error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"{PROG} {args.command}: error: {exc}\n")
        return 1


def entrypoint() -> None:  # console_scripts hook
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
