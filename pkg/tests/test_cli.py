"""Command-line surface: argument handling, report formats, exit codes."""

import json
import shutil
import time
from pathlib import Path

import pytest

from lexcorpus import CorpusStore
from lexcorpus.analytics import (
    digest_to_script,
    median_wordcount_by_judge,
    readability_trend,
    render_memo,
    weekly_digest,
    weekly_volume,
)
from lexcorpus.cli import main
from lexcorpus.store import coverage_stats, coverage_to_dict

from conftest import FIXTURES, make_case, store_digest

DECISION_PAGE = (
    "<html><body><p>Present: Mr. Justice Roy</p>"
    "<p>The application for judicial review is dismissed with costs.</p></body></html>"
)


@pytest.fixture()
def corpus_dir(demo_store) -> str:
    return str(demo_store.corpus_dir)


def run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -- argument plumbing --------------------------------------------------------


def test_no_command_prints_usage_and_exits_2(capsys):
    code, out, err = run(capsys)
    assert code == 2
    assert "usage:" in err


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert capsys.readouterr().out.strip() == "lexcorpus 0.1.0"


def test_missing_corpus_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["stats"])
    assert excinfo.value.code == 2
    assert "--corpus is required" in capsys.readouterr().err


def test_config_file_can_supply_corpus(capsys, corpus_dir, tmp_path):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text(f"corpus: {corpus_dir}\n", encoding="utf-8")
    code, out, _ = run(capsys, "stats", "--config", str(cfg))
    assert code == 0
    assert out.startswith("dataset\tearliest\tlatest")


def test_corpus_flag_overrides_config(capsys, corpus_dir, tmp_path):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text("corpus: /nonexistent/place\n", encoding="utf-8")
    code, _, _ = run(capsys, "stats", "--config", str(cfg), "--corpus", corpus_dir)
    assert code == 0


def test_operational_failures_exit_1_with_message(capsys, corpus_dir):
    code, out, err = run(capsys, "readability", "--corpus", corpus_dir,
                         "--dataset", "NOPE", "--from-year", "2020", "--to-year", "2021")
    assert code == 1
    assert err.startswith("lexcorpus readability: error:")
    assert "NOPE" in err


# -- stats --------------------------------------------------------------------


def test_stats_tsv_matches_coverage_table(capsys, corpus_dir, demo_store):
    code, out, _ = run(capsys, "stats", "--corpus", corpus_dir)
    assert code == 0
    rows, totals = coverage_stats(demo_store.snapshot())
    expected_lines = ["dataset\tearliest\tlatest\tdocuments\ttokens"]
    for r in rows:
        expected_lines.append(
            f"{r.dataset}\t{r.earliest.isoformat() if r.earliest else ''}"
            f"\t{r.latest.isoformat() if r.latest else ''}\t{r.documents}\t{r.tokens}"
        )
    expected_lines.append(f"TOTAL\t\t\t{totals.documents}\t{totals.tokens}")
    assert out == "\n".join(expected_lines) + "\n"
    fc_line = next(line for line in out.splitlines() if line.startswith("FC\t"))
    assert fc_line.split("\t")[1:4] == ["2021-03-15", "2026-01-15", "8"]


def test_stats_json_matches_coverage_dict(capsys, corpus_dir, demo_store):
    code, out, _ = run(capsys, "stats", "--corpus", corpus_dir, "--format", "json")
    assert code == 0
    assert json.loads(out) == coverage_to_dict(*coverage_stats(demo_store.snapshot()))


def test_stats_out_file_instead_of_stdout(capsys, corpus_dir, tmp_path):
    target = tmp_path / "stats.tsv"
    code, out, _ = run(capsys, "stats", "--corpus", corpus_dir, "--out", str(target))
    assert code == 0
    assert out == ""
    assert target.read_text(encoding="utf-8").startswith("dataset\t")


def test_stats_with_bpe_merge_table(capsys, tmp_path):
    store = CorpusStore(tmp_path / "corpus")
    store.upsert([make_case("2025 FC 1", "lowering long")])
    base = ["stats", "--corpus", str(tmp_path / "corpus")]
    _, words_out, _ = run(capsys, *base)
    assert words_out.splitlines()[-1] == "TOTAL\t\t\t1\t2"
    _, bpe_out, _ = run(capsys, *base, "--bpe-merges", str(FIXTURES / "bpe_merges.txt"))
    assert bpe_out.splitlines()[-1] == "TOTAL\t\t\t1\t5"


# -- analytics reports --------------------------------------------------------


def test_readability_tsv_formats_three_decimals(capsys, corpus_dir, demo_store):
    code, out, _ = run(capsys, "readability", "--corpus", corpus_dir,
                       "--dataset", "FC", "--from-year", "2021", "--to-year", "2023")
    assert code == 0
    expected = ["year\tmedian_score\tdecisions"]
    for r in readability_trend(demo_store.snapshot(), "FC", 2021, 2023):
        score = f"{r.median_score:.3f}" if r.median_score is not None else ""
        expected.append(f"{r.year}\t{score}\t{r.decisions}")
    assert out == "\n".join(expected) + "\n"
    assert out.splitlines()[2] == "2022\t\t0"  # empty year: blank median, zero decisions


def test_wordcount_by_judge_tsv_hand_frozen(capsys, corpus_dir):
    code, out, _ = run(capsys, "wordcount-by-judge", "--corpus", corpus_dir, "--dataset", "FC")
    assert code == 0
    assert out == (
        "judge\tmedian_words\tdecisions\n"
        "GASCON\t0\t1\n"
        "ROY\t17\t3\n"
        "STRICKLAND\t21\t2\n"
        "GRAMMOND\t26\t1\n"
        "HENEGHAN\t26\t1\n"
        "# excluded (unknown judge): 0\n"
    )


def test_wordcount_extremes_cut(capsys, corpus_dir):
    code, out, _ = run(capsys, "wordcount-by-judge", "--corpus", corpus_dir,
                       "--dataset", "FC", "--extremes", "2")
    assert code == 0
    judges = [line.split("\t")[0] for line in out.splitlines()[1:-1]]
    assert judges == ["GASCON", "ROY", "GRAMMOND", "HENEGHAN"]


def test_wordcount_json_shape(capsys, corpus_dir, demo_store):
    code, out, _ = run(capsys, "wordcount-by-judge", "--corpus", corpus_dir,
                       "--dataset", "FC", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    report = median_wordcount_by_judge(demo_store.snapshot(), "FC")
    assert payload == {
        "rows": [
            {"judge": r.judge, "median_words": r.median_words, "decisions": r.decisions}
            for r in report.rows
        ],
        "unknown_decisions": 0,
    }


def test_weekly_volume_prints_two_tables(capsys, corpus_dir, demo_store):
    code, out, _ = run(capsys, "weekly-volume", "--corpus", corpus_dir, "--dataset", "FC")
    assert code == 0
    weeks, yearly = weekly_volume(demo_store.snapshot(), "FC")
    first = ["week\twords\tdecisions"] + [f"{w.week}\t{w.words}\t{w.decisions}" for w in weeks]
    second = ["year\tmedian_weekly_words\tweeks"] + [
        f"{y.year}\t{y.median_weekly_words:g}\t{y.weeks}" for y in yearly
    ]
    assert out == "\n".join(first) + "\n\n" + "\n".join(second) + "\n"


def test_digest_stdout_with_script_separator(capsys, corpus_dir):
    code, out, _ = run(capsys, "digest", "--corpus", corpus_dir,
                       "--dataset", "FC", "--week", "2025-W32", "--script")
    assert code == 0
    assert out.startswith("Memorandum: FC decisions for week 2025-W32")
    assert "\n=== PODCAST SCRIPT ===\n\n" in out
    memo_only, _, script = out.partition("\n=== PODCAST SCRIPT ===\n\n")
    assert "Case summaries:" in memo_only
    assert script  # non-empty script body


def test_digest_without_script_flag_omits_it(capsys, corpus_dir):
    _, out, _ = run(capsys, "digest", "--corpus", corpus_dir,
                    "--dataset", "FC", "--week", "2025-W32")
    assert "PODCAST SCRIPT" not in out


def test_digest_out_writes_memo_and_script_files(capsys, corpus_dir, tmp_path, demo_store):
    target = tmp_path / "week32.md"
    code, out, _ = run(capsys, "digest", "--corpus", corpus_dir, "--dataset", "FC",
                       "--week", "2025-W32", "--script", "--out", str(target))
    assert code == 0
    assert out == ""
    memo = weekly_digest(demo_store.snapshot(), "FC", "2025-W32",
                         classifier="keyword", summarizer="template")
    assert target.read_text(encoding="utf-8") == render_memo(memo, dataset="FC")
    script_path = tmp_path / "week32.script.md"
    assert script_path.read_text(encoding="utf-8") == digest_to_script(memo)


def test_digest_is_byte_identical_across_runs(capsys, corpus_dir):
    args = ("digest", "--corpus", corpus_dir, "--dataset", "FC", "--week", "2025-W32", "--script")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second


def test_bad_week_argument_is_an_operational_error(capsys, corpus_dir):
    code, _, err = run(capsys, "digest", "--corpus", corpus_dir,
                       "--dataset", "FC", "--week", "2025-32")
    assert code == 1
    assert "2025-32" in err


# -- validate -----------------------------------------------------------------


def test_validate_clean_corpus(capsys, corpus_dir):
    code, out, _ = run(capsys, "validate", "--corpus", corpus_dir)
    assert code == 0
    assert out == "OK: 12 record(s) valid\n"


def test_validate_reports_corrupted_stored_record(capsys, demo_store):
    records_path = demo_store.records_path
    damaged = records_path.read_text(encoding="utf-8").replace(
        '"upstream_license": "Courts terms of use"', '"upstream_license": ""', 1
    )
    records_path.write_text(damaged, encoding="utf-8")
    code, out, _ = run(capsys, "validate", "--corpus", str(demo_store.corpus_dir))
    assert code == 1
    assert "FC/2021 FC 100: empty upstream_license" in out


def test_validate_checks_a_registry_too(capsys, corpus_dir, tmp_path):
    registry = tmp_path / "sources.yaml"
    registry.write_text(
        "dataset: FC\nkind: case\nchannel: rss\nlicense_text: Courts terms of use\n",
        encoding="utf-8",
    )
    code, out, _ = run(capsys, "validate", "--corpus", corpus_dir, "--registry", str(registry))
    assert code == 1
    assert out.startswith("registry:")
    assert "feed_url" in out


# -- ingest -------------------------------------------------------------------


def _write_site(tmp_path: Path) -> Path:
    site = tmp_path / "site"
    (site / "decisions").mkdir(parents=True)
    shutil.copy(FIXTURES / "listing_full.html", site / "listing.html")
    for stem in ("fc1449", "fc1450", "fc1451"):
        (site / "decisions" / f"{stem}.html").write_text(DECISION_PAGE, encoding="utf-8")
    return site


def _listing_registry(tmp_path: Path, site: Path) -> Path:
    registry = tmp_path / "sources.yaml"
    registry.write_text(
        f"""\
dataset: FC
kind: case
channel: listing-scrape
listing_url: {(site / 'listing.html').as_uri()}
selectors:
  row: tr.decision
  citation: td.cite
  name: td.style
  date: td.released
  link: a.doclink
license_text: Courts terms of use
politeness_delay: 0.0
""",
        encoding="utf-8",
    )
    return registry


def test_ingest_listing_scrape_end_to_end(capsys, tmp_path):
    site = _write_site(tmp_path)
    registry = _listing_registry(tmp_path, site)
    corpus = tmp_path / "corpus"

    code, out, _ = run(capsys, "ingest", "--corpus", str(corpus), "--registry", str(registry))
    assert code == 0
    assert out == (
        "dataset\tchannel\tfetched\tnew\tupdated\tduplicate\tskipped\tfailed\n"
        "FC\tlisting-scrape\t3\t3\t0\t0\t0\t0\n"
    )
    store = CorpusStore(corpus)
    record = store.snapshot().get("FC", "2025 FC 1449")
    assert record is not None
    assert record.name_en == "Ahmed v. Canada (Citizenship and Immigration)"
    assert "judicial review is dismissed" in record.unofficial_text_en
    assert record.upstream_license == "Courts terms of use"

    before = store_digest(store)
    code, out, _ = run(capsys, "ingest", "--corpus", str(corpus), "--registry", str(registry))
    assert code == 0
    assert out.splitlines()[1] == "FC\tlisting-scrape\t3\t0\t0\t3\t0\t0"
    assert store_digest(store) == before  # unchanged upstream: store bytes untouched


def test_ingest_reports_skip_notes_as_comments(capsys, tmp_path):
    site = tmp_path / "site"
    (site / "decisions").mkdir(parents=True)
    shutil.copy(FIXTURES / "listing_missing_citation.html", site / "listing.html")
    for stem in ("fc1460", "fc1461", "fc1462"):
        (site / "decisions" / f"{stem}.html").write_text(DECISION_PAGE, encoding="utf-8")
    registry = _listing_registry(tmp_path, site)
    code, out, _ = run(capsys, "ingest", "--corpus", str(tmp_path / "corpus"),
                       "--registry", str(registry))
    assert code == 0
    assert "# FC: row 2: missing citation cell; skipped" in out.splitlines()


def _rss_registry(tmp_path: Path, feed: Path) -> Path:
    registry = tmp_path / "rss.yaml"
    registry.write_text(
        f"""\
dataset: FC
kind: case
channel: rss
feed_url: {feed.as_uri()}
license_text: Courts terms of use
politeness_delay: 0.0
""",
        encoding="utf-8",
    )
    return registry


def test_ingest_rss_keeps_feed_state(capsys, tmp_path):
    doc = tmp_path / "fc1449.html"
    doc.write_text(DECISION_PAGE, encoding="utf-8")
    feed = tmp_path / "feed.xml"
    feed.write_text(
        f"""<?xml version="1.0" encoding="UTF-8"?>
<rss version="2.0"><channel><title>FC decisions</title>
<item>
  <title>Ahmed v. Canada (Citizenship and Immigration), 2025 FC 1449</title>
  <link>{doc.as_uri()}</link>
  <guid>urn:decision:fc:2025fc1449</guid>
  <pubDate>Mon, 28 Jul 2025 14:00:00 GMT</pubDate>
</item>
</channel></rss>
""",
        encoding="utf-8",
    )
    registry = _rss_registry(tmp_path, feed)
    corpus = tmp_path / "corpus"

    code, out, _ = run(capsys, "ingest", "--corpus", str(corpus), "--registry", str(registry))
    assert code == 0
    assert out.splitlines()[1] == "FC\trss\t1\t1\t0\t0\t0\t0"
    state_path = corpus / "state" / "feeds" / "FC-en.json"
    assert state_path.exists()
    state_bytes = state_path.read_bytes()
    state_mtime = state_path.stat().st_mtime_ns

    # nothing new in the feed: no fetches, and the state file is not rewritten
    code, out, _ = run(capsys, "ingest", "--corpus", str(corpus), "--registry", str(registry))
    assert code == 0
    assert out.splitlines()[1] == "FC\trss\t0\t0\t0\t0\t0\t0"
    assert state_path.read_bytes() == state_bytes
    assert state_path.stat().st_mtime_ns == state_mtime


def test_ingest_channel_filter_selects_sources(capsys, tmp_path):
    site = _write_site(tmp_path)
    listing = _listing_registry(tmp_path, site).read_text(encoding="utf-8")
    registry = tmp_path / "both.yaml"
    registry.write_text(
        listing + "---\n"
        "dataset: TCC\nkind: case\nchannel: rss\n"
        "feed_url: https://example.test/unreached.xml\n"
        "license_text: Courts terms of use\n",
        encoding="utf-8",
    )
    code, out, _ = run(capsys, "ingest", "--corpus", str(tmp_path / "corpus"),
                       "--registry", str(registry), "--channel", "listing-scrape")
    assert code == 0
    body = out.splitlines()[1:]
    assert [line.split("\t")[0] for line in body] == ["FC"]


def test_ingest_json_format(capsys, tmp_path):
    site = _write_site(tmp_path)
    registry = _listing_registry(tmp_path, site)
    code, out, _ = run(capsys, "ingest", "--corpus", str(tmp_path / "corpus"),
                       "--registry", str(registry), "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload[0]["dataset"] == "FC"
    assert payload[0]["channel"] == "listing-scrape"
    assert payload[0]["new"] == 3


def test_ingest_politeness_override_speeds_up_a_slow_source(capsys, tmp_path):
    site = _write_site(tmp_path)
    registry = _listing_registry(tmp_path, site)
    slowed = registry.read_text(encoding="utf-8").replace(
        "politeness_delay: 0.0", "politeness_delay: 30.0"
    )
    registry.write_text(slowed, encoding="utf-8")
    start = time.monotonic()
    code, _, _ = run(capsys, "ingest", "--corpus", str(tmp_path / "corpus"),
                     "--registry", str(registry), "--politeness-delay", "0")
    assert code == 0
    assert time.monotonic() - start < 5.0


# -- export -------------------------------------------------------------------


def test_export_parquet_cli(capsys, corpus_dir, tmp_path):
    out_dir = tmp_path / "export"
    code, out, _ = run(capsys, "export-parquet", "--corpus", corpus_dir,
                       "--out-dir", str(out_dir))
    assert code == 0
    assert out == f"wrote 10 case row(s), 2 law row(s) to {out_dir}\n"
    assert (out_dir / "cases" / "cases-0000.parquet").exists()
    assert (out_dir / "laws" / "laws-0000.parquet").exists()
    assert (out_dir / "README.md").exists()
