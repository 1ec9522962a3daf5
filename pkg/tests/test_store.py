"""Persistence contract: keyed upserts, no-op batches, snapshots, coverage."""

import random
import threading
from datetime import date

import pytest

from lexcorpus import CorpusStore, build_snapshot, coverage_stats
from lexcorpus.errors import StoreLockedError, ValidationFailedError
from lexcorpus.store import coverage_to_dict

from conftest import make_case, random_corpus, store_digest


def test_fresh_store_is_empty_at_version_zero(tmp_path):
    store = CorpusStore(tmp_path / "corpus")
    snap = store.snapshot()
    assert len(snap) == 0
    assert snap.version == 0


def test_insert_then_get_by_either_language_citation(tmp_path):
    store = CorpusStore(tmp_path / "corpus")
    record = make_case("2025 FC 1", "Text.").model_copy(update={"citation_fr": "2025 CF 1"})
    report = store.upsert([record])
    assert (report.inserted, report.updated, report.unchanged) == (1, 0, 0)

    snap = store.snapshot()
    assert snap.get("FC", "2025 FC 1") == record
    assert snap.get("FC", " 2025  CF 1 ") == record  # normalized lookup
    assert snap.get("TCC", "2025 FC 1") is None


def test_reupserting_identical_record_does_not_bump_version(tmp_path, demo_records):
    store = CorpusStore(tmp_path / "corpus")
    store.upsert(demo_records)
    v1 = store.version()
    digest = store_digest(store)

    report = store.upsert(demo_records)
    assert report.inserted == 0 and report.updated == 0
    assert report.unchanged == len(demo_records)
    assert store.version() == v1
    assert store_digest(store) == digest  # byte-identical, not merely equivalent


def test_update_bumps_version_and_logs_prior_record(tmp_path):
    store = CorpusStore(tmp_path / "corpus")
    v0 = make_case("2025 FC 1", "Original reasons.")
    store.upsert([v0])
    v1 = v0.model_copy(update={"unofficial_text_en": "Corrected reasons."})
    report = store.upsert([v1])

    assert (report.inserted, report.updated) == (0, 1)
    assert store.version() == 2
    assert store.snapshot().get("FC", "2025 FC 1").unofficial_text_en == "Corrected reasons."

    wal = store.wal_entries()
    assert len(wal) == 1
    assert wal[0]["replaced_at_version"] == 2
    assert wal[0]["record"]["unofficial_text_en"] == "Original reasons."


def test_batch_with_any_invalid_record_changes_nothing(tmp_path):
    store = CorpusStore(tmp_path / "corpus")
    good = make_case("2025 FC 1", "Fine.")
    bad = make_case("2025 FC 2", "No license.", upstream_license="")
    with pytest.raises(ValidationFailedError) as exc:
        store.upsert([good, bad])
    assert "FC/2025 FC 2" in exc.value.violations
    assert len(store.snapshot()) == 0
    assert store.version() == 0


def test_same_key_twice_in_one_batch_keeps_the_later_record(tmp_path):
    store = CorpusStore(tmp_path / "corpus")
    first = make_case("2025 FC 1", "Draft.")
    second = make_case("2025 FC 1", "Final.")
    report = store.upsert([first, second])
    assert report.inserted == 1 and report.updated == 1
    assert store.snapshot().get("FC", "2025 FC 1").unofficial_text_en == "Final."


def test_snapshot_is_isolated_from_later_writes(tmp_path):
    store = CorpusStore(tmp_path / "corpus")
    store.upsert([make_case("2025 FC 1", "One.")])
    old = store.snapshot()
    store.upsert([make_case("2025 FC 2", "Two.")])
    assert len(old) == 1
    assert old.get("FC", "2025 FC 2") is None
    assert len(store.snapshot()) == 2


def test_records_file_is_rewritten_in_stable_key_order(tmp_path):
    store = CorpusStore(tmp_path / "corpus")
    store.upsert([make_case("2025 FC 9", "Nine."), make_case("2025 FC 1", "One.")])
    lines = store.records_path.read_text(encoding="utf-8").splitlines()
    assert '"2025 FC 1"' in lines[0]
    assert '"2025 FC 9"' in lines[1]


def test_scan_filters_and_orders(demo_store):
    snap = demo_store.snapshot()
    fc = snap.scan(dataset="FC")
    assert [r.primary_citation() for r in fc] == [
        "2021 FC 100",
        "2021 FC 200",
        "2023 FC 300",
        "2025 FC 400",
        "2025 FC 401",
        "2025 CF 500",  # same date as FC 402; citation breaks the tie
        "2025 FC 402",
        "2026 FC 999",
    ]
    laws = snap.scan(kind="law")
    assert {r.dataset for r in laws} == {"LAWS", "LOIS"}
    windowed = snap.scan(dataset="FC", date_from=date(2025, 8, 5), date_to=date(2025, 8, 6))
    assert [r.primary_citation() for r in windowed] == ["2025 FC 401", "2025 CF 500", "2025 FC 402"]


def test_concurrent_writer_times_out_cleanly(tmp_path):
    store_a = CorpusStore(tmp_path / "corpus")
    store_b = CorpusStore(tmp_path / "corpus")
    acquired = threading.Event()
    release = threading.Event()

    def hold_lock():
        with store_a._lock.acquire():
            acquired.set()
            release.wait(timeout=10)

    holder = threading.Thread(target=hold_lock)
    holder.start()
    try:
        assert acquired.wait(timeout=5)
        with pytest.raises(StoreLockedError):
            store_b.upsert([make_case("2025 FC 1", "x")], lock_timeout=0.1)
    finally:
        release.set()
        holder.join()
    # and the writer works once the lock is free
    store_b.upsert([make_case("2025 FC 1", "x")])
    assert len(store_b.snapshot()) == 1


def test_round_trip_preserves_every_field(tmp_path):
    rng = random.Random(4821)
    records = random_corpus(rng, 40)
    store = CorpusStore(tmp_path / "corpus")
    store.upsert(records)
    by_key = {r.citation_keys()[0]: r for r in records}
    reloaded = store.snapshot()
    assert len(reloaded) == len(by_key)
    for record in reloaded.records:
        assert record == by_key[record.citation_keys()[0]]


def test_coverage_counts_documents_dates_and_tokens(demo_store):
    rows, totals = coverage_stats(demo_store.snapshot())
    by_dataset = {row.dataset: row for row in rows}
    assert sorted(by_dataset) == ["FC", "LAWS", "LOIS", "TCC"]

    fc = by_dataset["FC"]
    assert fc.documents == 8
    assert fc.earliest == date(2021, 3, 15)
    assert fc.latest == date(2026, 1, 15)  # future-dated rows are reported as-is

    assert totals.documents == 12
    assert totals.documents == sum(r.documents for r in rows)
    assert totals.tokens == sum(r.tokens for r in rows)


def test_coverage_tokens_match_a_hand_count(tmp_path):
    store = CorpusStore(tmp_path / "corpus")
    record = make_case("2025 FC 1", "five words are in here").model_copy(
        update={
            "citation_fr": "2025 CF 1",
            "unofficial_text_fr": "trois mots ici",
            "url_fr": "https://example.test/fr",
            "scraped_timestamp_fr": "2025-08-07T12:00:00Z",
        }
    )
    store.upsert([record])
    rows, totals = coverage_stats(store.snapshot())
    assert rows[0].tokens == 8  # both language texts count
    assert totals.tokens == 8


def test_dataset_with_no_dates_reports_none(tmp_path):
    snap = build_snapshot([make_case("2025 FC 1", "Undated.")])
    rows, _ = coverage_stats(snap)
    assert rows[0].earliest is None and rows[0].latest is None


def test_coverage_dict_shape(demo_store):
    rows, totals = coverage_stats(demo_store.snapshot())
    payload = coverage_to_dict(rows, totals)
    assert set(payload) == {"rows", "totals"}
    assert all(
        set(row) == {"dataset", "earliest", "latest", "documents", "tokens"}
        for row in payload["rows"]
    )
    assert payload["rows"][0]["earliest"] == "2021-03-15"
    assert payload["totals"] == {"documents": 12, "tokens": totals.tokens}
