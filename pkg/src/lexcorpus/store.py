"""Corpus persistence: single writer, immutable snapshots, coverage stats.

On-disk layout under the corpus directory:

    store/records.jsonl   current records, one JSON object per line, key-sorted
    store/wal.jsonl       prior versions of updated records (audit log)
    store/version         integer snapshot version
    store/.lock           writer lock

Writers rewrite records.jsonl atomically (tmp + rename); readers load
immutable snapshots and are never blocked. A batch that changes nothing is
not committed, so re-ingesting unchanged sources leaves the store files
byte-identical.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Iterable, Optional

from filelock import FileLock, Timeout

from .errors import StoreLockedError, ValidationFailedError
from .records import DocumentRecord, normalize_citation, validate_record
from .tokenizers import WORD_FALLBACK, count_tokens

_MIN_DATE = date.min


def record_sort_key(record: DocumentRecord) -> tuple:
    return (record.dataset, record.primary_citation() or "", record.kind)


def scan_sort_key(record: DocumentRecord) -> tuple:
    return (
        record.dataset,
        record.document_date() or _MIN_DATE,
        record.primary_citation() or "",
    )


@dataclass(frozen=True)
class CorpusSnapshot:
    """Immutable view of the corpus at one version."""

    records: tuple[DocumentRecord, ...]
    version: int
    _by_key: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        for record in self.records:
            for key in record.citation_keys():
                self._by_key[key] = record

    def __len__(self) -> int:
        return len(self.records)

    def get(self, dataset: str, citation: str) -> Optional[DocumentRecord]:
        """Lookup by dataset + citation (either language), normalized."""
        return self._by_key.get((dataset, normalize_citation(citation)))

    def scan(
        self,
        dataset: Optional[str] = None,
        kind: Optional[str] = None,
        date_from: Optional[date] = None,
        date_to: Optional[date] = None,
    ) -> list[DocumentRecord]:
        """Records matching all given filters, in (dataset, date, citation) order.

        Records without a document date sort first within their dataset.
        """
        out = []
        for record in self.records:
            if dataset is not None and record.dataset != dataset:
                continue
            if kind is not None and record.kind != kind:
                continue
            rec_date = record.document_date()
            if date_from is not None and (rec_date is None or rec_date < date_from):
                continue
            if date_to is not None and (rec_date is None or rec_date > date_to):
                continue
            out.append(record)
        out.sort(key=scan_sort_key)
        return out


def build_snapshot(records: Iterable[DocumentRecord], version: int = 0) -> CorpusSnapshot:
    ordered = tuple(sorted(records, key=record_sort_key))
    return CorpusSnapshot(records=ordered, version=version)


@dataclass(frozen=True)
class WriteReport:
    inserted: int = 0
    updated: int = 0
    unchanged: int = 0


@dataclass(frozen=True)
class CoverageRow:
    """Per-dataset coverage statistic: date span, document and token counts."""

    dataset: str
    earliest: Optional[date]
    latest: Optional[date]
    documents: int
    tokens: int


@dataclass(frozen=True)
class CoverageTotals:
    documents: int
    tokens: int


def coverage_stats(
    snapshot: CorpusSnapshot, tokenizer: str = WORD_FALLBACK
) -> tuple[list[CoverageRow], CoverageTotals]:
    """One row per dataset plus a totals row.

    Token counts sum ``count_tokens`` over both language texts of every
    record. Source dates are taken as-is, future-dated documents included.
    """
    groups: dict[str, list[DocumentRecord]] = {}
    for record in snapshot.records:
        groups.setdefault(record.dataset, []).append(record)

    rows = []
    for dataset in sorted(groups):
        records = groups[dataset]
        dates = [d for r in records if (d := r.document_date()) is not None]
        tokens = sum(count_tokens(text, tokenizer) for r in records for text in r.texts())
        rows.append(
            CoverageRow(
                dataset=dataset,
                earliest=min(dates) if dates else None,
                latest=max(dates) if dates else None,
                documents=len(records),
                tokens=tokens,
            )
        )
    totals = CoverageTotals(
        documents=sum(r.documents for r in rows),
        tokens=sum(r.tokens for r in rows),
    )
    return rows, totals


def coverage_to_dict(rows: list[CoverageRow], totals: CoverageTotals) -> dict:
    """JSON-ready coverage table shared by the API, tool server, and CLI."""
    return {
        "rows": [
            {
                "dataset": row.dataset,
                "earliest": row.earliest.isoformat() if row.earliest else None,
                "latest": row.latest.isoformat() if row.latest else None,
                "documents": row.documents,
                "tokens": row.tokens,
            }
            for row in rows
        ],
        "totals": {"documents": totals.documents, "tokens": totals.tokens},
    }


def record_to_store_json(record: DocumentRecord) -> str:
    return json.dumps(record.model_dump(mode="json"), ensure_ascii=False)


class CorpusStore:
    """Directory-backed corpus with the single-writer / snapshot-reader contract."""

    def __init__(self, corpus_dir: str | Path):
        self.corpus_dir = Path(corpus_dir)
        self.store_dir = self.corpus_dir / "store"
        self.records_path = self.store_dir / "records.jsonl"
        self.wal_path = self.store_dir / "wal.jsonl"
        self.version_path = self.store_dir / "version"
        self._lock = FileLock(str(self.store_dir / ".lock"))
        self.store_dir.mkdir(parents=True, exist_ok=True)

    def version(self) -> int:
        if self.version_path.exists():
            return int(self.version_path.read_text().strip())
        return 0

    def snapshot(self) -> CorpusSnapshot:
        records: list[DocumentRecord] = []
        if self.records_path.exists():
            for line in self.records_path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    records.append(DocumentRecord.model_validate(json.loads(line)))
        return build_snapshot(records, version=self.version())

    def upsert(self, records: Iterable[DocumentRecord], lock_timeout: float = 10.0) -> WriteReport:
        """Insert-or-update keyed by (dataset, citation); all-or-nothing.

        Identical content counts unchanged; differing content counts updated
        and the prior version is appended to the write-ahead log. The batch
        is rejected wholesale if any record fails validation.
        """
        batch = list(records)
        violations = {}
        for i, record in enumerate(batch):
            problems = validate_record(record)
            if problems:
                label = record.primary_citation() or f"record[{i}]"
                violations[f"{record.dataset}/{label}"] = problems
        if violations:
            raise ValidationFailedError(violations)

        try:
            with self._lock.acquire(timeout=lock_timeout):
                return self._apply(batch)
        except Timeout:
            raise StoreLockedError(f"store at {self.store_dir} is locked by another writer") from None

    def _apply(self, batch: list[DocumentRecord]) -> WriteReport:
        current = {}
        by_key = {}
        if self.records_path.exists():
            for line in self.records_path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                record = DocumentRecord.model_validate(json.loads(line))
                current[record.citation_keys()[0]] = record
                for key in record.citation_keys():
                    by_key[key] = record.citation_keys()[0]

        inserted = updated = unchanged = 0
        replaced: list[DocumentRecord] = []
        for record in batch:
            keys = record.citation_keys()
            canon = next((by_key[k] for k in keys if k in by_key), None)
            if canon is None:
                inserted += 1
            else:
                prior = current[canon]
                if prior == record:
                    unchanged += 1
                    continue
                updated += 1
                replaced.append(prior)
                del current[canon]
                for key in prior.citation_keys():
                    by_key.pop(key, None)
            current[keys[0]] = record
            for key in keys:
                by_key[key] = keys[0]

        if inserted + updated == 0:
            return WriteReport(inserted=0, updated=0, unchanged=unchanged)

        new_version = self.version() + 1
        if replaced:
            with self.wal_path.open("a", encoding="utf-8") as wal:
                for prior in sorted(replaced, key=record_sort_key):
                    entry = {"replaced_at_version": new_version, "record": prior.model_dump(mode="json")}
                    wal.write(json.dumps(entry, ensure_ascii=False) + "\n")

        ordered = sorted(current.values(), key=record_sort_key)
        tmp = self.records_path.with_suffix(".jsonl.tmp")
        with tmp.open("w", encoding="utf-8") as out:
            for record in ordered:
                out.write(record_to_store_json(record) + "\n")
        os.replace(tmp, self.records_path)
        self.version_path.write_text(f"{new_version}\n")
        return WriteReport(inserted=inserted, updated=updated, unchanged=unchanged)

    def wal_entries(self) -> list[dict]:
        if not self.wal_path.exists():
            return []
        return [
            json.loads(line)
            for line in self.wal_path.read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
