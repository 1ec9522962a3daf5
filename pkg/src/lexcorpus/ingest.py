"""Acquisition pipelines: listing pages, syndication feeds, legislation XML,
and file drops, all normalized into validated DocumentRecords.

Channel cadence (daily feeds, weekly law sync) belongs to the caller's
scheduler; everything here is cadence-agnostic and idempotent, so re-running
an unchanged source leaves the store byte-identical.
"""

from __future__ import annotations

import email.utils
import hashlib
import re
import time
import urllib.request
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Callable, Optional
from urllib.parse import urljoin, urlsplit

import yaml
from pydantic import ValidationError

from .errors import ConfigurationError, MarkupParseError
from .htmltext import html_to_text, parse_html
from .records import (
    DocumentRecord,
    LawSection,
    SourceDescriptor,
    validate_record,
)
from .store import CorpusStore

Clock = Callable[[], datetime]
Fetcher = Callable[[str], str]

# Neutral citations as they appear in feed/listing titles: "2025 FC 1449".
_NEUTRAL_CITATION_RE = re.compile(r"\b\d{4}\s+[A-Z][A-Za-z]{1,9}\s+\d+\b")

_ATOM = "{http://www.w3.org/2005/Atom}"


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


def _stamp(clock: Optional[Clock]) -> str:
    now = (clock or _utcnow)()
    return now.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def text_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class DocumentStub:
    """A discovered document awaiting fetch: metadata candidates + where to get it."""

    dataset: str
    url: str
    language: str = "en"
    citation: Optional[str] = None
    name: Optional[str] = None
    date: Optional[date] = None

    def problems(self) -> list[str]:
        out = []
        if not self.url:
            out.append("empty fetch URL")
        if self.language not in ("en", "fr"):
            out.append(f"language must be en or fr, got {self.language!r}")
        return out


@dataclass(frozen=True)
class FeedState:
    """Seen-item identifiers for one feed; the set only ever grows."""

    seen: frozenset[str] = frozenset()
    last_poll: Optional[str] = None

    @classmethod
    def empty(cls) -> "FeedState":
        return cls()

    def to_json(self) -> dict:
        return {"seen": sorted(self.seen), "last_poll": self.last_poll}

    @classmethod
    def from_json(cls, data: dict) -> "FeedState":
        return cls(seen=frozenset(data.get("seen", ())), last_poll=data.get("last_poll"))


@dataclass(frozen=True)
class PollResult:
    stubs: tuple[DocumentStub, ...]
    state: FeedState
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class IngestReport:
    fetched: int = 0
    new: int = 0
    updated: int = 0
    duplicate: int = 0
    skipped: int = 0
    failed: int = 0
    notes: tuple[str, ...] = ()

    def consistent(self) -> bool:
        return self.fetched == self.new + self.updated + self.duplicate + self.skipped + self.failed

    def as_dict(self) -> dict:
        return {
            "fetched": self.fetched,
            "new": self.new,
            "updated": self.updated,
            "duplicate": self.duplicate,
            "skipped": self.skipped,
            "failed": self.failed,
            "notes": list(self.notes),
        }


# --------------------------------------------------------------------------
# Listing pages


def parse_listing(page_content: str, source: SourceDescriptor) -> tuple[list[DocumentStub], list[str]]:
    """One stub per decision row that yields a citation and a link.

    Rows missing either, or with a date that does not parse under the
    source's declared format, are skipped with a note (never guessed).
    """
    if source.channel != "listing-scrape":
        raise ConfigurationError(f"parse_listing needs a listing-scrape source, got {source.channel}")
    rules = source.selectors
    if rules is None:
        raise ConfigurationError(f"source {source.dataset} has no selector rules")

    tree = parse_html(page_content)
    stubs: list[DocumentStub] = []
    notes: list[str] = []
    for i, row in enumerate(tree.select(rules.row), start=1):
        cit_el = row.select_one(rules.citation)
        citation = cit_el.text() if cit_el is not None else ""
        link_el = row.select_one(rules.link)
        href = link_el.attrs.get(rules.link_attr, "") if link_el is not None else ""
        if not citation:
            notes.append(f"row {i}: missing citation cell; skipped")
            continue
        if not href:
            notes.append(f"row {i}: missing link; skipped")
            continue

        name = None
        if rules.name:
            name_el = row.select_one(rules.name)
            name = name_el.text() if name_el is not None else None

        row_date = None
        if rules.date:
            date_el = row.select_one(rules.date)
            if date_el is not None:
                raw = date_el.text()
                try:
                    row_date = datetime.strptime(raw, rules.date_format).date()
                except ValueError:
                    notes.append(f"row {i}: date {raw!r} does not match {rules.date_format}; skipped")
                    continue

        stubs.append(
            DocumentStub(
                dataset=source.dataset,
                url=urljoin(source.listing_url or "", href),
                language=source.language,
                citation=citation,
                name=name or None,
                date=row_date,
            )
        )
    return stubs, notes


# --------------------------------------------------------------------------
# Syndication feeds (RSS 2.0 and Atom)


def _xml_offset(content: str, exc: ET.ParseError) -> int:
    line, column = exc.position
    lines = content.splitlines(keepends=True)
    prefix = "".join(lines[: line - 1])
    return len(prefix.encode("utf-8")) + column


def split_feed_title(title: str) -> tuple[Optional[str], Optional[str]]:
    """Court feeds title items "<style of cause>, <neutral citation>"."""
    if not title:
        return None, None
    m = _NEUTRAL_CITATION_RE.search(title)
    if not m:
        return None, title.strip() or None
    name = (title[: m.start()] + title[m.end() :]).strip(" \t,;:–—-")
    return m.group(0), name or None


def _feed_items(root: ET.Element) -> list[dict]:
    items = []
    if root.tag == "rss":
        for item in root.iter("item"):
            items.append(
                {
                    "id": item.findtext("guid") or None,
                    "link": (item.findtext("link") or "").strip() or None,
                    "title": (item.findtext("title") or "").strip(),
                    "date_raw": item.findtext("pubDate"),
                    "date_kind": "rfc822",
                }
            )
    elif root.tag in (f"{_ATOM}feed", "feed"):
        ns = _ATOM if root.tag.startswith("{") else ""
        for entry in root.iter(f"{ns}entry"):
            href = None
            for link in entry.findall(f"{ns}link"):
                rel = link.attrib.get("rel", "alternate")
                if rel == "alternate" and link.attrib.get("href"):
                    href = link.attrib["href"]
                    break
            items.append(
                {
                    "id": (entry.findtext(f"{ns}id") or "").strip() or None,
                    "link": href,
                    "title": (entry.findtext(f"{ns}title") or "").strip(),
                    "date_raw": entry.findtext(f"{ns}updated") or entry.findtext(f"{ns}published"),
                    "date_kind": "iso",
                }
            )
    else:
        raise MarkupParseError(f"not a recognized feed document (root element {root.tag!r})")
    return items


def _item_date(raw: Optional[str], kind: str) -> Optional[date]:
    if not raw:
        return None
    try:
        if kind == "rfc822":
            return email.utils.parsedate_to_datetime(raw).date()
        return datetime.fromisoformat(raw.replace("Z", "+00:00")).date()
    except Exception:
        return None


def poll_feed(
    feed_content: str,
    state: FeedState,
    source: Optional[SourceDescriptor] = None,
    clock: Optional[Clock] = None,
) -> PollResult:
    """Stubs for feed items not yet in ``state``; the seen-set only grows.

    Polling the same feed again with the carried-forward state yields no
    stubs and returns the state object unchanged (so persisted state files
    stay byte-identical across no-op polls).
    """
    try:
        root = ET.fromstring(feed_content)
    except ET.ParseError as exc:
        raise MarkupParseError("feed is not well-formed XML", offset=_xml_offset(feed_content, exc)) from exc

    notes: list[str] = []
    stubs: list[DocumentStub] = []
    ids: set[str] = set()
    for item in _feed_items(root):
        item_id = item["id"] or item["link"]
        if not item["link"]:
            label = item_id or item["title"] or "<unidentified item>"
            notes.append(f"item {label}: no link; skipped")
            if item_id:
                ids.add(item_id)
            continue
        ids.add(item_id)
        if item_id in state.seen:
            continue
        citation, name = split_feed_title(item["title"])
        stubs.append(
            DocumentStub(
                dataset=source.dataset if source else "",
                url=item["link"],
                language=source.language if source else "en",
                citation=citation,
                name=name,
                date=_item_date(item["date_raw"], item["date_kind"]),
            )
        )

    merged = state.seen | ids
    if merged == state.seen:
        return PollResult(stubs=tuple(stubs), state=state, notes=tuple(notes))
    new_state = FeedState(seen=frozenset(merged), last_poll=_stamp(clock))
    return PollResult(stubs=tuple(stubs), state=new_state, notes=tuple(notes))


# --------------------------------------------------------------------------
# Legislation XML


def parse_law_xml(
    xml_content: str,
    source: SourceDescriptor,
    clock: Optional[Clock] = None,
    origin: Optional[str] = None,
) -> tuple[DocumentRecord, list[str]]:
    """Normalize one consolidated-statute XML file into a law record.

    Expected layout (the law repository's format, documented in the README):
    Identification/{ShortTitle,Chapter,ConsolidationDate} and
    Body/Section/{Label,MarginalNote,Text,Subsection/{Label,Text}}.
    Subsection text folds into its parent section; the flattened full text
    embeds every section's text verbatim.
    """
    if source.channel != "law-repo-sync":
        raise ConfigurationError(f"parse_law_xml needs a law-repo-sync source, got {source.channel}")
    try:
        root = ET.fromstring(xml_content)
    except ET.ParseError as exc:
        raise MarkupParseError("law XML is not well-formed", offset=_xml_offset(xml_content, exc)) from exc

    warnings: list[str] = []
    title = (root.findtext("Identification/ShortTitle") or "").strip()
    chapter = (root.findtext("Identification/Chapter") or "").strip()
    consolidated = (root.findtext("Identification/ConsolidationDate") or "").strip()
    if not chapter:
        warnings.append("no Chapter element; record has no citation")

    sections: list[LawSection] = []
    for idx, sec in enumerate(root.findall("Body/Section"), start=1):
        label = (sec.findtext("Label") or "").strip()
        if not label:
            label = str(idx)
            warnings.append(f"section {idx}: missing label; using position")
        heading = (sec.findtext("MarginalNote") or "").strip() or None
        parts = []
        own = (sec.findtext("Text") or "").strip()
        if own:
            parts.append(own)
        for sub in sec.findall("Subsection"):
            sub_label = (sub.findtext("Label") or "").strip()
            sub_text = (sub.findtext("Text") or "").strip()
            if sub_text:
                parts.append(f"{sub_label} {sub_text}".strip())
        sections.append(LawSection(label=label, heading=heading, text=" ".join(parts)))
    if not sections:
        warnings.append("no sections extracted")

    doc_date = None
    if consolidated:
        try:
            doc_date = date.fromisoformat(consolidated)
        except ValueError:
            warnings.append(f"unparseable ConsolidationDate {consolidated!r}")

    blocks = [title] if title else []
    if chapter:
        blocks.append(chapter)
    for s in sections:
        head = f"{s.label}."
        if s.heading:
            head += f" {s.heading}"
        blocks.append(f"{head}\n{s.text}" if s.text else head)
    flattened = "\n\n".join(blocks)

    lang = source.language
    fields = {
        "dataset": source.dataset,
        "kind": "law",
        f"citation_{lang}": chapter or None,
        f"name_{lang}": title or None,
        f"document_date_{lang}": doc_date,
        f"url_{lang}": origin or (source.repo_path or source.dataset),
        f"scraped_timestamp_{lang}": _stamp(clock),
        f"unofficial_text_{lang}": flattened,
        f"unofficial_sections_{lang}": tuple(sections),
        "upstream_license": source.license_text,
    }
    return DocumentRecord(**fields), warnings


# --------------------------------------------------------------------------
# Batch commit with digest-based change detection


_PER_LANGUAGE_FIELDS = (
    "citation",
    "citation2",
    "name",
    "document_date",
    "url",
    "scraped_timestamp",
    "unofficial_text",
    "unofficial_sections",
)


def _merge_language(existing: DocumentRecord, incoming: DocumentRecord, lang: str) -> DocumentRecord:
    update = {}
    for base in _PER_LANGUAGE_FIELDS:
        value = getattr(incoming, f"{base}_{lang}")
        if value is not None:
            update[f"{base}_{lang}"] = value
    update["upstream_license"] = incoming.upstream_license
    return existing.model_copy(update=update)


def _find_existing(store_snapshot, record: DocumentRecord) -> Optional[DocumentRecord]:
    for _, citation in record.citation_keys():
        found = store_snapshot.get(record.dataset, citation)
        if found is not None:
            return found
    return None


def commit_records(records: list[DocumentRecord], store: CorpusStore) -> IngestReport:
    """Classify against the stored corpus and write only real changes.

    A record whose text (per language) digests identically to what the
    store already holds is a duplicate and is not rewritten — so re-running
    an unchanged source never commits and the store stays byte-identical.
    """
    snapshot = store.snapshot()
    to_write: list[DocumentRecord] = []
    new = updated = duplicate = 0
    notes: list[str] = []

    staged = dict()  # citation key -> already-staged record, for intra-batch dupes
    for record in records:
        existing = _find_existing(snapshot, record)
        for key in record.citation_keys():
            if key in staged:
                existing = staged[key]
                break
        langs = [lang for lang in ("en", "fr") if getattr(record, f"unofficial_text_{lang}")]
        if existing is not None:
            same = all(
                (getattr(existing, f"unofficial_text_{lang}") or "") != ""
                and text_digest(getattr(existing, f"unofficial_text_{lang}"))
                == text_digest(getattr(record, f"unofficial_text_{lang}"))
                for lang in langs
            )
            if same:
                duplicate += 1
                continue
            merged = existing
            for lang in langs:
                merged = _merge_language(merged, record, lang)
            to_write.append(merged)
            for key in merged.citation_keys():
                staged[key] = merged
            updated += 1
        else:
            to_write.append(record)
            for key in record.citation_keys():
                staged[key] = record
            new += 1

    if to_write:
        store.upsert(to_write)
    return IngestReport(
        fetched=len(records),
        new=new,
        updated=updated,
        duplicate=duplicate,
        notes=tuple(notes),
    )


def ingest_batch(
    stubs: list[DocumentStub],
    fetcher: Fetcher,
    source: SourceDescriptor,
    store: CorpusStore,
    clock: Optional[Clock] = None,
) -> IngestReport:
    """Fetch every stub, normalize, validate, and commit through the store.

    Licenses come from the source descriptor, never the document; the
    scraped timestamp is the fetch time. Fetch failures count as failed,
    validation failures as skipped, unchanged text as duplicate.
    """
    skipped = failed = 0
    notes: list[str] = []
    candidates: list[DocumentRecord] = []

    for stub in stubs:
        if stub.dataset != source.dataset:
            raise ConfigurationError(
                f"stub dataset {stub.dataset!r} does not match source {source.dataset!r}"
            )
        stub_problems = stub.problems()
        if stub_problems:
            skipped += 1
            notes.append(f"{stub.url or stub.citation or '<stub>'}: {'; '.join(stub_problems)}")
            continue
        try:
            content = fetcher(stub.url)
        except Exception as exc:
            failed += 1
            notes.append(f"{stub.url}: fetch failed: {exc}")
            continue

        try:
            text = html_to_text(content)
        except MarkupParseError:
            text = content
        lang = stub.language
        record = DocumentRecord(
            **{
                "dataset": stub.dataset,
                "kind": source.kind,
                f"citation_{lang}": stub.citation,
                f"name_{lang}": stub.name,
                f"document_date_{lang}": stub.date,
                f"url_{lang}": stub.url,
                f"scraped_timestamp_{lang}": _stamp(clock),
                f"unofficial_text_{lang}": text,
                "upstream_license": source.license_text,
            }
        )
        violations = validate_record(record)
        if violations:
            skipped += 1
            notes.append(f"{stub.url}: validation failed: {'; '.join(violations)}")
            continue
        candidates.append(record)

    committed = commit_records(candidates, store)
    return IngestReport(
        fetched=len(stubs),
        new=committed.new,
        updated=committed.updated,
        duplicate=committed.duplicate,
        skipped=skipped,
        failed=failed,
        notes=tuple(notes) + committed.notes,
    )


# --------------------------------------------------------------------------
# File drop


def _read_local(url: str) -> str:
    return Path(url).read_text(encoding="utf-8")


def _sidecar_for(doc_path: Path) -> Optional[Path]:
    exact = doc_path.with_name(doc_path.name + ".meta")
    if exact.exists():
        return exact
    stem = doc_path.with_suffix(".meta")
    return stem if stem.exists() else None


def import_file_drop(
    directory: str | Path,
    source: SourceDescriptor,
    store: CorpusStore,
    clock: Optional[Clock] = None,
) -> IngestReport:
    """Ingest <document> + <document>.meta pairs from a drop directory.

    The sidecar carries dataset, citation, name, date, language. Dedup runs
    against the store itself, so re-running the same directory counts
    everything duplicate and writes nothing.
    """
    if source.channel != "file-drop":
        raise ConfigurationError(f"import_file_drop needs a file-drop source, got {source.channel}")
    root = Path(directory)
    if not root.is_dir():
        raise ConfigurationError(f"drop directory {root} does not exist")

    stubs: list[DocumentStub] = []
    skipped = 0
    notes: list[str] = []
    doc_paths = sorted(
        p for p in root.iterdir() if p.is_file() and not p.name.endswith(".meta")
    )
    for path in doc_paths:
        sidecar = _sidecar_for(path)
        if sidecar is None:
            skipped += 1
            notes.append(f"{path.name}: no .meta sidecar; skipped")
            continue
        try:
            meta = yaml.safe_load(sidecar.read_text(encoding="utf-8")) or {}
        except yaml.YAMLError as exc:
            skipped += 1
            notes.append(f"{path.name}: unreadable sidecar: {exc}")
            continue
        if not meta.get("citation"):
            skipped += 1
            notes.append(f"{path.name}: sidecar missing citation; skipped")
            continue
        if meta.get("dataset", source.dataset) != source.dataset:
            skipped += 1
            notes.append(f"{path.name}: sidecar dataset {meta.get('dataset')!r} does not match source; skipped")
            continue
        meta_date = None
        if meta.get("date"):
            raw = meta["date"]
            if isinstance(raw, date):
                meta_date = raw
            else:
                try:
                    meta_date = date.fromisoformat(str(raw))
                except ValueError:
                    skipped += 1
                    notes.append(f"{path.name}: sidecar date {raw!r} is not ISO 8601; skipped")
                    continue
        stubs.append(
            DocumentStub(
                dataset=source.dataset,
                url=str(path),
                language=meta.get("language", source.language),
                citation=str(meta["citation"]),
                name=meta.get("name"),
                date=meta_date,
            )
        )

    batch = ingest_batch(stubs, _read_local, source, store, clock=clock)
    return IngestReport(
        fetched=batch.fetched + skipped,
        new=batch.new,
        updated=batch.updated,
        duplicate=batch.duplicate,
        skipped=batch.skipped + skipped,
        failed=batch.failed,
        notes=tuple(notes) + batch.notes,
    )


# --------------------------------------------------------------------------
# Fetching and the source registry


class UrlFetcher:
    """urllib-based fetcher with a per-host politeness delay.

    Fetches against the same host are spaced at least ``politeness_delay``
    seconds apart (terms-of-service compliance); distinct hosts are
    independent. file:// URLs work for local fixtures and law repos.
    """

    def __init__(self, politeness_delay: float = 1.0, timeout: float = 30.0):
        self.politeness_delay = politeness_delay
        self.timeout = timeout
        self._last_fetch: dict[str, float] = {}

    def __call__(self, url: str) -> str:
        host = urlsplit(url).netloc or "<local>"
        last = self._last_fetch.get(host)
        if last is not None:
            remaining = self.politeness_delay - (time.monotonic() - last)
            if remaining > 0:
                time.sleep(remaining)
        req = urllib.request.Request(url, headers={"User-Agent": "lexcorpus-ingest"})
        with urllib.request.urlopen(req, timeout=self.timeout) as resp:
            data = resp.read()
        self._last_fetch[host] = time.monotonic()
        return data.decode("utf-8", errors="replace")


def load_registry(path: str | Path) -> list[SourceDescriptor]:
    """Parse the multi-document YAML source registry (one source per doc)."""
    raw_docs = list(yaml.safe_load_all(Path(path).read_text(encoding="utf-8")))
    sources: list[SourceDescriptor] = []
    for i, raw in enumerate(raw_docs, start=1):
        if raw is None:
            continue
        if not isinstance(raw, dict):
            raise ConfigurationError(f"{path}: registry entry {i} is not a mapping")
        try:
            descriptor = SourceDescriptor.model_validate(raw)
        except ValidationError as exc:
            raise ConfigurationError(f"{path}: registry entry {i}: {exc}") from exc
        problems = descriptor.check()
        if problems:
            raise ConfigurationError(
                f"{path}: registry entry {i} ({descriptor.dataset}): {'; '.join(problems)}"
            )
        sources.append(descriptor)
    return sources


def sync_law_repo(
    source: SourceDescriptor,
    store: CorpusStore,
    clock: Optional[Clock] = None,
) -> IngestReport:
    """Parse every XML file under the source's repo path and commit changes."""
    if source.channel != "law-repo-sync":
        raise ConfigurationError(f"sync_law_repo needs a law-repo-sync source, got {source.channel}")
    if not source.repo_path:
        raise ConfigurationError(f"source {source.dataset} has no repo_path")
    repo = Path(source.repo_path)
    if not repo.is_dir():
        raise ConfigurationError(f"law repo path {repo} does not exist")

    records: list[DocumentRecord] = []
    skipped = 0
    notes: list[str] = []
    for path in sorted(repo.rglob("*.xml")):
        try:
            record, warnings = parse_law_xml(
                path.read_text(encoding="utf-8"), source, clock=clock, origin=str(path)
            )
        except MarkupParseError as exc:
            skipped += 1
            notes.append(f"{path.name}: {exc}")
            continue
        notes.extend(f"{path.name}: {w}" for w in warnings)
        violations = validate_record(record)
        if violations:
            skipped += 1
            notes.append(f"{path.name}: validation failed: {'; '.join(violations)}")
            continue
        records.append(record)

    committed = commit_records(records, store)
    return IngestReport(
        fetched=len(records) + skipped,
        new=committed.new,
        updated=committed.updated,
        duplicate=committed.duplicate,
        skipped=skipped,
        failed=0,
        notes=tuple(notes) + committed.notes,
    )
