"""Canonical document schema and validation rules.

Every record is bilingual-by-column: parallel ``*_en`` / ``*_fr`` fields
rather than a nested per-language structure, so in-memory names match the
exported Parquet columns bit for bit. A document available in one language
only is valid; many tribunals publish unilingually.
"""

from __future__ import annotations

import re
from datetime import date, datetime
from typing import Iterator, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

Kind = Literal["case", "law"]
Channel = Literal["listing-scrape", "rss", "law-repo-sync", "file-drop"]

# Dataset codes are court/tribunal style abbreviations: "FC", "SCC", "SST-GD".
_DATASET_RE = re.compile(r"^[A-Z0-9][A-Z0-9-]*$")

# Table column order of the external layout; laws additionally carry the
# two unofficial_sections columns. The `kind` discriminator is not a column:
# it is encoded by which physical dataset (cases/ or laws/) a row lives in.
CASE_COLUMNS = [
    "dataset",
    "citation_en",
    "citation_fr",
    "citation2_en",
    "citation2_fr",
    "name_en",
    "name_fr",
    "document_date_en",
    "document_date_fr",
    "url_en",
    "url_fr",
    "scraped_timestamp_en",
    "scraped_timestamp_fr",
    "unofficial_text_en",
    "unofficial_text_fr",
    "upstream_license",
]
LAW_COLUMNS = CASE_COLUMNS[:-1] + [
    "unofficial_sections_en",
    "unofficial_sections_fr",
    "upstream_license",
]


def normalize_citation(citation: str) -> str:
    """Normalize a citation for keying: trim, collapse internal whitespace.

    Case is preserved; neutral citations are case-significant.
    """
    return re.sub(r"\s+", " ", citation.strip())


class LawSection(BaseModel):
    """One section of a statute or regulation, in document order."""

    model_config = ConfigDict(frozen=True)

    label: str
    heading: Optional[str] = None
    text: str = ""


class DocumentRecord(BaseModel):
    """One bilingual legal document (court decision or law).

    Immutable value; safe to share between concurrent tasks. Section lists
    are tuples so records stay hashable.
    """

    model_config = ConfigDict(frozen=True)

    dataset: str
    kind: Kind
    citation_en: Optional[str] = None
    citation_fr: Optional[str] = None
    citation2_en: Optional[str] = None
    citation2_fr: Optional[str] = None
    name_en: Optional[str] = None
    name_fr: Optional[str] = None
    document_date_en: Optional[date] = None
    document_date_fr: Optional[date] = None
    url_en: Optional[str] = None
    url_fr: Optional[str] = None
    scraped_timestamp_en: Optional[str] = None
    scraped_timestamp_fr: Optional[str] = None
    unofficial_text_en: Optional[str] = None
    unofficial_text_fr: Optional[str] = None
    unofficial_sections_en: tuple[LawSection, ...] = ()
    unofficial_sections_fr: tuple[LawSection, ...] = ()
    upstream_license: str = ""

    def citation_keys(self) -> tuple[tuple[str, str], ...]:
        """All (dataset, normalized citation) keys this record answers to."""
        keys = []
        for cit in (self.citation_en, self.citation_fr):
            if cit and cit.strip():
                key = (self.dataset, normalize_citation(cit))
                if key not in keys:
                    keys.append(key)
        return tuple(keys)

    def primary_citation(self) -> Optional[str]:
        """Normalized primary citation, English preferred."""
        for cit in (self.citation_en, self.citation_fr):
            if cit and cit.strip():
                return normalize_citation(cit)
        return None

    def primary_name(self) -> Optional[str]:
        return self.name_en or self.name_fr

    def document_date(self) -> Optional[date]:
        return self.document_date_en or self.document_date_fr

    def texts(self) -> Iterator[str]:
        """Non-empty document texts, English first."""
        for text in (self.unofficial_text_en, self.unofficial_text_fr):
            if text:
                yield text


def record_to_json_dict(record: DocumentRecord) -> dict:
    """External JSON shape: exactly the table columns for the record's kind.

    Dates become ISO strings; law sections become [{label, heading, text}];
    there is no ``kind`` key (cases and laws are served from distinct paths).
    """
    columns = LAW_COLUMNS if record.kind == "law" else CASE_COLUMNS
    out: dict = {}
    for column in columns:
        value = getattr(record, column)
        if isinstance(value, date):
            value = value.isoformat()
        elif column.startswith("unofficial_sections"):
            value = [
                {"label": s.label, "heading": s.heading, "text": s.text} for s in value
            ]
        out[column] = value
    return out


def _parseable_timestamp(value: str) -> bool:
    try:
        datetime.fromisoformat(value.replace("Z", "+00:00"))
        return True
    except ValueError:
        return False


def validate_record(record: DocumentRecord) -> list[str]:
    """Check every corpus invariant; return the violated ones by name.

    Pure and deterministic: equal inputs yield equal violation lists. An
    empty list means the record is valid. Violations are the return value,
    never exceptions.
    """
    violations: list[str] = []

    if not record.dataset:
        violations.append("empty dataset code")
    elif not _DATASET_RE.match(record.dataset):
        violations.append("dataset code not short uppercase-alphanumeric")

    has_en = bool(record.unofficial_text_en)
    has_fr = bool(record.unofficial_text_fr)
    if not has_en and not has_fr:
        violations.append("no text in either language")

    if not record.upstream_license or not record.upstream_license.strip():
        violations.append("empty upstream_license")

    if record.kind == "case" and (record.unofficial_sections_en or record.unofficial_sections_fr):
        violations.append("sections on a case record")

    for lang, has_text in (("en", has_en), ("fr", has_fr)):
        if not has_text:
            continue
        if not getattr(record, f"url_{lang}"):
            violations.append(f"missing url_{lang} for text_{lang}")
        ts = getattr(record, f"scraped_timestamp_{lang}")
        if not ts:
            violations.append(f"missing scraped_timestamp_{lang} for text_{lang}")
        elif not _parseable_timestamp(ts):
            violations.append(f"unparseable scraped_timestamp_{lang}")

    if (
        record.document_date_en is not None
        and record.document_date_fr is not None
        and record.document_date_en != record.document_date_fr
    ):
        violations.append("document_date_en and document_date_fr differ")

    if not record.citation_keys():
        violations.append("no citation in either language")

    for lang in ("en", "fr"):
        sections = getattr(record, f"unofficial_sections_{lang}")
        for i, section in enumerate(sections):
            if not section.label:
                violations.append(f"section {i} in unofficial_sections_{lang} has empty label")

    return violations


class SelectorRules(BaseModel):
    """Named extraction rules for one listing page.

    New courts are added by configuration, not code. Selectors use a small
    CSS subset: ``tag``, ``.class``, ``#id``, ``tag.class`` and
    descendant chains ("table.decisions tr").
    """

    model_config = ConfigDict(frozen=True)

    row: str
    citation: str
    name: Optional[str] = None
    date: Optional[str] = None
    link: str
    link_attr: str = "href"
    # strptime format of the source's locale dates; ambiguous dates fail
    # the stub rather than guessing.
    date_format: str = "%Y-%m-%d"


class SourceDescriptor(BaseModel):
    """Declarative registry entry for one ingestion source."""

    model_config = ConfigDict(frozen=True)

    dataset: str
    kind: Kind
    channel: Channel
    language: Literal["en", "fr"] = "en"
    listing_url: Optional[str] = None
    feed_url: Optional[str] = None
    repo_path: Optional[str] = None
    drop_path: Optional[str] = None
    selectors: Optional[SelectorRules] = None
    license_text: str
    politeness_delay: float = Field(default=1.0, ge=0.0)
    schedule: Literal["daily", "weekly"] = "daily"

    def check(self) -> list[str]:
        """Registry-time sanity problems (empty license, missing URL, ...)."""
        problems = []
        if not self.license_text.strip():
            problems.append("license_text is empty")
        required = {
            "listing-scrape": "listing_url",
            "rss": "feed_url",
            "law-repo-sync": "repo_path",
            "file-drop": "drop_path",
        }[self.channel]
        if not getattr(self, required):
            problems.append(f"channel {self.channel} requires {required}")
        if self.channel == "listing-scrape" and self.selectors is None:
            problems.append("channel listing-scrape requires selectors")
        return problems
