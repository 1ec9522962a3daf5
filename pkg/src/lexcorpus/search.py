"""Query layer: full-text + metadata search over a corpus snapshot.

Matching semantics are deliberately oracle-checkable: full text is
case-insensitive, diacritic-folded, terms AND-ed, no stemming. Scores are
term-frequency sums normalized by document length; ties break by date
descending then citation ascending.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from datetime import date
from functools import lru_cache
from typing import Optional

from .errors import InvalidQueryError
from .records import DocumentRecord, normalize_citation
from .store import CorpusSnapshot

MAX_PAGE_SIZE = 200
SNIPPET_LIMIT = 300

_TOKEN_RE = re.compile(r"[a-z0-9]+")


@lru_cache(maxsize=None)
def _fold_char(ch: str) -> tuple[str, ...]:
    # memoized per code point: folding is by far the hottest path in search
    return tuple(
        lowered
        for decomposed in unicodedata.normalize("NFKD", ch)
        if not unicodedata.combining(decomposed)
        for lowered in decomposed.lower()
    )


def fold(text: str) -> str:
    """Lowercase + strip diacritics (é→e), for matching only."""
    return "".join(ch for orig in text for ch in _fold_char(orig))


def fold_with_map(text: str) -> tuple[str, list[int]]:
    """Folded text plus, per folded char, the original char index it came from."""
    out: list[str] = []
    back: list[int] = []
    for i, orig in enumerate(text):
        for ch in _fold_char(orig):
            out.append(ch)
            back.append(i)
    return "".join(out), back


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(fold(text))


@dataclass(frozen=True)
class QuerySpec:
    """Search criteria; all set criteria must hold (conjunction).

    ``citation`` matches the primary citation of either language, exactly,
    after normalization (secondary citations are not searched). ``name`` is
    a folded substring match on either language's name. ``text`` terms are
    AND-ed over the folded tokens of both language texts. At least one of
    citation/name/text/date bounds/datasets must be set; a kind alone is
    not a criterion.
    """

    citation: Optional[str] = None
    name: Optional[str] = None
    text: Optional[str] = None
    date_from: Optional[date] = None
    date_to: Optional[date] = None
    datasets: Optional[tuple[str, ...]] = None
    kind: Optional[str] = None
    page: int = 1
    page_size: int = 50

    def problems(self) -> list[str]:
        out = []
        if not any([self.citation, self.name, self.text, self.date_from, self.date_to, self.datasets]):
            out.append("no criterion set")
        if self.page < 1:
            out.append("page must be >= 1")
        if not 1 <= self.page_size <= MAX_PAGE_SIZE:
            out.append(f"page_size must be in [1, {MAX_PAGE_SIZE}]")
        return out


@dataclass(frozen=True)
class SearchHit:
    dataset: str
    citation: str
    name: Optional[str]
    date: Optional[date]
    snippet: str
    score: float


@dataclass(frozen=True)
class SearchPage:
    hits: tuple[SearchHit, ...]
    total: int
    page: int
    page_size: int


@dataclass
class Index:
    """Immutable after build; concurrent queries need no locking."""

    version: int
    records: tuple[DocumentRecord, ...]
    postings: dict[str, dict[int, int]] = field(repr=False)
    doc_len: list[int] = field(repr=False)
    citations: dict[str, set[int]] = field(repr=False)

    @property
    def doc_count(self) -> int:
        return len(self.records)


def build_index(snapshot: CorpusSnapshot) -> Index:
    """Index both language texts of every record; deterministic per version."""
    postings: dict[str, dict[int, int]] = {}
    doc_len: list[int] = []
    citations: dict[str, set[int]] = {}
    for doc_id, record in enumerate(snapshot.records):
        n = 0
        for text in record.texts():
            for token in tokenize(text):
                n += 1
                postings.setdefault(token, {}).setdefault(doc_id, 0)
                postings[token][doc_id] += 1
        doc_len.append(n)
        for _, cit in record.citation_keys():
            citations.setdefault(cit, set()).add(doc_id)
    return Index(
        version=snapshot.version,
        records=snapshot.records,
        postings=postings,
        doc_len=doc_len,
        citations=citations,
    )


def _record_matches_metadata(record: DocumentRecord, q: QuerySpec) -> bool:
    if q.kind is not None and record.kind != q.kind:
        return False
    if q.datasets is not None and record.dataset not in q.datasets:
        return False
    if q.citation is not None:
        wanted = normalize_citation(q.citation)
        if wanted not in {cit for _, cit in record.citation_keys()}:
            return False
    if q.name is not None:
        needle = fold(q.name)
        names = [n for n in (record.name_en, record.name_fr) if n]
        if not any(needle in fold(n) for n in names):
            return False
    rec_date = record.document_date()
    if q.date_from is not None and (rec_date is None or rec_date < q.date_from):
        return False
    if q.date_to is not None and (rec_date is None or rec_date > q.date_to):
        return False
    return True


def _snippet(record: DocumentRecord, terms: list[str]) -> str:
    """Verbatim context window (≤ 300 chars) around the first matching term."""
    texts = [t for t in (record.unofficial_text_en, record.unofficial_text_fr) if t]
    if terms:
        for text in texts:
            folded, back = fold_with_map(text)
            positions = [p for term in terms if (p := folded.find(term)) != -1]
            if positions:
                start = back[min(positions)]
                lo = max(0, start - 100)
                return text[lo : lo + SNIPPET_LIMIT]
    return texts[0][:SNIPPET_LIMIT] if texts else ""


def search(index: Index, q: QuerySpec) -> SearchPage:
    """Exactly the records satisfying all set criteria, ranked and paginated.

    Order: score descending, ties by date descending then citation
    ascending. Pagination partitions the full ordered result list; a page
    past the end is empty with the correct total.
    """
    problems = q.problems()
    if problems:
        raise InvalidQueryError("; ".join(problems))

    terms = tokenize(q.text) if q.text else []
    if q.text and not terms:
        candidates: list[int] = []
    elif terms:
        sets = [set(index.postings.get(term, {})) for term in terms]
        candidates = sorted(set.intersection(*sets)) if sets else []
    elif q.citation is not None:
        candidates = sorted(index.citations.get(normalize_citation(q.citation), set()))
    else:
        candidates = list(range(index.doc_count))

    matches = [i for i in candidates if _record_matches_metadata(index.records[i], q)]

    def score(doc_id: int) -> float:
        if not terms:
            return 0.0
        tf = sum(index.postings[term][doc_id] for term in terms)
        return tf / max(index.doc_len[doc_id], 1)

    def order_key(doc_id: int):
        record = index.records[doc_id]
        rec_date = record.document_date() or date.min
        return (-score(doc_id), -rec_date.toordinal(), record.primary_citation() or "")

    matches.sort(key=order_key)
    total = len(matches)
    start = (q.page - 1) * q.page_size
    page_ids = matches[start : start + q.page_size]

    hits = tuple(
        SearchHit(
            dataset=index.records[i].dataset,
            citation=index.records[i].primary_citation() or "",
            name=index.records[i].primary_name(),
            date=index.records[i].document_date(),
            snippet=_snippet(index.records[i], terms),
            score=score(i),
        )
        for i in page_ids
    )
    return SearchPage(hits=hits, total=total, page=q.page, page_size=q.page_size)


def search_page_to_dict(page: SearchPage) -> dict:
    """JSON-ready serialization shared by the HTTP API and the tool server."""
    return {
        "hits": [
            {
                "dataset": h.dataset,
                "citation": h.citation,
                "name": h.name,
                "date": h.date.isoformat() if h.date else None,
                "snippet": h.snippet,
                "score": h.score,
            }
            for h in page.hits
        ],
        "total": page.total,
        "page": page.page,
        "page_size": page.page_size,
    }
