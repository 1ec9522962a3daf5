"""Corpus analytics: readability trends, decision-length-by-judge tables,
weekly volume series, and the weekly digest memo / podcast script pipeline.

Everything here is a pure function of (snapshot, parameters): recomputing on
an unchanged snapshot is byte-identical. Readability and word counts use the
English text only — the readability formula is calibrated for English; a
record with no English text contributes zero words and no score.
"""

from __future__ import annotations

import json
import os
import re
import statistics
from dataclasses import dataclass
from datetime import date, timedelta
from importlib import resources
from typing import Callable, Optional

from .errors import ConfigurationError, UndefinedInputError, UnknownDatasetError
from .records import DocumentRecord
from .store import CorpusSnapshot

# ---------------------------------------------------------------------------
# Text metrics

# Tokens that end with "." without ending a sentence. Lowercased, kept as
# data so the sentence rule stays oracle-checkable by hand.
ABBREVIATIONS = frozenset(
    {
        "mr.", "mrs.", "ms.", "dr.", "prof.", "hon.", "rev.", "st.",
        "no.", "nos.", "v.", "vs.", "cf.", "e.g.", "i.e.", "etc.",
        "inc.", "ltd.", "co.", "j.", "jj.", "c.j.", "art.", "para.",
        "paras.", "s.", "ss.", "ch.", "sec.", "p.", "pp.",
    }
)

_OPENERS = "\"'“‘«([{"
_CLOSERS = "\"'”’»)]}"
_VOWEL_RUN = re.compile(r"[aeiouy]+")


@dataclass(frozen=True)
class TextMetrics:
    words: int
    sentences: int
    syllables: int


def _syllables(token: str) -> int:
    letters = "".join(ch for ch in token.lower() if ch.isalpha())
    if letters.endswith("e"):
        letters = letters[:-1]
    runs = _VOWEL_RUN.findall(letters)
    return max(len(runs), 1)


def text_metrics(text: str) -> TextMetrics:
    """Counting rules (kept simple enough to verify by hand):

    words: whitespace-delimited tokens containing at least one alphanumeric
    character. sentences: a word-bearing segment ends at a token whose last
    character (after stripping closing quotes/brackets) is . ! or ?, except
    tokens on the abbreviation guard list; a trailing segment with at least
    one word also counts. syllables: per word, letters only, one silent
    trailing 'e' dropped, maximal aeiouy runs counted, minimum 1.
    """
    words = sentences = syllables = 0
    open_segment = False
    for token in text.split():
        if any(ch.isalnum() for ch in token):
            words += 1
            syllables += _syllables(token)
            open_segment = True
        core = token.rstrip(_CLOSERS)
        if not core or core[-1] not in ".!?":
            continue
        if core[-1] == "." and core.lstrip(_OPENERS).lower() in ABBREVIATIONS:
            continue
        if open_segment:
            sentences += 1
            open_segment = False
    if open_segment:
        sentences += 1
    return TextMetrics(words=words, sentences=sentences, syllables=syllables)


def flesch_reading_ease(text: str) -> float:
    """206.835 − 1.015·(words/sentences) − 84.6·(syllables/words)."""
    m = text_metrics(text)
    if m.words == 0:
        raise UndefinedInputError("readability is undefined for text with no words")
    return 206.835 - 1.015 * (m.words / m.sentences) - 84.6 * (m.syllables / m.words)


def _english_text(record: DocumentRecord) -> str:
    return record.unofficial_text_en or ""


def _word_count(record: DocumentRecord) -> int:
    return text_metrics(_english_text(record)).words


# ---------------------------------------------------------------------------
# Topic filters

_IMM_DOCKET_RE = re.compile(r"\bIMM-\d+-\d+\b")

TopicFilter = Callable[[DocumentRecord], bool]


def immigration_topic(record: DocumentRecord) -> bool:
    """Docket heuristic: an IMM- docket in the secondary citation or header."""
    for value in (record.citation2_en, record.citation2_fr):
        if value and _IMM_DOCKET_RE.search(value):
            return True
    for text in record.texts():
        if _IMM_DOCKET_RE.search(text[:2000]):
            return True
    return False


TOPIC_FILTERS: dict[str, TopicFilter] = {
    "immigration": immigration_topic,
    "all": lambda record: True,
}


def resolve_topic(topic: Optional[str | TopicFilter]) -> TopicFilter:
    if topic is None:
        return TOPIC_FILTERS["all"]
    if callable(topic):
        return topic
    try:
        return TOPIC_FILTERS[topic]
    except KeyError:
        raise ConfigurationError(
            f"unknown topic filter {topic!r}; known: {', '.join(sorted(TOPIC_FILTERS))}"
        ) from None


def _dataset_cases(
    snapshot: CorpusSnapshot,
    dataset: str,
    date_from: Optional[date] = None,
    date_to: Optional[date] = None,
) -> list[DocumentRecord]:
    if not any(r.dataset == dataset for r in snapshot.records):
        raise UnknownDatasetError(f"dataset {dataset!r} has no documents in this corpus")
    return snapshot.scan(dataset=dataset, kind="case", date_from=date_from, date_to=date_to)


# ---------------------------------------------------------------------------
# Readability trend (worked example 1a)


@dataclass(frozen=True)
class TrendRow:
    year: int
    median_score: Optional[float]  # None marks a year with no decisions
    decisions: int


def readability_trend(
    snapshot: CorpusSnapshot, dataset: str, year_from: int, year_to: int
) -> list[TrendRow]:
    """Per-year median readability of a dataset's decisions, English text.

    Years with no scoreable decisions appear with ``median_score=None`` so
    plots show the gap rather than interpolating over it.
    """
    if year_to < year_from:
        raise UndefinedInputError("empty year range")
    records = _dataset_cases(snapshot, dataset)
    by_year: dict[int, list[float]] = {}
    for record in records:
        rec_date = record.document_date()
        if rec_date is None or not _english_text(record):
            continue
        if text_metrics(_english_text(record)).words == 0:
            continue
        by_year.setdefault(rec_date.year, []).append(flesch_reading_ease(_english_text(record)))

    rows = []
    for year in range(year_from, year_to + 1):
        scores = by_year.get(year, [])
        rows.append(
            TrendRow(
                year=year,
                median_score=statistics.median(scores) if scores else None,
                decisions=len(scores),
            )
        )
    return rows


# ---------------------------------------------------------------------------
# Judge extraction and the decision-length table (worked example 1b)

UNKNOWN_JUDGE = "UNKNOWN"
_HEADER_CHARS = 2000


def _load_judge_patterns() -> tuple[str, list[re.Pattern]]:
    raw = json.loads(
        resources.files("lexcorpus.data").joinpath("judge_patterns.json").read_text("utf-8")
    )
    return raw["unknown"], [re.compile(p) for p in raw["patterns"]]


_JUDGE_UNKNOWN_MARKER, _JUDGE_PATTERNS = _load_judge_patterns()


def extract_judge(record: DocumentRecord) -> str:
    """Uppercase surname from the decision header, or the unknown marker.

    Ordered patterns from the versioned data file run against the first
    2000 characters; no match means unknown — never a guess.
    """
    for text in (record.unofficial_text_en, record.unofficial_text_fr):
        if not text:
            continue
        head = text[:_HEADER_CHARS]
        for pattern in _JUDGE_PATTERNS:
            m = pattern.search(head)
            if m:
                return m.group(1).upper()
    return _JUDGE_UNKNOWN_MARKER


@dataclass(frozen=True)
class JudgeRow:
    judge: str
    median_words: float
    decisions: int


@dataclass(frozen=True)
class JudgeReport:
    rows: tuple[JudgeRow, ...]  # ascending by median
    unknown_decisions: int


def median_wordcount_by_judge(
    snapshot: CorpusSnapshot,
    dataset: str,
    topic: Optional[str | TopicFilter] = None,
    date_from: Optional[date] = None,
    date_to: Optional[date] = None,
) -> JudgeReport:
    """Median English word count per judge, ascending by median.

    Decisions whose judge cannot be extracted are excluded from the table
    and reported in ``unknown_decisions``. Even-sized groups take the mean
    of the two middle values.
    """
    match = resolve_topic(topic)
    counts: dict[str, list[int]] = {}
    unknown = 0
    for record in _dataset_cases(snapshot, dataset, date_from, date_to):
        if not match(record):
            continue
        judge = extract_judge(record)
        if judge == _JUDGE_UNKNOWN_MARKER:
            unknown += 1
            continue
        counts.setdefault(judge, []).append(_word_count(record))

    rows = [
        JudgeRow(judge=judge, median_words=float(statistics.median(values)), decisions=len(values))
        for judge, values in counts.items()
    ]
    rows.sort(key=lambda r: (r.median_words, r.judge))
    return JudgeReport(rows=tuple(rows), unknown_decisions=unknown)


def extremes_view(report: JudgeReport, n: int = 5) -> tuple[JudgeRow, ...]:
    """The n lowest + n highest medians, ascending (the published table's cut)."""
    rows = report.rows
    if len(rows) <= 2 * n:
        return rows
    return rows[:n] + rows[-n:]


# ---------------------------------------------------------------------------
# Weekly volume (worked example 2a)


@dataclass(frozen=True)
class WeekRow:
    week: str  # ISO-8601 week, e.g. "2025-W27"
    words: int
    decisions: int


@dataclass(frozen=True)
class YearVolume:
    year: int
    median_weekly_words: float
    weeks: int


def iso_week_of(d: date) -> str:
    return d.strftime("%G-W%V")


def _week_start(week: str) -> date:
    try:
        year, num = week.split("-W")
        return date.fromisocalendar(int(year), int(num), 1)
    except (TypeError, ValueError) as exc:
        raise UndefinedInputError(f"not an ISO week like 2025-W32: {week!r}") from exc


def weekly_volume(
    snapshot: CorpusSnapshot,
    dataset: str,
    topic: Optional[str | TopicFilter] = None,
) -> tuple[list[WeekRow], list[YearVolume]]:
    """English word totals per ISO week, plus each year's median weekly total.

    Weeks with no decisions inside the covered span count as zero weeks —
    they pull the yearly median down rather than vanishing.
    """
    match = resolve_topic(topic)
    totals: dict[str, list[int]] = {}
    for record in _dataset_cases(snapshot, dataset):
        rec_date = record.document_date()
        if rec_date is None or not match(record):
            continue
        totals.setdefault(iso_week_of(rec_date), []).append(_word_count(record))

    if not totals:
        return [], []

    first = _week_start(min(totals, key=_week_start))
    last = _week_start(max(totals, key=_week_start))
    rows: list[WeekRow] = []
    cursor = first
    while cursor <= last:
        week = iso_week_of(cursor)
        counts = totals.get(week, [])
        rows.append(WeekRow(week=week, words=sum(counts), decisions=len(counts)))
        cursor += timedelta(days=7)

    by_year: dict[int, list[int]] = {}
    for row in rows:
        by_year.setdefault(int(row.week.split("-W")[0]), []).append(row.words)
    yearly = [
        YearVolume(year=year, median_weekly_words=float(statistics.median(v)), weeks=len(v))
        for year, v in sorted(by_year.items())
    ]
    return rows, yearly


# ---------------------------------------------------------------------------
# Weekly digest memo and podcast script (worked example 2b)


@dataclass(frozen=True)
class CaseSummary:
    citation: str
    name: Optional[str]
    judge: str
    category: str
    outcome: str  # allowed | dismissed | other
    facts: str
    errors: str


@dataclass(frozen=True)
class DigestMemo:
    period: str  # ISO week
    decisions: int
    allowed: int
    words: int
    key_themes: str
    summaries: tuple[CaseSummary, ...]
    note: Optional[str] = None  # e.g. "no decisions" for an empty week


Classifier = Callable[[DocumentRecord], str]
OUTCOMES = ("allowed", "dismissed", "other")

_ALLOWED_PHRASES = (
    "application is allowed",
    "application for judicial review is allowed",
    "application for judicial review is granted",
    "appeal is allowed",
)
_DISMISSED_PHRASES = (
    "application is dismissed",
    "application for judicial review is dismissed",
    "appeal is dismissed",
)


def keyword_classifier(record: DocumentRecord) -> str:
    """Deterministic phrase matcher: allowed beats dismissed beats other."""
    text = _english_text(record).lower()
    if any(p in text for p in _ALLOWED_PHRASES):
        return "allowed"
    if any(p in text for p in _DISMISSED_PHRASES):
        return "dismissed"
    return "other"


_CATEGORY_KEYWORDS = (
    ("procedural fairness", "Procedural fairness"),
    ("credibility", "Credibility"),
    ("humanitarian and compassionate", "Humanitarian and compassionate"),
    ("pre-removal risk", "Pre-removal risk"),
    ("fraud", "Economic"),
    ("misrepresentation", "Misrepresentation"),
    ("detention", "Detention"),
    ("tax", "Tax"),
)


def _first_sentence(text: str, limit: int = 240) -> str:
    stripped = text.strip()
    if not stripped:
        return ""
    m = text_metrics(stripped)
    if m.sentences:
        # walk tokens until the first boundary, mirroring text_metrics
        out = []
        for token in stripped.split():
            out.append(token)
            core = token.rstrip(_CLOSERS)
            if core and core[-1] in ".!?":
                if core[-1] == "." and core.lstrip(_OPENERS).lower() in ABBREVIATIONS:
                    continue
                break
        sentence = " ".join(out)
    else:
        sentence = stripped
    return sentence[:limit]


def _scrub_citations(text: str, record: DocumentRecord) -> str:
    # keeps citations out of facts/errors notes so scripts can promise each
    # citation appears exactly once
    for value in (record.citation_en, record.citation_fr):
        if value:
            text = text.replace(value, "this matter")
    return text


Summarizer = Callable[[DocumentRecord, str], tuple[str, str, str]]


def template_summarizer(record: DocumentRecord, outcome: str) -> tuple[str, str, str]:
    """(category, facts note, errors note), fully deterministic."""
    text = _english_text(record) or (record.unofficial_text_fr or "")
    lower = text.lower()
    category = next((label for kw, label in _CATEGORY_KEYWORDS if kw in lower), "General")
    facts = _scrub_citations(_first_sentence(text), record) or "No facts note available."
    if outcome == "allowed":
        errors = "The court found a reviewable error and sent the matter back."
    elif outcome == "dismissed":
        errors = "No reviewable error was found."
    else:
        errors = "Outcome not classified."
    return category, facts, errors


CLASSIFIERS: dict[str, Classifier] = {"keyword": keyword_classifier}
SUMMARIZERS: dict[str, Summarizer] = {"template": template_summarizer}


def _resolve(registry: dict, name_or_fn, kind: str):
    if callable(name_or_fn):
        return name_or_fn
    try:
        return registry[name_or_fn]
    except KeyError:
        raise ConfigurationError(
            f"unknown {kind} {name_or_fn!r}; known: {', '.join(sorted(registry))}"
        ) from None


def weekly_digest(
    snapshot: CorpusSnapshot,
    dataset: str,
    iso_week: str,
    classifier: str | Classifier = "keyword",
    summarizer: str | Summarizer = "template",
    topic: Optional[str | TopicFilter] = None,
) -> DigestMemo:
    """One memo for one ISO week: totals, themes, per-decision summaries.

    Totals satisfy: allowed ≤ decisions; words = sum of the included
    decisions' English word counts; one summary per decision. Summaries are
    ordered by category then citation.
    """
    classify = _resolve(CLASSIFIERS, classifier, "classifier")
    summarize = _resolve(SUMMARIZERS, summarizer, "summarizer")
    match = resolve_topic(topic)
    _week_start(iso_week)  # validates the period format early

    picked = [
        r
        for r in _dataset_cases(snapshot, dataset)
        if (d := r.document_date()) is not None and iso_week_of(d) == iso_week and match(r)
    ]

    summaries = []
    allowed = words = 0
    for record in picked:
        outcome = classify(record)
        if outcome not in OUTCOMES:
            raise ConfigurationError(f"classifier returned {outcome!r}, expected one of {OUTCOMES}")
        category, facts, errors = summarize(record, outcome)
        if outcome == "allowed":
            allowed += 1
        words += _word_count(record)
        summaries.append(
            CaseSummary(
                citation=record.primary_citation() or "",
                name=record.primary_name(),
                judge=extract_judge(record),
                category=category,
                outcome=outcome,
                facts=facts,
                errors=errors,
            )
        )
    summaries.sort(key=lambda s: (s.category, s.citation))

    if not picked:
        themes, note = "", "no decisions released this week"
    else:
        note = None
        cats = sorted({s.category for s in summaries})
        themes = (
            f"The court released {len(picked)} decision(s); "
            f"{allowed} allowed the application. Topics: {', '.join(cats)}."
        )
    return DigestMemo(
        period=iso_week,
        decisions=len(picked),
        allowed=allowed,
        words=words,
        key_themes=themes,
        summaries=tuple(summaries),
        note=note,
    )


def _judge_suffix(judge: str) -> str:
    return "" if judge == _JUDGE_UNKNOWN_MARKER else f" ({judge.title()} J.)"


def render_memo(memo: DigestMemo, dataset: Optional[str] = None) -> str:
    """Plain-text memo: Overview / Key themes / Case summaries."""
    title = f"Memorandum: decisions for week {memo.period}"
    if dataset:
        title = f"Memorandum: {dataset} decisions for week {memo.period}"
    lines = [
        title,
        "",
        "Overview:",
        f"- Total decisions: {memo.decisions}",
        f"- Applications allowed: {memo.allowed}",
        f"- Total words released: {memo.words}",
        "",
        "Key themes:",
        memo.key_themes if memo.key_themes else (memo.note or ""),
        "",
        "Case summaries:",
    ]
    if not memo.summaries:
        lines.append(memo.note or "None.")
    for i, s in enumerate(memo.summaries, start=1):
        head = f"{s.name}, {s.citation}" if s.name else s.citation
        lines.append(
            f"{i}) {head}{_judge_suffix(s.judge)} – {s.category} – "
            f"Facts: {s.facts} – Errors: {s.errors}"
        )
    return "\n".join(lines) + "\n"


def digest_to_script(memo: DigestMemo) -> str:
    """Podcast script: intro, one segment per case, outro.

    Every citation in the memo appears exactly once (in its own segment);
    the intro and outro stay citation-free.
    """
    lines = [
        f"Welcome to the weekly docket review for {memo.period}.",
        f"This week the court released {memo.decisions} decision(s), "
        f"allowing the application in {memo.allowed}, "
        f"for a total of {memo.words} words.",
        "",
    ]
    if not memo.summaries:
        lines.append("There were no decisions to report this week.")
        lines.append("")
    for i, s in enumerate(memo.summaries, start=1):
        opener = "Our first case" if i == 1 else "Next up"
        head = f"{s.name}, cited as {s.citation}" if s.name else f"The decision cited as {s.citation}"
        segment = [
            f"{opener}: {head}.",
            f"Category: {s.category}.",
            f"Facts: {s.facts}",
            f"Outcome: the application was {s.outcome if s.outcome != 'other' else 'resolved otherwise'}. {s.errors}",
        ]
        lines.append(" ".join(segment))
        lines.append("")
    lines.append("That is all for this week. Thanks for listening.")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Optional external language-model classifier/summarizer (never used in tests)

_ENV_BASE_URL = "LEXCORPUS_MODEL_BASE_URL"
_ENV_API_KEY = "LEXCORPUS_MODEL_API_KEY"
_ENV_MODEL = "LEXCORPUS_MODEL_NAME"


class ExternalModelClient:
    """Chat-completion-style HTTP client configured from the environment.

    Reads LEXCORPUS_MODEL_BASE_URL / LEXCORPUS_MODEL_API_KEY /
    LEXCORPUS_MODEL_NAME. POSTs {model, messages:[{role,content}...]} to
    <base>/chat/completions and returns choices[0].message.content. This is
    the generative path for digests; the deterministic keyword/template
    implementations remain the defaults and the only ones tests exercise.
    """

    def __init__(self, timeout: float = 60.0):
        base = os.environ.get(_ENV_BASE_URL)
        if not base:
            raise ConfigurationError(f"{_ENV_BASE_URL} is not set")
        self.base_url = base.rstrip("/")
        self.api_key = os.environ.get(_ENV_API_KEY, "")
        self.model = os.environ.get(_ENV_MODEL, "")
        self.timeout = timeout

    def complete(self, system: str, user: str) -> str:
        import urllib.request

        body = json.dumps(
            {
                "model": self.model,
                "messages": [
                    {"role": "system", "content": system},
                    {"role": "user", "content": user},
                ],
            }
        ).encode("utf-8")
        req = urllib.request.Request(
            f"{self.base_url}/chat/completions",
            data=body,
            headers={
                "Content-Type": "application/json",
                "Authorization": f"Bearer {self.api_key}",
            },
        )
        with urllib.request.urlopen(req, timeout=self.timeout) as resp:
            payload = json.loads(resp.read().decode("utf-8"))
        return payload["choices"][0]["message"]["content"]


def model_classifier(record: DocumentRecord) -> str:
    client = ExternalModelClient()
    answer = client.complete(
        "Classify the outcome of this court decision. Reply with exactly one "
        "word: allowed, dismissed, or other.",
        _english_text(record)[:6000],
    )
    cleaned = answer.strip().lower()
    return cleaned if cleaned in OUTCOMES else "other"


def model_summarizer(record: DocumentRecord, outcome: str) -> tuple[str, str, str]:
    client = ExternalModelClient()
    answer = client.complete(
        "Summarize this court decision as JSON with keys category, facts, "
        "errors. One short sentence each.",
        _english_text(record)[:6000],
    )
    try:
        data = json.loads(answer)
        return (
            str(data.get("category", "General")),
            _scrub_citations(str(data.get("facts", "")), record),
            str(data.get("errors", "")),
        )
    except json.JSONDecodeError:
        return "General", _scrub_citations(answer[:240], record), ""


CLASSIFIERS["model"] = model_classifier
SUMMARIZERS["model"] = model_summarizer
