"""Shared test fixtures: deterministic demo corpus, record factories,
randomized-corpus generators, fake fetchers, and a fixed clock.

No test touches the network; fetches go through file:// URLs or scripted
fakes, and timestamps come from the fixed clock so stored bytes are stable.
"""

from __future__ import annotations

import hashlib
import random
from datetime import date, datetime, timezone
from pathlib import Path

import pytest

from lexcorpus import CorpusStore, DocumentRecord, LawSection

FIXTURES = Path(__file__).parent / "fixtures"


def fixed_clock() -> datetime:
    return datetime(2025, 8, 7, 12, 0, 0, tzinfo=timezone.utc)


FIXED_STAMP = "2025-08-07T12:00:00Z"


def make_case(
    citation: str,
    text: str,
    *,
    dataset: str = "FC",
    lang: str = "en",
    name: str | None = None,
    doc_date: date | None = None,
    **extra,
) -> DocumentRecord:
    fields = {
        "dataset": dataset,
        "kind": "case",
        f"citation_{lang}": citation,
        f"name_{lang}": name,
        f"document_date_{lang}": doc_date,
        f"url_{lang}": f"https://example.test/{dataset}/{citation.replace(' ', '-')}",
        f"scraped_timestamp_{lang}": FIXED_STAMP,
        f"unofficial_text_{lang}": text,
        "upstream_license": "Courts terms of use",
    }
    fields.update(extra)
    return DocumentRecord(**fields)


def make_law(
    citation: str,
    text: str,
    sections: tuple[LawSection, ...],
    *,
    dataset: str = "LAWS",
    lang: str = "en",
    name: str | None = None,
    doc_date: date | None = None,
    **extra,
) -> DocumentRecord:
    fields = {
        "dataset": dataset,
        "kind": "law",
        f"citation_{lang}": citation,
        f"name_{lang}": name,
        f"document_date_{lang}": doc_date,
        f"url_{lang}": f"https://laws.example.test/{citation.replace(' ', '-')}",
        f"scraped_timestamp_{lang}": FIXED_STAMP,
        f"unofficial_text_{lang}": text,
        f"unofficial_sections_{lang}": sections,
        "upstream_license": "Reproduction permitted with due diligence",
    }
    fields.update(extra)
    return DocumentRecord(**fields)


def _decision_text(judge_line: str, docket: str | None, body: str) -> str:
    head = [judge_line]
    if docket:
        head.append(f"Docket: {docket}")
    return "\n".join(head) + "\n\n" + body


@pytest.fixture()
def demo_records() -> list[DocumentRecord]:
    """Twelve documents: FC cases 2021-2025, TCC cases, two laws, one French."""
    records = [
        make_case(
            "2021 FC 100",
            _decision_text(
                "Present: The Honourable Madam Justice Strickland",
                "IMM-1001-21",
                "The applicant sought refugee protection. The application for judicial "
                "review is granted. The officer erred in assessing credibility.",
            ),
            name="Singh v. Canada (Citizenship and Immigration)",
            doc_date=date(2021, 3, 15),
            citation2_en="IMM-1001-21",
        ),
        make_case(
            "2021 FC 200",
            _decision_text(
                "Present: Mr. Justice Roy",
                "IMM-1002-21",
                "The refugee claim turned on procedural fairness. The application is dismissed.",
            ),
            name="Ahmed v. Canada (Citizenship and Immigration)",
            doc_date=date(2021, 9, 2),
            citation2_en="IMM-1002-21",
        ),
        make_case(
            "2023 FC 300",
            _decision_text(
                "Present: The Honourable Mr. Justice Grammond",
                "IMM-2003-23",
                "The visa officer refused a study permit. The application is allowed. "
                "The officer ignored evidence of financial support.",
            ),
            name="Osei v. Canada (Citizenship and Immigration)",
            doc_date=date(2023, 5, 8),
            citation2_en="IMM-2003-23",
        ),
        make_case(
            "2025 FC 400",
            _decision_text(
                "Present: Madam Justice Heneghan",
                "IMM-3004-25",
                "This was an investment-fraud scheme with many victims. The application "
                "for judicial review is granted. The tribunal misread the record.",
            ),
            name="Zhang v. Canada (Public Safety)",
            doc_date=date(2025, 8, 4),
            citation2_en="IMM-3004-25",
        ),
        make_case(
            "2025 FC 401",
            _decision_text(
                "Present: Mr. Justice Roy",
                "IMM-3005-25",
                "The officer doubted the marriage. Credibility was central. "
                "The application is dismissed. Costs follow the event.",
            ),
            name="Haddad v. Canada (Citizenship and Immigration)",
            doc_date=date(2025, 8, 5),
            citation2_en="IMM-3005-25",
        ),
        make_case(
            "2025 FC 402",
            _decision_text(
                "Present: The Honourable Madam Justice Strickland",
                None,
                "A maritime dispute over cargo damage. The appeal is dismissed.",
            ),
            name="Pacific Shipping Ltd. v. The Vessel Aurora",
            doc_date=date(2025, 8, 6),
        ),
        make_case(
            "2025 CF 500",
            "Devant : l'honorable juge Gascon\n\nLa demande de contrôle judiciaire "
            "est rejetée. Le réfugié n'a pas établi sa crainte.",
            lang="fr",
            name="Tremblay c. Canada (Sécurité publique)",
            doc_date=date(2025, 8, 6),
        ),
        make_case(
            "2026 FC 999",
            _decision_text(
                "Present: Mr. Justice Roy",
                None,
                "A future-dated docket entry kept verbatim from the source. "
                "The application is allowed.",
            ),
            name="Nguyen v. Canada (Attorney General)",
            doc_date=date(2026, 1, 15),
        ),
        make_case(
            "2021 TCC 50",
            _decision_text(
                "Before: The Honourable Justice Bocock",
                None,
                "The taxpayer appealed a reassessment. The appeal is dismissed. "
                "Gross negligence penalties were justified under the Income Tax Act.",
            ),
            dataset="TCC",
            name="Martin v. The Queen",
            doc_date=date(2021, 6, 10),
        ),
        make_case(
            "2022 TCC 60",
            _decision_text(
                "Before: The Honourable Justice Bocock",
                None,
                "Input tax credits were denied. The appeal is allowed in part. "
                "The Minister's assumptions were partly demolished.",
            ),
            dataset="TCC",
            name="Lavoie v. The King",
            doc_date=date(2022, 11, 21),
        ),
        make_law(
            "SC 2001, c 27",
            "Immigration and Refugee Protection Act\n\n1. Short title\n"
            "This Act may be cited as the Immigration and Refugee Protection Act.\n\n"
            "2(1). Definitions\nIn this Act, \"Board\" means the Immigration and "
            "Refugee Board of Canada.",
            (
                LawSection(
                    label="1",
                    heading="Short title",
                    text="This Act may be cited as the Immigration and Refugee Protection Act.",
                ),
                LawSection(
                    label="2(1)",
                    heading="Definitions",
                    text='In this Act, "Board" means the Immigration and Refugee Board of Canada.',
                ),
            ),
            name="Immigration and Refugee Protection Act",
            doc_date=date(2025, 6, 1),
        ),
        make_law(
            "LC 2001, ch 27",
            "Loi sur l'immigration et la protection des réfugiés\n\n1. Titre abrégé\n"
            "Loi sur l'immigration et la protection des réfugiés.",
            (
                LawSection(
                    label="1",
                    heading="Titre abrégé",
                    text="Loi sur l'immigration et la protection des réfugiés.",
                ),
            ),
            dataset="LOIS",
            lang="fr",
            name="Loi sur l'immigration et la protection des réfugiés",
            doc_date=date(2025, 6, 1),
        ),
    ]
    return records


@pytest.fixture()
def demo_store(tmp_path, demo_records) -> CorpusStore:
    store = CorpusStore(tmp_path / "corpus")
    store.upsert(demo_records)
    return store


# ---------------------------------------------------------------------------
# Randomized corpora (seeded; acceptance properties use these)

_WORD_POOL = (
    "the court application judicial review officer tribunal refugee claimant "
    "minister appeal decision evidence credibility fairness visa permit "
    "reasonable unreasonable allowed dismissed granted costs order reasons "
    "hearing counsel record finding error assessment protection immigration "
    "citizenship détention réfugié décision contrôle judiciaire raisonnable"
).split()

_JUDGE_LINES = (
    "Present: The Honourable Madam Justice Strickland",
    "Present: Mr. Justice Roy",
    "Present: The Honourable Mr. Justice Grammond",
    "Before: The Honourable Justice Bocock",
    "Devant : l'honorable juge Gascon",
    "",  # unknown judge
)


def random_sentence(rng: random.Random, n_words: int | None = None) -> str:
    n = n_words or rng.randint(3, 14)
    words = [rng.choice(_WORD_POOL) for _ in range(n)]
    return " ".join(words).capitalize() + rng.choice([".", ".", ".", "!", "?"])


def random_text(rng: random.Random, n_sentences: int | None = None) -> str:
    n = n_sentences or rng.randint(1, 8)
    return " ".join(random_sentence(rng) for _ in range(n))


def random_case(rng: random.Random, i: int, dataset: str = "FC") -> DocumentRecord:
    year = rng.randint(2019, 2026)
    lang = rng.choice(["en", "en", "en", "fr"])
    body = random_text(rng)
    if rng.random() < 0.3:
        body = f"{rng.choice(_JUDGE_LINES)}\n\n{body}"
    doc_date = date(year, rng.randint(1, 12), rng.randint(1, 28)) if rng.random() < 0.9 else None
    extra = {}
    if rng.random() < 0.25:
        extra[f"citation2_{lang}"] = f"IMM-{rng.randint(1, 9999)}-{year % 100:02d}"
    record = make_case(
        f"{year} {dataset} {i}",
        body,
        dataset=dataset,
        lang=lang,
        name=f"Party {i} v. Canada" if rng.random() < 0.8 else None,
        doc_date=doc_date,
        **extra,
    )
    if rng.random() < 0.2:  # add the other language side
        other = "fr" if lang == "en" else "en"
        record = record.model_copy(
            update={
                f"citation_{other}": f"{year} {'CF' if other == 'fr' else dataset} {i}",
                f"unofficial_text_{other}": random_text(rng),
                f"url_{other}": f"https://example.test/{dataset}/{i}/{other}",
                f"scraped_timestamp_{other}": FIXED_STAMP,
                f"document_date_{other}": doc_date,
            }
        )
    return record


def random_law(rng: random.Random, i: int, dataset: str = "LAWS") -> DocumentRecord:
    n_sections = rng.randint(0, 5)
    sections = tuple(
        LawSection(
            label=str(k + 1) if rng.random() < 0.7 else f"{k + 1}(1)",
            heading=rng.choice([None, "Heading"]),
            text=random_sentence(rng),
        )
        for k in range(n_sections)
    )
    text = f"Act {i}\n\n" + "\n\n".join(f"{s.label}.\n{s.text}" for s in sections)
    if not sections:
        text = f"Act {i}\n\nNo operative provisions."
    return make_law(
        f"SC {rng.randint(1990, 2025)}, c {i}",
        text,
        sections,
        dataset=dataset,
        doc_date=date(rng.randint(2019, 2026), rng.randint(1, 12), rng.randint(1, 28)),
        name=f"Act No. {i}",
    )


def random_corpus(rng: random.Random, n: int) -> list[DocumentRecord]:
    records = []
    for i in range(n):
        if rng.random() < 0.15:
            records.append(random_law(rng, i, dataset=rng.choice(["LAWS", "REGS"])))
        else:
            records.append(random_case(rng, i, dataset=rng.choice(["FC", "TCC", "SCC"])))
    return records


# ---------------------------------------------------------------------------
# Ingestion helpers


class ScriptedFetcher:
    """Maps URL -> content string, or an Exception instance to raise."""

    def __init__(self, responses: dict):
        self.responses = responses
        self.calls: list[str] = []

    def __call__(self, url: str) -> str:
        self.calls.append(url)
        result = self.responses[url]
        if isinstance(result, Exception):
            raise result
        return result


def store_digest(store: CorpusStore) -> str:
    """Hash of every byte the store persists (records, version, WAL)."""
    h = hashlib.sha256()
    for path in sorted(store.store_dir.rglob("*")):
        if path.is_file() and path.name != ".lock":
            h.update(path.name.encode())
            h.update(path.read_bytes())
    return h.hexdigest()
