"""Shared fixture corpus for the demo scripts.

Eight bilingual documents — six Federal Court decisions spread over two July
2025 weeks, one Tax Court decision, and one statute with labelled sections —
small enough to read in full, varied enough to exercise search, judge
extraction, weekly digests, and the section lookup tools.
"""

from datetime import date

from lexcorpus import CorpusStore, DocumentRecord, LawSection

OPEN_LICENSE = "Non-commercial reproduction permitted with attribution."


def _decision(citation: str, name: str, when: date, judge_line: str, body: str,
              dataset: str = "FC") -> DocumentRecord:
    text = (
        f"{name}\n"
        f"Citation: {citation}\n"
        f"{judge_line}\n\n"
        f"REASONS FOR JUDGMENT\n\n{body}\n"
    )
    return DocumentRecord(
        dataset=dataset,
        kind="case",
        citation_en=citation,
        name_en=name,
        document_date_en=when,
        url_en=f"https://decisions.example.ca/{citation.replace(' ', '-').lower()}",
        scraped_timestamp_en="2025-08-01T12:00:00Z",
        unofficial_text_en=text,
        upstream_license=OPEN_LICENSE,
    )


def sample_records() -> list[DocumentRecord]:
    records = [
        _decision(
            "2025 FC 410",
            "Okonkwo v. Canada (Citizenship and Immigration)",
            date(2025, 7, 8),
            "Present: The Honourable Madam Justice Tremblay",
            "The applicant seeks judicial review of a visa officer's refusal. "
            "The officer's notes show the study plan was considered and found "
            "wanting. The decision is reasonable and the application is "
            "dismissed. No question is certified.",
        ),
        _decision(
            "2025 FC 415",
            "Marchand v. Canada (Attorney General)",
            date(2025, 7, 10),
            "Present: Mr. Justice Okafor",
            "This is a motion to strike portions of an affidavit filed on "
            "judicial review. Argument belongs in a memorandum, not in "
            "evidence. The motion is granted in part with costs in the cause.",
        ),
        _decision(
            "2025 FC 418",
            "Nguyen v. Canada (Public Safety)",
            date(2025, 7, 11),
            "Present: The Honourable Mr. Justice Okafor",
            "The detention review engaged the factors of flight risk and "
            "danger to the public. The member weighed both and released the "
            "applicant on conditions. Intervening on this record would "
            "substitute our view for the member's. Application dismissed.",
        ),
        _decision(
            "2025 FC 421",
            "Beaulieu v. Canada (Revenue Agency)",
            date(2025, 7, 15),
            "Present: Madam Justice Tremblay",
            "The taxpayer relief decision failed to grapple with the medical "
            "evidence placed before the delegate. That silence is fatal. The "
            "matter is remitted for redetermination by a different delegate.",
        ),
        _decision(
            "2025 FC 426",
            "Haddad v. Canada (Citizenship and Immigration)",
            date(2025, 7, 17),
            "Present: The Honourable Madam Justice Tremblay",
            "Counsel concedes the officer never addressed the hardship "
            "evidence. The respondent fairly consents to redetermination. "
            "Judgment accordingly; there is nothing further to decide.",
        ),
        _decision(
            "2025 TCC 77",
            "Singh v. The King",
            date(2025, 7, 9),
            "Before: The Honourable Justice Laforest",
            "The appeal concerns denied input tax credits. The appellant kept "
            "no contemporaneous records and the assessments stand. The appeal "
            "is dismissed without costs under the informal procedure.",
            dataset="TCC",
        ),
    ]

    # One decision published in both languages, with accented French text so
    # the folding behaviour of search is visible in the demos.
    records.append(
        DocumentRecord(
            dataset="FC",
            kind="case",
            citation_en="2025 FC 430",
            citation_fr="2025 CF 430",
            name_en="Société Générale Shipping v. The Vessel «Étoile»",
            name_fr="Société Générale Shipping c. Le navire «Étoile»",
            document_date_en=date(2025, 7, 16),
            document_date_fr=date(2025, 7, 16),
            url_en="https://decisions.example.ca/2025-fc-430",
            url_fr="https://decisions.example.ca/2025-cf-430",
            scraped_timestamp_en="2025-08-01T12:00:00Z",
            scraped_timestamp_fr="2025-08-01T12:00:00Z",
            unofficial_text_en=(
                "Société Générale Shipping v. The Vessel «Étoile»\n"
                "Citation: 2025 FC 430\n"
                "Present: Mr. Justice Okafor\n\n"
                "REASONS FOR ORDER\n\n"
                "The arrest of the vessel was regular. Bail is fixed in the "
                "amount claimed plus interest, and the étoilé cargo may be "
                "released on payment into court.\n"
            ),
            unofficial_text_fr=(
                "Société Générale Shipping c. Le navire «Étoile»\n"
                "Référence : 2025 CF 430\n"
                "Devant : monsieur le juge Okafor\n\n"
                "MOTIFS DE L'ORDONNANCE\n\n"
                "La saisie du navire était régulière. La caution est fixée au "
                "montant réclamé plus les intérêts, et la cargaison étoilée "
                "peut être libérée sur consignation.\n"
            ),
            upstream_license=OPEN_LICENSE,
        )
    )

    records.append(
        DocumentRecord(
            dataset="LAWS",
            kind="law",
            citation_en="SC 2025, c 9",
            citation_fr="LC 2025, ch 9",
            name_en="Harbour Lights Act",
            name_fr="Loi sur les feux de port",
            document_date_en=date(2025, 6, 1),
            document_date_fr=date(2025, 6, 1),
            url_en="https://laws.example.ca/en/sc-2025-c-9",
            url_fr="https://laws.example.ca/fr/lc-2025-ch-9",
            scraped_timestamp_en="2025-08-01T12:00:00Z",
            scraped_timestamp_fr="2025-08-01T12:00:00Z",
            unofficial_text_en="An Act respecting the marking of harbour entrances.",
            unofficial_text_fr="Loi concernant le balisage des entrées de port.",
            unofficial_sections_en=(
                LawSection(label="1", heading="Short title",
                           text="This Act may be cited as the Harbour Lights Act."),
                LawSection(label="2(1)", heading="Lights required",
                           text="Every harbour entrance shall carry a lit beacon "
                                "visible at two nautical miles."),
            ),
            unofficial_sections_fr=(
                LawSection(label="1", heading="Titre abrégé",
                           text="Loi sur les feux de port."),
                LawSection(label="2(1)", heading="Feux obligatoires",
                           text="L'entrée de chaque port est munie d'un feu "
                                "visible à deux milles marins."),
            ),
            upstream_license=OPEN_LICENSE,
        )
    )
    return records


def build_sample_store(corpus_dir) -> CorpusStore:
    """Create a store under ``corpus_dir`` holding the sample documents."""
    store = CorpusStore(corpus_dir)
    report = store.upsert(sample_records())
    assert report.inserted == 8, report
    return store
