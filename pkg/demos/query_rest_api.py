"""Exercise the JSON search API end to end, no server process required.

Run from the repository root after installing the package:

    python3 demos/query_rest_api.py

``fastapi.testclient`` drives the exact ASGI app that ``lexcorpus
serve-api`` would bind to a port, so every request/response below is the
real wire format.
"""

import json
import tempfile
from datetime import date
from pathlib import Path

from fastapi.testclient import TestClient

from lexcorpus import DocumentRecord
from lexcorpus.api import create_app

from sample_corpus import OPEN_LICENSE, build_sample_store


def show(label: str, response) -> dict:
    print(f"-- {label}")
    print(f"   HTTP {response.status_code}   X-Corpus-Version: "
          f"{response.headers.get('x-corpus-version')}")
    body = response.json()
    print("   " + json.dumps(body, indent=2, ensure_ascii=False).replace("\n", "\n   "))
    print()
    return body


def main() -> None:
    with tempfile.TemporaryDirectory(prefix="lexcorpus-demo-") as tmp:
        store = build_sample_store(Path(tmp) / "corpus")
        client = TestClient(create_app(store), raise_server_exceptions=False)

        page = show(
            "GET /v1/cases/search?text=judicial+review&dataset=FC&page_size=2",
            client.get("/v1/cases/search",
                       params={"text": "judicial review", "dataset": "FC", "page_size": 2}),
        )
        assert page["total"] >= len(page["hits"])

        show("GET /v1/cases/search?citation=2025 FC 430  (bilingual record, one hit)",
             client.get("/v1/cases/search", params={"citation": "2025 FC 430"}))

        doc = show("GET /v1/cases/FC/2025 TCC 77  (wrong dataset -> not found)",
                   client.get("/v1/cases/FC/2025%20TCC%2077"))
        assert doc["code"] == "not_found"

        law = show("GET /v1/laws/LAWS/SC 2025, c 9",
                   client.get("/v1/laws/LAWS/SC%202025,%20c%209"))
        assert [s["label"] for s in law["unofficial_sections_en"]] == ["1", "2(1)"]

        show("GET /v1/cases/search  (no criteria -> invalid_query)",
             client.get("/v1/cases/search"))

        show("GET /v1/stats", client.get("/v1/stats"))

        # The header tracks store writes: add a decision and query again.
        store.upsert([
            DocumentRecord(
                dataset="FC", kind="case",
                citation_en="2025 FC 999",
                name_en="Demo v. Canada",
                document_date_en=date(2025, 8, 1),
                url_en="https://decisions.example.ca/2025-fc-999",
                scraped_timestamp_en="2025-08-15T12:00:00Z",
                unofficial_text_en="Present: Mr. Justice Okafor\n\nThe demo is allowed.",
                upstream_license=OPEN_LICENSE,
            )
        ])
        show("GET /v1/cases/search?citation=2025 FC 999  (after an upsert: version bumped)",
             client.get("/v1/cases/search", params={"citation": "2025 FC 999"}))


if __name__ == "__main__":
    main()
