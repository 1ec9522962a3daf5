"""Build a corpus from scratch and walk the analytics surface.

Run from the repository root after installing the package:

    python3 demos/build_and_report.py

Everything happens in a temporary directory; nothing touches the network.
"""

import tempfile
from pathlib import Path

from lexcorpus import (
    QuerySpec,
    build_index,
    coverage_stats,
    export_parquet,
    median_wordcount_by_judge,
    render_memo,
    search,
    weekly_digest,
)

from sample_corpus import build_sample_store


def main() -> None:
    with tempfile.TemporaryDirectory(prefix="lexcorpus-demo-") as tmp:
        corpus_dir = Path(tmp) / "corpus"
        store = build_sample_store(corpus_dir)
        snapshot = store.snapshot()
        print(f"built store v{snapshot.version} with {len(snapshot.records)} documents\n")

        print("== coverage ==")
        rows, totals = coverage_stats(snapshot)
        for row in rows:
            print(f"  {row.dataset:5s} {row.earliest} .. {row.latest}"
                  f"  {row.documents} docs, {row.tokens} tokens")
        print(f"  total {totals.documents} docs, {totals.tokens} tokens\n")

        print("== search ==")
        index = build_index(snapshot)
        # Accent-insensitive: the query is unaccented, the document is not.
        for spec in (
            QuerySpec(text="etoile cargo", kind="case"),
            QuerySpec(name="canada", datasets=("FC",)),
            QuerySpec(citation="2025   TCC   77"),  # citations are whitespace-normalized
        ):
            page = search(index, spec)
            what = spec.text or spec.name or spec.citation
            print(f"  {what!r}: {page.total} hit(s)")
            for hit in page.hits:
                print(f"    {hit.dataset}  {hit.citation}  {hit.name}")
        print()

        print("== median decision length by judge (FC) ==")
        report = median_wordcount_by_judge(snapshot, "FC")
        for row in report.rows:
            print(f"  {row.judge:10s} median {row.median_words:g} words"
                  f" over {row.decisions} decision(s)")
        print(f"  (judge not extracted for {report.unknown_decisions} decision(s))\n")

        print("== weekly digest, FC week 2025-W28 ==")
        memo = weekly_digest(snapshot, "FC", "2025-W28")
        print(render_memo(memo, dataset="FC"))

        out_dir = Path(tmp) / "export"
        manifest = export_parquet(snapshot, out_dir)
        print("== parquet export ==")
        print(f"  {manifest.case_rows} case row(s), {manifest.law_rows} law row(s)")
        for path in (*manifest.files, manifest.card):
            print(f"  wrote {path.relative_to(tmp)}")


if __name__ == "__main__":
    main()
