"""External Parquet layout: cases/ + laws/ + a dataset card.

Column names match the published field list exactly (parallel _en/_fr
columns; laws additionally carry the two unofficial_sections columns).
The card is a README.md with YAML front matter describing both configs,
so the directory can be dropped onto an ML dataset hub as-is.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date
from pathlib import Path

import pyarrow as pa
import pyarrow.parquet as pq
import yaml

from .errors import SchemaError
from .records import CASE_COLUMNS, LAW_COLUMNS, DocumentRecord, LawSection, validate_record
from .store import CorpusSnapshot, build_snapshot
from .tokenizers import WORD_FALLBACK, count_tokens

_SECTION_TYPE = pa.list_(
    pa.struct([("label", pa.string()), ("heading", pa.string()), ("text", pa.string())])
)


def _schema(kind: str) -> pa.Schema:
    fields = []
    for name in CASE_COLUMNS if kind == "case" else LAW_COLUMNS:
        if name.startswith("document_date"):
            fields.append(pa.field(name, pa.date32()))
        elif name.startswith("unofficial_sections"):
            fields.append(pa.field(name, _SECTION_TYPE))
        else:
            fields.append(pa.field(name, pa.string()))
    return pa.schema(fields)


def _cell(record: DocumentRecord, column: str):
    value = getattr(record, column)
    if column.startswith("unofficial_sections"):
        return [
            {"label": s.label, "heading": s.heading, "text": s.text} for s in value
        ]
    return value


def _to_table(records: list[DocumentRecord], kind: str) -> pa.Table:
    schema = _schema(kind)
    columns = [
        [_cell(record, name) for record in records] for name in schema.names
    ]
    return pa.table(dict(zip(schema.names, columns)), schema=schema)


@dataclass(frozen=True)
class ExportManifest:
    files: tuple[Path, ...]
    card: Path
    case_rows: int
    law_rows: int


def export_parquet(
    snapshot: CorpusSnapshot, out_dir: str | Path, tokenizer: str = WORD_FALLBACK
) -> ExportManifest:
    """Write cases and laws Parquet files plus the dataset card."""
    out = Path(out_dir)
    cases = [r for r in snapshot.records if r.kind == "case"]
    laws = [r for r in snapshot.records if r.kind == "law"]

    files = []
    for kind, records, sub in (("case", cases, "cases"), ("law", laws, "laws")):
        subdir = out / sub
        subdir.mkdir(parents=True, exist_ok=True)
        path = subdir / f"{sub}-0000.parquet"
        pq.write_table(_to_table(records, kind), path)
        files.append(path)

    card = out / "README.md"
    card.write_text(_render_card(snapshot, len(cases), len(laws), tokenizer), encoding="utf-8")
    return ExportManifest(files=tuple(files), card=card, case_rows=len(cases), law_rows=len(laws))


def _render_card(snapshot: CorpusSnapshot, n_cases: int, n_laws: int, tokenizer: str) -> str:
    front = {
        "configs": [
            {"config_name": "cases", "data_files": [{"split": "train", "path": "cases/*.parquet"}]},
            {"config_name": "laws", "data_files": [{"split": "train", "path": "laws/*.parquet"}]},
        ],
        "corpus_version": snapshot.version,
        "tokenizer": tokenizer,
    }
    dates = [d for r in snapshot.records if (d := r.document_date()) is not None]
    tokens = sum(count_tokens(t, tokenizer) for r in snapshot.records for t in r.texts())
    licenses: dict[str, int] = {}
    for record in snapshot.records:
        licenses[record.upstream_license] = licenses.get(record.upstream_license, 0) + 1

    lines = [
        "---",
        yaml.safe_dump(front, sort_keys=False).rstrip(),
        "---",
        "",
        "# Legal document corpus export",
        "",
        f"- Documents: {n_cases} cases, {n_laws} laws",
        f"- Date range: {min(dates).isoformat() if dates else 'n/a'} to "
        f"{max(dates).isoformat() if dates else 'n/a'}",
        f"- Tokens ({tokenizer}): {tokens}",
        "",
        "## Upstream licenses",
        "",
        "Each row carries the license terms of its source; users must comply",
        "with these upstream licenses.",
        "",
    ]
    for license_text in sorted(licenses):
        label = " ".join(license_text.split())
        if len(label) > 100:
            label = label[:97] + "..."
        lines.append(f"- {label}: {licenses[license_text]} documents")
    lines.append("")
    return "\n".join(lines)


@dataclass(frozen=True)
class RowIssue:
    file: str
    row: int
    violations: tuple[str, ...]


@dataclass(frozen=True)
class LoadResult:
    snapshot: CorpusSnapshot
    rejected: tuple[RowIssue, ...]
    files: tuple[Path, ...]


def _as_date(value) -> date | None:
    if value is None or isinstance(value, date):
        return value
    return date.fromisoformat(str(value))


def _row_to_record(row: dict, kind: str) -> DocumentRecord:
    data: dict = {"kind": kind}
    columns = CASE_COLUMNS if kind == "case" else LAW_COLUMNS
    for name in columns:
        value = row.get(name)
        if name.startswith("document_date"):
            data[name] = _as_date(value)
        elif name.startswith("unofficial_sections"):
            data[name] = tuple(
                LawSection(label=s["label"] or "", heading=s["heading"], text=s["text"] or "")
                for s in (value or [])
            )
        elif name == "upstream_license":
            data[name] = value or ""
        else:
            data[name] = value
    return DocumentRecord.model_validate(data)


def load_parquet(in_dir: str | Path) -> LoadResult:
    """Load an exported directory back into a snapshot.

    Rows that violate record invariants (or collide on a citation key) are
    reported and skipped; valid rows still load. Missing required columns
    raise SchemaError naming them.
    """
    root = Path(in_dir)
    files = sorted(root.glob("cases/*.parquet")) + sorted(root.glob("laws/*.parquet"))
    if not files:
        raise SchemaError(missing=["cases/*.parquet", "laws/*.parquet"], where=str(root))

    records: list[DocumentRecord] = []
    rejected: list[RowIssue] = []
    seen_keys: set = set()
    for path in files:
        kind = "case" if path.parent.name == "cases" else "law"
        required = CASE_COLUMNS if kind == "case" else LAW_COLUMNS
        table = pq.read_table(path)
        missing = [name for name in required if name not in table.column_names]
        if missing:
            raise SchemaError(missing=missing, where=str(path))
        for i, row in enumerate(table.to_pylist()):
            record = _row_to_record(row, kind)
            violations = validate_record(record)
            if not violations:
                clash = [k for k in record.citation_keys() if k in seen_keys]
                if clash:
                    violations = [f"duplicate citation key {clash[0]}"]
            if violations:
                rejected.append(RowIssue(file=str(path), row=i, violations=tuple(violations)))
                continue
            seen_keys.update(record.citation_keys())
            records.append(record)

    version = _card_version(root / "README.md")
    return LoadResult(
        snapshot=build_snapshot(records, version=version),
        rejected=tuple(rejected),
        files=tuple(files),
    )


def _card_version(card_path: Path) -> int:
    if not card_path.exists():
        return 0
    text = card_path.read_text(encoding="utf-8")
    if not text.startswith("---"):
        return 0
    end = text.find("\n---", 3)
    if end == -1:
        return 0
    try:
        front = yaml.safe_load(text[3:end])
        return int(front.get("corpus_version", 0))
    except Exception:
        return 0


def snapshot_to_jsonable(snapshot: CorpusSnapshot) -> list[dict]:
    """Whole-corpus JSON rows (debugging/inspection helper)."""
    return [json.loads(r.model_dump_json()) for r in snapshot.records]
