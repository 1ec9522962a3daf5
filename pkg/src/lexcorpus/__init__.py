"""lexcorpus: an open bilingual legal-document corpus toolkit.

Ingests court decisions and legislation from public sources into a single
validated store, and serves it back as Parquet bulk files, a JSON search
API, an agent tool server, and reproducible analytics reports.
"""

from .analytics import (
    UNKNOWN_JUDGE,
    CaseSummary,
    DigestMemo,
    JudgeReport,
    JudgeRow,
    TextMetrics,
    TrendRow,
    WeekRow,
    YearVolume,
    digest_to_script,
    extract_judge,
    flesch_reading_ease,
    median_wordcount_by_judge,
    readability_trend,
    render_memo,
    text_metrics,
    weekly_digest,
    weekly_volume,
)
from .errors import (
    ConfigurationError,
    InvalidQueryError,
    LexCorpusError,
    MarkupParseError,
    SchemaError,
    StoreLockedError,
    UndefinedInputError,
    UnknownDatasetError,
    ValidationFailedError,
)
from .ingest import (
    DocumentStub,
    FeedState,
    IngestReport,
    UrlFetcher,
    import_file_drop,
    ingest_batch,
    load_registry,
    parse_law_xml,
    parse_listing,
    poll_feed,
    sync_law_repo,
)
from .parquet_io import ExportManifest, LoadResult, export_parquet, load_parquet
from .records import (
    CASE_COLUMNS,
    LAW_COLUMNS,
    DocumentRecord,
    LawSection,
    SelectorRules,
    SourceDescriptor,
    normalize_citation,
    record_to_json_dict,
    validate_record,
)
from .search import (
    Index,
    QuerySpec,
    SearchHit,
    SearchPage,
    build_index,
    search,
    search_page_to_dict,
)
from .store import (
    CorpusSnapshot,
    CorpusStore,
    CoverageRow,
    CoverageTotals,
    WriteReport,
    build_snapshot,
    coverage_stats,
    coverage_to_dict,
)
from .tokenizers import WORD_FALLBACK, count_tokens, register_bpe_scheme, registered_schemes

__version__ = "0.1.0"

__all__ = [
    "CASE_COLUMNS",
    "LAW_COLUMNS",
    "CaseSummary",
    "ConfigurationError",
    "CorpusSnapshot",
    "CorpusStore",
    "CoverageRow",
    "CoverageTotals",
    "DigestMemo",
    "DocumentRecord",
    "DocumentStub",
    "ExportManifest",
    "FeedState",
    "Index",
    "IngestReport",
    "InvalidQueryError",
    "JudgeReport",
    "JudgeRow",
    "LawSection",
    "LexCorpusError",
    "LoadResult",
    "MarkupParseError",
    "QuerySpec",
    "SchemaError",
    "SearchHit",
    "SearchPage",
    "SelectorRules",
    "SourceDescriptor",
    "StoreLockedError",
    "TextMetrics",
    "TrendRow",
    "UNKNOWN_JUDGE",
    "UndefinedInputError",
    "UnknownDatasetError",
    "UrlFetcher",
    "ValidationFailedError",
    "WeekRow",
    "WORD_FALLBACK",
    "WriteReport",
    "YearVolume",
    "build_index",
    "build_snapshot",
    "count_tokens",
    "coverage_stats",
    "coverage_to_dict",
    "digest_to_script",
    "export_parquet",
    "extract_judge",
    "flesch_reading_ease",
    "import_file_drop",
    "ingest_batch",
    "load_parquet",
    "load_registry",
    "median_wordcount_by_judge",
    "normalize_citation",
    "parse_law_xml",
    "parse_listing",
    "poll_feed",
    "readability_trend",
    "record_to_json_dict",
    "registered_schemes",
    "register_bpe_scheme",
    "render_memo",
    "search",
    "search_page_to_dict",
    "sync_law_repo",
    "text_metrics",
    "validate_record",
    "weekly_digest",
    "weekly_volume",
]
