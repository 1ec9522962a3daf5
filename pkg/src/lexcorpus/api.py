"""Read-only JSON API: search, document retrieval, coverage statistics.

Free and unauthenticated by design; ingestion happens out-of-band through
the CLI, so every endpoint is a pure read of the current snapshot. Paths are
versioned under /v1 and response JSON uses the table column names exactly.
"""

from __future__ import annotations

from datetime import date
from typing import Callable, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .errors import InvalidQueryError, LexCorpusError
from .records import Kind, record_to_json_dict
from .search import QuerySpec, search, search_page_to_dict
from .serving import CorpusState
from .store import CorpusStore, coverage_stats, coverage_to_dict
from .tokenizers import WORD_FALLBACK


def _error_payload(status: int, code: str, message: str) -> dict:
    return {"status": status, "code": code, "message": message}


def _parse_int(raw: Optional[str], name: str, default: int) -> int:
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise InvalidQueryError(f"{name} must be an integer, got {raw!r}") from None


def _parse_date(raw: Optional[str], name: str) -> Optional[date]:
    if raw is None:
        return None
    try:
        return date.fromisoformat(raw)
    except ValueError:
        raise InvalidQueryError(f"{name} must be an ISO 8601 date, got {raw!r}") from None


def query_spec_from_params(params, kind: Kind) -> QuerySpec:
    """Map HTTP query params 1:1 onto a QuerySpec (shared with the CLI)."""
    known = {"citation", "name", "text", "date_from", "date_to", "dataset", "page", "page_size"}
    unknown = sorted(set(params.keys()) - known)
    if unknown:
        raise InvalidQueryError(f"unknown parameter(s): {', '.join(unknown)}")
    datasets = tuple(params.getlist("dataset")) or None
    return QuerySpec(
        citation=params.get("citation"),
        name=params.get("name"),
        text=params.get("text"),
        date_from=_parse_date(params.get("date_from"), "date_from"),
        date_to=_parse_date(params.get("date_to"), "date_to"),
        datasets=datasets,
        kind=kind,
        page=_parse_int(params.get("page"), "page", 1),
        page_size=_parse_int(params.get("page_size"), "page_size", 50),
    )


def create_app(store: CorpusStore, tokenizer: str = WORD_FALLBACK) -> FastAPI:
    app = FastAPI(title="lexcorpus API", docs_url=None, redoc_url=None, openapi_url=None)
    state = CorpusState(store)

    @app.middleware("http")
    async def stamp_version(request: Request, call_next):
        try:
            response = await call_next(request)
        except Exception as exc:  # last resort: keep the error shape stable
            response = JSONResponse(
                status_code=500, content=_error_payload(500, "internal_error", str(exc))
            )
        response.headers["X-Corpus-Version"] = str(state.current().snapshot.version)
        return response

    @app.exception_handler(InvalidQueryError)
    async def invalid_query(request: Request, exc: InvalidQueryError):
        return JSONResponse(status_code=400, content=_error_payload(400, "invalid_query", str(exc)))

    @app.exception_handler(LexCorpusError)
    async def internal_domain_error(request: Request, exc: LexCorpusError):
        return JSONResponse(status_code=500, content=_error_payload(500, "internal_error", str(exc)))

    def _search_endpoint(kind: Kind) -> Callable:
        async def endpoint(request: Request):
            spec = query_spec_from_params(request.query_params, kind)
            page = search(state.current().index, spec)
            return JSONResponse(search_page_to_dict(page))

        return endpoint

    def _get_endpoint(kind: Kind) -> Callable:
        async def endpoint(dataset: str, citation: str):
            record = state.current().snapshot.get(dataset, citation)
            if record is None or record.kind != kind:
                return JSONResponse(
                    status_code=404,
                    content=_error_payload(
                        404, "not_found", f"no {kind} record {dataset}/{citation}"
                    ),
                )
            return JSONResponse(record_to_json_dict(record))

        return endpoint

    # fixed /search paths must be registered before the catch-all citation path
    app.add_api_route("/v1/cases/search", _search_endpoint("case"), methods=["GET"])
    app.add_api_route("/v1/laws/search", _search_endpoint("law"), methods=["GET"])
    app.add_api_route("/v1/cases/{dataset}/{citation:path}", _get_endpoint("case"), methods=["GET"])
    app.add_api_route("/v1/laws/{dataset}/{citation:path}", _get_endpoint("law"), methods=["GET"])

    @app.get("/v1/stats")
    async def stats():
        snapshot = state.current().snapshot
        rows, totals = coverage_stats(snapshot, tokenizer=tokenizer)
        body = coverage_to_dict(rows, totals)
        body["corpus_version"] = snapshot.version
        return JSONResponse(body)

    return app
