"""Model Context Protocol server: the corpus as five read-only tools.

JSON-RPC 2.0 framing per the protocol's public spec, served either as
newline-delimited messages on stdio (local agents) or as HTTP POST /mcp
(remote use); both transports share one handler core. Structured tool output
mirrors the internal operations exactly, so agents and the REST API see the
same bytes for the same question.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from datetime import date
from importlib.metadata import PackageNotFoundError, version as _pkg_version
from typing import Any, Optional, TextIO

import jsonschema
from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .errors import ConfigurationError, InvalidQueryError
from .records import record_to_json_dict
from .search import QuerySpec, search, search_page_to_dict
from .serving import CorpusState
from .store import CorpusStore, coverage_stats, coverage_to_dict
from .tokenizers import WORD_FALLBACK

PROTOCOL_VERSION = "2025-06-18"
DEFAULT_TRUNCATE_LIMIT = 20_000

try:
    SERVER_VERSION = _pkg_version("lexcorpus")
except PackageNotFoundError:  # running from a source tree
    SERVER_VERSION = "0.0.0"

PARSE_ERROR = -32700
INVALID_REQUEST = -32600
METHOD_NOT_FOUND = -32601
INVALID_PARAMS = -32602
INTERNAL_ERROR = -32603


class ProtocolError(Exception):
    def __init__(self, code: int, message: str, data: Any = None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.data = data


@dataclass(frozen=True)
class ToolDescriptor:
    name: str
    description: str
    input_schema: dict
    output_schema: dict

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "inputSchema": self.input_schema,
            "outputSchema": self.output_schema,
        }


def _search_input_schema() -> dict:
    return {
        "type": "object",
        "properties": {
            "citation": {
                "type": "string",
                "description": "Exact citation; whitespace-normalized before matching.",
            },
            "name": {
                "type": "string",
                "description": "Substring of the document name; case- and accent-insensitive.",
            },
            "text": {
                "type": "string",
                "description": "Full-text terms; every term must occur (AND).",
            },
            "date_from": {
                "type": "string",
                "description": "Earliest document date, ISO 8601 (inclusive).",
            },
            "date_to": {
                "type": "string",
                "description": "Latest document date, ISO 8601 (inclusive).",
            },
            "datasets": {
                "type": "array",
                "items": {"type": "string"},
                "description": "Restrict to these dataset codes.",
            },
            "page": {"type": "integer", "minimum": 1, "default": 1, "description": "Result page, from 1."},
            "page_size": {
                "type": "integer",
                "minimum": 1,
                "maximum": 200,
                "default": 50,
                "description": "Hits per page, 1-200.",
            },
        },
        "additionalProperties": False,
    }


_SEARCH_OUTPUT_SCHEMA = {
    "type": "object",
    "properties": {
        "hits": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "dataset": {"type": "string"},
                    "citation": {"type": "string"},
                    "name": {"type": ["string", "null"]},
                    "date": {"type": ["string", "null"]},
                    "snippet": {"type": "string"},
                    "score": {"type": "number"},
                },
            },
        },
        "total": {"type": "integer"},
        "page": {"type": "integer"},
        "page_size": {"type": "integer"},
    },
}

_CURSOR_PROPS = {
    "text_cursor": {
        "type": "integer",
        "minimum": 0,
        "default": 0,
        "description": "Offset into the full text; follow next_text_cursor from a truncated response.",
    }
}


class McpServer:
    """Handler core shared by the stdio and HTTP transports."""

    def __init__(
        self,
        store: CorpusStore,
        truncate_limit: int = DEFAULT_TRUNCATE_LIMIT,
        tokenizer: str = WORD_FALLBACK,
    ):
        if truncate_limit < 1:
            raise ConfigurationError("truncate_limit must be >= 1")
        self._state = CorpusState(store)
        self.truncate_limit = truncate_limit
        self.tokenizer = tokenizer
        self._tools: dict[str, tuple[ToolDescriptor, Any]] = {}
        self._register_tools()

    # -- tool registry ------------------------------------------------------

    def _register_tools(self) -> None:
        for kind, tool_name in (("case", "search_cases"), ("law", "search_laws")):
            descriptor = ToolDescriptor(
                name=tool_name,
                description=(
                    f"Search {kind} records by citation, name, full text, date range, "
                    "or dataset code. Returns a ranked, paginated hit list."
                ),
                input_schema=_search_input_schema(),
                output_schema=_SEARCH_OUTPUT_SCHEMA,
            )
            self._tools[tool_name] = (descriptor, self._make_search(kind))

        self._tools["get_document"] = (
            ToolDescriptor(
                name="get_document",
                description=(
                    "Fetch one document (case or law) by dataset code and citation, "
                    "including full text and upstream license. Long texts are "
                    "truncated; follow next_text_cursor for the remainder."
                ),
                input_schema={
                    "type": "object",
                    "properties": {
                        "dataset": {"type": "string", "description": "Dataset code, e.g. FC."},
                        "citation": {"type": "string", "description": "Citation in either language."},
                        **_CURSOR_PROPS,
                    },
                    "required": ["dataset", "citation"],
                    "additionalProperties": False,
                },
                output_schema={"type": "object"},
            ),
            self._tool_get_document,
        )
        self._tools["get_law_section"] = (
            ToolDescriptor(
                name="get_law_section",
                description="Fetch one labelled section of a law by dataset, citation, and section label.",
                input_schema={
                    "type": "object",
                    "properties": {
                        "dataset": {"type": "string", "description": "Dataset code of the law collection."},
                        "citation": {"type": "string", "description": "Law citation in either language."},
                        "label": {"type": "string", "description": "Section label, e.g. \"2(1)\"."},
                        **_CURSOR_PROPS,
                    },
                    "required": ["dataset", "citation", "label"],
                    "additionalProperties": False,
                },
                output_schema={
                    "type": "object",
                    "properties": {
                        "dataset": {"type": "string"},
                        "citation": {"type": "string"},
                        "label": {"type": "string"},
                        "heading": {"type": ["string", "null"]},
                        "text": {"type": "string"},
                    },
                },
            ),
            self._tool_get_law_section,
        )
        self._tools["coverage_stats"] = (
            ToolDescriptor(
                name="coverage_stats",
                description="Per-dataset coverage: earliest/latest dates, document and token counts, plus totals.",
                input_schema={
                    "type": "object",
                    "properties": {
                        "tokenizer": {
                            "type": "string",
                            "default": WORD_FALLBACK,
                            "description": "Registered token-counting scheme name.",
                        }
                    },
                    "additionalProperties": False,
                },
                output_schema={
                    "type": "object",
                    "properties": {
                        "rows": {"type": "array"},
                        "totals": {"type": "object"},
                        "corpus_version": {"type": "integer"},
                    },
                },
            ),
            self._tool_coverage_stats,
        )

    def list_tools(self) -> list[ToolDescriptor]:
        return [descriptor for descriptor, _ in self._tools.values()]

    # -- tool bodies --------------------------------------------------------

    @staticmethod
    def _parse_date_arg(arguments: dict, key: str) -> Optional[date]:
        raw = arguments.get(key)
        if raw is None:
            return None
        try:
            return date.fromisoformat(raw)
        except ValueError:
            raise ProtocolError(
                INVALID_PARAMS, f"invalid arguments: {key} must be an ISO 8601 date, got {raw!r}"
            ) from None

    def _make_search(self, kind: str):
        def run(arguments: dict) -> tuple[dict, str, bool]:
            datasets = arguments.get("datasets")
            spec = QuerySpec(
                citation=arguments.get("citation"),
                name=arguments.get("name"),
                text=arguments.get("text"),
                date_from=self._parse_date_arg(arguments, "date_from"),
                date_to=self._parse_date_arg(arguments, "date_to"),
                datasets=tuple(datasets) if datasets else None,
                kind=kind,
                page=arguments.get("page", 1),
                page_size=arguments.get("page_size", 50),
            )
            try:
                page = search(self._state.current().index, spec)
            except InvalidQueryError as exc:
                raise ProtocolError(INVALID_PARAMS, f"invalid arguments: {exc}") from exc
            structured = search_page_to_dict(page)
            lines = [f"{page.total} match(es), page {page.page} (page size {page.page_size})"]
            for i, hit in enumerate(page.hits, start=1 + (page.page - 1) * page.page_size):
                when = f", {hit.date.isoformat()}" if hit.date else ""
                title = f" — {hit.name}" if hit.name else ""
                lines.append(f"{i}. [{hit.dataset}] {hit.citation}{title}{when}")
            return structured, "\n".join(lines), False

        return run

    def _truncate(self, payload: dict, fields: list[str], cursor: int) -> tuple[dict, bool]:
        """Slice each text field to [cursor, cursor+limit); mark if more remains.

        An untruncated response (cursor 0, everything fits) is returned
        unchanged, so it equals the internal operation's output exactly.
        Following next_text_cursor repeatedly concatenates back to the full
        text of every field.
        """
        limit = self.truncate_limit
        more = any(
            isinstance(payload.get(f), str) and len(payload[f]) > cursor + limit for f in fields
        )
        if cursor == 0 and not more:
            return payload, False
        out = dict(payload)
        for f in fields:
            if isinstance(out.get(f), str):
                out[f] = out[f][cursor : cursor + limit]
        out["truncated"] = more
        out["text_cursor"] = cursor
        out["next_text_cursor"] = cursor + limit if more else None
        return out, more

    @staticmethod
    def _truncation_note(structured: dict) -> str:
        if structured.get("truncated"):
            return f"\n[truncated — continue with text_cursor={structured['next_text_cursor']}]"
        return ""

    def _tool_get_document(self, arguments: dict) -> tuple[dict, str, bool]:
        dataset, citation = arguments["dataset"], arguments["citation"]
        record = self._state.current().snapshot.get(dataset, citation)
        if record is None:
            return (
                {"error": "not_found", "dataset": dataset, "citation": citation},
                f"No document {dataset}/{citation} in the corpus.",
                True,
            )
        structured, _ = self._truncate(
            record_to_json_dict(record),
            ["unofficial_text_en", "unofficial_text_fr"],
            arguments.get("text_cursor", 0),
        )
        name = record.primary_name() or ""
        when = record.document_date()
        header = f"[{record.dataset}] {record.primary_citation()}"
        if name:
            header += f" — {name}"
        if when:
            header += f" ({when.isoformat()})"
        body = structured.get("unofficial_text_en") or structured.get("unofficial_text_fr") or ""
        text = f"{header}\nLicense: {record.upstream_license}\n\n{body}" + self._truncation_note(
            structured
        )
        return structured, text, False

    def _tool_get_law_section(self, arguments: dict) -> tuple[dict, str, bool]:
        dataset, citation = arguments["dataset"], arguments["citation"]
        record = self._state.current().snapshot.get(dataset, citation)
        if record is None or record.kind != "law":
            return (
                {"error": "not_found", "dataset": dataset, "citation": citation},
                f"No law {dataset}/{citation} in the corpus.",
                True,
            )
        wanted = arguments["label"].strip()
        section = next(
            (
                s
                for s in (*record.unofficial_sections_en, *record.unofficial_sections_fr)
                if s.label == wanted
            ),
            None,
        )
        if section is None:
            labels = [s.label for s in (*record.unofficial_sections_en, *record.unofficial_sections_fr)]
            return (
                {"error": "section_not_found", "label": wanted, "available": labels},
                f"No section {wanted!r}; available: {', '.join(labels) or '(none)'}.",
                True,
            )
        payload = {
            "dataset": record.dataset,
            "citation": record.primary_citation(),
            "label": section.label,
            "heading": section.heading,
            "text": section.text,
        }
        structured, _ = self._truncate(payload, ["text"], arguments.get("text_cursor", 0))
        return structured, structured["text"] + self._truncation_note(structured), False

    def _tool_coverage_stats(self, arguments: dict) -> tuple[dict, str, bool]:
        snapshot = self._state.current().snapshot
        try:
            rows, totals = coverage_stats(snapshot, tokenizer=arguments.get("tokenizer", self.tokenizer))
        except ConfigurationError as exc:
            return {"error": "configuration", "message": str(exc)}, str(exc), True
        structured = coverage_to_dict(rows, totals)
        structured["corpus_version"] = snapshot.version
        lines = [f"{len(rows)} dataset(s), version {snapshot.version}"]
        for row in structured["rows"]:
            lines.append(
                f"{row['dataset']}: {row['documents']} documents, {row['tokens']} tokens, "
                f"{row['earliest'] or '?'} to {row['latest'] or '?'}"
            )
        lines.append(
            f"Total: {structured['totals']['documents']} documents, "
            f"{structured['totals']['tokens']} tokens"
        )
        return structured, "\n".join(lines), False

    # -- dispatch -----------------------------------------------------------

    def call_tool(self, name: str, arguments: dict) -> dict:
        entry = self._tools.get(name)
        if entry is None:
            raise ProtocolError(INVALID_PARAMS, f"tool not found: {name}")
        descriptor, run = entry
        validator = jsonschema.Draft202012Validator(descriptor.input_schema)
        violations = [
            f"{'/'.join(str(p) for p in err.path) or '(root)'}: {err.message}"
            for err in sorted(validator.iter_errors(arguments), key=str)
        ]
        if violations:
            raise ProtocolError(
                INVALID_PARAMS,
                f"invalid arguments for {name}: " + "; ".join(violations),
                data={"violations": violations},
            )
        structured, text, is_error = run(arguments)
        return {
            "content": [{"type": "text", "text": text}],
            "structuredContent": structured,
            "isError": is_error,
        }

    def handle_message(self, message: Any) -> Optional[dict]:
        """One JSON-RPC message in, one response dict out (None for notifications)."""
        if not isinstance(message, dict) or "method" not in message:
            return _error_response(None, INVALID_REQUEST, "not a JSON-RPC request object")
        msg_id = message.get("id")
        is_notification = "id" not in message
        try:
            result = self._dispatch(message.get("method"), message.get("params") or {})
        except ProtocolError as exc:
            if is_notification:
                return None
            return _error_response(msg_id, exc.code, exc.message, exc.data)
        except Exception as exc:  # pragma: no cover - defensive
            if is_notification:
                return None
            return _error_response(msg_id, INTERNAL_ERROR, f"internal error: {exc}")
        if is_notification or result is None:
            return None
        return {"jsonrpc": "2.0", "id": msg_id, "result": result}

    def _dispatch(self, method: str, params: dict) -> Optional[dict]:
        if method == "initialize":
            return {
                "protocolVersion": PROTOCOL_VERSION,
                "capabilities": {"tools": {"listChanged": False}},
                "serverInfo": {"name": "lexcorpus", "version": SERVER_VERSION},
            }
        if method == "ping":
            return {}
        if method == "tools/list":
            return {"tools": [d.to_json() for d in self.list_tools()]}
        if method == "tools/call":
            name = params.get("name")
            if not isinstance(name, str):
                raise ProtocolError(INVALID_PARAMS, "params.name must be a string")
            arguments = params.get("arguments") or {}
            if not isinstance(arguments, dict):
                raise ProtocolError(INVALID_PARAMS, "params.arguments must be an object")
            return self.call_tool(name, arguments)
        if method.startswith("notifications/"):
            return None
        raise ProtocolError(METHOD_NOT_FOUND, f"method not found: {method}")

    def handle_json(self, raw: str | bytes) -> Optional[dict]:
        try:
            message = json.loads(raw)
        except json.JSONDecodeError as exc:
            return _error_response(None, PARSE_ERROR, f"parse error: {exc}")
        return self.handle_message(message)


def _error_response(msg_id: Any, code: int, message: str, data: Any = None) -> dict:
    error: dict = {"code": code, "message": message}
    if data is not None:
        error["data"] = data
    return {"jsonrpc": "2.0", "id": msg_id, "error": error}


# ---------------------------------------------------------------------------
# Transports


def serve_stdio(server: McpServer, in_stream: Optional[TextIO] = None, out_stream: Optional[TextIO] = None) -> None:
    """Newline-delimited JSON-RPC on stdio; runs until EOF."""
    stdin = in_stream if in_stream is not None else sys.stdin
    stdout = out_stream if out_stream is not None else sys.stdout
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        response = server.handle_json(line)
        if response is not None:
            stdout.write(json.dumps(response, ensure_ascii=False) + "\n")
            stdout.flush()


def create_mcp_app(server: McpServer) -> FastAPI:
    """HTTP transport: POST one JSON-RPC message to /mcp per request."""
    app = FastAPI(title="lexcorpus MCP", docs_url=None, redoc_url=None, openapi_url=None)

    @app.post("/mcp")
    async def mcp_endpoint(request: Request):
        body = await request.body()
        response = server.handle_json(body)
        if response is None:  # notification: accepted, nothing to say
            return Response(status_code=202)
        return JSONResponse(response)

    return app
