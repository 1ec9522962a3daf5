"""Drive the agent tool server through a full JSON-RPC session in-process.

Run from the repository root after installing the package:

    python3 demos/call_mcp_tools.py

``McpServer.handle_message`` is the same handler the stdio and HTTP
transports wrap, so the dictionaries below are exactly what travels over
the wire.
"""

import json
import tempfile
from pathlib import Path

from lexcorpus.mcp import McpServer

from sample_corpus import build_sample_store

_next_id = 0


def rpc(server: McpServer, method: str, params=None):
    global _next_id
    _next_id += 1
    message = {"jsonrpc": "2.0", "id": _next_id, "method": method}
    if params is not None:
        message["params"] = params
    return server.handle_message(message)


def call_tool(server: McpServer, name: str, arguments: dict):
    return rpc(server, "tools/call", {"name": name, "arguments": arguments})


def main() -> None:
    with tempfile.TemporaryDirectory(prefix="lexcorpus-demo-") as tmp:
        store = build_sample_store(Path(tmp) / "corpus")
        # Small truncation budget so the cursor protocol is visible below.
        server = McpServer(store, truncate_limit=200)

        reply = rpc(server, "initialize", {
            "protocolVersion": "2025-06-18",
            "capabilities": {},
            "clientInfo": {"name": "demo-client", "version": "0"},
        })
        info = reply["result"]
        print(f"initialize -> protocol {info['protocolVersion']}, "
              f"server {info['serverInfo']['name']} {info['serverInfo']['version']}")
        assert server.handle_message(
            {"jsonrpc": "2.0", "method": "notifications/initialized"}) is None

        tools = rpc(server, "tools/list")["result"]["tools"]
        print("tools/list ->", ", ".join(t["name"] for t in tools))
        print()

        reply = call_tool(server, "search_cases",
                          {"text": "judicial review", "datasets": ["FC"]})
        result = reply["result"]
        print("search_cases(text='judicial review', datasets=['FC'])")
        print("  text:", result["content"][0]["text"].splitlines()[0])
        for hit in result["structuredContent"]["hits"]:
            print(f"  hit: {hit['citation']}  {hit['name']}")
        print()

        print("get_document with a 200-character truncation budget:")
        cursor = 0
        chunks = []
        while True:
            reply = call_tool(server, "get_document", {
                "dataset": "FC", "citation": "2025 FC 430", "text_cursor": cursor,
            })
            payload = reply["result"]["structuredContent"]
            chunks.append(payload["unofficial_text_en"])
            if not payload.get("truncated"):
                break
            print(f"  cursor {payload['text_cursor']} -> "
                  f"next {payload['next_text_cursor']} (truncated)")
            cursor = payload["next_text_cursor"]
        text = "".join(chunks)
        print(f"  reassembled unofficial_text_en: {len(text)} characters "
              f"over {len(chunks)} call(s)")
        print(f"  tail: ...{text[-60:].strip()!r}")
        print()

        reply = call_tool(server, "get_law_section",
                          {"dataset": "LAWS", "citation": "SC 2025, c 9", "label": "2(1)"})
        section = reply["result"]["structuredContent"]
        print("get_law_section('2(1)') ->",
              json.dumps(section, indent=2, ensure_ascii=False))
        print()

        reply = call_tool(server, "coverage_stats", {})
        print("coverage_stats ->", reply["result"]["content"][0]["text"].splitlines()[-1])
        print()

        # Arguments are schema-checked before any tool runs.
        reply = call_tool(server, "search_cases", {"text": "x", "page": 0})
        err = reply["error"]
        print(f"search_cases(page=0) -> JSON-RPC error {err['code']}: {err['message']}")
        for violation in err["data"]["violations"]:
            print("  violation:", violation)

        # Missing documents are tool-level errors, not protocol errors.
        reply = call_tool(server, "get_document",
                          {"dataset": "FC", "citation": "1900 FC 1"})
        result = reply["result"]
        print(f"get_document(unknown citation) -> isError={result['isError']}, "
              f"error={result['structuredContent']['error']}")


if __name__ == "__main__":
    main()
