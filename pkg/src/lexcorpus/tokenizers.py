"""Pluggable token-counting schemes.

"word-fallback" (whitespace words) is always available. A byte-pair-merge
scheme can be registered from a merge-table file: one merge per line,
"tokenA tokenB", rank = line number (rank 0 merges first).
"""

from __future__ import annotations

from pathlib import Path
from typing import Callable

from .errors import ConfigurationError

WORD_FALLBACK = "word-fallback"

_registry: dict[str, Callable[[str], int]] = {}


def register_scheme(name: str, counter: Callable[[str], int]) -> None:
    _registry[name] = counter


def registered_schemes() -> list[str]:
    return sorted(_registry)


def count_tokens(text: str, scheme: str = WORD_FALLBACK) -> int:
    """Deterministic token count of ``text`` under a registered scheme."""
    try:
        counter = _registry[scheme]
    except KeyError:
        raise ConfigurationError(
            f"unknown tokenizer scheme {scheme!r}; registered: {', '.join(registered_schemes())}"
        ) from None
    return counter(text)


def _count_words(text: str) -> int:
    return len(text.split())


register_scheme(WORD_FALLBACK, _count_words)


class BpeMerges:
    """Byte-pair merge table applied independently to each whitespace word.

    A word starts as its character sequence; the adjacent pair with the
    lowest rank is merged (all occurrences) until no adjacent pair is in
    the table. The count is the number of remaining symbols.
    """

    def __init__(self, merges: list[tuple[str, str]]):
        self.ranks = {pair: i for i, pair in enumerate(merges)}

    @classmethod
    def from_file(cls, path: str | Path) -> "BpeMerges":
        merges = []
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ConfigurationError(f"bad merge line {lineno} in {path}: {line!r}")
            merges.append((parts[0], parts[1]))
        return cls(merges)

    def encode_word(self, word: str) -> list[str]:
        symbols = list(word)
        while len(symbols) > 1:
            best_rank = None
            best_pair = None
            for pair in zip(symbols, symbols[1:]):
                rank = self.ranks.get(pair)
                if rank is not None and (best_rank is None or rank < best_rank):
                    best_rank = rank
                    best_pair = pair
            if best_pair is None:
                break
            merged: list[str] = []
            i = 0
            while i < len(symbols):
                if i + 1 < len(symbols) and (symbols[i], symbols[i + 1]) == best_pair:
                    merged.append(symbols[i] + symbols[i + 1])
                    i += 2
                else:
                    merged.append(symbols[i])
                    i += 1
            symbols = merged
        return symbols

    def count(self, text: str) -> int:
        return sum(len(self.encode_word(word)) for word in text.split())


def register_bpe_scheme(name: str, merge_table_path: str | Path) -> None:
    """Load a merge table and register it as a counting scheme."""
    merges = BpeMerges.from_file(merge_table_path)
    register_scheme(name, merges.count)
