"""Shared serving state: an atomically swapped (snapshot, index) pair.

Both services read through this. Requests always see a consistent pair; a
corpus update (version bump on disk) swaps in a fresh pair on the next
request without blocking in-flight ones.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .search import Index, build_index
from .store import CorpusSnapshot, CorpusStore


@dataclass(frozen=True)
class ServingPair:
    snapshot: CorpusSnapshot
    index: Index


class CorpusState:
    def __init__(self, store: CorpusStore):
        self._store = store
        self._lock = threading.Lock()
        self._pair: ServingPair | None = None

    def current(self) -> ServingPair:
        disk_version = self._store.version()
        pair = self._pair
        if pair is not None and pair.snapshot.version == disk_version:
            return pair
        with self._lock:
            if self._pair is None or self._pair.snapshot.version != disk_version:
                snapshot = self._store.snapshot()
                self._pair = ServingPair(snapshot=snapshot, index=build_index(snapshot))
            return self._pair
