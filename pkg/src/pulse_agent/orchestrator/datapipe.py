"""Session-scoped repository for intermediate analysis artifacts.

Large numeric payloads (signals, HR series) live here and travel through
prompts by key only, keeping prompts within token budgets.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any


class EntryKind(str, Enum):
    TIMESERIES_REF = "TIMESERIES_REF"
    HR_SERIES = "HR_SERIES"
    SCALAR = "SCALAR"
    TEXT = "TEXT"
    ERROR = "ERROR"


@dataclass(frozen=True)
class DataPipeEntry:
    key: str
    kind: EntryKind
    payload: Any
    producer: str  # producing step, e.g. "step0:lookup_recording"
    created_at: float = field(default_factory=time.time)


class DataPipe:
    """Write-once key/value store for one agent session."""

    def __init__(self):
        self._entries: dict[str, DataPipeEntry] = {}
        self._counter = 0

    def put(self, kind: EntryKind, payload: Any, producer: str) -> str:
        key = f"dp{self._counter:04d}"
        self._counter += 1
        self._entries[key] = DataPipeEntry(key=key, kind=kind, payload=payload, producer=producer)
        return key

    def get(self, key: str) -> DataPipeEntry:
        if key not in self._entries:
            raise KeyError(f"unknown datapipe key {key!r}")
        return self._entries[key]

    def __contains__(self, key: str) -> bool:
        return key in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def entries(self) -> list[DataPipeEntry]:
        return list(self._entries.values())
