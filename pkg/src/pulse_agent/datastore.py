"""File-backed store for per-user PPG/ECG recordings.

One CSV per recording (header ``t_offset_s,value``) plus a JSON manifest at
the store root. Manifest rewrites are atomic (write-temp-then-rename) and
serialized by an advisory lock, so concurrent readers never observe a
manifest referencing a missing file.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from dataclasses import asdict, dataclass
from datetime import datetime
from pathlib import Path
from zoneinfo import ZoneInfo

import numpy as np
from filelock import FileLock

from .errors import NonFiniteSample, OverlapConflict, ParseError, UserNotFound, NoRecordingAtTime
from .signals import Channel, TimeSeries

MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class RecordingMeta:
    recording_id: str
    user_id: str
    modality: str  # Channel value
    start_epoch_s: float
    duration_s: float
    sample_rate_hz: float
    source_file: str

    @property
    def stop_epoch_s(self) -> float:
        return self.start_epoch_s + self.duration_s


class DataStore:
    """Recording ingestion, indexing, and time-based retrieval."""

    def __init__(self, root: str | Path, timezone: str = "UTC"):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.timezone = ZoneInfo(timezone)
        self._lock = FileLock(str(self.root / (MANIFEST_NAME + ".lock")))

    # manifest ------------------------------------------------------------

    def _manifest_path(self) -> Path:
        return self.root / MANIFEST_NAME

    def _load_manifest(self) -> list[RecordingMeta]:
        path = self._manifest_path()
        if not path.exists():
            return []
        entries = [RecordingMeta(**e) for e in json.loads(path.read_text())]
        entries.sort(key=lambda e: (e.user_id, e.modality, e.start_epoch_s))
        return entries

    def _write_manifest(self, entries: list[RecordingMeta]) -> None:
        entries = sorted(entries, key=lambda e: (e.user_id, e.modality, e.start_epoch_s))
        tmp = self._manifest_path().with_suffix(".json.tmp")
        tmp.write_text(json.dumps([asdict(e) for e in entries], indent=2) + "\n")
        os.replace(tmp, self._manifest_path())

    # csv -----------------------------------------------------------------

    @staticmethod
    def _read_csv(path: str | Path) -> np.ndarray:
        try:
            with open(path, newline="") as f:
                reader = csv.reader(f)
                header = next(reader, None)
                if header is None or [h.strip() for h in header] != ["t_offset_s", "value"]:
                    raise ParseError(f"{path}: expected header 't_offset_s,value'")
                values = []
                for row in reader:
                    if len(row) != 2:
                        raise ParseError(f"{path}: malformed row {row!r}")
                    values.append(float(row[1]))
        except (OSError, ValueError) as exc:
            raise ParseError(f"{path}: {exc}") from exc
        if not values:
            raise ParseError(f"{path}: no sample rows")
        arr = np.array(values)
        if not np.all(np.isfinite(arr)):
            raise NonFiniteSample(f"{path}: samples contain NaN/Inf")
        return arr

    @staticmethod
    def write_csv(path: str | Path, samples: np.ndarray, sample_rate_hz: float) -> None:
        """Write a recording CSV in the store's wire format."""
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["t_offset_s", "value"])
            for i, v in enumerate(samples):
                w.writerow([f"{i / sample_rate_hz:.6f}", repr(float(v))])

    # operations ----------------------------------------------------------

    def ingest(
        self,
        file: str | Path,
        user_id: str,
        modality: str | Channel,
        start_epoch_s: float,
        sample_rate_hz: float,
    ) -> RecordingMeta:
        """Parse, validate, copy into the store, and index a recording."""
        modality = Channel(modality).value
        if sample_rate_hz <= 0:
            raise ParseError(f"sample_rate_hz must be positive, got {sample_rate_hz}")
        samples = self._read_csv(file)
        duration_s = samples.size / sample_rate_hz

        with self._lock:
            entries = self._load_manifest()
            for e in entries:
                if e.user_id == user_id and e.modality == modality:
                    if start_epoch_s < e.stop_epoch_s and e.start_epoch_s < start_epoch_s + duration_s:
                        raise OverlapConflict(
                            f"interval overlaps recording {e.recording_id} "
                            f"[{e.start_epoch_s}, {e.stop_epoch_s})"
                        )
            # deterministic id: the (user, modality, start) triple is unique
            rec_id = hashlib.sha256(f"{user_id}|{modality}|{start_epoch_s:.3f}".encode()).hexdigest()[:12]
            dest = self.root / f"{rec_id}.csv"
            self.write_csv(dest, samples, sample_rate_hz)
            meta = RecordingMeta(
                recording_id=rec_id,
                user_id=user_id,
                modality=modality,
                start_epoch_s=float(start_epoch_s),
                duration_s=float(duration_s),
                sample_rate_hz=float(sample_rate_hz),
                source_file=dest.name,
            )
            self._write_manifest(entries + [meta])
        return meta

    def list_recordings(self, user_id: str) -> list[RecordingMeta]:
        entries = [e for e in self._load_manifest() if e.user_id == user_id]
        if not entries:
            raise UserNotFound(f"no recordings for user {user_id!r}")
        return entries

    def parse_local_time(self, text: str) -> float:
        """ISO-8601 local naive date+time -> epoch seconds in the store tz."""
        dt = datetime.fromisoformat(text)
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=self.timezone)
        return dt.timestamp()

    def lookup(
        self,
        user_id: str,
        modality: str | Channel,
        at_epoch_s: float | None = None,
        at_local_time: str | None = None,
    ) -> tuple[TimeSeries, RecordingMeta]:
        """Load the unique recording covering the requested instant."""
        if at_epoch_s is None:
            if at_local_time is None:
                raise ValueError("lookup requires at_epoch_s or at_local_time")
            at_epoch_s = self.parse_local_time(at_local_time)
        modality = Channel(modality).value
        entries = [e for e in self.list_recordings(user_id) if e.modality == modality]
        if not entries:
            raise UserNotFound(f"no {modality} recordings for user {user_id!r}")

        for e in entries:
            if e.start_epoch_s <= at_epoch_s < e.stop_epoch_s:
                return self.load(e), e
        nearest = min(entries, key=lambda e: abs(e.start_epoch_s - at_epoch_s))
        raise NoRecordingAtTime(
            f"no {modality} recording for user {user_id!r} at epoch {at_epoch_s:.0f}; "
            f"nearest starts at epoch {nearest.start_epoch_s:.0f}",
            nearest_start_epoch_s=nearest.start_epoch_s,
            nearest_recording_id=nearest.recording_id,
        )

    def load(self, meta: RecordingMeta) -> TimeSeries:
        samples = self._read_csv(self.root / meta.source_file)
        return TimeSeries(
            samples=samples,
            sample_rate_hz=meta.sample_rate_hz,
            start_epoch_s=meta.start_epoch_s,
            channel=Channel(meta.modality),
        )

    def paired_users(self) -> dict[str, list[tuple[RecordingMeta, RecordingMeta]]]:
        """Per-user (PPG, ECG) recording pairs matched by identical start epoch."""
        by_user: dict[str, list[tuple[RecordingMeta, RecordingMeta]]] = {}
        entries = self._load_manifest()
        for user in sorted({e.user_id for e in entries}):
            ppg = {e.start_epoch_s: e for e in entries if e.user_id == user and e.modality == Channel.PPG.value}
            ecg = {e.start_epoch_s: e for e in entries if e.user_id == user and e.modality == Channel.ECG_LEAD_II.value}
            pairs = [(ppg[t], ecg[t]) for t in sorted(set(ppg) & set(ecg))]
            if pairs:
                by_user[user] = pairs
        return by_user
