"""Task registry: the analytical tools the planner can compose.

The registry is open for extension; registering a new TaskSpec makes the
tool available to planning and execution without orchestrator changes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .. import ecg as ecg_mod
from .. import ppg as ppg_mod
from ..datastore import DataStore
from ..errors import SeriesTooShort
from ..signals import Channel, trim_calibration
from .datapipe import DataPipe, EntryKind


@dataclass(frozen=True)
class ParamSpec:
    name: str
    type: str  # "string" | "number"
    description: str = ""
    required: bool = True


@dataclass(frozen=True)
class TaskSpec:
    name: str
    description: str
    params: tuple[ParamSpec, ...]
    produces: EntryKind
    handler: Callable[[dict[str, Any], "ToolContext"], Any]


@dataclass
class ToolContext:
    """Shared resources handed to task handlers."""

    store: DataStore
    datapipe: DataPipe
    trim_s: float = 60.0
    window_len_s: float = 30.0
    hop_s: float = 30.0
    ppg_config: ppg_mod.PpgConfig = field(default_factory=ppg_mod.PpgConfig)


class TaskRegistry:
    def __init__(self):
        self._tasks: dict[str, TaskSpec] = {}

    def register(self, spec: TaskSpec) -> None:
        if spec.name in self._tasks:
            raise ValueError(f"task {spec.name!r} already registered")
        self._tasks[spec.name] = spec

    def get(self, name: str) -> TaskSpec:
        return self._tasks[name]

    def __contains__(self, name: str) -> bool:
        return name in self._tasks

    def __len__(self) -> int:
        return len(self._tasks)

    def names(self) -> list[str]:
        return list(self._tasks)

    def describe(self) -> str:
        """Compact tool catalog for planner prompts."""
        lines = []
        for spec in self._tasks.values():
            params = ", ".join(
                f"{p.name}: {p.type}" + ("" if p.required else " (optional)") for p in spec.params
            )
            lines.append(f"- {spec.name}({params}) -> {spec.produces.value}: {spec.description}")
        return "\n".join(lines)


# default tasks -----------------------------------------------------------


def _lookup_recording(args: dict, ctx: ToolContext):
    time_arg = args["time"]
    if isinstance(time_arg, (int, float)):
        series, meta = ctx.store.lookup(args["user_id"], args["modality"], at_epoch_s=float(time_arg))
    else:
        series, meta = ctx.store.lookup(args["user_id"], args["modality"], at_local_time=str(time_arg))
    try:
        series = trim_calibration(series, ctx.trim_s)
    except SeriesTooShort:
        pass  # short recordings are analyzed untrimmed
    return {"series": series, "recording_id": meta.recording_id, "user_id": meta.user_id}


def _estimate_hr_ppg(args: dict, ctx: ToolContext):
    ref = args["recording"]
    series = ref["series"]
    if series.channel != Channel.PPG:
        raise ValueError("estimate_hr_ppg requires a PPG recording")
    hr = ppg_mod.estimate_hr(series, ctx.window_len_s, ctx.hop_s, ctx.ppg_config)
    return {"hr": hr, "recording_id": ref["recording_id"]}


def _reference_hr_ecg(args: dict, ctx: ToolContext):
    ref = args["recording"]
    series = ref["series"]
    if series.channel != Channel.ECG_LEAD_II:
        raise ValueError("reference_hr_ecg requires an ECG recording")
    hr = ecg_mod.reference_hr(series, ctx.window_len_s, ctx.hop_s)
    return {"hr": hr, "recording_id": ref["recording_id"]}


def _summarize_hr(args: dict, ctx: ToolContext):
    hr = args["hr"]["hr"]
    valid = hr.bpm[~np.isnan(hr.bpm)]
    summary = {
        "n_windows": int(len(hr)),
        "n_valid": int(valid.size),
        "n_nan": int(len(hr) - valid.size),
        "window_len_s": hr.window_len_s,
    }
    if valid.size:
        summary.update(
            mean_bpm=round(float(valid.mean()), 1),
            min_bpm=round(float(valid.min()), 1),
            max_bpm=round(float(valid.max()), 1),
        )
    else:
        summary["mean_bpm"] = None
    summary["recording_id"] = args["hr"]["recording_id"]
    return summary


def default_registry() -> TaskRegistry:
    reg = TaskRegistry()
    reg.register(
        TaskSpec(
            name="lookup_recording",
            description="Retrieve a user's recording covering a given instant (PPG or ECG_LEAD_II).",
            params=(
                ParamSpec("user_id", "string", "user identifier"),
                ParamSpec("modality", "string", "PPG or ECG_LEAD_II"),
                ParamSpec("time", "string", "ISO-8601 local time or epoch seconds"),
            ),
            produces=EntryKind.TIMESERIES_REF,
            handler=_lookup_recording,
        )
    )
    reg.register(
        TaskSpec(
            name="estimate_hr_ppg",
            description="Run the PPG pipeline (filter, quality, reconstruction, peaks) to windowed HR.",
            params=(ParamSpec("recording", "string", "datapipe reference to a PPG recording"),),
            produces=EntryKind.HR_SERIES,
            handler=_estimate_hr_ppg,
        )
    )
    reg.register(
        TaskSpec(
            name="reference_hr_ecg",
            description="Gold-standard windowed HR from a Lead-II ECG recording via QRS detection.",
            params=(ParamSpec("recording", "string", "datapipe reference to an ECG recording"),),
            produces=EntryKind.HR_SERIES,
            handler=_reference_hr_ecg,
        )
    )
    reg.register(
        TaskSpec(
            name="summarize_hr",
            description="Compact statistics (mean/min/max BPM, window and NaN counts) for an HR series.",
            params=(ParamSpec("hr", "string", "datapipe reference to an HR series"),),
            produces=EntryKind.SCALAR,
            handler=_summarize_hr,
        )
    )
    return reg
