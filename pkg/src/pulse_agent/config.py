"""TOML application configuration for the service and CLI."""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field, fields
from pathlib import Path

from .ppg import PpgConfig, QualityThresholds


@dataclass(frozen=True)
class LlmConfig:
    backend: str = "mock"  # "mock" | "remote"
    endpoint: str = ""
    model: str = "gpt-3.5-turbo"
    timeout_s: float = 30.0
    transcript: str = ""  # fixture path for the mock backend


@dataclass(frozen=True)
class AppConfig:
    data_root: str = "./data"
    timezone: str = "UTC"
    trim_s: float = 60.0
    window_len_s: float = 30.0
    hop_s: float = 30.0
    outlier_lo_bpm: float = 40.0
    outlier_hi_bpm: float = 200.0
    host: str = "127.0.0.1"
    port: int = 8000
    session_ttl_s: float = 1800.0
    llm: LlmConfig = field(default_factory=LlmConfig)
    ppg: PpgConfig = field(default_factory=PpgConfig)

    def echo(self) -> dict:
        """Flat dict of analysis parameters for report provenance."""
        return {
            "trim_s": self.trim_s,
            "window_len_s": self.window_len_s,
            "hop_s": self.hop_s,
            "outlier_lo_bpm": self.outlier_lo_bpm,
            "outlier_hi_bpm": self.outlier_hi_bpm,
            "cutoff_hz": self.ppg.cutoff_hz,
            "segment_len_s": self.ppg.segment_len_s,
            "max_gap_s": self.ppg.max_gap_s,
        }


def _build(cls, data: dict):
    known = {f.name for f in fields(cls)}
    return cls(**{k: v for k, v in data.items() if k in known})


def load_config(path: str | Path | None = None) -> AppConfig:
    if path is None:
        return AppConfig()
    data = tomllib.loads(Path(path).read_text())
    llm = _build(LlmConfig, data.pop("llm", {}))
    ppg_data = data.pop("ppg", {})
    thresholds = _build(QualityThresholds, ppg_data.pop("thresholds", {}))
    ppg = _build(PpgConfig, {**ppg_data, "thresholds": thresholds})
    known = {f.name for f in fields(AppConfig)}
    return AppConfig(**{k: v for k, v in data.items() if k in known}, llm=llm, ppg=ppg)
