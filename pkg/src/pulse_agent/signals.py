"""Core signal types: uniformly sampled series, windowing, calibration trim."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import InvalidWindowSpec, SeriesTooShort


class Channel(str, Enum):
    PPG = "PPG"
    ECG_LEAD_II = "ECG_LEAD_II"


@dataclass(frozen=True)
class TimeSeries:
    """A uniformly sampled signal with rate, epoch, and channel metadata.

    Raw samples must be finite: data gaps are expressed downstream via a
    quality mask, never as NaN in the sample array.
    """

    samples: np.ndarray
    sample_rate_hz: float
    start_epoch_s: float
    channel: Channel

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        if self.sample_rate_hz <= 0:
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        if samples.ndim != 1 or samples.size < 1:
            raise ValueError("samples must be a non-empty 1-D array")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite (NaN/Inf rejected at ingest)")

    @property
    def n(self) -> int:
        return int(self.samples.size)

    @property
    def duration_s(self) -> float:
        return self.n / self.sample_rate_hz

    def with_samples(self, samples: np.ndarray) -> "TimeSeries":
        return replace(self, samples=samples)


@dataclass(frozen=True)
class Window:
    """A fully-contained slice of a parent series."""

    start_index: int
    length: int
    start_time_s: float

    def __post_init__(self):
        if self.start_index < 0 or self.length <= 0:
            raise ValueError("window start_index must be >= 0 and length > 0")

    @property
    def stop_index(self) -> int:
        return self.start_index + self.length


def trim_calibration(series: TimeSeries, trim_s: float = 60.0) -> TimeSeries:
    """Drop the first and last ``trim_s`` seconds of a recording.

    Raises SeriesTooShort when nothing would remain.
    """
    n_trim = int(round(trim_s * series.sample_rate_hz))
    if series.duration_s <= 2 * trim_s:
        raise SeriesTooShort(
            f"series of {series.duration_s:.1f} s cannot be trimmed by {trim_s:.1f} s per side"
        )
    trimmed = series.samples[n_trim : series.n - n_trim]
    return TimeSeries(
        samples=trimmed,
        sample_rate_hz=series.sample_rate_hz,
        start_epoch_s=series.start_epoch_s + trim_s,
        channel=series.channel,
    )


def windows(series: TimeSeries, len_s: float, hop_s: float) -> list[Window]:
    """Maximal list of fully-contained windows at hop spacing.

    Partial tail windows are dropped rather than padded: HR over a padded
    window would be biased.
    """
    if len_s <= 0 or hop_s <= 0:
        raise InvalidWindowSpec(f"window len/hop must be positive, got {len_s}/{hop_s}")
    win_n = int(round(len_s * series.sample_rate_hz))
    hop_n = int(round(hop_s * series.sample_rate_hz))
    if win_n > series.n:
        raise InvalidWindowSpec(
            f"window of {len_s:.1f} s exceeds series duration {series.duration_s:.1f} s"
        )
    out = []
    start = 0
    while start + win_n <= series.n:
        out.append(Window(start_index=start, length=win_n, start_time_s=start / series.sample_rate_hz))
        start += hop_n
    return out
