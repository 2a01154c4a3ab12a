"""Gold-standard HR from Lead-II ECG via two-moving-average QRS detection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .errors import SeriesTooShort
from .ppg import HrSeries, PeakList, hr_from_peaks
from .signals import Channel, TimeSeries


@dataclass(frozen=True)
class QrsConfig:
    """Two-event moving-average QRS detector parameters.

    Canonical values of the family: QRS-scale window 120 ms, beat-scale
    window 600 ms, threshold offset beta = 0.08, minimum block width 80 ms,
    physiological refractory 200 ms.
    """

    band_lo_hz: float = 8.0
    band_hi_hz: float = 20.0
    ma_qrs_s: float = 0.120
    ma_beat_s: float = 0.600
    beta: float = 0.08
    min_block_s: float = 0.080
    refractory_s: float = 0.200


def _moving_average(x: np.ndarray, n: int) -> np.ndarray:
    n = max(1, n)
    kernel = np.ones(n) / n
    return np.convolve(x, kernel, mode="same")


def detect_qrs(series: TimeSeries, config: QrsConfig | None = None) -> PeakList:
    """R-peak indices from Lead-II ECG.

    Bandpass 8-20 Hz, square, compare a QRS-scale moving average against a
    beat-scale moving average plus an energy-proportional offset; each
    sufficiently wide block where the QRS average wins yields one R-peak at
    the block's energy maximum.
    """
    config = config or QrsConfig()
    if series.channel != Channel.ECG_LEAD_II:
        raise ValueError("detect_qrs expects a Lead-II ECG series")
    if series.sample_rate_hz < 100:
        raise ValueError("detect_qrs requires sample_rate_hz >= 100")
    fs = series.sample_rate_hz

    sos = sps.butter(3, [config.band_lo_hz, config.band_hi_hz], btype="bandpass", fs=fs, output="sos")
    filtered = sps.sosfiltfilt(sos, series.samples)
    squared = filtered**2

    ma_qrs = _moving_average(squared, int(round(config.ma_qrs_s * fs)))
    ma_beat = _moving_average(squared, int(round(config.ma_beat_s * fs)))
    threshold = ma_beat + config.beta * squared.mean()
    active = ma_qrs > threshold

    min_block = int(round(config.min_block_s * fs))
    refractory = int(round(config.refractory_s * fs))
    peaks: list[int] = []
    edges = np.flatnonzero(np.diff(active.astype(int)))
    starts = edges[active[edges + 1]] + 1 if edges.size else np.array([], dtype=int)
    stops = edges[~active[edges + 1]] + 1 if edges.size else np.array([], dtype=int)
    if active.size and active[0]:
        starts = np.concatenate(([0], starts))
    if active.size and active[-1]:
        stops = np.concatenate((stops, [active.size]))

    for a, b in zip(starts, stops):
        if b - a < min_block:
            continue
        peak = a + int(np.argmax(squared[a:b]))
        if peaks and peak - peaks[-1] < refractory:
            if squared[peak] > squared[peaks[-1]]:
                peaks[-1] = peak
        else:
            peaks.append(peak)
    return PeakList(indices=np.array(peaks, dtype=int))


def reference_hr(
    series: TimeSeries,
    window_len_s: float = 30.0,
    hop_s: float = 30.0,
    config: QrsConfig | None = None,
) -> HrSeries:
    """Windowed reference HR from ECG; same window contract as the PPG
    pipeline (mean IBI, >= 2 peaks else NaN), no quality gating since ECG is
    treated as gold standard."""
    if series.duration_s < window_len_s:
        raise SeriesTooShort(
            f"series of {series.duration_s:.1f} s shorter than one {window_len_s:.1f} s window"
        )
    peaks = detect_qrs(series, config)
    all_clean = np.ones(series.n, dtype=bool)
    return hr_from_peaks(series, peaks, all_clean, window_len_s, hop_s, min_clean_coverage=0.0)
