"""Synthetic PPG/ECG generators with known ground truth.

Used by the test suite and the batch-evaluation demo corpus: every generator
returns both the signal and the true beat times it rendered, so pipeline
output can be checked against construction rather than against itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .signals import Channel, TimeSeries

PPG_RATE_HZ = 20.0
ECG_RATE_HZ = 512.0

# PPG pulse shape: fundamental plus a half-amplitude second harmonic, the
# classic two-component approximation of the systolic/dicrotic morphology.
_PHI_GRID = np.linspace(0.0, 1.0, 4096, endpoint=False)


def _pulse_shape(phi: np.ndarray) -> np.ndarray:
    return np.sin(2 * np.pi * phi) + 0.5 * np.sin(4 * np.pi * phi)


_PEAK_PHASE = float(_PHI_GRID[np.argmax(_pulse_shape(_PHI_GRID))])


@dataclass(frozen=True)
class SynthTruth:
    """Ground truth for a generated recording."""

    beat_times_s: np.ndarray  # relative to series start
    hr_bpm: Callable[[np.ndarray], np.ndarray]

    def mean_hr_in_window(self, t0: float, t1: float) -> float:
        """True HR over [t0, t1) from the rendered beat times (mean IBI)."""
        beats = self.beat_times_s[(self.beat_times_s >= t0) & (self.beat_times_s < t1)]
        if beats.size < 2:
            return float("nan")
        return 60.0 / float(np.mean(np.diff(beats)))


def constant_hr(bpm: float) -> Callable[[np.ndarray], np.ndarray]:
    return lambda t: np.full_like(np.asarray(t, dtype=float), bpm)


def drifting_hr(lo_bpm: float, hi_bpm: float, period_s: float, phase: float = 0.0):
    """Sinusoidal HR drift between lo and hi."""
    mid = (lo_bpm + hi_bpm) / 2.0
    amp = (hi_bpm - lo_bpm) / 2.0

    def hr(t):
        return mid + amp * np.sin(2 * np.pi * np.asarray(t, dtype=float) / period_s + phase)

    return hr


def _phase(t: np.ndarray, hr_bpm: Callable) -> np.ndarray:
    """Cumulative beat phase from an instantaneous-HR profile."""
    f = np.asarray(hr_bpm(t), dtype=float) / 60.0
    dt = np.diff(t, prepend=t[0])
    return np.cumsum(f * dt)


def synth_ppg(
    duration_s: float,
    hr_bpm: float | Callable = 72.0,
    fs: float = PPG_RATE_HZ,
    amplitude: float = 1.0,
    baseline_amp: float = 0.0,
    noise_std: float = 0.0,
    start_epoch_s: float = 0.0,
    seed: int = 0,
) -> tuple[TimeSeries, SynthTruth]:
    """Quasi-periodic PPG with systolic peaks at known times."""
    if not callable(hr_bpm):
        hr_bpm = constant_hr(float(hr_bpm))
    rng = np.random.default_rng(seed)
    n = int(round(duration_s * fs))
    t = np.arange(n) / fs
    phase = _phase(t, hr_bpm)
    x = amplitude * _pulse_shape(phase % 1.0)
    if baseline_amp:
        x = x + baseline_amp * np.sin(2 * np.pi * 0.1 * t)
    if noise_std:
        x = x + rng.normal(0.0, noise_std, n)

    # True systolic peak times: phase crossings of k + peak-phase, inverted
    # on a fine grid for sub-sample accuracy.
    t_fine = np.arange(int(round(duration_s * fs * 16))) / (fs * 16)
    phase_fine = _phase(t_fine, hr_bpm)
    ks = np.arange(np.ceil(phase_fine[0] - _PEAK_PHASE), np.floor(phase_fine[-1] - _PEAK_PHASE) + 1)
    beat_times = np.interp(ks + _PEAK_PHASE, phase_fine, t_fine)

    series = TimeSeries(samples=x, sample_rate_hz=fs, start_epoch_s=start_epoch_s, channel=Channel.PPG)
    return series, SynthTruth(beat_times_s=beat_times, hr_bpm=hr_bpm)


def beat_times_from_ibis(duration_s: float, hr_bpm: float, jitter_frac: float = 0.0, seed: int = 0):
    """Beat times built interval-by-interval with optional multiplicative
    IBI jitter; used where per-beat timing control matters."""
    rng = np.random.default_rng(seed)
    times = [0.2]
    while True:
        ibi = 60.0 / hr_bpm
        if jitter_frac:
            ibi *= 1.0 + rng.uniform(-jitter_frac, jitter_frac)
        nxt = times[-1] + ibi
        if nxt >= duration_s - 0.05:
            break
        times.append(nxt)
    return np.array(times)


def synth_ecg_from_beats(
    beat_times_s: np.ndarray,
    duration_s: float,
    fs: float = ECG_RATE_HZ,
    r_width_s: float = 0.012,
    amplitude: float = 1.0,
    noise_std: float = 0.0,
    start_epoch_s: float = 0.0,
    seed: int = 0,
) -> TimeSeries:
    """Lead-II-like ECG: Gaussian R waves at the given beat times."""
    rng = np.random.default_rng(seed)
    n = int(round(duration_s * fs))
    t = np.arange(n) / fs
    x = np.zeros(n)
    half = 4 * r_width_s
    for bt in beat_times_s:
        a = max(0, int((bt - half) * fs))
        b = min(n, int((bt + half) * fs) + 1)
        x[a:b] += amplitude * np.exp(-((t[a:b] - bt) ** 2) / (2 * r_width_s**2))
    if noise_std:
        x = x + rng.normal(0.0, noise_std, n)
    return TimeSeries(samples=x, sample_rate_hz=fs, start_epoch_s=start_epoch_s, channel=Channel.ECG_LEAD_II)


def corrupt(series: TimeSeries, intervals_s: list[tuple[float, float]], noise_scale: float = 3.0, seed: int = 0) -> TimeSeries:
    """Overwrite the given [start, stop) intervals with white noise sized
    relative to the signal's standard deviation."""
    rng = np.random.default_rng(seed)
    x = series.samples.copy()
    std = float(x.std()) or 1.0
    for a_s, b_s in intervals_s:
        a = max(0, int(round(a_s * series.sample_rate_hz)))
        b = min(series.n, int(round(b_s * series.sample_rate_hz)))
        x[a:b] = rng.normal(0.0, noise_scale * std, b - a)
    return series.with_samples(x)


def burst_intervals(
    duration_s: float,
    total_frac: float,
    short_range_s: tuple[float, float] = (6.0, 14.0),
    long_range_s: tuple[float, float] = (16.0, 30.0),
    seed: int = 0,
) -> list[tuple[float, float]]:
    """Non-overlapping noise-burst intervals covering ~total_frac of the
    recording, alternating short (reconstructable) and long bursts."""
    rng = np.random.default_rng(seed)
    target = total_frac * duration_s
    intervals: list[tuple[float, float]] = []
    covered = 0.0
    short_turn = True
    attempts = 0
    while covered < target and attempts < 1000:
        attempts += 1
        lo, hi = short_range_s if short_turn else long_range_s
        length = rng.uniform(lo, hi)
        start = rng.uniform(30.0, duration_s - length - 30.0)
        # keep bursts separated enough for clean flanks on both sides
        if any(start - 12.0 < b and a - 12.0 < start + length for a, b in intervals):
            continue
        intervals.append((start, start + length))
        covered += length
        short_turn = not short_turn
    return sorted(intervals)


def paired_recording(
    duration_s: float = 900.0,
    seed: int = 0,
    corrupt_frac: float = 0.0,
    start_epoch_s: float = 0.0,
) -> tuple[TimeSeries, TimeSeries, SynthTruth]:
    """A PPG/ECG pair driven by one drifting-HR beat train.

    The PPG is optionally corrupted by noise bursts (half reconstructable,
    half too long); the ECG stays pristine, mirroring its gold-standard role.
    """
    rng = np.random.default_rng(seed)
    hr = drifting_hr(
        lo_bpm=rng.uniform(55.0, 65.0),
        hi_bpm=rng.uniform(95.0, 110.0),
        period_s=rng.uniform(200.0, 400.0),
        phase=rng.uniform(0.0, 2 * np.pi),
    )
    ppg, truth = synth_ppg(
        duration_s,
        hr_bpm=hr,
        noise_std=0.02,
        start_epoch_s=start_epoch_s,
        seed=seed,
    )
    if corrupt_frac > 0:
        ppg = corrupt(ppg, burst_intervals(duration_s, corrupt_frac, seed=seed + 1), seed=seed + 2)
    ecg = synth_ecg_from_beats(
        truth.beat_times_s,
        duration_s,
        noise_std=0.01,
        start_epoch_s=start_epoch_s,
        seed=seed + 3,
    )
    return ppg, ecg, truth
