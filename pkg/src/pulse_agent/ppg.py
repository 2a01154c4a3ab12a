"""PPG -> HR pipeline: high-pass filtering, segment quality assessment,
bounded gap reconstruction, systolic peak detection, windowed HR estimation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import signal as sps
from scipy import stats as spstats

from .errors import InvalidCutoff, SeriesTooShort
from .signals import Channel, TimeSeries, windows

FILTER_ORDER = 4


class SegmentLabel(str, Enum):
    CLEAN = "CLEAN"
    NOISY = "NOISY"


@dataclass(frozen=True)
class QualityMask:
    """Per-segment clean/noisy labels covering a series end to end."""

    segment_len_s: float
    labels: tuple[SegmentLabel, ...]

    def __post_init__(self):
        if self.segment_len_s <= 0:
            raise ValueError("segment_len_s must be positive")

    @property
    def n_segments(self) -> int:
        return len(self.labels)

    def clean_sample_mask(self, series: TimeSeries) -> np.ndarray:
        """Boolean per-sample mask, True where the covering segment is CLEAN."""
        seg_n = int(round(self.segment_len_s * series.sample_rate_hz))
        seg_idx = np.minimum(np.arange(series.n) // seg_n, self.n_segments - 1)
        clean = np.array([lab == SegmentLabel.CLEAN for lab in self.labels])
        return clean[seg_idx]


@dataclass(frozen=True)
class PeakList:
    """Strictly increasing sample indices of detected beats."""

    indices: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=int)
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        if idx.size > 1 and np.any(np.diff(idx) <= 0):
            raise ValueError("peak indices must be strictly increasing")

    def __len__(self) -> int:
        return int(self.indices.size)


@dataclass(frozen=True)
class HrSeries:
    """Windowed HR values in BPM; NaN marks unanalyzable windows.

    window_start_s are absolute epoch seconds so that estimates from two
    modalities sharing start_epoch_s pair by timestamp exactly.
    """

    window_start_s: np.ndarray
    bpm: np.ndarray
    window_len_s: float
    hop_s: float

    def __post_init__(self):
        starts = np.asarray(self.window_start_s, dtype=float)
        bpm = np.asarray(self.bpm, dtype=float)
        starts.setflags(write=False)
        bpm.setflags(write=False)
        object.__setattr__(self, "window_start_s", starts)
        object.__setattr__(self, "bpm", bpm)
        if starts.size != bpm.size:
            raise ValueError("window_start_s and bpm must have equal length")
        if starts.size > 1 and np.any(np.diff(starts) <= 0):
            raise ValueError("window_start_s must be strictly increasing")
        valid = bpm[~np.isnan(bpm)]
        if np.any(valid <= 0):
            raise ValueError("non-NaN bpm values must be positive")

    def __len__(self) -> int:
        return int(self.bpm.size)


@dataclass(frozen=True)
class QualityThresholds:
    """Deterministic segment-quality rule set.

    A segment is CLEAN iff it passes all four rules: amplitude range vs the
    recording median, shape statistics, beat-band autocorrelation, and
    beat-band spectral power concentration. Thresholds were frozen after
    validation on the synthetic corpus.
    """

    amp_ratio_lo: float = 0.1
    amp_ratio_hi: float = 10.0
    skew_max: float = 3.0
    kurtosis_max: float = 10.0
    autocorr_min: float = 0.45
    bpm_lo: float = 40.0
    bpm_hi: float = 200.0
    band_lo_hz: float = 0.5
    band_hi_hz: float = 3.5
    band_power_min: float = 0.5


@dataclass(frozen=True)
class PpgConfig:
    """Tunable parameters of the PPG pipeline, surfaced in the service config."""

    cutoff_hz: float = 0.5
    segment_len_s: float = 2.0
    thresholds: QualityThresholds = field(default_factory=QualityThresholds)
    max_gap_s: float = 15.0
    flank_s: float = 5.0
    crossfade_s: float = 0.25
    refractory_s: float = 0.3
    threshold_window_s: float = 2.0
    threshold_percentile: float = 60.0
    min_clean_coverage: float = 0.8
    window_len_s: float = 30.0
    hop_s: float = 30.0


def highpass_filter(series: TimeSeries, cutoff_hz: float = 0.5) -> TimeSeries:
    """Zero-phase 4th-order Butterworth high-pass; removes DC and drift.

    Forward-backward application preserves peak timing, which interval-based
    HR estimation requires.
    """
    nyquist = series.sample_rate_hz / 2.0
    if cutoff_hz >= nyquist:
        raise InvalidCutoff(f"cutoff {cutoff_hz} Hz >= Nyquist {nyquist} Hz")
    if series.channel != Channel.PPG:
        raise ValueError("highpass_filter expects a PPG series")
    b, a = sps.butter(FILTER_ORDER, cutoff_hz, btype="highpass", fs=series.sample_rate_hz)
    padlen = min(3 * FILTER_ORDER, series.n - 1)
    filtered = sps.filtfilt(b, a, series.samples, padtype="even", padlen=padlen)
    return series.with_samples(filtered)


def _segment_bounds(n: int, seg_n: int) -> list[tuple[int, int]]:
    return [(s, min(s + seg_n, n)) for s in range(0, n, seg_n)]


def _band_power_fraction(x: np.ndarray, fs: float, lo: float, hi: float) -> float:
    x = x - x.mean()
    psd = np.abs(np.fft.rfft(x)) ** 2
    freqs = np.fft.rfftfreq(x.size, d=1.0 / fs)
    total = psd.sum()
    if total <= 0:
        return 0.0
    band = psd[(freqs >= lo) & (freqs <= hi)].sum()
    return float(band / total)


def _beat_band_autocorr(x: np.ndarray, fs: float, bpm_lo: float, bpm_hi: float) -> float:
    """Max normalized (bias-corrected) autocorrelation over beat-period lags."""
    x = x - x.mean()
    var = np.dot(x, x) / x.size
    if var <= 0:
        return 0.0
    lag_min = max(1, int(np.floor(fs * 60.0 / bpm_hi)))
    lag_max = min(x.size - 2, int(np.ceil(fs * 60.0 / bpm_lo)))
    best = 0.0
    for k in range(lag_min, lag_max + 1):
        r = np.dot(x[:-k], x[k:]) / (x.size - k) / var
        best = max(best, r)
    return float(best)


def assess_quality(
    series: TimeSeries,
    segment_len_s: float = 2.0,
    thresholds: QualityThresholds | None = None,
) -> QualityMask:
    """Label each consecutive segment of a filtered PPG series CLEAN or NOISY.

    Degenerate segments (near-zero variance, too few samples) are NOISY.
    """
    th = thresholds or QualityThresholds()
    fs = series.sample_rate_hz
    seg_n = int(round(segment_len_s * fs))
    bounds = _segment_bounds(series.n, seg_n)
    x = series.samples

    p2p = np.array([np.ptp(x[a:b]) for a, b in bounds])
    median_p2p = float(np.median(p2p))

    labels = []
    for (a, b), amp in zip(bounds, p2p):
        seg = x[a:b]
        if seg.size < 4 or amp <= 1e-12 or median_p2p <= 1e-12:
            labels.append(SegmentLabel.NOISY)
            continue
        if not (th.amp_ratio_lo * median_p2p <= amp <= th.amp_ratio_hi * median_p2p):
            labels.append(SegmentLabel.NOISY)
            continue
        if np.std(seg) <= 1e-12:
            labels.append(SegmentLabel.NOISY)
            continue
        skew = spstats.skew(seg)
        kurt = spstats.kurtosis(seg, fisher=False)
        if abs(skew) > th.skew_max or kurt > th.kurtosis_max:
            labels.append(SegmentLabel.NOISY)
            continue
        if _beat_band_autocorr(seg, fs, th.bpm_lo, th.bpm_hi) < th.autocorr_min:
            labels.append(SegmentLabel.NOISY)
            continue
        if _band_power_fraction(seg, fs, th.band_lo_hz, th.band_hi_hz) < th.band_power_min:
            labels.append(SegmentLabel.NOISY)
            continue
        labels.append(SegmentLabel.CLEAN)
    return QualityMask(segment_len_s=segment_len_s, labels=tuple(labels))


def _candidate_peaks(x: np.ndarray, fs: float, config: PpgConfig) -> np.ndarray:
    """Adaptive-threshold local maxima with an amplitude-resolving refractory.

    Besides the rolling-percentile height threshold, candidates must have a
    prominence of at least 30% of the local peak-to-peak amplitude; dicrotic
    shoulders and filter edge ripples clear the percentile threshold but not
    the prominence floor.
    """
    from scipy.ndimage import percentile_filter

    win = max(3, int(round(config.threshold_window_s * fs)))
    threshold = percentile_filter(x, config.threshold_percentile, size=win, mode="nearest")
    local_p2p = percentile_filter(x, 90, size=win, mode="nearest") - percentile_filter(
        x, 10, size=win, mode="nearest"
    )
    candidates, _ = sps.find_peaks(x, prominence=0.3 * local_p2p)
    candidates = candidates[x[candidates] > threshold[candidates]]

    refractory_n = int(round(config.refractory_s * fs))
    kept: list[int] = []
    for idx in candidates:
        if kept and idx - kept[-1] < refractory_n:
            if x[idx] > x[kept[-1]]:
                kept[-1] = int(idx)
        else:
            kept.append(int(idx))
    return np.array(kept, dtype=int)


def detect_peaks(series: TimeSeries, mask: QualityMask, config: PpgConfig | None = None) -> PeakList:
    """Systolic peaks within CLEAN segments of a filtered series."""
    config = config or PpgConfig()
    clean = mask.clean_sample_mask(series)
    if not clean.any():
        return PeakList(indices=np.array([], dtype=int))
    peaks = _candidate_peaks(series.samples, series.sample_rate_hz, config)
    return PeakList(indices=peaks[clean[peaks]])


def _noisy_runs(mask: QualityMask) -> list[tuple[int, int]]:
    """Maximal [start, stop) NOISY runs in segment space."""
    runs = []
    start = None
    for i, lab in enumerate(mask.labels):
        if lab == SegmentLabel.NOISY and start is None:
            start = i
        elif lab == SegmentLabel.CLEAN and start is not None:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, mask.n_segments))
    return runs


def _beat_template(x: np.ndarray, peaks: np.ndarray, resolution: int = 64) -> tuple[np.ndarray, float]:
    """Mean single-beat waveform (peak-aligned) and mean period in samples."""
    beats = []
    for a, b in zip(peaks[:-1], peaks[1:]):
        beat = x[a:b]
        pos = np.linspace(0.0, 1.0, beat.size, endpoint=False)
        beats.append(np.interp(np.linspace(0.0, 1.0, resolution, endpoint=False), pos, beat))
    template = np.mean(beats, axis=0)
    period = float(np.mean(np.diff(peaks)))
    return template, period


def _sample_template(template: np.ndarray, phase: np.ndarray) -> np.ndarray:
    """Evaluate a one-period template at fractional phases (periodic interp)."""
    res = template.size
    pos = phase % 1.0 * res
    i0 = np.floor(pos).astype(int) % res
    i1 = (i0 + 1) % res
    frac = pos - np.floor(pos)
    return template[i0] * (1 - frac) + template[i1] * frac


def reconstruct(
    series: TimeSeries,
    mask: QualityMask,
    max_gap_s: float = 15.0,
    config: PpgConfig | None = None,
) -> tuple[TimeSeries, QualityMask]:
    """Replace short noisy runs with template-tiled synthetic signal.

    A run is reconstructable when it lasts at most max_gap_s and has at least
    flank_s of CLEAN signal on both sides; the synthesis tiles a mean beat
    template at a period interpolated between the flank periods and
    crossfades with the original samples at the gap edges. Longer or
    unflanked runs are untouched. CLEAN samples are never modified.
    """
    config = config or PpgConfig()
    fs = series.sample_rate_hz
    seg_n = int(round(mask.segment_len_s * fs))
    flank_n = int(round(config.flank_s * fs))
    flank_segs = int(np.ceil(config.flank_s / mask.segment_len_s))
    max_gap_segs = int(np.floor(max_gap_s / mask.segment_len_s))

    out = series.samples.copy()
    labels = list(mask.labels)

    for run_start, run_stop in _noisy_runs(mask):
        run_segs = run_stop - run_start
        if run_segs > max_gap_segs:
            continue
        left_ok = run_start >= flank_segs and all(
            lab == SegmentLabel.CLEAN for lab in mask.labels[run_start - flank_segs : run_start]
        )
        right_ok = run_stop + flank_segs <= mask.n_segments and all(
            lab == SegmentLabel.CLEAN for lab in mask.labels[run_stop : run_stop + flank_segs]
        )
        if not (left_ok and right_ok):
            continue

        g0 = run_start * seg_n
        g1 = min(run_stop * seg_n, series.n)
        left = out[g0 - flank_n : g0]
        right = out[g1 : g1 + flank_n]
        lp = _candidate_peaks(left, fs, config)
        rp = _candidate_peaks(right, fs, config)
        if lp.size < 2 or rp.size < 2:
            continue

        tmpl_l, period_l = _beat_template(left, lp)
        tmpl_r, period_r = _beat_template(right, rp)

        # Anchor phase 0 at the last left-flank peak and land on an integer
        # number of beats at the first right-flank peak.
        anchor_l = (g0 - flank_n) + lp[-1]
        anchor_r = g1 + rp[0]
        span = anchor_r - anchor_l
        n_beats = max(1, round(2.0 * span / (period_l + period_r)))

        t = np.arange(g0, g1, dtype=float) - anchor_l
        u = t / span
        # Linear frequency ramp between flank rates, rescaled to close the
        # phase exactly at the right anchor.
        f0, f1 = 1.0 / period_l, 1.0 / period_r
        raw_phase = f0 * t + (f1 - f0) * t**2 / (2.0 * span)
        total = (f0 + f1) * span / 2.0
        phase = raw_phase * (n_beats / total)

        weight = np.clip(u, 0.0, 1.0)[:, None]
        blended = (1 - weight) * _sample_template(tmpl_l, phase)[:, None] + weight * _sample_template(
            tmpl_r, phase
        )[:, None]
        synth = blended[:, 0]

        fade_n = min(int(round(config.crossfade_s * fs)), (g1 - g0) // 2)
        if fade_n > 0:
            ramp = np.linspace(0.0, 1.0, fade_n, endpoint=False)
            synth[:fade_n] = out[g0 : g0 + fade_n] * (1 - ramp) + synth[:fade_n] * ramp
            synth[-fade_n:] = synth[-fade_n:] * (1 - ramp[::-1]) + out[g1 - fade_n : g1] * ramp[::-1]

        out[g0:g1] = synth
        for i in range(run_start, run_stop):
            labels[i] = SegmentLabel.CLEAN

    return series.with_samples(out), QualityMask(segment_len_s=mask.segment_len_s, labels=tuple(labels))


def hr_from_peaks(
    series: TimeSeries,
    peaks: PeakList,
    clean_mask: np.ndarray,
    window_len_s: float,
    hop_s: float,
    min_clean_coverage: float,
) -> HrSeries:
    """Windowed HR from detected peaks with a clean-coverage gate."""
    fs = series.sample_rate_hz
    wins = windows(series, window_len_s, hop_s)
    starts, bpm = [], []
    idx = peaks.indices
    for w in wins:
        starts.append(series.start_epoch_s + w.start_time_s)
        coverage = clean_mask[w.start_index : w.stop_index].mean() if clean_mask.size else 0.0
        in_win = idx[(idx >= w.start_index) & (idx < w.stop_index)]
        if coverage >= min_clean_coverage and in_win.size >= 2:
            mean_ibi_s = float(np.mean(np.diff(in_win))) / fs
            bpm.append(60.0 / mean_ibi_s)
        else:
            bpm.append(np.nan)
    return HrSeries(
        window_start_s=np.array(starts),
        bpm=np.array(bpm),
        window_len_s=window_len_s,
        hop_s=hop_s,
    )


def estimate_hr(
    series: TimeSeries,
    window_len_s: float = 30.0,
    hop_s: float = 30.0,
    config: PpgConfig | None = None,
) -> HrSeries:
    """Full pipeline on a raw PPG series: filter, assess, reconstruct, detect,
    then windowed HR with the coverage and peak-count gates."""
    config = config or PpgConfig()
    if series.duration_s < window_len_s:
        raise SeriesTooShort(
            f"series of {series.duration_s:.1f} s shorter than one {window_len_s:.1f} s window"
        )
    filtered = highpass_filter(series, config.cutoff_hz)
    mask = assess_quality(filtered, config.segment_len_s, config.thresholds)
    repaired, mask = reconstruct(filtered, mask, config.max_gap_s, config)
    peaks = detect_peaks(repaired, mask, config)
    clean = mask.clean_sample_mask(repaired)
    return hr_from_peaks(repaired, peaks, clean, window_len_s, hop_s, config.min_clean_coverage)
