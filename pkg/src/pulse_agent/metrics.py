"""Agreement evaluation: pairing, outlier gating, error metrics,
Bland-Altman analysis, and linear regression, with machine-readable reports.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateFit, EmptyCorpus, GridMismatch, InsufficientData, ZeroReference
from .ppg import HrSeries

OUTLIER_LO_BPM = 40.0
OUTLIER_HI_BPM = 200.0


@dataclass(frozen=True)
class PairedHr:
    """Jointly valid (reference, estimate) HR pairs; NaN windows dropped."""

    y: np.ndarray
    y_hat: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        y_hat = np.asarray(self.y_hat, dtype=float)
        y.setflags(write=False)
        y_hat.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "y_hat", y_hat)
        if y.size != y_hat.size or y.size < 1:
            raise ValueError("y and y_hat must be equal-length and non-empty")
        if np.any(np.isnan(y)) or np.any(np.isnan(y_hat)):
            raise ValueError("paired HR must not contain NaN")

    @property
    def n(self) -> int:
        return int(self.y.size)


@dataclass(frozen=True)
class MetricsReport:
    mae: float
    rmse: float
    mape: float  # fraction, not percent
    mad: float
    n: int


@dataclass(frozen=True)
class BlandAltmanResult:
    bias: float
    sd_diff: float
    loa_low: float
    loa_high: float


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    r: float


@dataclass(frozen=True)
class OutlierStats:
    total: int
    removed: int

    @property
    def outlier_pct(self) -> float:
        return 100.0 * self.removed / self.total if self.total else 0.0


def pair(est: HrSeries, ref: HrSeries) -> PairedHr:
    """Pair two HR series on a shared window grid, dropping NaN windows."""
    if (
        len(est) != len(ref)
        or est.window_len_s != ref.window_len_s
        or est.hop_s != ref.hop_s
        or not np.allclose(est.window_start_s, ref.window_start_s)
    ):
        raise GridMismatch("estimate and reference HR series are on different window grids")
    valid = ~np.isnan(est.bpm) & ~np.isnan(ref.bpm)
    if not valid.any():
        raise InsufficientData("no jointly valid windows to pair")
    return PairedHr(y=ref.bpm[valid], y_hat=est.bpm[valid])


def remove_outliers(
    values: np.ndarray, lo: float = OUTLIER_LO_BPM, hi: float = OUTLIER_HI_BPM
) -> tuple[np.ndarray, OutlierStats]:
    """Keep values in the inclusive [lo, hi] BPM range; count removals."""
    values = np.asarray(values, dtype=float)
    keep = (values >= lo) & (values <= hi)
    stats = OutlierStats(total=int(values.size), removed=int(values.size - keep.sum()))
    return values[keep], stats


def compute_metrics(p: PairedHr) -> MetricsReport:
    """MAE, RMSE, MAPE (fractional), and median absolute difference."""
    if np.any(p.y == 0):
        raise ZeroReference("MAPE undefined: reference contains zero values")
    err = np.abs(p.y - p.y_hat)
    return MetricsReport(
        mae=float(err.mean()),
        rmse=float(np.sqrt(np.mean(err**2))),
        mape=float(np.mean(err / np.abs(p.y))),
        mad=float(np.median(err)),
        n=p.n,
    )


def bland_altman(p: PairedHr) -> BlandAltmanResult:
    """Bias and 95% limits of agreement (sample SD, n-1 divisor)."""
    if p.n < 2:
        raise InsufficientData("Bland-Altman requires at least 2 pairs")
    diffs = p.y_hat - p.y
    bias = float(diffs.mean())
    sd = float(diffs.std(ddof=1))
    return BlandAltmanResult(bias=bias, sd_diff=sd, loa_low=bias - 1.96 * sd, loa_high=bias + 1.96 * sd)


def linear_regression(p: PairedHr) -> RegressionFit:
    """OLS fit of the estimate as a function of the reference, with Pearson r."""
    if p.n < 2:
        raise DegenerateFit("regression requires at least 2 pairs")
    y, y_hat = p.y, p.y_hat
    var_y = y.var()
    if var_y <= 0:
        raise DegenerateFit("reference HR has zero variance")
    cov = np.mean((y - y.mean()) * (y_hat - y_hat.mean()))
    slope = float(cov / var_y)
    intercept = float(y_hat.mean() - slope * y.mean())
    sd_yh = y_hat.std()
    r = float(cov / (np.sqrt(var_y) * sd_yh)) if sd_yh > 0 else 0.0
    return RegressionFit(slope=slope, intercept=intercept, r=r)


def _fmt(x: float) -> float:
    """Round to 6 significant digits for stable report serialization."""
    if x == 0 or not np.isfinite(x):
        return float(x)
    return float(f"{x:.6g}")


def evaluation_report(
    corpus: list[tuple[HrSeries, HrSeries]],
    recording_ids: list[str] | None = None,
    outlier_lo: float = OUTLIER_LO_BPM,
    outlier_hi: float = OUTLIER_HI_BPM,
    config_echo: dict | None = None,
) -> dict:
    """Pooled + per-recording evaluation over (estimate, reference) pairs.

    Outlier gating is applied to estimated HR before metric computation;
    reference values are trusted. Returns a JSON-serializable document; use
    write_report to emit report.json plus the scatter/Bland-Altman CSVs.
    """
    if not corpus:
        raise EmptyCorpus("evaluation requires at least one recording pair")
    if recording_ids is None:
        recording_ids = [f"rec{i:03d}" for i in range(len(corpus))]

    pooled_y, pooled_yh = [], []
    total, removed = 0, 0
    per_recording = []
    for rec_id, (est, ref) in zip(recording_ids, corpus):
        p = pair(est, ref)
        keep = (p.y_hat >= outlier_lo) & (p.y_hat <= outlier_hi)
        total += p.n
        removed += int(p.n - keep.sum())
        y, yh = p.y[keep], p.y_hat[keep]
        pooled_y.append(y)
        pooled_yh.append(yh)
        if y.size >= 1:
            m = compute_metrics(PairedHr(y=y, y_hat=yh))
            per_recording.append(
                {
                    "recording_id": rec_id,
                    "n": m.n,
                    "mae": _fmt(m.mae),
                    "rmse": _fmt(m.rmse),
                    "mape": _fmt(m.mape),
                    "mad": _fmt(m.mad),
                }
            )
        else:
            per_recording.append({"recording_id": rec_id, "n": 0})

    y = np.concatenate(pooled_y)
    yh = np.concatenate(pooled_yh)
    pooled = PairedHr(y=y, y_hat=yh)
    m = compute_metrics(pooled)
    ba = bland_altman(pooled)
    fit = linear_regression(pooled)
    stats = OutlierStats(total=total, removed=removed)

    return {
        "n_recordings": len(corpus),
        "metrics": {
            "n": m.n,
            "mae": _fmt(m.mae),
            "rmse": _fmt(m.rmse),
            "mape": _fmt(m.mape),
            "mape_pct": _fmt(100.0 * m.mape),
            "mad": _fmt(m.mad),
        },
        "bland_altman": {
            "bias": _fmt(ba.bias),
            "sd_diff": _fmt(ba.sd_diff),
            "loa_low": _fmt(ba.loa_low),
            "loa_high": _fmt(ba.loa_high),
        },
        "regression": {"slope": _fmt(fit.slope), "intercept": _fmt(fit.intercept), "r": _fmt(fit.r)},
        "outliers": {
            "total": stats.total,
            "removed": stats.removed,
            "outlier_pct": _fmt(stats.outlier_pct),
            "lo_bpm": outlier_lo,
            "hi_bpm": outlier_hi,
        },
        "per_recording": per_recording,
        "config": config_echo or {},
        "scatter": {"y": [_fmt(v) for v in y], "y_hat": [_fmt(v) for v in yh]},
    }


def write_report(report: dict, out_dir: str | Path) -> Path:
    """Write report.json, scatter.csv, and bland_altman.csv into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    y = report["scatter"]["y"]
    yh = report["scatter"]["y_hat"]

    doc = {k: v for k, v in report.items() if k != "scatter"}
    (out / "report.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")

    with open(out / "scatter.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["y", "y_hat"])
        w.writerows(zip(y, yh))
    with open(out / "bland_altman.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["mean", "diff"])
        for a, b in zip(y, yh):
            w.writerow([_fmt((a + b) / 2.0), _fmt(b - a)])
    return out / "report.json"
