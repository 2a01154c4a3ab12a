"""Batch evaluation: run both HR pipelines over every paired recording in a
store and emit the evaluation report."""

from __future__ import annotations

from pathlib import Path

from . import ecg as ecg_mod
from . import ppg as ppg_mod
from .config import AppConfig
from .datastore import DataStore
from .errors import EmptyCorpus, SeriesTooShort
from .metrics import evaluation_report, write_report
from .signals import trim_calibration


def evaluate_store(store: DataStore, config: AppConfig, out_dir: str | Path) -> Path:
    """Estimate HR from every PPG recording, reference HR from its paired ECG,
    and write report.json + scatter.csv + bland_altman.csv to out_dir.

    Recordings pair by (user, start epoch); recordings too short to trim are
    analyzed untrimmed.
    """
    corpus = []
    ids = []
    for user, pairs in store.paired_users().items():
        for ppg_meta, ecg_meta in pairs:
            ppg_series = store.load(ppg_meta)
            ecg_series = store.load(ecg_meta)
            try:
                ppg_series = trim_calibration(ppg_series, config.trim_s)
                ecg_series = trim_calibration(ecg_series, config.trim_s)
            except SeriesTooShort:
                pass
            est = ppg_mod.estimate_hr(ppg_series, config.window_len_s, config.hop_s, config.ppg)
            ref = ecg_mod.reference_hr(ecg_series, config.window_len_s, config.hop_s)
            corpus.append((est, ref))
            ids.append(f"{user}:{ppg_meta.recording_id}")
    if not corpus:
        raise EmptyCorpus("store contains no paired PPG/ECG recordings")
    report = evaluation_report(
        corpus,
        recording_ids=ids,
        outlier_lo=config.outlier_lo_bpm,
        outlier_hi=config.outlier_hi_bpm,
        config_echo=config.echo(),
    )
    return write_report(report, out_dir)
