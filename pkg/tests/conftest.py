import numpy as np
import pytest

from pulse_agent.datastore import DataStore
from pulse_agent.signals import Channel, TimeSeries
from pulse_agent.synth import synth_ecg_from_beats, synth_ppg, beat_times_from_ibis


def make_series(samples, fs=20.0, channel=Channel.PPG, start=0.0):
    return TimeSeries(samples=np.asarray(samples, dtype=float), sample_rate_hz=fs,
                      start_epoch_s=start, channel=channel)


@pytest.fixture
def clean_ppg_60s():
    series, truth = synth_ppg(60.0, hr_bpm=72.0, seed=0)
    return series, truth


@pytest.fixture
def seeded_store(tmp_path):
    """Store with one 16-min PPG/ECG pair for user p01 starting at epoch 1e6."""
    store = DataStore(tmp_path / "data")
    start = 1_000_000.0
    ppg, truth = synth_ppg(960.0, hr_bpm=72.0, start_epoch_s=start, seed=3)
    ecg = synth_ecg_from_beats(truth.beat_times_s, 960.0, start_epoch_s=start, seed=4)
    for series, modality in [(ppg, "PPG"), (ecg, "ECG_LEAD_II")]:
        csv = tmp_path / f"{modality}.csv"
        DataStore.write_csv(csv, series.samples, series.sample_rate_hz)
        store.ingest(csv, "p01", modality, start, series.sample_rate_hz)
    return store
