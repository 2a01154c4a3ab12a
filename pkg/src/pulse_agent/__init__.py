"""Physiological time-series analysis agent.

Deterministic PPG->HR and ECG reference pipelines, an agreement-evaluation
toolkit, a file-backed recording store, and an LLM-orchestrated analysis
service with a pluggable backend.
"""

from . import batch, config, datastore, ecg, errors, metrics, orchestrator, ppg, signals, synth

__version__ = "0.1.0"

__all__ = [
    "batch",
    "config",
    "datastore",
    "ecg",
    "errors",
    "metrics",
    "orchestrator",
    "ppg",
    "signals",
    "synth",
    "__version__",
]
