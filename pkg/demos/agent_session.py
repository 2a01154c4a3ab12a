"""A full agent session against a scripted LLM backend, fully offline.

Seeds a data store with one 16-minute PPG recording, scripts the mock
backend with the planner/critic/response prompts the session will issue,
and runs the plan-execute-respond loop end to end. Shows the selected
plan, the intermediate artifacts, and the tagged answer.

Run: python3 demos/agent_session.py
"""

import json
import tempfile
from pathlib import Path

from pulse_agent.datastore import DataStore
from pulse_agent.orchestrator import (
    DataPipe,
    MockBackend,
    ToolContext,
    build_candidates_prompt,
    build_critique_prompt,
    build_response_prompt,
    default_registry,
    execute,
    parse_plan,
    run_session,
)
from pulse_agent.orchestrator.agent import _result_summaries
from pulse_agent.synth import synth_ppg

QUERY = "What was the average heart rate of user p01 around epoch 1000300 from PPG?"

PLAN = {
    "steps": [
        {"task": "lookup_recording",
         "args": {"user_id": "p01", "modality": "PPG", "time": 1000300}},
        {"task": "estimate_hr_ppg", "args": {"recording": {"$ref": "step0"}}},
        {"task": "summarize_hr", "args": {"hr": {"$ref": "step1"}}},
    ],
    "rationale": "retrieve the PPG recording, run the pipeline, summarize",
}


def seed_store(root):
    store = DataStore(root)
    series, _ = synth_ppg(960.0, hr_bpm=72.0, start_epoch_s=1_000_000.0, seed=3)
    csv = Path(root) / "seed.csv"
    DataStore.write_csv(csv, series.samples, series.sample_rate_hz)
    store.ingest(csv, "p01", "PPG", 1_000_000.0, series.sample_rate_hz)
    return store


def script_backend(store, registry):
    """Register the three prompts the session will send, in order."""
    mock = MockBackend()
    mock.register(build_candidates_prompt(QUERY, registry, 3), json.dumps([PLAN]))
    mock.register(build_critique_prompt(QUERY, [PLAN]),
                  json.dumps([{"index": 0, "score": 9, "critique": "complete"}]))
    # dry-run the plan to learn the result summaries the response prompt carries
    dp = DataPipe()
    results = execute(parse_plan(PLAN), dp, registry, ToolContext(store=store, datapipe=dp))
    summaries = _result_summaries(results, dp)
    mean = summaries[-1]["mean_bpm"]
    mock.register(build_response_prompt(QUERY, summaries),
                  f"The validated PPG pipeline puts the average at {mean:.1f} BPM.")
    return mock


def main():
    registry = default_registry()
    with tempfile.TemporaryDirectory() as tmp:
        store = seed_store(Path(tmp) / "data")
        llm = script_backend(store, registry)

        datapipe = DataPipe()
        ctx = ToolContext(store=store, datapipe=datapipe)
        print(f"query: {QUERY}\n")
        print("plan:")
        for i, step in enumerate(PLAN["steps"]):
            print(f"  step{i}: {step['task']}({json.dumps(step['args'])})")

        result = run_session(QUERY, registry, llm, ctx)

        print("\nintermediate artifacts:")
        for entry in datapipe.entries():
            print(f"  {entry.key}  {entry.kind.value:15s}  from {entry.producer}")
        print(f"\nanswer: {result.text}")
        print(f"extracted values: {list(result.extracted_values)}")


if __name__ == "__main__":
    main()
