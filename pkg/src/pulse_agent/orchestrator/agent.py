"""Task execution, response generation, and the plan/execute/replan loop."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from ..errors import NeedsClarification, PlanningFailed, PulseAgentError, ResponseMalformed
from .backends import LlmBackend
from .datapipe import DataPipe, EntryKind
from .planning import Plan, plan as make_plan
from .registry import TaskRegistry, ToolContext


class StepStatus(str, Enum):
    OK = "OK"
    FAILED = "FAILED"


@dataclass(frozen=True)
class TaskResult:
    step_index: int
    task: str
    status: StepStatus
    output_key: str | None = None
    error_code: str | None = None
    error_message: str | None = None


@dataclass(frozen=True)
class AgentResponse:
    text: str
    extracted_values: tuple[float, ...]
    session_id: str = ""


@dataclass(frozen=True)
class ClarificationRequest:
    question: str
    attempts: tuple[str, ...] = ()


def execute(plan_obj: Plan, datapipe: DataPipe, registry: TaskRegistry, ctx: ToolContext) -> list[TaskResult]:
    """Run plan steps in order, storing outputs in the datapipe.

    Failures are values, not exceptions: execution stops at the first FAILED
    step and returns the results so far, feeding replanning.
    """
    results: list[TaskResult] = []
    step_keys: dict[int, str] = {}
    for i, step in enumerate(plan_obj.steps):
        spec = registry.get(step.task)
        args: dict[str, Any] = {}
        for name, value in step.args.items():
            if isinstance(value, dict) and "$ref" in value:
                ref_index = int(re.match(r"step(\d+)", value["$ref"]).group(1))
                args[name] = datapipe.get(step_keys[ref_index]).payload
            else:
                args[name] = value
        try:
            payload = spec.handler(args, ctx)
        except PulseAgentError as exc:
            results.append(
                TaskResult(
                    step_index=i,
                    task=step.task,
                    status=StepStatus.FAILED,
                    error_code=exc.code,
                    error_message=str(exc),
                )
            )
            return results
        except (ValueError, KeyError, TypeError) as exc:
            results.append(
                TaskResult(
                    step_index=i,
                    task=step.task,
                    status=StepStatus.FAILED,
                    error_code="task_error",
                    error_message=str(exc),
                )
            )
            return results
        key = datapipe.put(spec.produces, payload, producer=f"step{i}:{step.task}")
        step_keys[i] = key
        results.append(TaskResult(step_index=i, task=step.task, status=StepStatus.OK, output_key=key))
    return results


TAG_RE_TEMPLATE = r"<{tag}>(.*?)</{tag}>"


def extract_tagged_values(text: str, tag: str = "hr") -> list[float]:
    """All <tag>...</tag> spans parsed as real or NaN, in document order.

    Unparseable spans are skipped (see count_unparseable_tags for the
    warning count).
    """
    values = []
    for span in re.findall(TAG_RE_TEMPLATE.format(tag=re.escape(tag)), text, flags=re.DOTALL):
        try:
            values.append(float(span.strip()))
        except ValueError:
            continue
    return values


def count_unparseable_tags(text: str, tag: str = "hr") -> int:
    spans = re.findall(TAG_RE_TEMPLATE.format(tag=re.escape(tag)), text, flags=re.DOTALL)
    return len(spans) - len(extract_tagged_values(text, tag))


RESPONSE_PROMPT = """\
You are the response generator of a physiological time-series analysis agent.
Write a concise, user-friendly answer to the query below using only the
analysis results provided. Report every HR value wrapped in <hr></hr> tags,
using <hr>NaN</hr> when the signal was too noisy to analyze. Mention the
analysis method (the validated PPG processing pipeline) when relevant.

Query: {query}
Analysis results (JSON): {results}
Answer:"""


def _result_summaries(results: list[TaskResult], datapipe: DataPipe) -> list[dict]:
    """Compact per-step summaries; raw sample arrays never leave the datapipe."""
    import numpy as np

    summaries = []
    for r in results:
        if r.status != StepStatus.OK:
            continue
        entry = datapipe.get(r.output_key)
        if entry.kind == EntryKind.SCALAR:
            summaries.append({"task": r.task, **entry.payload})
        elif entry.kind == EntryKind.HR_SERIES:
            hr = entry.payload["hr"]
            valid = hr.bpm[~np.isnan(hr.bpm)]
            summaries.append(
                {
                    "task": r.task,
                    "recording_id": entry.payload["recording_id"],
                    "n_windows": int(len(hr)),
                    "n_valid": int(valid.size),
                    "n_nan": int(len(hr) - valid.size),
                    "mean_bpm": round(float(valid.mean()), 1) if valid.size else None,
                }
            )
        elif entry.kind == EntryKind.TIMESERIES_REF:
            summaries.append(
                {
                    "task": r.task,
                    "recording_id": entry.payload["recording_id"],
                    "datapipe_key": entry.key,
                }
            )
        else:
            summaries.append({"task": r.task, "datapipe_key": entry.key})
    return summaries


def _headline_values(summaries: list[dict]) -> list[str]:
    """The HR values the response text must carry, rendered to 1 decimal."""
    values = []
    for s in summaries:
        if "mean_bpm" in s:
            values.append("NaN" if s["mean_bpm"] is None else f"{s['mean_bpm']:.1f}")
    return values


def build_response_prompt(query: str, summaries: list[dict]) -> str:
    return RESPONSE_PROMPT.format(query=query, results=json.dumps(summaries, sort_keys=True))


def generate_response(
    query: str,
    results: list[TaskResult],
    datapipe: DataPipe,
    llm: LlmBackend,
    session_id: str = "",
) -> AgentResponse:
    """Synthesize a user-facing answer; post-process to guarantee every
    headline HR value is wrapped in <hr></hr> tags."""
    ok = [r for r in results if r.status == StepStatus.OK]
    if not ok:
        raise ValueError("generate_response requires at least one OK result")
    summaries = _result_summaries(results, datapipe)
    text = llm.complete(build_response_prompt(query, summaries))

    expected = _headline_values(summaries)
    located = 0
    for value in expected:
        tagged = f"<hr>{value}</hr>"
        if tagged in text:
            located += 1
            continue
        # wrap a bare occurrence; forbid digit/fraction continuation but
        # allow sentence punctuation right after the value
        pattern = re.compile(rf"(?<![\d.<>]){re.escape(value)}(?!\d|\.\d)")
        if pattern.search(text):
            text = pattern.sub(tagged, text, count=1)
            located += 1
    if expected and located == 0:
        raise ResponseMalformed("backend response contains none of the analysis result values")

    return AgentResponse(
        text=text,
        extracted_values=tuple(extract_tagged_values(text)),
        session_id=session_id,
    )


def run_session(
    query: str,
    registry: TaskRegistry,
    llm: LlmBackend,
    ctx: ToolContext,
    max_replans: int = 3,
    k: int = 3,
    session_id: str = "",
) -> AgentResponse | ClarificationRequest:
    """Plan, execute, and replan on failure with the failure context appended;
    after max_replans failed rounds the session degrades to a clarification
    request describing what was attempted."""
    failure_context = ""
    attempts: list[str] = []
    for _ in range(1 + max_replans):
        try:
            plan_obj = make_plan(query, registry, llm, k=k, failure_context=failure_context)
        except NeedsClarification as exc:
            return ClarificationRequest(question=exc.question, attempts=tuple(attempts))
        except PlanningFailed as exc:
            attempts.append(f"planning failed: {exc}")
            failure_context = str(exc)
            continue
        results = execute(plan_obj, ctx.datapipe, registry, ctx)
        failed = [r for r in results if r.status == StepStatus.FAILED]
        if not failed:
            return generate_response(query, results, ctx.datapipe, llm, session_id=session_id)
        f = failed[0]
        attempt = f"step {f.step_index} ({f.task}) failed with {f.error_code}: {f.error_message}"
        attempts.append(attempt)
        failure_context = attempt
    return ClarificationRequest(
        question=(
            "I could not complete the analysis after several attempts. "
            "Could you adjust the request (for example the user id or time)? "
            f"Attempts: {'; '.join(attempts)}"
        ),
        attempts=tuple(attempts),
    )
