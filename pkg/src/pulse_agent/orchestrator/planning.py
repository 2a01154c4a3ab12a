"""Tree-of-thought style task planning.

One prompt asks the backend for k candidate plans, a second asks it to
critique and score them; candidates are then tried best-first through strict
JSON parsing and registry validation, so a malformed winner falls back to
the next-ranked candidate instead of failing the session.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any

from ..errors import NeedsClarification, PlanningFailed
from .backends import LlmBackend
from .registry import TaskRegistry

PLAN_SCHEMA_DOC = """\
{
  "steps": [
    {"task": "<task name>", "args": {"<param>": <literal or {"$ref": "step<i>"} for an earlier step's output>}}
  ],
  "rationale": "<one sentence>"
}"""

CANDIDATES_PROMPT = """\
You are the task planner of a physiological time-series analysis agent.
Available tools:
{tools}

Decompose the user query into an executable plan. Produce exactly {k} candidate
plans as a JSON array, each following this schema:
{schema}

If the query is missing information required to bind tool parameters (such as
the user id or time), respond instead with {{"clarification": "<question>"}}.
{failure_context}
User query: {query}
JSON:"""

CRITIQUE_PROMPT = """\
You are evaluating candidate task plans for the query: {query}

Candidates:
{candidates}

Critique each candidate's advantages and limitations and score it from 0 (unusable)
to 10 (best). Respond with a JSON array of {{"index": <i>, "score": <0-10>, "critique": "<text>"}}.
JSON:"""


@dataclass(frozen=True)
class PlanStep:
    task: str
    args: dict[str, Any]


@dataclass(frozen=True)
class Plan:
    steps: tuple[PlanStep, ...]
    rationale: str = ""


_REF_RE = re.compile(r"^step(\d+)$")


def _strip_fences(text: str) -> str:
    text = text.strip()
    if text.startswith("```"):
        text = re.sub(r"^```[a-z]*\n?", "", text)
        text = re.sub(r"\n?```$", "", text)
    return text.strip()


def parse_plan(doc: Any) -> Plan:
    """Parse one candidate document into a Plan; raises ValueError when malformed."""
    if not isinstance(doc, dict) or "steps" not in doc or not isinstance(doc["steps"], list):
        raise ValueError("plan must be an object with a 'steps' array")
    steps = []
    for raw in doc["steps"]:
        if not isinstance(raw, dict) or not isinstance(raw.get("task"), str):
            raise ValueError(f"malformed step {raw!r}")
        args = raw.get("args", {})
        if not isinstance(args, dict):
            raise ValueError(f"step args must be an object, got {args!r}")
        steps.append(PlanStep(task=raw["task"], args=args))
    return Plan(steps=tuple(steps), rationale=str(doc.get("rationale", "")))


def validate_plan(plan: Plan, registry: TaskRegistry) -> None:
    """Check task names, argument bindings, and reference ordering.

    A plan that validates here never raises unknown-task or unbound-reference
    faults during execution.
    """
    if not plan.steps:
        raise ValueError("plan has no steps")
    for i, step in enumerate(plan.steps):
        if step.task not in registry:
            raise ValueError(f"unknown task {step.task!r}")
        spec = registry.get(step.task)
        known = {p.name for p in spec.params}
        for name in step.args:
            if name not in known:
                raise ValueError(f"step {i}: unknown parameter {name!r} for task {step.task}")
        for p in spec.params:
            if p.required and p.name not in step.args:
                raise ValueError(f"step {i}: missing required parameter {p.name!r}")
        for name, value in step.args.items():
            if isinstance(value, dict):
                ref = value.get("$ref")
                m = _REF_RE.match(str(ref)) if ref is not None else None
                if m is None:
                    raise ValueError(f"step {i}: argument {name!r} must be a literal or {{'$ref': 'step<i>'}}")
                if int(m.group(1)) >= i:
                    raise ValueError(f"step {i}: reference {ref!r} is not to an earlier step")


def build_candidates_prompt(query: str, registry: TaskRegistry, k: int, failure_context: str = "") -> str:
    context = ""
    if failure_context:
        context = f"\nA previous attempt failed; take this into account: {failure_context}\n"
    return CANDIDATES_PROMPT.format(
        tools=registry.describe(), k=k, schema=PLAN_SCHEMA_DOC, failure_context=context, query=query
    )


def build_critique_prompt(query: str, candidates: list[Any]) -> str:
    rendered = "\n".join(f"[{i}] {json.dumps(c, sort_keys=True)}" for i, c in enumerate(candidates))
    return CRITIQUE_PROMPT.format(query=query, candidates=rendered)


def plan(
    query: str,
    registry: TaskRegistry,
    llm: LlmBackend,
    k: int = 3,
    failure_context: str = "",
) -> Plan:
    """Generate k candidate plans, score them, and return the best valid one."""
    if len(registry) == 0:
        raise PlanningFailed("task registry is empty")
    raw = llm.complete(build_candidates_prompt(query, registry, k, failure_context))
    try:
        doc = json.loads(_strip_fences(raw))
    except json.JSONDecodeError as exc:
        raise PlanningFailed(f"candidate generation returned invalid JSON: {exc}") from exc

    if isinstance(doc, dict) and "clarification" in doc:
        raise NeedsClarification(str(doc["clarification"]))
    if not isinstance(doc, list) or not doc:
        raise PlanningFailed("candidate generation returned no candidates")
    candidates = doc

    scores = {i: 0.0 for i in range(len(candidates))}
    try:
        critique_raw = llm.complete(build_critique_prompt(query, candidates))
        for item in json.loads(_strip_fences(critique_raw)):
            idx = int(item["index"])
            if idx in scores:
                scores[idx] = float(item["score"])
    except Exception:
        pass  # unscored candidates keep generation order

    errors = []
    order = sorted(scores, key=lambda i: (-scores[i], i))
    for idx in order:
        try:
            candidate = parse_plan(candidates[idx])
            validate_plan(candidate, registry)
            return candidate
        except ValueError as exc:
            errors.append(f"candidate {idx}: {exc}")
    raise PlanningFailed("no candidate plan validated: " + "; ".join(errors))
