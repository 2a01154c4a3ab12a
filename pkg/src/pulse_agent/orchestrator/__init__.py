from .agent import (
    AgentResponse,
    ClarificationRequest,
    StepStatus,
    TaskResult,
    build_response_prompt,
    count_unparseable_tags,
    execute,
    extract_tagged_values,
    generate_response,
    run_session,
)
from .backends import (
    API_KEY_ENV,
    LlmBackend,
    MockBackend,
    RecordingBackend,
    RemoteBackend,
    prompt_fingerprint,
)
from .datapipe import DataPipe, DataPipeEntry, EntryKind
from .planning import (
    Plan,
    PlanStep,
    build_candidates_prompt,
    build_critique_prompt,
    parse_plan,
    plan,
    validate_plan,
)
from .registry import ParamSpec, TaskRegistry, TaskSpec, ToolContext, default_registry

__all__ = [
    "AgentResponse",
    "API_KEY_ENV",
    "ClarificationRequest",
    "DataPipe",
    "DataPipeEntry",
    "EntryKind",
    "LlmBackend",
    "MockBackend",
    "ParamSpec",
    "Plan",
    "PlanStep",
    "RecordingBackend",
    "RemoteBackend",
    "StepStatus",
    "TaskRegistry",
    "TaskResult",
    "TaskSpec",
    "ToolContext",
    "build_candidates_prompt",
    "build_critique_prompt",
    "build_response_prompt",
    "count_unparseable_tags",
    "default_registry",
    "execute",
    "extract_tagged_values",
    "generate_response",
    "parse_plan",
    "plan",
    "prompt_fingerprint",
    "run_session",
    "validate_plan",
]
