"""HTTP service: agent sessions plus data management endpoints."""

from __future__ import annotations

import secrets
import threading
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from fastapi import FastAPI, File, Form, UploadFile
from fastapi.responses import JSONResponse

from .config import AppConfig
from .datastore import DataStore
from .errors import (
    NonFiniteSample,
    OverlapConflict,
    ParseError,
    PulseAgentError,
    UserNotFound,
)
from .orchestrator import (
    AgentResponse,
    ClarificationRequest,
    DataPipe,
    EntryKind,
    LlmBackend,
    MockBackend,
    RemoteBackend,
    ToolContext,
    default_registry,
    run_session,
)


@dataclass
class SessionState:
    session_id: str
    datapipe: DataPipe
    history: list[dict] = field(default_factory=list)
    created_at: float = field(default_factory=time.time)
    last_used: float = field(default_factory=time.time)
    busy: bool = False


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def build_backend(config: AppConfig) -> LlmBackend:
    if config.llm.backend == "remote":
        return RemoteBackend(config.llm.endpoint, config.llm.model, config.llm.timeout_s)
    if config.llm.transcript:
        return MockBackend.from_transcript(config.llm.transcript)
    return MockBackend()


def create_app(config: AppConfig | None = None, backend: LlmBackend | None = None) -> FastAPI:
    """App factory; tests inject a scripted mock backend directly."""
    config = config or AppConfig()
    store = DataStore(config.data_root, timezone=config.timezone)
    llm = backend if backend is not None else build_backend(config)
    registry = default_registry()

    app = FastAPI(title="pulse-agent", version="0.1.0")
    sessions: dict[str, SessionState] = {}
    lock = threading.Lock()

    def _expire_sessions() -> None:
        now = time.time()
        for sid in [s for s, st in sessions.items() if now - st.last_used > config.session_ttl_s]:
            del sessions[sid]

    @app.get("/v1/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/v1/sessions", status_code=201)
    def create_session():
        with lock:
            _expire_sessions()
            sid = secrets.token_hex(16)
            sessions[sid] = SessionState(session_id=sid, datapipe=DataPipe())
        return {"session_id": sid}

    @app.post("/v1/sessions/{session_id}/query")
    def query_session(session_id: str, body: dict):
        text = (body or {}).get("text", "")
        if not text:
            return _error(400, "bad_request", "body must contain non-empty 'text'")
        with lock:
            _expire_sessions()
            state = sessions.get(session_id)
            if state is None:
                return _error(404, "session_not_found", f"unknown or expired session {session_id}")
            if state.busy:
                return _error(409, "session_busy", "a query is already in flight for this session")
            state.busy = True
        try:
            ctx = ToolContext(
                store=store,
                datapipe=state.datapipe,
                trim_s=config.trim_s,
                window_len_s=config.window_len_s,
                hop_s=config.hop_s,
                ppg_config=config.ppg,
            )
            keys_before = len(state.datapipe)
            result = run_session(text, registry, llm, ctx, session_id=session_id)
            state.history.append({"role": "user", "text": text})
            if isinstance(result, ClarificationRequest):
                state.history.append({"role": "clarification", "text": result.question})
                return _error(422, "needs_clarification", result.question)
            state.history.append({"role": "agent", "text": result.text})
            return _render_response(result, state, keys_before)
        except PulseAgentError as exc:
            return _error(502, exc.code, str(exc))
        finally:
            with lock:
                state.last_used = time.time()
                state.busy = False

    def _render_response(result: AgentResponse, state: SessionState, keys_before: int) -> dict:
        payload = {
            "session_id": state.session_id,
            "text": result.text,
            "extracted_values": [None if np.isnan(v) else v for v in result.extracted_values],
        }
        # attach the newest HR series produced by this query for client plotting
        new_entries = state.datapipe.entries()[keys_before:]
        for entry in reversed(new_entries):
            if entry.kind == EntryKind.HR_SERIES:
                hr = entry.payload["hr"]
                payload["hr_series"] = {
                    "window_start_s": [float(t) for t in hr.window_start_s],
                    "bpm": [None if np.isnan(b) else float(b) for b in hr.bpm],
                }
                break
        return payload

    @app.get("/v1/sessions/{session_id}/history")
    def session_history(session_id: str):
        state = sessions.get(session_id)
        if state is None:
            return _error(404, "session_not_found", f"unknown or expired session {session_id}")
        return {"session_id": session_id, "turns": state.history}

    @app.get("/v1/users/{user_id}/recordings")
    def list_recordings(user_id: str):
        try:
            return [asdict(m) for m in store.list_recordings(user_id)]
        except UserNotFound as exc:
            return _error(404, exc.code, str(exc))

    @app.post("/v1/recordings", status_code=201)
    def upload_recording(
        file: UploadFile = File(...),
        user_id: str = Form(...),
        modality: str = Form(...),
        start_epoch_s: float = Form(...),
        sample_rate_hz: float = Form(...),
    ):
        import tempfile
        from pathlib import Path

        with tempfile.TemporaryDirectory() as tmp:
            dest = Path(tmp) / "upload.csv"
            dest.write_bytes(file.file.read())
            try:
                meta = store.ingest(dest, user_id, modality, start_epoch_s, sample_rate_hz)
            except OverlapConflict as exc:
                return _error(409, exc.code, str(exc))
            except (ParseError, NonFiniteSample, ValueError) as exc:
                code = getattr(exc, "code", "bad_request")
                return _error(400, code, str(exc))
        return asdict(meta)

    return app
