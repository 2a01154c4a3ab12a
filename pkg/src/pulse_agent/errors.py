"""Exception hierarchy shared across the library."""


class PulseAgentError(Exception):
    """Base class for all library errors."""

    code = "error"


# signal-core
class SeriesTooShort(PulseAgentError):
    code = "series_too_short"


class InvalidWindowSpec(PulseAgentError):
    code = "invalid_window_spec"


class InvalidCutoff(PulseAgentError):
    code = "invalid_cutoff"


# evaluation
class GridMismatch(PulseAgentError):
    code = "grid_mismatch"


class ZeroReference(PulseAgentError):
    code = "zero_reference"


class InsufficientData(PulseAgentError):
    code = "insufficient_data"


class DegenerateFit(PulseAgentError):
    code = "degenerate_fit"


class EmptyCorpus(PulseAgentError):
    code = "empty_corpus"


# datastore
class ParseError(PulseAgentError):
    code = "parse_error"


class NonFiniteSample(PulseAgentError):
    code = "non_finite_sample"


class OverlapConflict(PulseAgentError):
    code = "overlap_conflict"


class UserNotFound(PulseAgentError):
    code = "user_not_found"


class NoRecordingAtTime(PulseAgentError):
    """Raised when no recording covers the requested instant.

    Carries the nearest available recording start so callers (notably the
    agent replanner) can retry with a usable timestamp.
    """

    code = "no_recording_at_time"

    def __init__(self, message, nearest_start_epoch_s=None, nearest_recording_id=None):
        super().__init__(message)
        self.nearest_start_epoch_s = nearest_start_epoch_s
        self.nearest_recording_id = nearest_recording_id


# orchestrator
class BackendUnavailable(PulseAgentError):
    code = "backend_unavailable"


class BackendTimeout(PulseAgentError):
    code = "backend_timeout"


class PlanningFailed(PulseAgentError):
    code = "planning_failed"


class NeedsClarification(PulseAgentError):
    code = "needs_clarification"

    def __init__(self, message):
        super().__init__(message)
        self.question = message


class ResponseMalformed(PulseAgentError):
    code = "response_malformed"
