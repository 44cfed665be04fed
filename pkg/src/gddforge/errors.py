"""Exception hierarchy for the pipeline.

Every error carries a stable ``code`` string so the CLI and HTTP service can
emit machine-readable failures without string-matching messages.
"""

from __future__ import annotations


class GddForgeError(Exception):
    """Base class for all pipeline errors."""

    code = "internal_error"
    #: CLI exit code bucket: 1 usage, 2 validation, 3 backend, 4 io
    exit_code = 2

    def __init__(self, message: str, **detail):
        super().__init__(message)
        self.message = message
        self.detail = detail

    def to_dict(self) -> dict:
        d = {"error": self.code, "message": self.message}
        if self.detail:
            d["detail"] = self.detail
        return d


# --- ingest ---------------------------------------------------------------

class UnsupportedFormat(GddForgeError):
    code = "unsupported_format"


class ConverterUnavailable(GddForgeError):
    code = "converter_unavailable"
    exit_code = 4


class EmptyDocument(GddForgeError):
    code = "empty_document"


class EncodingError(GddForgeError):
    code = "encoding_error"


# --- spec extraction ------------------------------------------------------

class ParseError(GddForgeError):
    code = "parse_error"


class SchemaViolation(GddForgeError):
    """Document fails the GameSpec schema; ``field_path`` names the first offender."""

    code = "schema_violation"

    def __init__(self, message: str, field_path: str = "", **detail):
        super().__init__(message, field_path=field_path, **detail)
        self.field_path = field_path


# --- script analysis ------------------------------------------------------

class CycleDetected(GddForgeError):
    code = "cycle_detected"

    def __init__(self, message: str, cycle: list | None = None, **detail):
        super().__init__(message, cycle=list(cycle or []), **detail)
        self.cycle = list(cycle or [])


class UnknownScript(GddForgeError):
    code = "unknown_script"


# --- generation -----------------------------------------------------------

class BackendError(GddForgeError):
    code = "backend_error"
    exit_code = 3


class BackendTimeout(BackendError):
    code = "backend_timeout"


class AuthFailure(BackendError):
    code = "auth_failure"


class RateLimited(BackendError):
    code = "rate_limited"


class MalformedBackendResponse(BackendError):
    code = "malformed_backend_response"


class MissingDependency(GddForgeError):
    code = "missing_dependency"


class NoCodeFound(GddForgeError):
    code = "no_code_found"


class EmptyCodeBlock(GddForgeError):
    code = "empty_code_block"


# --- validation -----------------------------------------------------------

class StructureTooBroken(GddForgeError):
    code = "structure_too_broken"


# --- packaging ------------------------------------------------------------

class IoError(GddForgeError):
    code = "io_error"
    exit_code = 4


class PackageExists(IoError):
    code = "package_exists"


# --- evaluation -----------------------------------------------------------

class ScoreRangeError(GddForgeError):
    code = "score_range_error"


class DuplicateRecord(GddForgeError):
    code = "duplicate_record"


class IncompleteGrid(GddForgeError):
    code = "incomplete_grid"


# --- job/service ----------------------------------------------------------

class UnknownJob(GddForgeError):
    code = "unknown_job"


class WrongState(GddForgeError):
    """Operation not legal in the job's current lifecycle state."""

    code = "wrong_state"

    def __init__(self, message: str, state: str = "", **detail):
        super().__init__(message, state=state, **detail)
        self.state = state


class UsageError(GddForgeError):
    code = "usage_error"
    exit_code = 1


class ValidationFailed(GddForgeError):
    """A requested validation ran and found errors (CLI surfaces exit code 2)."""

    code = "validation_failed"
    exit_code = 2
