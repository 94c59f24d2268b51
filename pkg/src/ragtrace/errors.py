"""Exception hierarchy shared across the pipeline, store, service, and CLI."""

from __future__ import annotations


class RagTraceError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(RagTraceError):
    """A caller supplied an invalid argument (bad split sizes, empty question, ...)."""


class CorpusError(RagTraceError):
    """A corpus file is unreadable or a record violates the input contract."""


class MockScriptError(RagTraceError):
    """The mock script file failed to parse; carries the offending line number."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number


class UnscriptedCallError(RagTraceError):
    """A mock-mode model call had no matching script entry (a test bug, not a data bug)."""

    def __init__(self, stage: str, prompt_head: str):
        super().__init__(
            f"no mock script entry matches a stage={stage!r} call "
            f"(prompt starts: {prompt_head[:120]!r})"
        )
        self.stage = stage


class TransportError(RagTraceError):
    """The live endpoint was unreachable after retries."""

    def __init__(self, message: str, attempts: int):
        super().__init__(f"{message} (after {attempts} attempts)")
        self.attempts = attempts


class EndpointError(RagTraceError):
    """The live endpoint answered with a non-2xx status; not retried."""

    def __init__(self, status_code: int, body: str):
        super().__init__(f"endpoint returned HTTP {status_code}: {body[:200]}")
        self.status_code = status_code


class ConfigurationError(RagTraceError):
    """The gateway or pipeline configuration is unusable (missing URL, bad dims, ...)."""


class ExtractionError(RagTraceError):
    """A wholly unparsable extraction response; carries the invocation id for tracing."""

    def __init__(self, message: str, invocation_id: str):
        super().__init__(f"{message} (invocation {invocation_id})")
        self.invocation_id = invocation_id


class InferenceError(RagTraceError):
    """An inference response contained no parsable steps."""

    def __init__(self, message: str, invocation_id: str):
        super().__init__(f"{message} (invocation {invocation_id})")
        self.invocation_id = invocation_id


class EvaluationError(RagTraceError):
    """The judge response had no parsable verdict or an out-of-bounds score."""

    def __init__(self, message: str, invocation_id: str):
        super().__init__(f"{message} (invocation {invocation_id})")
        self.invocation_id = invocation_id


class BuildError(RagTraceError):
    """A construction stage failed; names the stage so partial artifacts can be inspected."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"build stage {stage!r} failed: {message}")
        self.stage = stage


class NotFoundError(RagTraceError):
    """A reference did not resolve in the store."""

    def __init__(self, kind: str, ref_id: str):
        super().__init__(f"no {kind} with id {ref_id!r}")
        self.kind = kind
        self.ref_id = ref_id


class StaleIndexError(RagTraceError):
    """The persisted manifest's config hash does not match its stored config."""


class CorruptIndexError(RagTraceError):
    """A required index file is missing or unreadable; names the file."""


class MissingEmbeddingsError(RagTraceError):
    """The index has no embedding table; rebuild the index to use retrieval."""
