"""Exception types shared across the package."""
from __future__ import annotations


class SpectraQaError(Exception):
    """Base class for package-specific failures."""


class GatewayError(SpectraQaError):
    """Model endpoint failed. Carries the attempt log so callers can inspect retries."""

    def __init__(self, message: str, attempts=(), retryable: bool = True):
        super().__init__(message)
        self.attempts = list(attempts)
        self.retryable = retryable


class ExtractionMalformedError(SpectraQaError):
    """Extractor output could not be turned into a valid parsed question."""

    def __init__(self, message: str, raw_output: str = ""):
        super().__init__(message)
        self.raw_output = raw_output


class CitationMissingError(SpectraQaError):
    """Generated answer cited no id present in its knowledge bundle."""

    def __init__(self, message: str, answer_text: str = ""):
        super().__init__(message)
        self.answer_text = answer_text


class JudgeMalformedError(SpectraQaError):
    """LLM judge returned no usable 1-5 score."""

    def __init__(self, message: str, raw_output: str = ""):
        super().__init__(message)
        self.raw_output = raw_output


class AnswerUnfaithfulError(SpectraQaError):
    """Generated instruction answer dropped part of its grounding labels."""

    def __init__(self, message: str, missing=()):
        super().__init__(message)
        self.missing = list(missing)


class PipelineStageError(SpectraQaError):
    """A pipeline stage failed; names the stage for error attribution."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage} stage failed: {cause}")
        self.stage = stage
        self.cause = cause
