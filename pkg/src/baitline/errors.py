"""Exception hierarchy shared across the platform.

Every error raised on purpose derives from BaitlineError so callers can
catch platform failures without swallowing programming mistakes.
"""

from __future__ import annotations


class BaitlineError(Exception):
    """Base class for all platform errors."""


class ValidationError(BaitlineError):
    """Input rejected before any state changed (bad field, bad config value)."""


class IntegrityError(BaitlineError):
    """A reference or stored-state constraint would be violated."""


class StateError(BaitlineError):
    """Operation not legal in the current lifecycle state (e.g. double decision)."""


class NotFoundError(BaitlineError):
    """Lookup by id found nothing."""


class TransportError(BaitlineError):
    """Mail transport failed; not retryable unless flagged."""


class RetryableTransportError(TransportError):
    """Transient transport failure; the outbox keeps the message for retry."""


class GenerationError(BaitlineError):
    """Completion provider returned something unusable (empty text)."""


class RetryableGenerationError(GenerationError):
    """Provider timeout or transient failure; safe to call again."""


class CorpusFormatError(BaitlineError):
    """A corpus file could not be parsed. Carries the offending line number."""

    def __init__(self, message: str, line_no: int | None = None):
        super().__init__(message)
        self.line_no = line_no
