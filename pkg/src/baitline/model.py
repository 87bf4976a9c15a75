"""Core domain types for scam-baiting engagements.

An Engagement is one mailbox-level conversation between a persona we control
(the defender) and one scammer address (the attacker). Messages alternate in
whatever order the traffic actually happened; a "turn" is a single message in
either direction. Value types here are frozen; all mutation goes through the
persistence store, which builds fresh instances.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from datetime import datetime, timedelta

from .errors import ValidationError
from .util import utc_now


class Direction(str, enum.Enum):
    ATTACKER = "attacker"
    DEFENDER = "defender"


class Mode(str, enum.Enum):
    """Operating mode: MODE_I auto-sends suggestions, MODE_II routes every
    suggestion through a human decision."""

    MODE_I = "I"
    MODE_II = "II"


class EngagementStatus(str, enum.Enum):
    SEEDED = "seeded"
    MATURED = "matured"
    SUCCESSFUL = "successful"
    # Terminal inactivity marker. Kept orthogonal to the reached status: an
    # engagement is "dead" on top of whatever it reached, see Engagement.dead.
    DEAD = "dead"


class DisclosureKind(str, enum.Enum):
    BANK_ACCOUNT = "bank_account"
    IBAN = "iban"
    CRYPTO_WALLET_BTC = "btc"
    CRYPTO_WALLET_ETH = "eth"
    OTHER = "other"


class SpecialContent(str, enum.Enum):
    PDF = "pdf"
    IMAGE = "image"
    RTF = "rtf"
    OTHER = "other"


@dataclass(frozen=True, slots=True)
class Persona:
    """A fictitious victim identity tied to one mailbox address."""

    id: str
    display_name: str
    background: str
    tone: str
    mailbox_address: str

    def __post_init__(self) -> None:
        if not self.id or not self.mailbox_address:
            raise ValidationError("persona needs an id and a mailbox address")


@dataclass(frozen=True, slots=True)
class ModeConfig:
    mode: Mode
    auto_approve: bool

    def __post_init__(self) -> None:
        if self.auto_approve != (self.mode is Mode.MODE_I):
            raise ValidationError("auto_approve is fixed by mode: I auto-approves, II never does")

    @classmethod
    def for_mode(cls, mode: Mode) -> "ModeConfig":
        return cls(mode=mode, auto_approve=mode is Mode.MODE_I)


@dataclass(frozen=True, slots=True)
class Message:
    id: int
    engagement_id: int
    direction: Direction
    timestamp: datetime
    subject: str
    body: str
    position: int
    suggestion_id: int | None = None
    special_content: tuple[SpecialContent, ...] = ()

    def __post_init__(self) -> None:
        if self.position < 1:
            raise ValidationError("message position is 1-based")
        if self.direction is Direction.ATTACKER and self.suggestion_id is not None:
            raise ValidationError("attacker messages never carry a suggestion id")
        if self.timestamp.utcoffset() is None or self.timestamp.microsecond:
            raise ValidationError("timestamps are UTC instants at whole-second precision")

    @property
    def body_length(self) -> int:
        return len(self.body)


@dataclass(frozen=True, slots=True)
class DisclosureEvent:
    """A validated financial identifier found in an attacker message."""

    id: int
    engagement_id: int
    message_id: int
    kind: DisclosureKind
    value: str
    turn_index: int
    elapsed: timedelta

    def __post_init__(self) -> None:
        # The seed occupies position 1, so no attacker message (and hence no
        # disclosure) can appear before position 2.
        if self.turn_index < 2:
            raise ValidationError("disclosures cannot precede the first reply (turn_index >= 2)")
        if self.elapsed < timedelta(0):
            raise ValidationError("elapsed time since seeding cannot be negative")


@dataclass(frozen=True, slots=True)
class StatusFlags:
    status: EngagementStatus
    dead: bool


@dataclass(frozen=True, slots=True)
class Engagement:
    id: int
    scammer_address: str
    persona_id: str
    mode: Mode
    seeded_at: datetime
    status: EngagementStatus
    messages: tuple[Message, ...] = ()
    dead: bool = False

    def __post_init__(self) -> None:
        if self.messages:
            if self.messages[0].direction is not Direction.DEFENDER:
                raise ValidationError("the first message of an engagement is always the seed we sent")
            for i, msg in enumerate(self.messages, start=1):
                if msg.position != i:
                    raise ValidationError(
                        f"message positions must be contiguous from 1; got {msg.position} at index {i}"
                    )
                if msg.engagement_id != self.id:
                    raise ValidationError("message belongs to a different engagement")
        if self.status is EngagementStatus.DEAD:
            raise ValidationError("dead is a flag, not a reached status; use StatusFlags")

    @property
    def last_activity(self) -> datetime:
        if not self.messages:
            return self.seeded_at
        return self.messages[-1].timestamp

    @property
    def display_status(self) -> EngagementStatus:
        return EngagementStatus.DEAD if self.dead else self.status


@dataclass(frozen=True, slots=True)
class SuggestionRecord:
    """One generated reply candidate and, once decided and sent, its fate."""

    id: int
    engagement_id: int
    created_at: datetime
    prompt_text: str
    suggested_body: str
    final_body: str | None = None
    edit_distance: int | None = None
    accepted_verbatim: bool | None = None

    def __post_init__(self) -> None:
        decided = (self.final_body, self.edit_distance, self.accepted_verbatim)
        if any(v is not None for v in decided) and any(v is None for v in decided):
            raise ValidationError("final_body, edit_distance and accepted_verbatim are set together")
        if self.edit_distance is not None:
            if self.edit_distance < 0:
                raise ValidationError("edit distance is non-negative")
            if self.accepted_verbatim != (self.edit_distance == 0):
                raise ValidationError("accepted_verbatim must equal (edit_distance == 0)")


class ReviewState(str, enum.Enum):
    PENDING = "pending"
    APPROVED = "approved"
    EDITED = "edited"
    DISCARDED = "discarded"


@dataclass(frozen=True, slots=True)
class ReviewItem:
    id: int
    suggestion_id: int
    engagement_id: int
    state: ReviewState
    reviewer: str | None = None
    decided_at: datetime | None = None

    def __post_init__(self) -> None:
        if self.state is not ReviewState.PENDING and self.decided_at is None:
            raise ValidationError("decided items carry a decision timestamp")


@dataclass(frozen=True, slots=True)
class CorpusSnapshot:
    """Immutable view of everything the metrics engine consumes."""

    engagements: tuple[Engagement, ...]
    suggestions: tuple[SuggestionRecord, ...]
    disclosures: tuple[DisclosureEvent, ...]
    as_of: datetime

    def __post_init__(self) -> None:
        eng_ids = {e.id for e in self.engagements}
        msg_ids = {m.id for e in self.engagements for m in e.messages}
        for s in self.suggestions:
            if s.engagement_id not in eng_ids:
                raise ValidationError(f"suggestion {s.id} references unknown engagement {s.engagement_id}")
        for d in self.disclosures:
            if d.engagement_id not in eng_ids:
                raise ValidationError(f"disclosure references unknown engagement {d.engagement_id}")
            if d.message_id not in msg_ids:
                raise ValidationError(f"disclosure references unknown message {d.message_id}")

    def engagement(self, engagement_id: int) -> Engagement:
        for e in self.engagements:
            if e.id == engagement_id:
                return e
        raise ValidationError(f"no engagement {engagement_id} in snapshot")


def turn_count(engagement: Engagement) -> int:
    """Number of turns so far. One turn is one message, either direction."""
    return len(engagement.messages)


def derive_flags(
    messages: tuple[Message, ...],
    seeded_at: datetime,
    has_disclosure: bool,
    death_threshold: timedelta,
    now: datetime,
) -> StatusFlags:
    """Status logic shared by classify_status and the snapshot builder.

    Unlike classify_status this tolerates an engagement whose seed has not
    been sent yet (a suggestion can still be pending review)."""
    attacker_ts = [m.timestamp for m in messages if m.direction is Direction.ATTACKER]
    if has_disclosure:
        status = EngagementStatus.SUCCESSFUL
    elif attacker_ts:
        status = EngagementStatus.MATURED
    else:
        status = EngagementStatus.SEEDED
    reference = attacker_ts[-1] if attacker_ts else seeded_at
    return StatusFlags(status=status, dead=(now - reference) > death_threshold)


def classify_status(
    engagement: Engagement,
    death_threshold: timedelta,
    *,
    disclosures: tuple[DisclosureEvent, ...] | list[DisclosureEvent] = (),
    now: datetime | None = None,
) -> StatusFlags:
    """Derive the lifecycle state of an engagement.

    Matured means the scammer wrote back at least once. Successful means at
    least one validated disclosure exists. The dead flag is orthogonal: it is
    set when the attacker has been silent longer than death_threshold,
    measured from their last message (or from seeding if they never replied).
    """
    if not engagement.messages:
        raise ValidationError("engagement has no messages yet; nothing to classify")
    has_disclosure = any(d.engagement_id == engagement.id for d in disclosures)
    return derive_flags(
        engagement.messages,
        engagement.seeded_at,
        has_disclosure,
        death_threshold,
        now if now is not None else utc_now(),
    )


def sort_key(message: Message) -> tuple[datetime, int]:
    """Canonical message ordering: timestamp, then id to break ties in the
    order the records were ingested."""
    return (message.timestamp, message.id)
