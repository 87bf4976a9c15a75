"""Append-only persistence for engagements, suggestions, reviews and disclosures.

The store is a single JSONL log replayed into in-memory indexes at startup.
The first line is a schema header; every following line is one record tagged
with a "type" field. Appends are serialized under one lock, flushed and
fsynced before the call returns, so an acknowledged record survives a crash.
A torn final line (power loss mid-write) is truncated on the next open; a
malformed line anywhere else is treated as corruption.

The same line format doubles as the corpus interchange format used by
export_jsonl / import_jsonl, except that exports carry only the snapshot
record types (engagement, message, suggestion, disclosure) plus derived
status fields so a corpus file is self-contained.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timedelta
from pathlib import Path
from typing import Any, Callable, Iterable

from .errors import CorpusFormatError, IntegrityError, NotFoundError, StateError, ValidationError
from .model import (
    CorpusSnapshot,
    Direction,
    DisclosureEvent,
    DisclosureKind,
    Engagement,
    EngagementStatus,
    Message,
    Mode,
    Persona,
    ReviewItem,
    ReviewState,
    SpecialContent,
    SuggestionRecord,
    derive_flags,
    sort_key,
)
from .util import format_rfc3339, parse_rfc3339, utc_now

SCHEMA = "baitline/1"
DEFAULT_DEATH_THRESHOLD = timedelta(days=28)


@dataclass(frozen=True, slots=True)
class IngestMark:
    """Permanent memory that a transport message id has been processed.

    This is what makes spool replays idempotent: a second delivery of the
    same transport id is dropped before it can touch the message table.
    """

    id: int
    transport_msg_id: str
    disposition: str  # "assigned" or "quarantined"
    message_id: int | None = None


@dataclass(frozen=True, slots=True)
class QuarantineRecord:
    """An inbound message we could parse but could not assign to any engagement."""

    id: int
    transport_msg_id: str
    sender: str
    recipient: str
    subject: str
    date: datetime
    body: str
    reason: str


@dataclass(frozen=True, slots=True)
class _EngagementRow:
    id: int
    scammer_address: str
    persona_id: str
    mode: Mode
    seeded_at: datetime


# ---------------------------------------------------------------------------
# line codecs


def _ts(dt: datetime) -> str:
    return format_rfc3339(dt)


def _encode(record: Any, *, status: EngagementStatus | None = None, dead: bool | None = None) -> dict:
    if isinstance(record, Persona):
        return {
            "type": "persona",
            "id": record.id,
            "display_name": record.display_name,
            "background": record.background,
            "tone": record.tone,
            "mailbox_address": record.mailbox_address,
        }
    if isinstance(record, _EngagementRow) or isinstance(record, Engagement):
        out = {
            "type": "engagement",
            "id": record.id,
            "scammer_address": record.scammer_address,
            "persona_id": record.persona_id,
            "mode": record.mode.value,
            "seeded_at": _ts(record.seeded_at),
        }
        if status is not None:
            out["status"] = status.value
            out["dead"] = bool(dead)
        return out
    if isinstance(record, Message):
        return {
            "type": "message",
            "id": record.id,
            "engagement_id": record.engagement_id,
            "direction": record.direction.value,
            "timestamp": _ts(record.timestamp),
            "subject": record.subject,
            "body": record.body,
            "position": record.position,
            "suggestion_id": record.suggestion_id,
            "special_content": [s.value for s in record.special_content],
        }
    if isinstance(record, SuggestionRecord):
        return {
            "type": "suggestion",
            "id": record.id,
            "engagement_id": record.engagement_id,
            "created_at": _ts(record.created_at),
            "prompt_text": record.prompt_text,
            "suggested_body": record.suggested_body,
            "final_body": record.final_body,
            "edit_distance": record.edit_distance,
            "accepted_verbatim": record.accepted_verbatim,
        }
    if isinstance(record, ReviewItem):
        return {
            "type": "review",
            "id": record.id,
            "suggestion_id": record.suggestion_id,
            "engagement_id": record.engagement_id,
            "state": record.state.value,
            "reviewer": record.reviewer,
            "decided_at": _ts(record.decided_at) if record.decided_at else None,
        }
    if isinstance(record, DisclosureEvent):
        return {
            "type": "disclosure",
            "id": record.id,
            "engagement_id": record.engagement_id,
            "message_id": record.message_id,
            "kind": record.kind.value,
            "value": record.value,
            "turn_index": record.turn_index,
            "elapsed_seconds": int(record.elapsed.total_seconds()),
        }
    if isinstance(record, IngestMark):
        return {
            "type": "ingest",
            "id": record.id,
            "transport_msg_id": record.transport_msg_id,
            "disposition": record.disposition,
            "message_id": record.message_id,
        }
    if isinstance(record, QuarantineRecord):
        return {
            "type": "quarantine",
            "id": record.id,
            "transport_msg_id": record.transport_msg_id,
            "sender": record.sender,
            "recipient": record.recipient,
            "subject": record.subject,
            "date": _ts(record.date),
            "body": record.body,
            "reason": record.reason,
        }
    raise ValidationError(f"cannot persist a {type(record).__name__}")


def _decode(obj: dict) -> Any:
    kind = obj.get("type")
    if kind == "persona":
        return Persona(
            id=obj["id"],
            display_name=obj["display_name"],
            background=obj["background"],
            tone=obj["tone"],
            mailbox_address=obj["mailbox_address"],
        )
    if kind == "engagement":
        return _EngagementRow(
            id=obj["id"],
            scammer_address=obj["scammer_address"],
            persona_id=obj["persona_id"],
            mode=Mode(obj["mode"]),
            seeded_at=parse_rfc3339(obj["seeded_at"]),
        )
    if kind == "message":
        return Message(
            id=obj["id"],
            engagement_id=obj["engagement_id"],
            direction=Direction(obj["direction"]),
            timestamp=parse_rfc3339(obj["timestamp"]),
            subject=obj["subject"],
            body=obj["body"],
            position=obj["position"],
            suggestion_id=obj["suggestion_id"],
            special_content=tuple(SpecialContent(s) for s in obj.get("special_content", [])),
        )
    if kind == "suggestion":
        return SuggestionRecord(
            id=obj["id"],
            engagement_id=obj["engagement_id"],
            created_at=parse_rfc3339(obj["created_at"]),
            prompt_text=obj["prompt_text"],
            suggested_body=obj["suggested_body"],
            final_body=obj["final_body"],
            edit_distance=obj["edit_distance"],
            accepted_verbatim=obj["accepted_verbatim"],
        )
    if kind == "review":
        return ReviewItem(
            id=obj["id"],
            suggestion_id=obj["suggestion_id"],
            engagement_id=obj["engagement_id"],
            state=ReviewState(obj["state"]),
            reviewer=obj["reviewer"],
            decided_at=parse_rfc3339(obj["decided_at"]) if obj["decided_at"] else None,
        )
    if kind == "disclosure":
        return DisclosureEvent(
            id=obj["id"],
            engagement_id=obj["engagement_id"],
            message_id=obj["message_id"],
            kind=DisclosureKind(obj["kind"]),
            value=obj["value"],
            turn_index=obj["turn_index"],
            elapsed=timedelta(seconds=obj["elapsed_seconds"]),
        )
    if kind == "ingest":
        return IngestMark(
            id=obj["id"],
            transport_msg_id=obj["transport_msg_id"],
            disposition=obj["disposition"],
            message_id=obj["message_id"],
        )
    if kind == "quarantine":
        return QuarantineRecord(
            id=obj["id"],
            transport_msg_id=obj["transport_msg_id"],
            sender=obj["sender"],
            recipient=obj["recipient"],
            subject=obj["subject"],
            date=parse_rfc3339(obj["date"]),
            body=obj["body"],
            reason=obj["reason"],
        )
    raise ValidationError(f"unknown record type {kind!r}")


def _dump_line(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


# ---------------------------------------------------------------------------
# the store


class Store:
    """Single-writer record store with snapshot reads.

    Pass path=None for a purely in-memory store (tests, simulation). With a
    path, the log is replayed on open and extended on every append.
    """

    _COUNTED = ("engagement", "message", "suggestion", "review", "disclosure", "ingest", "quarantine")

    def __init__(
        self,
        path: str | Path | None = None,
        *,
        death_threshold: timedelta = DEFAULT_DEATH_THRESHOLD,
        clock: Callable[[], datetime] = utc_now,
    ):
        self._lock = threading.RLock()
        self._path = Path(path) if path is not None else None
        self._fh = None
        self.death_threshold = death_threshold
        self.clock = clock

        self._personas: dict[str, Persona] = {}
        self._engagements: dict[int, _EngagementRow] = {}
        self._messages: dict[int, Message] = {}
        self._msgs_by_engagement: dict[int, list[int]] = {}
        self._suggestions: dict[int, SuggestionRecord] = {}
        self._reviews: dict[int, ReviewItem] = {}
        self._review_by_suggestion: dict[int, int] = {}
        self._disclosures: dict[int, DisclosureEvent] = {}
        self._disc_by_engagement: dict[int, list[int]] = {}
        self._ingests: dict[str, IngestMark] = {}
        self._quarantine: dict[int, QuarantineRecord] = {}
        self._counters: dict[str, int] = {k: 0 for k in self._COUNTED}

        if self._path is not None:
            self._open_log()

    # -- log handling -------------------------------------------------------

    def _open_log(self) -> None:
        assert self._path is not None
        self._path.parent.mkdir(parents=True, exist_ok=True)
        if self._path.exists() and self._path.stat().st_size > 0:
            self._replay()
        self._fh = open(self._path, "a", encoding="utf-8")
        if self._fh.tell() == 0:
            self._write_line({"schema": SCHEMA})

    def _replay(self) -> None:
        assert self._path is not None
        raw = self._path.read_bytes()
        lines = raw.split(b"\n")
        # Every committed record ends with a newline written in the same call,
        # so bytes after the final newline can only be a torn write: drop them.
        tail = lines.pop()
        for i, line in enumerate(lines, start=1):
            try:
                obj = json.loads(line.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise CorpusFormatError(f"corrupt log line {i}: {exc}", line_no=i) from exc
            if i == 1:
                if obj.get("schema") != SCHEMA:
                    raise CorpusFormatError(f"unsupported schema header {obj!r}", line_no=1)
                continue
            self._apply(obj, line_no=i)
        if tail:
            with open(self._path, "rb+") as fh:
                fh.truncate(len(raw) - len(tail))
                fh.flush()
                os.fsync(fh.fileno())

    def _write_line(self, obj: dict) -> None:
        self._write_lines([obj])

    def _write_lines(self, objs: list[dict]) -> None:
        if self._fh is None:
            return
        self._fh.write("".join(_dump_line(o) + "\n" for o in objs))
        self._fh.flush()
        os.fsync(self._fh.fileno())

    def close(self) -> None:
        with self._lock:
            if self._fh is not None:
                self._fh.close()
                self._fh = None

    # -- id assignment and integrity ----------------------------------------

    def _next_id(self, kind: str) -> int:
        self._counters[kind] += 1
        return self._counters[kind]

    def _bump(self, kind: str, seen: int) -> None:
        if seen > self._counters[kind]:
            self._counters[kind] = seen

    def _require_engagement(self, engagement_id: int) -> _EngagementRow:
        row = self._engagements.get(engagement_id)
        if row is None:
            raise IntegrityError(f"unknown engagement {engagement_id}")
        return row

    # -- append -------------------------------------------------------------

    def append(self, record: Any) -> Any:
        """Persist one new record, assigning its id. Returns the stored copy.

        Integrity rules: messages, suggestions and disclosures must reference
        an existing engagement; disclosures must point at an attacker message
        of that engagement; review items reference an existing suggestion.
        """
        with self._lock:
            stored = self._insert_new(record)
            self._write_line(_encode(stored))
            return stored

    def _insert_new(self, record: Any) -> Any:
        if isinstance(record, Persona):
            if record.id in self._personas:
                raise IntegrityError(f"persona {record.id!r} already exists")
            self._personas[record.id] = record
            return record
        if isinstance(record, _EngagementRow):
            stored = replace(record, id=self._next_id("engagement"))
            self._apply_engagement(stored)
            return stored
        if isinstance(record, Message):
            count = len(self._msgs_by_engagement.get(record.engagement_id, ()))
            stored = replace(record, id=self._next_id("message"), position=count + 1)
            self._apply_message(stored)
            return stored
        if isinstance(record, SuggestionRecord):
            stored = replace(record, id=self._next_id("suggestion"))
            self._apply_suggestion(stored)
            return stored
        if isinstance(record, ReviewItem):
            stored = replace(record, id=self._next_id("review"))
            self._apply_review(stored)
            return stored
        if isinstance(record, DisclosureEvent):
            stored = replace(record, id=self._next_id("disclosure"))
            self._apply_disclosure(stored)
            return stored
        if isinstance(record, IngestMark):
            stored = replace(record, id=self._next_id("ingest"))
            self._apply_ingest(stored)
            return stored
        if isinstance(record, QuarantineRecord):
            stored = replace(record, id=self._next_id("quarantine"))
            self._quarantine[stored.id] = stored
            return stored
        raise ValidationError(f"cannot persist a {type(record).__name__}")

    # table mutators shared by append and replay

    def _apply_engagement(self, row: _EngagementRow) -> None:
        if row.id in self._engagements:
            raise IntegrityError(f"duplicate engagement id {row.id}")
        self._engagements[row.id] = row
        self._msgs_by_engagement.setdefault(row.id, [])
        self._disc_by_engagement.setdefault(row.id, [])
        self._bump("engagement", row.id)

    def _apply_message(self, msg: Message) -> None:
        self._require_engagement(msg.engagement_id)
        if msg.id in self._messages:
            raise IntegrityError(f"duplicate message id {msg.id}")
        siblings = self._msgs_by_engagement[msg.engagement_id]
        if not siblings and msg.direction is not Direction.DEFENDER:
            raise IntegrityError("an engagement starts with the seed we send, not an attacker message")
        if msg.suggestion_id is not None:
            sug = self._suggestions.get(msg.suggestion_id)
            if sug is None:
                raise IntegrityError(f"message references unknown suggestion {msg.suggestion_id}")
            if sug.engagement_id != msg.engagement_id:
                raise IntegrityError("message and its suggestion belong to different engagements")
        self._messages[msg.id] = msg
        siblings.append(msg.id)
        self._bump("message", msg.id)

    def _apply_suggestion(self, sug: SuggestionRecord) -> None:
        self._require_engagement(sug.engagement_id)
        if sug.id in self._suggestions:
            raise IntegrityError(f"duplicate suggestion id {sug.id}")
        self._suggestions[sug.id] = sug
        self._bump("suggestion", sug.id)

    def _apply_review(self, item: ReviewItem) -> None:
        if item.suggestion_id not in self._suggestions:
            raise IntegrityError(f"review references unknown suggestion {item.suggestion_id}")
        if item.suggestion_id in self._review_by_suggestion:
            raise IntegrityError(f"suggestion {item.suggestion_id} already has a review item")
        if item.id in self._reviews:
            raise IntegrityError(f"duplicate review id {item.id}")
        self._reviews[item.id] = item
        self._review_by_suggestion[item.suggestion_id] = item.id
        self._bump("review", item.id)

    def _apply_disclosure(self, event: DisclosureEvent) -> None:
        self._require_engagement(event.engagement_id)
        msg = self._messages.get(event.message_id)
        if msg is None:
            raise IntegrityError(f"disclosure references unknown message {event.message_id}")
        if msg.engagement_id != event.engagement_id:
            raise IntegrityError("disclosure message belongs to a different engagement")
        if msg.direction is not Direction.ATTACKER:
            raise IntegrityError("disclosures only come from attacker messages")
        if event.id in self._disclosures:
            raise IntegrityError(f"duplicate disclosure id {event.id}")
        self._disclosures[event.id] = event
        self._disc_by_engagement[event.engagement_id].append(event.id)
        self._bump("disclosure", event.id)

    def _apply_ingest(self, mark: IngestMark) -> None:
        if mark.transport_msg_id in self._ingests:
            raise IntegrityError(f"transport message {mark.transport_msg_id!r} already ingested")
        self._ingests[mark.transport_msg_id] = mark
        self._bump("ingest", mark.id)

    def _apply(self, obj: dict, *, line_no: int) -> None:
        try:
            if obj.get("type") == "suggestion_update":
                self._apply_suggestion_update(obj)
                return
            if obj.get("type") == "review_update":
                self._apply_review_update(obj)
                return
            record = _decode(obj)
            if isinstance(record, Persona):
                self._personas[record.id] = record
            elif isinstance(record, _EngagementRow):
                self._apply_engagement(record)
            elif isinstance(record, Message):
                self._apply_message(record)
            elif isinstance(record, SuggestionRecord):
                self._apply_suggestion(record)
            elif isinstance(record, ReviewItem):
                self._apply_review(record)
            elif isinstance(record, DisclosureEvent):
                self._apply_disclosure(record)
            elif isinstance(record, IngestMark):
                self._apply_ingest(record)
            elif isinstance(record, QuarantineRecord):
                self._quarantine[record.id] = record
                self._bump("quarantine", record.id)
        except (ValidationError, IntegrityError, KeyError) as exc:
            raise CorpusFormatError(f"log line {line_no}: {exc}", line_no=line_no) from exc

    def _apply_suggestion_update(self, obj: dict) -> None:
        sug = self._suggestions[obj["suggestion_id"]]
        self._suggestions[sug.id] = replace(
            sug,
            final_body=obj["final_body"],
            edit_distance=obj["edit_distance"],
            accepted_verbatim=obj["accepted_verbatim"],
        )

    def _apply_review_update(self, obj: dict) -> None:
        item = self._reviews[obj["review_id"]]
        self._reviews[item.id] = replace(
            item,
            state=ReviewState(obj["state"]),
            reviewer=obj["reviewer"],
            decided_at=parse_rfc3339(obj["decided_at"]) if obj["decided_at"] else None,
        )

    # -- updates ------------------------------------------------------------

    def finalize_suggestion(
        self, suggestion_id: int, final_body: str, edit_distance: int, accepted_verbatim: bool
    ) -> SuggestionRecord:
        """Record the decided-and-sent form of a suggestion. One-shot."""
        with self._lock:
            sug = self._suggestions.get(suggestion_id)
            if sug is None:
                raise NotFoundError(f"no suggestion {suggestion_id}")
            if sug.final_body is not None:
                raise StateError(f"suggestion {suggestion_id} was already finalized")
            updated = replace(
                sug,
                final_body=final_body,
                edit_distance=edit_distance,
                accepted_verbatim=accepted_verbatim,
            )
            self._suggestions[suggestion_id] = updated
            self._write_line(
                {
                    "type": "suggestion_update",
                    "suggestion_id": suggestion_id,
                    "final_body": final_body,
                    "edit_distance": edit_distance,
                    "accepted_verbatim": accepted_verbatim,
                }
            )
            return updated

    def decide_review(
        self, review_id: int, state: ReviewState, reviewer: str | None, decided_at: datetime
    ) -> ReviewItem:
        with self._lock:
            item = self._reviews.get(review_id)
            if item is None:
                raise NotFoundError(f"no review item {review_id}")
            if item.state is not ReviewState.PENDING:
                raise StateError(f"review item {review_id} was already decided ({item.state.value})")
            updated = replace(item, state=state, reviewer=reviewer, decided_at=decided_at)
            self._reviews[review_id] = updated
            self._write_line(
                {
                    "type": "review_update",
                    "review_id": review_id,
                    "state": state.value,
                    "reviewer": reviewer,
                    "decided_at": _ts(decided_at),
                }
            )
            return updated

    # -- typed creation helpers ----------------------------------------------

    def new_engagement(
        self, scammer_address: str, persona_id: str, mode: Mode, seeded_at: datetime | None = None
    ) -> int:
        if not scammer_address:
            raise ValidationError("scammer_address must not be empty")
        row = _EngagementRow(
            id=0,
            scammer_address=scammer_address,
            persona_id=persona_id,
            mode=mode,
            seeded_at=seeded_at if seeded_at is not None else self.clock(),
        )
        return self.append(row).id

    def add_message(
        self,
        engagement_id: int,
        direction: Direction,
        timestamp: datetime,
        subject: str,
        body: str,
        *,
        suggestion_id: int | None = None,
        special_content: tuple[SpecialContent, ...] = (),
    ) -> Message:
        # Provisional id/position; append() assigns the real ones under lock.
        msg = Message(
            id=0,
            engagement_id=engagement_id,
            direction=direction,
            timestamp=timestamp,
            subject=subject,
            body=body,
            position=1,
            suggestion_id=suggestion_id,
            special_content=special_content,
        )
        return self.append(msg)

    def ingest_inbound(
        self,
        engagement_id: int,
        transport_msg_id: str,
        timestamp: datetime,
        subject: str,
        body: str,
        special_content: tuple[SpecialContent, ...] = (),
    ) -> Message:
        """Persist an inbound attacker message together with its dedup mark.

        Both records go to disk in a single write so a crash cannot leave the
        message without the mark that makes spool replays idempotent.
        """
        with self._lock:
            if transport_msg_id in self._ingests:
                raise IntegrityError(f"transport message {transport_msg_id!r} already ingested")
            msg = Message(
                id=self._counters["message"] + 1,
                engagement_id=engagement_id,
                direction=Direction.ATTACKER,
                timestamp=timestamp,
                subject=subject,
                body=body,
                position=len(self._msgs_by_engagement.get(engagement_id, ())) + 1,
                special_content=special_content,
            )
            self._apply_message(msg)
            mark = IngestMark(
                id=self._counters["ingest"] + 1,
                transport_msg_id=transport_msg_id,
                disposition="assigned",
                message_id=msg.id,
            )
            self._apply_ingest(mark)
            self._write_lines([_encode(msg), _encode(mark)])
            return msg

    def quarantine_inbound(
        self,
        transport_msg_id: str,
        sender: str,
        recipient: str,
        subject: str,
        date: datetime,
        body: str,
        reason: str,
    ) -> QuarantineRecord:
        """Persist an unassignable inbound message plus its dedup mark."""
        with self._lock:
            if transport_msg_id in self._ingests:
                raise IntegrityError(f"transport message {transport_msg_id!r} already ingested")
            rec = QuarantineRecord(
                id=self._next_id("quarantine"),
                transport_msg_id=transport_msg_id,
                sender=sender,
                recipient=recipient,
                subject=subject,
                date=date,
                body=body,
                reason=reason,
            )
            self._quarantine[rec.id] = rec
            mark = IngestMark(
                id=self._counters["ingest"] + 1,
                transport_msg_id=transport_msg_id,
                disposition="quarantined",
                message_id=None,
            )
            self._apply_ingest(mark)
            self._write_lines([_encode(rec), _encode(mark)])
            return rec

    # -- reads ---------------------------------------------------------------

    def get_persona(self, persona_id: str) -> Persona:
        p = self._personas.get(persona_id)
        if p is None:
            raise NotFoundError(f"no persona {persona_id!r}")
        return p

    def personas(self) -> list[Persona]:
        return list(self._personas.values())

    def get_suggestion(self, suggestion_id: int) -> SuggestionRecord:
        s = self._suggestions.get(suggestion_id)
        if s is None:
            raise NotFoundError(f"no suggestion {suggestion_id}")
        return s

    def get_message(self, message_id: int) -> Message:
        m = self._messages.get(message_id)
        if m is None:
            raise NotFoundError(f"no message {message_id}")
        return m

    def suggestions_for(self, engagement_id: int) -> list[SuggestionRecord]:
        self._require_engagement(engagement_id)
        return sorted(
            (s for s in self._suggestions.values() if s.engagement_id == engagement_id),
            key=lambda s: s.id,
        )

    def review_for_suggestion(self, suggestion_id: int) -> ReviewItem:
        rid = self._review_by_suggestion.get(suggestion_id)
        if rid is None:
            raise NotFoundError(f"no review item for suggestion {suggestion_id}")
        return self._reviews[rid]

    def pending_reviews(self) -> list[tuple[ReviewItem, SuggestionRecord]]:
        out = []
        for item in self._reviews.values():
            if item.state is ReviewState.PENDING:
                out.append((item, self._suggestions[item.suggestion_id]))
        out.sort(key=lambda pair: pair[0].id)
        return out

    def pending_review_for_engagement(self, engagement_id: int) -> ReviewItem | None:
        for item in self._reviews.values():
            if item.engagement_id == engagement_id and item.state is ReviewState.PENDING:
                return item
        return None

    def seen_transport_msg(self, transport_msg_id: str) -> bool:
        return transport_msg_id in self._ingests

    def quarantine_records(self) -> list[QuarantineRecord]:
        return [self._quarantine[k] for k in sorted(self._quarantine)]

    def find_engagements_by_peer(self, scammer_address: str, mailbox_address: str) -> list[int]:
        """Engagement ids whose scammer address and persona mailbox match,
        most recently active first."""
        hits = []
        for row in self._engagements.values():
            if row.scammer_address != scammer_address:
                continue
            persona = self._personas.get(row.persona_id)
            if persona is None or persona.mailbox_address != mailbox_address:
                continue
            hits.append(row)
        def recency(row: _EngagementRow) -> datetime:
            ids = self._msgs_by_engagement[row.id]
            if not ids:
                return row.seeded_at
            return max(self._messages[i].timestamp for i in ids)
        hits.sort(key=recency, reverse=True)
        return [row.id for row in hits]

    def engagement_ids(self) -> list[int]:
        return sorted(self._engagements)

    def messages_for(self, engagement_id: int) -> tuple[Message, ...]:
        """The engagement's messages in canonical (timestamp, id) order with
        positions renumbered to match."""
        with self._lock:
            self._require_engagement(engagement_id)
            rows = [self._messages[i] for i in self._msgs_by_engagement[engagement_id]]
        rows.sort(key=sort_key)
        return tuple(
            m if m.position == i else replace(m, position=i) for i, m in enumerate(rows, start=1)
        )

    def disclosures_for(self, engagement_id: int) -> tuple[DisclosureEvent, ...]:
        with self._lock:
            ids = self._disc_by_engagement.get(engagement_id, ())
            return tuple(self._disclosures[i] for i in sorted(ids))

    def engagement_view(self, engagement_id: int, *, now: datetime | None = None) -> Engagement:
        with self._lock:
            row = self._engagements.get(engagement_id)
            if row is None:
                raise NotFoundError(f"no engagement {engagement_id}")
            msgs = self.messages_for(engagement_id)
            has_disc = bool(self._disc_by_engagement.get(engagement_id))
            flags = derive_flags(
                msgs, row.seeded_at, has_disc, self.death_threshold, now if now is not None else self.clock()
            )
            return Engagement(
                id=row.id,
                scammer_address=row.scammer_address,
                persona_id=row.persona_id,
                mode=row.mode,
                seeded_at=row.seeded_at,
                status=flags.status,
                messages=msgs,
                dead=flags.dead,
            )

    def snapshot(self, *, as_of: datetime | None = None) -> CorpusSnapshot:
        """Immutable view of all committed records. Deterministic ordering:
        engagements and their messages, suggestions and disclosures all come
        out sorted by id (messages by timestamp, then id)."""
        with self._lock:
            moment = as_of if as_of is not None else self.clock()
            engagements = tuple(
                self.engagement_view(eid, now=moment) for eid in sorted(self._engagements)
            )
            suggestions = tuple(self._suggestions[i] for i in sorted(self._suggestions))
            disclosures = tuple(self._disclosures[i] for i in sorted(self._disclosures))
            return CorpusSnapshot(
                engagements=engagements,
                suggestions=suggestions,
                disclosures=disclosures,
                as_of=moment,
            )

    def import_snapshot(self, snapshot: CorpusSnapshot) -> None:
        """Load a corpus into an empty store, preserving record ids."""
        with self._lock:
            if self._engagements or self._suggestions or self._messages:
                raise StateError("import target store must be empty")
            for eng in snapshot.engagements:
                row = _EngagementRow(
                    id=eng.id,
                    scammer_address=eng.scammer_address,
                    persona_id=eng.persona_id,
                    mode=eng.mode,
                    seeded_at=eng.seeded_at,
                )
                self._apply_engagement(row)
                self._write_line(_encode(row))
            for sug in snapshot.suggestions:
                self._apply_suggestion(sug)
                self._write_line(_encode(sug))
            for eng in snapshot.engagements:
                for msg in eng.messages:
                    self._apply_message(msg)
                    self._write_line(_encode(msg))
            for disc in snapshot.disclosures:
                self._apply_disclosure(disc)
                self._write_line(_encode(disc))


# ---------------------------------------------------------------------------
# corpus interchange


def export_jsonl(snapshot: CorpusSnapshot, path: str | Path) -> None:
    """Write a snapshot as a self-contained JSONL corpus.

    The header carries the schema version and the snapshot's as_of moment;
    engagement lines carry the derived status and dead flag so the corpus
    reads back identically regardless of the importer's configuration.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_dump_line({"schema": SCHEMA, "as_of": _ts(snapshot.as_of)}) + "\n")
        for eng in snapshot.engagements:
            fh.write(_dump_line(_encode(eng, status=eng.status, dead=eng.dead)) + "\n")
            for msg in eng.messages:
                fh.write(_dump_line(_encode(msg)) + "\n")
        for sug in snapshot.suggestions:
            fh.write(_dump_line(_encode(sug)) + "\n")
        for disc in snapshot.disclosures:
            fh.write(_dump_line(_encode(disc)) + "\n")


def import_jsonl(path: str | Path) -> CorpusSnapshot:
    """Read a corpus file back into a snapshot.

    Any malformed line aborts the import with a CorpusFormatError carrying
    the 1-based line number; nothing is partially applied.
    """
    path = Path(path)
    as_of: datetime | None = None
    rows: dict[int, _EngagementRow] = {}
    flags: dict[int, tuple[EngagementStatus, bool]] = {}
    msgs: dict[int, list[Message]] = {}
    suggestions: list[SuggestionRecord] = []
    disclosures: list[DisclosureEvent] = []

    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            if not line.strip():
                raise CorpusFormatError(f"line {i}: blank line in corpus", line_no=i)
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"line {i}: not valid JSON ({exc.msg})", line_no=i) from exc
            if i == 1:
                if obj.get("schema") != SCHEMA:
                    raise CorpusFormatError(
                        f"line 1: expected schema header {SCHEMA!r}, got {obj!r}", line_no=1
                    )
                as_of = parse_rfc3339(obj["as_of"]) if "as_of" in obj else None
                continue
            try:
                record = _decode(obj)
            except (ValidationError, KeyError, ValueError) as exc:
                raise CorpusFormatError(f"line {i}: {exc}", line_no=i) from exc
            if isinstance(record, _EngagementRow):
                rows[record.id] = record
                flags[record.id] = (EngagementStatus(obj.get("status", "seeded")), bool(obj.get("dead")))
                msgs.setdefault(record.id, [])
            elif isinstance(record, Message):
                if record.engagement_id not in rows:
                    raise CorpusFormatError(
                        f"line {i}: message references unknown engagement {record.engagement_id}",
                        line_no=i,
                    )
                msgs[record.engagement_id].append(record)
            elif isinstance(record, SuggestionRecord):
                suggestions.append(record)
            elif isinstance(record, DisclosureEvent):
                disclosures.append(record)
            else:
                raise CorpusFormatError(
                    f"line {i}: record type {obj.get('type')!r} does not belong in a corpus",
                    line_no=i,
                )

    engagements = []
    for eid in sorted(rows):
        row = rows[eid]
        ordered = sorted(msgs[eid], key=sort_key)
        status, dead = flags[eid]
        try:
            engagements.append(
                Engagement(
                    id=row.id,
                    scammer_address=row.scammer_address,
                    persona_id=row.persona_id,
                    mode=row.mode,
                    seeded_at=row.seeded_at,
                    status=status,
                    messages=tuple(ordered),
                    dead=dead,
                )
            )
        except ValidationError as exc:
            raise CorpusFormatError(f"engagement {eid}: {exc}") from exc
    if as_of is None:
        as_of = max(
            (m.timestamp for e in engagements for m in e.messages),
            default=utc_now(),
        )
    try:
        return CorpusSnapshot(
            engagements=tuple(engagements),
            suggestions=tuple(sorted(suggestions, key=lambda s: s.id)),
            disclosures=tuple(sorted(disclosures, key=lambda d: d.id)),
            as_of=as_of,
        )
    except ValidationError as exc:
        raise CorpusFormatError(str(exc)) from exc
