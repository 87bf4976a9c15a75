"""Mail ingest and delivery over pluggable transports.

The only transport shipped for real use is a file spool: a directory with
in/, out/ and quarantine/ subdirectories where every message is one UTF-8
file of `Key: Value` header lines, a blank line, then the body. A loopback
transport exists for tests and simulation. The gateway itself owns inbound
assignment (matching sender and persona mailbox to an engagement), transport
dedup, and an outbox that survives transient send failures.
"""

from __future__ import annotations

import enum
import shutil
from abc import ABC, abstractmethod
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path
from typing import Callable

from .errors import RetryableTransportError, StateError, TransportError, ValidationError
from .model import Direction, Message, SpecialContent
from .store import QuarantineRecord, Store
from .util import format_rfc3339, parse_rfc3339, split_kv_header


class Capability(enum.Enum):
    FETCH = "fetch"
    SEND = "send"


@dataclass(frozen=True, slots=True)
class SpoolMessage:
    """One parsed inbound message as the transport hands it over."""

    transport_msg_id: str
    sender: str
    recipient: str
    subject: str
    date: datetime
    body: str
    special_content: tuple[SpecialContent, ...] = ()


class TransportAdapter(ABC):
    """Contract every mail transport implements.

    fetch() returns parsed messages without consuming them; the gateway calls
    acknowledge() only after the message is safely persisted, so a crash
    between the two never loses mail, and the store's transport-id marks make
    redelivery harmless.
    """

    identity: str
    capabilities: frozenset[Capability]

    @abstractmethod
    def fetch(self) -> list[SpoolMessage]:
        raise NotImplementedError

    @abstractmethod
    def acknowledge(self, transport_msg_id: str) -> None:
        raise NotImplementedError

    @abstractmethod
    def send(self, sender: str, recipient: str, subject: str, body: str, date: datetime) -> str:
        """Deliver one message. Returns the transport message id."""
        raise NotImplementedError


def _parse_attachments(raw: str) -> tuple[SpecialContent, ...]:
    kinds = []
    for token in raw.split(","):
        token = token.strip().lower()
        if not token:
            continue
        try:
            kinds.append(SpecialContent(token))
        except ValueError:
            kinds.append(SpecialContent.OTHER)
    return tuple(kinds)


def parse_spool_text(text: str, *, fallback_msg_id: str | None = None) -> SpoolMessage:
    """Parse one spool file's content. Raises ValidationError on bad input."""
    header, body = split_kv_header(text)
    msg_id = header.get("Msg-Id") or fallback_msg_id
    if not msg_id:
        raise ValidationError("spool message lacks a Msg-Id header")
    for key in ("From", "To", "Date"):
        if key not in header:
            raise ValidationError(f"spool message lacks the {key} header")
    return SpoolMessage(
        transport_msg_id=msg_id,
        sender=header["From"],
        recipient=header["To"],
        subject=header.get("Subject", ""),
        date=parse_rfc3339(header["Date"]),
        body=body,
        special_content=_parse_attachments(header.get("Attachments", "")),
    )


def render_spool_text(
    msg_id: str, sender: str, recipient: str, subject: str, date: datetime, body: str
) -> str:
    if "\n" in subject:
        raise ValidationError("subject must be a single line")
    return (
        f"Msg-Id: {msg_id}\n"
        f"From: {sender}\n"
        f"To: {recipient}\n"
        f"Subject: {subject}\n"
        f"Date: {format_rfc3339(date)}\n"
        "\n"
        f"{body}"
    )


class FileSpoolTransport(TransportAdapter):
    """Directory-based transport: reads in/, writes out/, rejects to quarantine/.

    Files that cannot be parsed are moved to quarantine/ with a sibling
    .reason file explaining why; nothing is ever dropped silently.
    """

    capabilities = frozenset({Capability.FETCH, Capability.SEND})

    def __init__(self, root: str | Path, identity: str = ""):
        self.root = Path(root)
        self.identity = identity
        for sub in ("in", "out", "quarantine"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)
        self._pending: dict[str, Path] = {}
        self._out_seq = 0

    def fetch(self) -> list[SpoolMessage]:
        out: list[SpoolMessage] = []
        for path in sorted((self.root / "in").iterdir()):
            if not path.is_file():
                continue
            try:
                text = path.read_bytes().decode("utf-8")
                msg = parse_spool_text(text, fallback_msg_id=path.name)
            except (ValidationError, UnicodeDecodeError) as exc:
                self._quarantine_file(path, str(exc))
                continue
            self._pending[msg.transport_msg_id] = path
            out.append(msg)
        return out

    def acknowledge(self, transport_msg_id: str) -> None:
        path = self._pending.pop(transport_msg_id, None)
        if path is not None and path.exists():
            path.unlink()

    def send(self, sender: str, recipient: str, subject: str, body: str, date: datetime) -> str:
        self._out_seq += 1
        msg_id = f"out-{self._out_seq:06d}-{abs(hash((sender, recipient))) % 10_000:04d}"
        text = render_spool_text(msg_id, sender, recipient, subject, date, body)
        target = self.root / "out" / f"{msg_id}.msg"
        tmp = target.with_suffix(".tmp")
        tmp.write_text(text, encoding="utf-8")
        tmp.rename(target)
        return msg_id

    def _quarantine_file(self, path: Path, reason: str) -> None:
        dest = self.root / "quarantine" / path.name
        shutil.move(str(path), str(dest))
        dest.with_name(dest.name + ".reason").write_text(reason + "\n", encoding="utf-8")


class LoopbackTransport(TransportAdapter):
    """In-memory transport for tests and the simulator.

    inject() queues an inbound message as if it had arrived in the spool;
    sends invoke on_send (the simulator's hook) and are kept in .sent.
    """

    capabilities = frozenset({Capability.FETCH, Capability.SEND})

    def __init__(self, identity: str = "loopback"):
        self.identity = identity
        self._inbox: dict[str, SpoolMessage] = {}
        self.sent: list[tuple[str, SpoolMessage]] = []
        self.on_send: Callable[[SpoolMessage], None] | None = None
        self.fail_next_sends = 0
        self._out_seq = 0

    def inject(self, msg: SpoolMessage) -> None:
        self._inbox[msg.transport_msg_id] = msg

    def fetch(self) -> list[SpoolMessage]:
        return list(self._inbox.values())

    def acknowledge(self, transport_msg_id: str) -> None:
        self._inbox.pop(transport_msg_id, None)

    def send(self, sender: str, recipient: str, subject: str, body: str, date: datetime) -> str:
        if self.fail_next_sends > 0:
            self.fail_next_sends -= 1
            raise RetryableTransportError("simulated transport outage")
        self._out_seq += 1
        msg_id = f"loop-{self._out_seq:06d}"
        msg = SpoolMessage(
            transport_msg_id=msg_id,
            sender=sender,
            recipient=recipient,
            subject=subject,
            date=date,
            body=body,
        )
        self.sent.append((msg_id, msg))
        if self.on_send is not None:
            self.on_send(msg)
        return msg_id


@dataclass(slots=True)
class OutboxEntry:
    engagement_id: int
    sender: str
    recipient: str
    subject: str
    body: str
    suggestion_id: int | None
    edit_distance: int | None


@dataclass(frozen=True, slots=True)
class PollResult:
    ingested: tuple[Message, ...]
    quarantined: tuple[QuarantineRecord, ...]


class MailGateway:
    """Moves mail between the transport and the store."""

    def __init__(
        self,
        store: Store,
        transport: TransportAdapter,
        *,
        clock: Callable[[], datetime] | None = None,
    ):
        self.store = store
        self.transport = transport
        self.clock = clock if clock is not None else store.clock
        self._outbox: list[OutboxEntry] = []

    # -- inbound --------------------------------------------------------------

    def poll(self) -> PollResult:
        """Fetch, assign and persist everything waiting on the transport.

        Dedup by transport message id makes this idempotent: replaying an
        already-seen spool directory changes nothing but still clears it.
        """
        if Capability.FETCH not in self.transport.capabilities:
            raise TransportError("transport cannot fetch")
        ingested: list[Message] = []
        quarantined: list[QuarantineRecord] = []
        for spool in self.transport.fetch():
            if self.store.seen_transport_msg(spool.transport_msg_id):
                self.transport.acknowledge(spool.transport_msg_id)
                continue
            result = self.assign_to_engagement(spool)
            if isinstance(result, Message):
                ingested.append(result)
            else:
                quarantined.append(result)
            self.transport.acknowledge(spool.transport_msg_id)
        return PollResult(ingested=tuple(ingested), quarantined=tuple(quarantined))

    def assign_to_engagement(self, spool: SpoolMessage) -> Message | QuarantineRecord:
        """Attach an inbound message to the engagement for its (sender,
        recipient) pair, or quarantine it when no engagement matches.
        Threading is purely address-based; subjects play no part."""
        candidates = self.store.find_engagements_by_peer(spool.sender, spool.recipient)
        candidates = [
            eid for eid in candidates if self.store.messages_for(eid)
        ]  # an engagement without its seed cannot receive replies yet
        if not candidates:
            return self.store.quarantine_inbound(
                transport_msg_id=spool.transport_msg_id,
                sender=spool.sender,
                recipient=spool.recipient,
                subject=spool.subject,
                date=spool.date,
                body=spool.body,
                reason=f"no engagement between {spool.sender!r} and {spool.recipient!r}",
            )
        return self.store.ingest_inbound(
            engagement_id=candidates[0],
            transport_msg_id=spool.transport_msg_id,
            timestamp=spool.date,
            subject=spool.subject,
            body=spool.body,
            special_content=spool.special_content,
        )

    # -- outbound -------------------------------------------------------------

    def check_sendable(self, engagement_id: int) -> None:
        view = self.store.engagement_view(engagement_id)
        if view.dead:
            raise StateError(f"engagement {engagement_id} is dead; not sending")

    def send(
        self,
        engagement_id: int,
        subject: str,
        body: str,
        *,
        suggestion_id: int | None = None,
        edit_distance: int | None = None,
    ) -> Message:
        """Queue one defender message and try to deliver it now.

        On transport failure the entry stays in the outbox and a
        RetryableTransportError is raised; flush_outbox() retries later. The
        persisted Message only exists once the transport accepted it.
        """
        if Capability.SEND not in self.transport.capabilities:
            raise TransportError("transport cannot send")
        if not body.strip():
            raise ValidationError("refusing to send an empty body")
        self.check_sendable(engagement_id)
        view = self.store.engagement_view(engagement_id)
        persona = self.store.get_persona(view.persona_id)
        entry = OutboxEntry(
            engagement_id=engagement_id,
            sender=persona.mailbox_address,
            recipient=view.scammer_address,
            subject=subject,
            body=body,
            suggestion_id=suggestion_id,
            edit_distance=edit_distance,
        )
        self._outbox.append(entry)
        for sent_entry, msg in self._flush():
            if sent_entry is entry:
                return msg
        raise RetryableTransportError(
            f"message for engagement {engagement_id} is queued in the outbox after a transport failure"
        )

    def flush_outbox(self) -> list[Message]:
        return [msg for _, msg in self._flush()]

    def _flush(self) -> list[tuple[OutboxEntry, Message]]:
        """Attempt every queued send in order; stop at the first retryable
        failure so per-engagement ordering is preserved."""
        sent: list[tuple[OutboxEntry, Message]] = []
        while self._outbox:
            entry = self._outbox[0]
            now = self.clock()
            try:
                self.transport.send(entry.sender, entry.recipient, entry.subject, entry.body, now)
            except RetryableTransportError:
                break
            self._outbox.pop(0)
            last = self.store.messages_for(entry.engagement_id)
            # Never stamp at or before the thread's last message, even if the
            # wall clock stalled: per-engagement order must stay strict.
            stamp = max(now, last[-1].timestamp + timedelta(seconds=1)) if last else now
            msg = self.store.add_message(
                entry.engagement_id,
                Direction.DEFENDER,
                stamp,
                entry.subject,
                entry.body,
                suggestion_id=entry.suggestion_id,
            )
            if entry.suggestion_id is not None:
                distance = entry.edit_distance if entry.edit_distance is not None else 0
                self.store.finalize_suggestion(
                    entry.suggestion_id,
                    final_body=entry.body,
                    edit_distance=distance,
                    accepted_verbatim=distance == 0,
                )
            sent.append((entry, msg))
        return sent

    @property
    def outbox_size(self) -> int:
        return len(self._outbox)


def reply_subject(last_subject: str) -> str:
    subject = last_subject.strip()
    if not subject:
        return "Re: (no subject)"
    if subject.lower().startswith("re:"):
        return subject
    return f"Re: {subject}"


__all__ = [
    "Capability",
    "FileSpoolTransport",
    "LoopbackTransport",
    "MailGateway",
    "OutboxEntry",
    "PollResult",
    "SpoolMessage",
    "TransportAdapter",
    "parse_spool_text",
    "render_spool_text",
    "reply_subject",
]
