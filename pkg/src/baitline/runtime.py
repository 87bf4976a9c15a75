"""Wiring layer: one object that owns the store, the mail gateway, the
disclosure detector, the suggestion provider and the review pipeline, and
drives them in the right order. The CLI, the HTTP service and the simulator
all talk to a Runtime rather than to the parts."""

from __future__ import annotations

from dataclasses import dataclass, field

from .detector import Detector, DetectorConfig
from .errors import GenerationError, NotFoundError, RetryableTransportError, StateError
from .gateway import MailGateway, TransportAdapter
from .model import (
    DisclosureEvent,
    Message,
    Mode,
    ModeConfig,
    Persona,
    SuggestionRecord,
)
from .review import ReviewPipeline
from .store import QuarantineRecord, Store
from .suggest import DEFAULT_TEMPLATE, CompletionProvider, PromptTemplate, suggest_reply


@dataclass(frozen=True, slots=True)
class CycleResult:
    """What one poll cycle did."""

    ingested: tuple[Message, ...]
    quarantined: tuple[QuarantineRecord, ...]
    disclosures: tuple[DisclosureEvent, ...]
    suggestions: tuple[SuggestionRecord, ...]
    failures: tuple[tuple[int, str], ...] = field(default=())


class Runtime:
    def __init__(
        self,
        store: Store,
        transport: TransportAdapter,
        provider: CompletionProvider,
        *,
        template: PromptTemplate = DEFAULT_TEMPLATE,
        detector: Detector | None = None,
        seed_subject: str = "Hello there",
    ) -> None:
        self.store = store
        self.gateway = MailGateway(store, transport)
        self.provider = provider
        self.template = template
        self.detector = detector if detector is not None else Detector(DetectorConfig())
        self.pipeline = ReviewPipeline(store, self.gateway, seed_subject=seed_subject)

    # -- personas ----------------------------------------------------------

    def ensure_persona(self, persona: Persona) -> Persona:
        try:
            return self.store.get_persona(persona.id)
        except NotFoundError:
            return self.store.append(persona)

    # -- seeding -----------------------------------------------------------

    def seed(
        self,
        scammer_address: str,
        persona_id: str,
        mode: Mode,
        *,
        body: str | None = None,
        subject: str | None = None,
    ) -> int:
        """Open an engagement and get its first message on the way out.

        With an explicit body the seed bypasses suggestion and review and is
        sent as written. Otherwise the engine drafts an opener; under Mode I
        it goes straight out, under Mode II it waits in the review queue.
        """
        self.store.get_persona(persona_id)  # fail fast on unknown persona
        engagement_id = self.store.new_engagement(scammer_address, persona_id, mode)
        if body is not None:
            self.gateway.send(engagement_id, subject or self.pipeline.seed_subject, body)
            return engagement_id
        suggestion = suggest_reply(self.store, engagement_id, self.template, self.provider)
        self.pipeline.enqueue(suggestion, ModeConfig.for_mode(mode))
        return engagement_id

    # -- inbound -----------------------------------------------------------

    def poll_cycle(self) -> CycleResult:
        """Fetch inbound mail, scan it for disclosures, and draft replies.

        One suggestion per engagement per cycle, and none while a review is
        still pending. A provider failure on one engagement is recorded and
        the cycle moves on; mail stays safely persisted either way.
        """
        poll = self.gateway.poll()
        disclosures = []
        touched: dict[int, None] = {}
        for raw in poll.ingested:
            touched.setdefault(raw.engagement_id, None)
            view = self.store.engagement_view(raw.engagement_id)
            msg = next(m for m in view.messages if m.id == raw.id)
            known = {(d.kind, d.value) for d in self.store.disclosures_for(view.id)}
            for event in self.detector.scan(msg, seeded_at=view.seeded_at):
                if (event.kind, event.value) in known:
                    continue
                known.add((event.kind, event.value))
                disclosures.append(self.store.append(event))

        suggestions = []
        failures = []
        for engagement_id in touched:
            view = self.store.engagement_view(engagement_id)
            if view.dead:
                continue
            if self.store.pending_review_for_engagement(engagement_id) is not None:
                continue
            try:
                suggestion = suggest_reply(
                    self.store, engagement_id, self.template, self.provider
                )
                self.pipeline.enqueue(suggestion, ModeConfig.for_mode(view.mode))
            except GenerationError as exc:
                failures.append((engagement_id, str(exc)))
                continue
            except RetryableTransportError as exc:
                # Mode I auto-send hit a transport outage. The decision and
                # outbox entry are already durable; retry_outbox picks it up.
                failures.append((engagement_id, str(exc)))
                suggestions.append(suggestion)
                continue
            except StateError as exc:
                failures.append((engagement_id, str(exc)))
                continue
            suggestions.append(suggestion)
        return CycleResult(
            ingested=poll.ingested,
            quarantined=poll.quarantined,
            disclosures=tuple(disclosures),
            suggestions=tuple(suggestions),
            failures=tuple(failures),
        )

    # -- review and retry ----------------------------------------------------

    def decide(
        self,
        suggestion_id: int,
        action: str,
        *,
        final_body: str | None = None,
        reviewer: str | None = None,
    ):
        return self.pipeline.decide(
            suggestion_id, action, final_body=final_body, reviewer=reviewer
        )

    def retry_outbox(self) -> list[Message]:
        return self.gateway.flush_outbox()
