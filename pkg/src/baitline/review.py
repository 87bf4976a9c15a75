"""Human-in-the-loop review of suggested replies.

Every suggestion gets exactly one ReviewItem. In Mode II it waits for an
operator decision; in Mode I it is approved the instant it is enqueued, with
no reviewer recorded. Approve and edit both hand the final text to the mail
gateway; discard ends the suggestion without a send, which also keeps it out
of the acceptance-rate denominator later.
"""

from __future__ import annotations

from datetime import datetime
from typing import Callable

from .errors import StateError, ValidationError
from .gateway import MailGateway, reply_subject
from .model import Direction, ModeConfig, ReviewItem, ReviewState, SuggestionRecord
from .store import Store


def levenshtein(a: str, b: str) -> int:
    """Minimum number of single-character insertions, deletions and
    substitutions (unit cost each) turning a into b.

    Distances are measured over Unicode scalar values, which is exactly what
    iterating a Python str yields. Common prefixes and suffixes are stripped
    first; the remainder runs through the standard two-row dynamic program.
    """
    if a == b:
        return 0
    i = 0
    limit = min(len(a), len(b))
    while i < limit and a[i] == b[i]:
        i += 1
    j = 0
    while j < limit - i and a[len(a) - 1 - j] == b[len(b) - 1 - j]:
        j += 1
    a = a[i : len(a) - j]
    b = b[i : len(b) - j]
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(b) > len(a):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for row, ca in enumerate(a, start=1):
        cur = [row] + [0] * len(b)
        for col, cb in enumerate(b, start=1):
            cur[col] = min(
                prev[col] + 1,  # delete from a
                cur[col - 1] + 1,  # insert into a
                prev[col - 1] + (ca != cb),  # substitute
            )
        prev = cur
    return prev[-1]


class ReviewPipeline:
    def __init__(
        self,
        store: Store,
        gateway: MailGateway,
        *,
        clock: Callable[[], datetime] | None = None,
        seed_subject: str = "Hello there",
    ):
        self.store = store
        self.gateway = gateway
        self.clock = clock if clock is not None else store.clock
        self.seed_subject = seed_subject

    def enqueue(
        self, suggestion: SuggestionRecord, mode_config: ModeConfig, *, reviewer: str | None = None
    ) -> ReviewItem:
        """Create the review item for a fresh suggestion.

        At most one suggestion per engagement may be pending; a second
        enqueue while one is open is a state error. Under auto-approval
        (Mode I) the decision happens here and the reply goes out at once.
        """
        if self.store.pending_review_for_engagement(suggestion.engagement_id) is not None:
            raise StateError(
                f"engagement {suggestion.engagement_id} already has a suggestion awaiting review"
            )
        item = self.store.append(
            ReviewItem(
                id=0,
                suggestion_id=suggestion.id,
                engagement_id=suggestion.engagement_id,
                state=ReviewState.PENDING,
            )
        )
        if mode_config.auto_approve:
            return self.decide(suggestion.id, "approve", reviewer=reviewer)
        return item

    def decide(
        self,
        suggestion_id: int,
        action: str,
        *,
        final_body: str | None = None,
        reviewer: str | None = None,
    ) -> ReviewItem:
        """Apply an operator decision: approve, edit or discard.

        The first decision wins; anything after that is a state error. An
        edit that leaves the text identical to the suggestion is recorded as
        an approval, so `edited` always implies the body really changed.
        On approve/edit the decision is recorded first and the send follows;
        a transport outage leaves the message in the gateway outbox and
        surfaces as a RetryableTransportError after the state change.
        """
        item = self.store.review_for_suggestion(suggestion_id)
        if item.state is not ReviewState.PENDING:
            raise StateError(f"suggestion {suggestion_id} was already decided ({item.state.value})")
        suggestion = self.store.get_suggestion(suggestion_id)

        if action == "discard":
            return self.store.decide_review(item.id, ReviewState.DISCARDED, reviewer, self.clock())

        if action == "approve":
            final = suggestion.suggested_body
        elif action == "edit":
            if final_body is None or not final_body.strip():
                raise ValidationError("an edited reply needs non-empty text")
            final = final_body
        else:
            raise ValidationError(f"unknown decision {action!r}; use approve, edit or discard")

        self.gateway.check_sendable(item.engagement_id)
        distance = levenshtein(suggestion.suggested_body, final)
        state = ReviewState.APPROVED if distance == 0 else ReviewState.EDITED
        decided = self.store.decide_review(item.id, state, reviewer, self.clock())
        self.gateway.send(
            item.engagement_id,
            self._subject_for(item.engagement_id),
            final,
            suggestion_id=suggestion_id,
            edit_distance=distance,
        )
        return decided

    def pending(self) -> list[tuple[ReviewItem, SuggestionRecord]]:
        return self.store.pending_reviews()

    def _subject_for(self, engagement_id: int) -> str:
        messages = self.store.messages_for(engagement_id)
        for msg in reversed(messages):
            if msg.direction is Direction.ATTACKER:
                return reply_subject(msg.subject)
        return self.seed_subject
