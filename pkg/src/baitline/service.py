"""HTTP face of the runtime. Thin by design: routes translate JSON to the
same runtime/store calls the CLI makes, and every domain error maps to one
status code with a {code, message} body."""

from __future__ import annotations

from datetime import datetime

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import (
    CorpusFormatError,
    GenerationError,
    IntegrityError,
    NotFoundError,
    StateError,
    TransportError,
    ValidationError,
)
from .model import Direction, Engagement, Mode, ReviewItem, SuggestionRecord
from .reporting import build_report
from .runtime import Runtime
from . import metrics as M
from .util import format_rfc3339, parse_rfc3339


def _parse_mode(text: str | None) -> Mode | None:
    if text is None or text == "":
        return None
    try:
        return Mode(text)
    except ValueError:
        raise ValidationError(f"mode must be I or II, got {text!r}") from None


def _parse_since(text: str | None) -> datetime | None:
    if text is None or text == "":
        return None
    return parse_rfc3339(text)


def _engagement_summary(e: Engagement) -> dict:
    return {
        "id": e.id,
        "scammer_address": e.scammer_address,
        "persona_id": e.persona_id,
        "mode": e.mode.value,
        "status": e.status.value,
        "dead": e.dead,
        "display_status": e.display_status.value,
        "turn_count": len(e.messages),
        "seeded_at": format_rfc3339(e.seeded_at),
        "last_activity": format_rfc3339(e.last_activity),
    }


def _message_json(m) -> dict:
    return {
        "id": m.id,
        "direction": m.direction.value,
        "timestamp": format_rfc3339(m.timestamp),
        "subject": m.subject,
        "body": m.body,
        "position": m.position,
        "suggestion_id": m.suggestion_id,
        "special_content": [c.value for c in m.special_content],
    }


def _review_json(item: ReviewItem | None) -> dict | None:
    if item is None:
        return None
    return {
        "review_id": item.id,
        "state": item.state.value,
        "reviewer": item.reviewer,
        "decided_at": format_rfc3339(item.decided_at) if item.decided_at else None,
    }


def _suggestion_json(s: SuggestionRecord, review: ReviewItem | None) -> dict:
    return {
        "id": s.id,
        "engagement_id": s.engagement_id,
        "created_at": format_rfc3339(s.created_at),
        "suggested_body": s.suggested_body,
        "final_body": s.final_body,
        "edit_distance": s.edit_distance,
        "accepted_verbatim": s.accepted_verbatim,
        "review": _review_json(review),
    }


class SeedRequest(BaseModel):
    scammer_address: str
    persona_id: str
    mode: str | None = None
    seed_body: str | None = None
    seed_subject: str | None = None


class DecisionRequest(BaseModel):
    action: str
    final_body: str | None = None
    reviewer: str | None = None


def create_app(runtime: Runtime, *, default_mode: Mode = Mode.MODE_II) -> FastAPI:
    app = FastAPI(title="baitline", docs_url=None, redoc_url=None)
    store = runtime.store

    def error(status: int, code: str, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"code": code, "message": message})

    @app.exception_handler(NotFoundError)
    async def _not_found(_: Request, exc: NotFoundError):
        return error(404, "not_found", str(exc))

    @app.exception_handler(StateError)
    async def _conflict(_: Request, exc: StateError):
        return error(409, "conflict", str(exc))

    @app.exception_handler(IntegrityError)
    async def _integrity(_: Request, exc: IntegrityError):
        return error(409, "integrity", str(exc))

    @app.exception_handler(ValidationError)
    async def _invalid(_: Request, exc: ValidationError):
        return error(422, "validation", str(exc))

    @app.exception_handler(CorpusFormatError)
    async def _corpus(_: Request, exc: CorpusFormatError):
        return error(422, "validation", str(exc))

    @app.exception_handler(GenerationError)
    async def _generation(_: Request, exc: GenerationError):
        return error(502, "generation_failed", str(exc))

    @app.exception_handler(TransportError)
    async def _transport(_: Request, exc: TransportError):
        return error(503, "transport", str(exc))

    @app.exception_handler(RequestValidationError)
    async def _request_invalid(_: Request, exc: RequestValidationError):
        return error(422, "validation", str(exc))

    @app.get("/engagements")
    def list_engagements(
        status: str | None = None,
        mode: str | None = None,
        page: int = Query(default=1, ge=1),
        page_size: int = Query(default=50, ge=1, le=500),
    ):
        mode_filter = _parse_mode(mode)
        views = [store.engagement_view(eid) for eid in store.engagement_ids()]
        if mode_filter is not None:
            views = [v for v in views if v.mode is mode_filter]
        if status:
            allowed = {"seeded", "matured", "successful", "dead"}
            if status not in allowed:
                raise ValidationError(f"status must be one of {sorted(allowed)}")
            views = [v for v in views if v.display_status.value == status]
        total = len(views)
        lo = (page - 1) * page_size
        return {
            "engagements": [_engagement_summary(v) for v in views[lo : lo + page_size]],
            "page": page,
            "page_size": page_size,
            "total": total,
        }

    @app.get("/engagements/{engagement_id}")
    def engagement_detail(engagement_id: int):
        view = store.engagement_view(engagement_id)
        suggestions = []
        for s in store.suggestions_for(engagement_id):
            try:
                review = store.review_for_suggestion(s.id)
            except NotFoundError:
                review = None
            suggestions.append(_suggestion_json(s, review))
        return {
            **_engagement_summary(view),
            "messages": [_message_json(m) for m in view.messages],
            "suggestions": suggestions,
            "disclosures": [
                {
                    "id": d.id,
                    "message_id": d.message_id,
                    "kind": d.kind.value,
                    "value": d.value,
                    "turn_index": d.turn_index,
                    "elapsed_seconds": d.elapsed.total_seconds(),
                }
                for d in store.disclosures_for(engagement_id)
            ],
        }

    @app.post("/engagements", status_code=201)
    def seed_engagement(req: SeedRequest):
        mode = _parse_mode(req.mode) or default_mode
        engagement_id = runtime.seed(
            req.scammer_address,
            req.persona_id,
            mode,
            body=req.seed_body,
            subject=req.seed_subject,
        )
        view = store.engagement_view(engagement_id)
        pending = store.pending_review_for_engagement(engagement_id)
        return {
            **_engagement_summary(view),
            "pending_review": _review_json(pending),
        }

    @app.get("/review/pending")
    def review_pending():
        items = []
        for item, suggestion in store.pending_reviews():
            view = store.engagement_view(item.engagement_id)
            last_attacker = next(
                (m for m in reversed(view.messages) if m.direction is Direction.ATTACKER),
                None,
            )
            items.append(
                {
                    "review_id": item.id,
                    "suggestion_id": suggestion.id,
                    "engagement_id": item.engagement_id,
                    "scammer_address": view.scammer_address,
                    "mode": view.mode.value,
                    "created_at": format_rfc3339(suggestion.created_at),
                    "suggested_body": suggestion.suggested_body,
                    "last_attacker_body": last_attacker.body if last_attacker else None,
                }
            )
        return {"items": items}

    @app.post("/review/{suggestion_id}/decision")
    def review_decision(suggestion_id: int, req: DecisionRequest):
        if req.action not in ("approve", "edit", "discard"):
            raise ValidationError("action must be approve, edit or discard")
        if req.action == "edit" and not req.final_body:
            raise ValidationError("edit requires final_body")
        item = runtime.decide(
            suggestion_id,
            req.action,
            final_body=req.final_body,
            reviewer=req.reviewer,
        )
        suggestion = store.get_suggestion(suggestion_id)
        return {
            "review_id": item.id,
            "suggestion_id": suggestion_id,
            "engagement_id": item.engagement_id,
            "state": item.state.value,
            "reviewer": item.reviewer,
            "decided_at": format_rfc3339(item.decided_at) if item.decided_at else None,
            "edit_distance": suggestion.edit_distance,
            "final_body": suggestion.final_body,
        }

    @app.post("/poll")
    def poll():
        sent = runtime.retry_outbox()
        result = runtime.poll_cycle()
        return {
            "ingested": len(result.ingested),
            "quarantined": len(result.quarantined),
            "disclosures": len(result.disclosures),
            "suggestions": len(result.suggestions),
            "outbox_sent": len(sent),
            "failures": [{"engagement_id": eid, "message": msg} for eid, msg in result.failures],
        }

    @app.get("/metrics/report")
    def metrics_report(mode: str | None = None, since: str | None = None):
        return build_report(
            store.snapshot(), mode=_parse_mode(mode), since=_parse_since(since)
        )

    @app.get("/metrics/survival")
    def metrics_survival(mode: str | None = None):
        result = M.survival(store.snapshot(), mode=_parse_mode(mode))
        return {
            "count": result.count,
            "grid_days": [g / 86400.0 for g in result.grid_seconds],
            "gap_curve": list(result.gap_curve),
            "duration_curve": list(result.duration_curve),
            "cutoff_95_days": None
            if isinstance(result.cutoff_95_seconds, M.Undefined)
            else result.cutoff_95_seconds / 86400.0,
        }

    return app
