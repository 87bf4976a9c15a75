import random
from datetime import datetime, timedelta, timezone

import pytest

from baitline import (
    Direction,
    DisclosureEvent,
    DisclosureKind,
    EngagementStatus,
    IntegrityError,
    Mode,
    NotFoundError,
    Persona,
    ReviewItem,
    ReviewState,
    StateError,
    Store,
    SuggestionRecord,
    CorpusFormatError,
    export_jsonl,
    import_jsonl,
)

from corpusgen import random_snapshot

T0 = datetime(2026, 2, 2, 9, 0, 0, tzinfo=timezone.utc)


def fixed_clock(dt=T0):
    return lambda: dt


def make_store(path=None, *, now=T0, **kw):
    return Store(path, clock=fixed_clock(now), **kw)


def seeded_engagement(store, *, address="scam@lure.example"):
    eid = store.new_engagement(address, "p1", Mode.MODE_II)
    store.add_message(eid, Direction.DEFENDER, T0, "Hello", "good morning dear sir")
    return eid


@pytest.fixture
def mem():
    s = make_store()
    s.append(Persona(id="p1", display_name="P", background="b", tone="t", mailbox_address="p@m.example"))
    return s


def test_ids_and_positions_are_assigned(mem):
    eid = seeded_engagement(mem)
    m2 = mem.add_message(eid, Direction.ATTACKER, T0 + timedelta(hours=1), "Re: Hello", "reply")
    assert eid == 1
    assert m2.id == 2
    assert m2.position == 2
    view = mem.engagement_view(eid)
    assert [m.position for m in view.messages] == [1, 2]
    assert view.status is EngagementStatus.MATURED


def test_first_message_must_be_defender(mem):
    eid = mem.new_engagement("scam@lure.example", "p1", Mode.MODE_II)
    with pytest.raises(IntegrityError):
        mem.add_message(eid, Direction.ATTACKER, T0, "s", "b")


def test_message_requires_known_engagement(mem):
    with pytest.raises(IntegrityError):
        mem.add_message(99, Direction.DEFENDER, T0, "s", "b")


def test_disclosure_must_point_at_attacker_message(mem):
    eid = seeded_engagement(mem)
    with pytest.raises(IntegrityError):
        mem.append(
            DisclosureEvent(
                id=0,
                engagement_id=eid,
                message_id=1,  # the defender seed
                kind=DisclosureKind.IBAN,
                value="x",
                turn_index=2,
                elapsed=timedelta(0),
            )
        )


def test_duplicate_persona_rejected(mem):
    with pytest.raises(IntegrityError):
        mem.append(
            Persona(id="p1", display_name="X", background="b", tone="t", mailbox_address="x@m")
        )


def test_messages_for_orders_by_timestamp_then_id(mem):
    eid = seeded_engagement(mem)
    mem.add_message(eid, Direction.ATTACKER, T0 + timedelta(hours=2), "s", "late reply")
    # a backdated record: ingested later, happened earlier
    mem.add_message(eid, Direction.ATTACKER, T0 + timedelta(hours=1), "s", "early reply")
    bodies = [m.body for m in mem.messages_for(eid)]
    assert bodies == ["good morning dear sir", "early reply", "late reply"]
    assert [m.position for m in mem.messages_for(eid)] == [1, 2, 3]


def test_persist_and_reload(tmp_path):
    path = tmp_path / "log.jsonl"
    s = make_store(path)
    s.append(Persona(id="p1", display_name="P", background="b", tone="t", mailbox_address="p@m"))
    eid = seeded_engagement(s)
    s.add_message(eid, Direction.ATTACKER, T0 + timedelta(hours=1), "Re: Hello", "i reply to you")
    sug = s.append(
        SuggestionRecord(
            id=0, engagement_id=eid, created_at=T0, prompt_text="p", suggested_body="draft"
        )
    )
    s.append(ReviewItem(id=0, suggestion_id=sug.id, engagement_id=eid, state=ReviewState.PENDING))
    s.close()

    again = make_store(path, now=T0 + timedelta(hours=2))
    assert again.get_persona("p1").mailbox_address == "p@m"
    assert [m.body for m in again.messages_for(eid)] == [
        "good morning dear sir",
        "i reply to you",
    ]
    assert again.review_for_suggestion(sug.id).state is ReviewState.PENDING
    # id counters resume after the highest stored id
    eid2 = again.new_engagement("other@lure.example", "p1", Mode.MODE_I)
    assert eid2 == 2


def test_crash_recovery_truncates_torn_tail(tmp_path):
    path = tmp_path / "log.jsonl"
    s = make_store(path)
    s.append(Persona(id="p1", display_name="P", background="b", tone="t", mailbox_address="p@m"))
    eid = seeded_engagement(s)
    s.close()
    intact = path.read_bytes()

    # a crash mid-write leaves a partial line with no trailing newline
    path.write_bytes(intact + b'{"type":"message","id":99,"engagement')
    recovered = make_store(path, now=T0 + timedelta(hours=1))
    assert [m.body for m in recovered.messages_for(eid)] == ["good morning dear sir"]
    recovered.add_message(eid, Direction.ATTACKER, T0 + timedelta(hours=1), "s", "still works")
    recovered.close()
    assert len(make_store(path, now=T0 + timedelta(hours=2)).messages_for(eid)) == 2


def test_corrupt_interior_line_is_an_error(tmp_path):
    path = tmp_path / "log.jsonl"
    s = make_store(path)
    s.append(Persona(id="p1", display_name="P", background="b", tone="t", mailbox_address="p@m"))
    s.close()
    lines = path.read_bytes().split(b"\n")
    lines[1] = b"{not json"
    path.write_bytes(b"\n".join(lines))
    with pytest.raises(CorpusFormatError) as err:
        make_store(path)
    assert err.value.line_no == 2


def test_acknowledged_records_survive_reload_mid_flow(tmp_path):
    # the atomic message+mark pair: after reopen both are present or neither
    path = tmp_path / "log.jsonl"
    s = make_store(path)
    s.append(Persona(id="p1", display_name="P", background="b", tone="t", mailbox_address="p@m"))
    eid = seeded_engagement(s)
    msg = s.ingest_inbound(eid, "tm-1", T0 + timedelta(hours=1), "Re: Hello", "first reply")
    s.close()

    again = make_store(path, now=T0 + timedelta(hours=2))
    assert again.seen_transport_msg("tm-1")
    assert again.get_message(msg.id).body == "first reply"
    with pytest.raises(IntegrityError):
        again.ingest_inbound(eid, "tm-1", T0 + timedelta(hours=3), "s", "replayed")


def test_quarantine_inbound_records_and_marks(mem):
    rec = mem.quarantine_inbound(
        transport_msg_id="tm-9",
        sender="stranger@nowhere.example",
        recipient="p@m.example",
        subject="hi",
        date=T0,
        body="who is this",
        reason="no engagement",
    )
    assert mem.seen_transport_msg("tm-9")
    assert mem.quarantine_records() == [rec]
    with pytest.raises(IntegrityError):
        mem.quarantine_inbound(
            transport_msg_id="tm-9",
            sender="x@y",
            recipient="p@m.example",
            subject="hi",
            date=T0,
            body="again",
            reason="dup",
        )


def test_finalize_suggestion_is_one_shot(tmp_path):
    path = tmp_path / "log.jsonl"
    s = make_store(path)
    s.append(Persona(id="p1", display_name="P", background="b", tone="t", mailbox_address="p@m"))
    eid = seeded_engagement(s)
    sug = s.append(
        SuggestionRecord(
            id=0, engagement_id=eid, created_at=T0, prompt_text="p", suggested_body="draft text"
        )
    )
    s.finalize_suggestion(sug.id, final_body="draft text!", edit_distance=1, accepted_verbatim=False)
    with pytest.raises(StateError):
        s.finalize_suggestion(sug.id, final_body="x", edit_distance=9, accepted_verbatim=False)
    s.close()
    again = make_store(path)
    stored = again.get_suggestion(sug.id)
    assert stored.final_body == "draft text!"
    assert stored.edit_distance == 1
    with pytest.raises(NotFoundError):
        again.get_suggestion(99)


def test_decide_review_persists(tmp_path):
    path = tmp_path / "log.jsonl"
    s = make_store(path)
    s.append(Persona(id="p1", display_name="P", background="b", tone="t", mailbox_address="p@m"))
    eid = seeded_engagement(s)
    sug = s.append(
        SuggestionRecord(
            id=0, engagement_id=eid, created_at=T0, prompt_text="p", suggested_body="draft"
        )
    )
    item = s.append(
        ReviewItem(id=0, suggestion_id=sug.id, engagement_id=eid, state=ReviewState.PENDING)
    )
    assert s.pending_review_for_engagement(eid) is not None
    s.decide_review(item.id, ReviewState.DISCARDED, "op", T0 + timedelta(minutes=5))
    with pytest.raises(StateError):
        s.decide_review(item.id, ReviewState.APPROVED, "op", T0 + timedelta(minutes=6))
    assert s.pending_review_for_engagement(eid) is None
    s.close()
    again = make_store(path)
    assert again.review_for_suggestion(sug.id).state is ReviewState.DISCARDED


def test_dead_flag_follows_clock(mem):
    eid = seeded_engagement(mem)
    mem.add_message(eid, Direction.ATTACKER, T0 + timedelta(hours=1), "s", "reply once")
    fresh = mem.engagement_view(eid, now=T0 + timedelta(days=10))
    assert not fresh.dead
    stale = mem.engagement_view(eid, now=T0 + timedelta(days=29, hours=2))
    assert stale.dead
    assert stale.display_status is EngagementStatus.DEAD


def test_find_engagements_by_peer_prefers_recent(mem):
    first = seeded_engagement(mem)
    second = mem.new_engagement("scam@lure.example", "p1", Mode.MODE_II)
    mem.add_message(second, Direction.DEFENDER, T0 + timedelta(days=2), "Hello", "newer thread")
    hits = mem.find_engagements_by_peer("scam@lure.example", "p@m.example")
    assert hits == [second, first]


def test_import_snapshot_requires_empty(mem, rng):
    seeded_engagement(mem)
    with pytest.raises(StateError):
        mem.import_snapshot(random_snapshot(rng))


def test_export_import_identity(tmp_path, rng):
    for i in range(15):
        snap = random_snapshot(rng)
        path = tmp_path / f"corpus-{i}.jsonl"
        export_jsonl(snap, path)
        assert import_jsonl(path) == snap


def test_import_jsonl_line_numbers(tmp_path):
    path = tmp_path / "corpus.jsonl"
    path.write_text(
        '{"schema":"baitline/1","as_of":"2026-02-02T10:00:00Z"}\n'
        '{"type":"message","id":1}\n',
        encoding="utf-8",
    )
    with pytest.raises(CorpusFormatError) as err:
        import_jsonl(path)
    assert err.value.line_no == 2

    path.write_text("not json at all\n", encoding="utf-8")
    with pytest.raises(CorpusFormatError) as err:
        import_jsonl(path)
    assert err.value.line_no == 1


def test_import_into_store_round_trips_through_log(tmp_path, rng):
    snap = random_snapshot(rng)
    path = tmp_path / "imported.jsonl"
    s = make_store(path)
    s.import_snapshot(snap)
    s.close()
    again = make_store(path, now=snap.as_of)
    reread = again.snapshot(as_of=snap.as_of)
    assert {e.id for e in reread.engagements} == {e.id for e in snap.engagements}
    for orig in snap.engagements:
        got = reread.engagement(orig.id)
        assert got.messages == orig.messages
    assert reread.suggestions == snap.suggestions
    assert reread.disclosures == snap.disclosures
