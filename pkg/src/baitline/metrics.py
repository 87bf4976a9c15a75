"""Evaluation metrics over an engagement corpus.

Everything here is a pure function of a CorpusSnapshot; nothing touches the
store or the clock. When a metric has no data (zero denominator, no matured
engagements, not enough pairs) it comes back as the UNDEFINED marker, never
as a silent 0: a corpus where nobody disclosed anything and a corpus you
forgot to load look very different and must stay distinguishable.

Definitions in brief:
  idr        successful / scoped engagements (scope: all seeded, or matured)
  ids        turns and elapsed time from seeding to the first disclosure
  har        share of decided-and-sent suggestions used verbatim
  freshness  share of a message's word n-grams never used before by the same
             side, against a corpus-wide running history in timestamp order
  takeoff    matured / seeded
  endurance  message counts and wall-clock span of matured engagements
  response   attacker reply latency after our preceding message, plus the
             correlation between consecutive defender/attacker latencies
  survival   per-engagement longest unanswered-defender gap, evaluated as a
             survival curve on a log-spaced grid with a 95% die-off cutoff
"""

from __future__ import annotations

import statistics
import unicodedata
from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Sequence

from .model import (
    CorpusSnapshot,
    Direction,
    DisclosureEvent,
    Engagement,
    EngagementStatus,
    Message,
    Mode,
    sort_key,
)


class Undefined:
    """Singleton marker for a metric that has no defined value."""

    _instance: "Undefined | None" = None

    def __new__(cls) -> "Undefined":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "undefined"

    def __bool__(self) -> bool:
        return False


UNDEFINED = Undefined()

WEEKDAYS = ("monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday")

# Inclusive integer ranges; None means open-ended.
SPEED_BUCKETS = (
    ("very_fast", 1, 3),
    ("fast", 4, 7),
    ("medium", 8, 15),
    ("slow", 16, 30),
    ("very_slow", 31, None),
)
EDIT_BUCKETS = (
    ("perfect", 0, 0),
    ("minor", 1, 5),
    ("moderate", 6, 20),
    ("major", 21, 50),
    ("significant", 51, None),
)
TURN_BUCKETS = (
    ("short", 2, 5),
    ("medium", 6, 15),
    ("long", 16, 30),
    ("very_long", 31, 50),
    ("extreme", 51, None),
)
SUGGESTION_LENGTH_BUCKETS = (
    ("<=50", 0, 50),
    ("51-200", 51, 200),
    ("201-500", 201, 500),
    (">500", 501, None),
)
SEED_LENGTH_BUCKETS = (
    ("<=50", 0, 50),
    ("51-300", 51, 300),
    ("301-500", 301, 500),
    (">500", 501, None),
)

_MINUTE = 60.0
_HOUR = 3600.0
_DAY = 86400.0

# Reply latency bands: lower bound exclusive, upper inclusive (except the
# first, which starts at zero). 5 minutes on the dot is "1-5m", not "5-30m".
LATENCY_BUCKETS = (
    ("<=1m", 0.0, _MINUTE),
    ("1-5m", _MINUTE, 5 * _MINUTE),
    ("5-30m", 5 * _MINUTE, 30 * _MINUTE),
    ("30-120m", 30 * _MINUTE, 120 * _MINUTE),
    ("2-24h", 2 * _HOUR, 24 * _HOUR),
    (">24h", 24 * _HOUR, None),
)
# Engagement duration classes, left-closed right-open throughout.
DURATION_CLASSES = (
    ("<1h", 0.0, _HOUR),
    ("1h-1d", _HOUR, _DAY),
    ("1d-7d", _DAY, 7 * _DAY),
    ("7d-30d", 7 * _DAY, 30 * _DAY),
    (">30d", 30 * _DAY, None),
)

SURVIVAL_GRID_POINTS = 64
SURVIVAL_GRID_FLOOR = 60.0  # seconds


def _int_bucket(value: int, buckets) -> str:
    for label, lo, hi in buckets:
        if value >= lo and (hi is None or value <= hi):
            return label
    raise ValueError(f"value {value} fits no bucket")


def speed_bucket(turns: int) -> str:
    return _int_bucket(turns, SPEED_BUCKETS)


def edit_bucket(distance: int) -> str:
    return _int_bucket(distance, EDIT_BUCKETS)


def turn_bucket(turns: int) -> str:
    return _int_bucket(turns, TURN_BUCKETS)


def length_bucket(length: int, buckets=SUGGESTION_LENGTH_BUCKETS) -> str:
    return _int_bucket(length, buckets)


def latency_bucket(seconds: float) -> str:
    for label, lo, hi in LATENCY_BUCKETS:
        if (seconds > lo or lo == 0.0) and (hi is None or seconds <= hi):
            return label
    raise ValueError(f"latency {seconds} fits no bucket")


def duration_class(seconds: float) -> str:
    for label, lo, hi in DURATION_CLASSES:
        if seconds >= lo and (hi is None or seconds < hi):
            return label
    raise ValueError(f"duration {seconds} fits no class")


@dataclass(frozen=True, slots=True)
class Stats:
    mean: float
    median: float
    min: float
    max: float
    count: int

    def scaled(self, divisor: float) -> "Stats":
        return Stats(
            mean=self.mean / divisor,
            median=self.median / divisor,
            min=self.min / divisor,
            max=self.max / divisor,
            count=self.count,
        )


def describe(values: Sequence[float]) -> Stats | Undefined:
    if not values:
        return UNDEFINED
    return Stats(
        mean=float(statistics.mean(values)),
        median=float(statistics.median(values)),
        min=float(min(values)),
        max=float(max(values)),
        count=len(values),
    )


def ratio(numerator: int, denominator: int) -> float | Undefined:
    if denominator == 0:
        return UNDEFINED
    return numerator / denominator


# ---------------------------------------------------------------------------
# corpus filtering


def filter_snapshot(
    snapshot: CorpusSnapshot,
    *,
    mode: Mode | None = None,
    since: datetime | None = None,
) -> CorpusSnapshot:
    """Restrict a snapshot to one mode and/or engagements seeded at or after
    a moment. Suggestions and disclosures follow their engagements."""
    if mode is None and since is None:
        return snapshot
    keep = tuple(
        e
        for e in snapshot.engagements
        if (mode is None or e.mode is mode) and (since is None or e.seeded_at >= since)
    )
    ids = {e.id for e in keep}
    return CorpusSnapshot(
        engagements=keep,
        suggestions=tuple(s for s in snapshot.suggestions if s.engagement_id in ids),
        disclosures=tuple(d for d in snapshot.disclosures if d.engagement_id in ids),
        as_of=snapshot.as_of,
    )


def _matured(e: Engagement) -> bool:
    return e.status in (EngagementStatus.MATURED, EngagementStatus.SUCCESSFUL)


def _successful(e: Engagement) -> bool:
    return e.status is EngagementStatus.SUCCESSFUL


# ---------------------------------------------------------------------------
# disclosure rate and speed


def idr_from_counts(successful: int, scoped: int) -> float | Undefined:
    return ratio(successful, scoped)


def takeoff_from_counts(matured: int, seeded: int) -> float | Undefined:
    return ratio(matured, seeded)


def har_from_counts(unedited: int, reviewed: int) -> float | Undefined:
    return ratio(unedited, reviewed)


def idr(
    snapshot: CorpusSnapshot, *, scope: str = "all", mode: Mode | None = None
) -> float | Undefined:
    """Information disclosure rate: successful over all seeded engagements,
    or over matured ones when scope="matured"."""
    snapshot = filter_snapshot(snapshot, mode=mode)
    if scope == "all":
        pool = snapshot.engagements
    elif scope == "matured":
        pool = tuple(e for e in snapshot.engagements if _matured(e))
    else:
        raise ValueError(f"unknown idr scope {scope!r}")
    return idr_from_counts(sum(1 for e in pool if _successful(e)), len(pool))


@dataclass(frozen=True, slots=True)
class IdsRow:
    engagement_id: int
    turns: int
    seconds: float


@dataclass(frozen=True, slots=True)
class IdsResult:
    rows: tuple[IdsRow, ...]
    turns: Stats | Undefined
    time_seconds: Stats | Undefined
    speed_histogram: dict[str, int]


def first_disclosure(
    engagement: Engagement, disclosures: Iterable[DisclosureEvent]
) -> DisclosureEvent | None:
    mine = [d for d in disclosures if d.engagement_id == engagement.id]
    if not mine:
        return None
    return min(mine, key=lambda d: (d.turn_index, d.elapsed, d.id))


def ids(snapshot: CorpusSnapshot, *, mode: Mode | None = None) -> IdsResult:
    """Disclosure speed: turn index of and time to the first disclosure of
    every successful engagement."""
    snapshot = filter_snapshot(snapshot, mode=mode)
    rows = []
    for e in snapshot.engagements:
        event = first_disclosure(e, snapshot.disclosures)
        if event is not None:
            rows.append(
                IdsRow(
                    engagement_id=e.id,
                    turns=event.turn_index,
                    seconds=event.elapsed.total_seconds(),
                )
            )
    histogram = {label: 0 for label, _, _ in SPEED_BUCKETS}
    for row in rows:
        histogram[speed_bucket(row.turns)] += 1
    return IdsResult(
        rows=tuple(rows),
        turns=describe([r.turns for r in rows]),
        time_seconds=describe([r.seconds for r in rows]),
        speed_histogram=histogram,
    )


# ---------------------------------------------------------------------------
# human acceptance


@dataclass(frozen=True, slots=True)
class LengthBucketRow:
    reviewed: int
    unedited: int
    har: float | Undefined


@dataclass(frozen=True, slots=True)
class HarResult:
    reviewed: int
    unedited: int
    har: float | Undefined
    edit_stats: Stats | Undefined
    edit_histogram: dict[str, int]
    by_length: dict[str, LengthBucketRow]


def har(snapshot: CorpusSnapshot, *, mode: Mode | None = Mode.MODE_II) -> HarResult:
    """Human acceptance rate over decided-and-sent suggestions.

    The denominator is every suggestion with a final body: approved or
    edited, then actually sent. Discarded suggestions never get a final body
    and stay out. Defaults to Mode II engagements because auto-approved
    Mode I suggestions are trivially verbatim; pass mode=None to widen.
    """
    if mode is None:
        engagement_ids = {e.id for e in snapshot.engagements}
    else:
        engagement_ids = {e.id for e in snapshot.engagements if e.mode is mode}
    decided = [
        s
        for s in snapshot.suggestions
        if s.engagement_id in engagement_ids and s.final_body is not None
    ]
    distances = [s.edit_distance for s in decided]
    unedited = sum(1 for d in distances if d == 0)
    histogram = {label: 0 for label, _, _ in EDIT_BUCKETS}
    for d in distances:
        histogram[edit_bucket(d)] += 1
    by_length: dict[str, LengthBucketRow] = {}
    for label, _, _ in SUGGESTION_LENGTH_BUCKETS:
        members = [s for s in decided if length_bucket(len(s.suggested_body)) == label]
        ok = sum(1 for s in members if s.edit_distance == 0)
        by_length[label] = LengthBucketRow(
            reviewed=len(members), unedited=ok, har=har_from_counts(ok, len(members))
        )
    return HarResult(
        reviewed=len(decided),
        unedited=unedited,
        har=har_from_counts(unedited, len(decided)),
        edit_stats=describe(distances),
        edit_histogram=histogram,
        by_length=by_length,
    )


# ---------------------------------------------------------------------------
# message freshness


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, strip leading/trailing punctuation
    from each token, drop what vanishes."""
    out = []
    for raw in text.lower().split():
        start = 0
        end = len(raw)
        while start < end and unicodedata.category(raw[start]).startswith("P"):
            start += 1
        while end > start and unicodedata.category(raw[end - 1]).startswith("P"):
            end -= 1
        if end > start:
            out.append(raw[start:end])
    return out


def ngrams(tokens: Sequence[str], n: int) -> set[tuple[str, ...]]:
    if n < 1:
        raise ValueError("n-gram order must be at least 1")
    return {tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)}


def freshness(text: str, n: int, history: set[tuple[str, ...]]) -> float | Undefined:
    """Share of the message's distinct word n-grams absent from history.

    Messages with fewer than n tokens have no n-grams and are excluded from
    the metric rather than scored zero."""
    grams = ngrams(tokenize(text), n)
    if not grams:
        return UNDEFINED
    novel = sum(1 for g in grams if g not in history)
    return novel / len(grams)


@dataclass(frozen=True, slots=True)
class FreshnessRow:
    message_id: int
    engagement_id: int
    direction: Direction
    mode: Mode
    direction_ordinal: int  # 1 for the sender's first message in the engagement
    value: float


def freshness_pass(snapshot: CorpusSnapshot, n: int) -> tuple[FreshnessRow, ...]:
    """Score every message against a per-direction running history.

    History is corpus-wide: all earlier messages of the same direction, in
    (timestamp, id) order across engagements. A message's own n-grams enter
    the history only after it is scored, so the first message of a direction
    always scores 1.0 and an exact repeat scores 0.0.
    """
    modes = {e.id: e.mode for e in snapshot.engagements}
    ordinals: dict[tuple[int, Direction], int] = {}
    ordinal_of: dict[int, int] = {}
    for e in snapshot.engagements:
        for m in e.messages:
            key = (e.id, m.direction)
            ordinals[key] = ordinals.get(key, 0) + 1
            ordinal_of[m.id] = ordinals[key]

    timeline = sorted((m for e in snapshot.engagements for m in e.messages), key=sort_key)
    history: dict[Direction, set[tuple[str, ...]]] = {
        Direction.ATTACKER: set(),
        Direction.DEFENDER: set(),
    }
    rows = []
    for msg in timeline:
        grams = ngrams(tokenize(msg.body), n)
        if grams:
            side = history[msg.direction]
            novel = sum(1 for g in grams if g not in side)
            rows.append(
                FreshnessRow(
                    message_id=msg.id,
                    engagement_id=msg.engagement_id,
                    direction=msg.direction,
                    mode=modes[msg.engagement_id],
                    direction_ordinal=ordinal_of[msg.id],
                    value=novel / len(grams),
                )
            )
            side.update(grams)
    return tuple(rows)


@dataclass(frozen=True, slots=True)
class FreshnessSummary:
    n: int
    overall: Stats | Undefined
    by_direction: dict[str, Stats | Undefined]
    by_mode: dict[str, Stats | Undefined]
    by_position: dict[str, Stats | Undefined]
    share_below_10pct: float | Undefined
    share_above_90pct: float | Undefined


_POSITION_LABELS = ("1", "2", "3", "4", "5", "6+")


def summarize_freshness(snapshot: CorpusSnapshot, n: int) -> FreshnessSummary:
    rows = freshness_pass(snapshot, n)
    values = [r.value for r in rows]
    by_direction = {
        d.value: describe([r.value for r in rows if r.direction is d]) for d in Direction
    }
    by_mode = {m.value: describe([r.value for r in rows if r.mode is m]) for m in Mode}
    by_position = {}
    for label in _POSITION_LABELS:
        if label == "6+":
            members = [r.value for r in rows if r.direction_ordinal >= 6]
        else:
            members = [r.value for r in rows if r.direction_ordinal == int(label)]
        by_position[label] = describe(members)
    return FreshnessSummary(
        n=n,
        overall=describe(values),
        by_direction=by_direction,
        by_mode=by_mode,
        by_position=by_position,
        share_below_10pct=ratio(sum(1 for v in values if v < 0.1), len(values)),
        share_above_90pct=ratio(sum(1 for v in values if v > 0.9), len(values)),
    )


# ---------------------------------------------------------------------------
# takeoff


@dataclass(frozen=True, slots=True)
class TakeoffResult:
    seeded: int
    matured: int
    rate: float | Undefined
    by_weekday: dict[str, float | Undefined]
    by_seed_length: dict[str, float | Undefined]


def takeoff(snapshot: CorpusSnapshot, *, mode: Mode | None = None) -> TakeoffResult:
    """Share of seeded engagements that got at least one reply, with
    breakdowns by seeding weekday (UTC) and by first-message length."""
    snapshot = filter_snapshot(snapshot, mode=mode)
    seeded = len(snapshot.engagements)
    matured = sum(1 for e in snapshot.engagements if _matured(e))
    by_weekday: dict[str, float | Undefined] = {}
    for i, day in enumerate(WEEKDAYS):
        members = [e for e in snapshot.engagements if e.seeded_at.weekday() == i]
        by_weekday[day] = takeoff_from_counts(sum(1 for e in members if _matured(e)), len(members))
    by_length: dict[str, float | Undefined] = {}
    with_seed = [e for e in snapshot.engagements if e.messages]
    for label, _, _ in SEED_LENGTH_BUCKETS:
        members = [
            e
            for e in with_seed
            if length_bucket(e.messages[0].body_length, SEED_LENGTH_BUCKETS) == label
        ]
        by_length[label] = takeoff_from_counts(sum(1 for e in members if _matured(e)), len(members))
    return TakeoffResult(
        seeded=seeded,
        matured=matured,
        rate=takeoff_from_counts(matured, seeded),
        by_weekday=by_weekday,
        by_seed_length=by_length,
    )


# ---------------------------------------------------------------------------
# endurance


@dataclass(frozen=True, slots=True)
class EnduranceResult:
    count: int
    turns: Stats | Undefined
    duration_seconds: Stats | Undefined
    turn_histogram: dict[str, int]
    duration_histogram: dict[str, int]


def endurance(snapshot: CorpusSnapshot, *, mode: Mode | None = None) -> EnduranceResult:
    """How long matured engagements run, in messages and in wall-clock time
    (first message to last message)."""
    snapshot = filter_snapshot(snapshot, mode=mode)
    matured = [e for e in snapshot.engagements if _matured(e)]
    turn_counts = [len(e.messages) for e in matured]
    durations = [
        (e.messages[-1].timestamp - e.messages[0].timestamp).total_seconds() for e in matured
    ]
    turn_hist = {label: 0 for label, _, _ in TURN_BUCKETS}
    for t in turn_counts:
        turn_hist[turn_bucket(t)] += 1
    duration_hist = {label: 0 for label, _, _ in DURATION_CLASSES}
    for d in durations:
        duration_hist[duration_class(d)] += 1
    return EnduranceResult(
        count=len(matured),
        turns=describe(turn_counts),
        duration_seconds=describe(durations),
        turn_histogram=turn_hist,
        duration_histogram=duration_hist,
    )


# ---------------------------------------------------------------------------
# response invocation


@dataclass(frozen=True, slots=True)
class ResponseResult:
    count: int
    latency_seconds: Stats | Undefined
    latency_histogram: dict[str, int]
    pair_count: int
    pairwise_correlation: float | Undefined


def _reply_latencies(engagement: Engagement) -> tuple[list[float], list[tuple[float, float]]]:
    """Attacker reply latencies and (defender latency, attacker latency)
    pairs for one engagement. A latency exists only when a message of the
    opposite direction precedes the message."""
    latencies: list[float] = []
    pairs: list[tuple[float, float]] = []
    last_attacker: datetime | None = None
    last_defender: datetime | None = None
    last_defender_latency: float | None = None
    for msg in engagement.messages:
        if msg.direction is Direction.DEFENDER:
            if last_attacker is not None:
                last_defender_latency = (msg.timestamp - last_attacker).total_seconds()
            last_defender = msg.timestamp
        else:
            if last_defender is not None:
                lat = (msg.timestamp - last_defender).total_seconds()
                latencies.append(lat)
                if last_defender_latency is not None:
                    pairs.append((last_defender_latency, lat))
            last_attacker = msg.timestamp
    return latencies, pairs


def response_invocation(
    snapshot: CorpusSnapshot, *, mode: Mode | None = None
) -> ResponseResult:
    """Attacker reply latency relative to the nearest preceding defender
    message, plus the Pearson correlation between each defender latency and
    the attacker latency that follows it."""
    snapshot = filter_snapshot(snapshot, mode=mode)
    latencies: list[float] = []
    pairs: list[tuple[float, float]] = []
    for e in snapshot.engagements:
        lat, prs = _reply_latencies(e)
        latencies.extend(lat)
        pairs.extend(prs)
    histogram = {label: 0 for label, _, _ in LATENCY_BUCKETS}
    for value in latencies:
        histogram[latency_bucket(value)] += 1
    correlation: float | Undefined
    if len(pairs) < 2:
        correlation = UNDEFINED
    else:
        xs = [p[0] for p in pairs]
        ys = [p[1] for p in pairs]
        try:
            correlation = statistics.correlation(xs, ys)
        except statistics.StatisticsError:
            correlation = UNDEFINED  # zero variance on one side
    return ResponseResult(
        count=len(latencies),
        latency_seconds=describe(latencies),
        latency_histogram=histogram,
        pair_count=len(pairs),
        pairwise_correlation=correlation,
    )


# ---------------------------------------------------------------------------
# survival


@dataclass(frozen=True, slots=True)
class SurvivalResult:
    count: int
    grid_seconds: tuple[float, ...]
    gap_curve: tuple[float, ...]
    duration_curve: tuple[float, ...]
    cutoff_95_seconds: float | Undefined
    max_gaps_seconds: tuple[float, ...]
    durations_seconds: tuple[float, ...]


def max_response_gap(engagement: Engagement) -> float | None:
    """Longest wait between a defender message and the next attacker reply,
    in seconds. None when no defender message was ever answered."""
    gaps: list[float] = []
    messages = engagement.messages
    for i, msg in enumerate(messages):
        if msg.direction is not Direction.DEFENDER:
            continue
        for later in messages[i + 1 :]:
            if later.direction is Direction.ATTACKER:
                gaps.append((later.timestamp - msg.timestamp).total_seconds())
                break
    return max(gaps) if gaps else None


def survival_grid(values: Sequence[float]) -> tuple[float, ...]:
    """Log-spaced grid from one minute to just past the largest value, so the
    final point always clears every observation."""
    lo = SURVIVAL_GRID_FLOOR
    top = max(values) if values else 0.0
    hi = max(2 * lo, top * 1.01)
    n = SURVIVAL_GRID_POINTS
    return tuple(lo * (hi / lo) ** (i / (n - 1)) for i in range(n))


def survival(snapshot: CorpusSnapshot, *, mode: Mode | None = None) -> SurvivalResult:
    """Engagement die-off measured two ways on one grid: by the longest
    observed response gap and by total engagement duration. cutoff_95 is the
    first grid point where at most 5% of engagements still show a gap that
    large or larger."""
    snapshot = filter_snapshot(snapshot, mode=mode)
    matured = [e for e in snapshot.engagements if _matured(e)]
    gaps = [g for g in (max_response_gap(e) for e in matured) if g is not None]
    durations = [
        (e.messages[-1].timestamp - e.messages[0].timestamp).total_seconds() for e in matured
    ]
    if not gaps:
        return SurvivalResult(
            count=0,
            grid_seconds=(),
            gap_curve=(),
            duration_curve=(),
            cutoff_95_seconds=UNDEFINED,
            max_gaps_seconds=(),
            durations_seconds=(),
        )
    grid = survival_grid(gaps + durations)
    gap_curve = tuple(sum(1 for v in gaps if v >= g) / len(gaps) for g in grid)
    duration_curve = tuple(
        sum(1 for v in durations if v >= g) / len(durations) for g in grid
    )
    cutoff: float | Undefined = UNDEFINED
    for g, alive in zip(grid, gap_curve):
        if alive <= 0.05:
            cutoff = g
            break
    return SurvivalResult(
        count=len(gaps),
        grid_seconds=grid,
        gap_curve=gap_curve,
        duration_curve=duration_curve,
        cutoff_95_seconds=cutoff,
        max_gaps_seconds=tuple(sorted(gaps)),
        durations_seconds=tuple(sorted(durations)),
    )


def gap_fraction(snapshot: CorpusSnapshot, threshold_seconds: float) -> float | Undefined:
    """Point evaluation of the gap survival function at an arbitrary
    threshold (share of matured engagements whose longest gap reaches it)."""
    matured = [e for e in snapshot.engagements if _matured(e)]
    gaps = [g for g in (max_response_gap(e) for e in matured) if g is not None]
    if not gaps:
        return UNDEFINED
    return sum(1 for v in gaps if v >= threshold_seconds) / len(gaps)


# ---------------------------------------------------------------------------
# corpus counts


@dataclass(frozen=True, slots=True)
class CorpusCounts:
    seeded: int
    matured: int
    successful: int
    dead: int
    messages: int
    attacker_messages: int
    defender_messages: int
    special_content_messages: int
    suggestions: int
    suggestions_sent: int
    by_mode: dict[str, int]


def corpus_counts(snapshot: CorpusSnapshot) -> CorpusCounts:
    msgs = [m for e in snapshot.engagements for m in e.messages]
    return CorpusCounts(
        seeded=len(snapshot.engagements),
        matured=sum(1 for e in snapshot.engagements if _matured(e)),
        successful=sum(1 for e in snapshot.engagements if _successful(e)),
        dead=sum(1 for e in snapshot.engagements if e.dead),
        messages=len(msgs),
        attacker_messages=sum(1 for m in msgs if m.direction is Direction.ATTACKER),
        defender_messages=sum(1 for m in msgs if m.direction is Direction.DEFENDER),
        special_content_messages=sum(1 for m in msgs if m.special_content),
        suggestions=len(snapshot.suggestions),
        suggestions_sent=sum(1 for s in snapshot.suggestions if s.final_body is not None),
        by_mode={m.value: sum(1 for e in snapshot.engagements if e.mode is m) for m in Mode},
    )
