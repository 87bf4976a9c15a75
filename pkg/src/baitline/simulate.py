"""Scripted scammer counterpart on a virtual clock.

Real counterparties are out of reach (and out of bounds) for test runs, so
experiments wire a profile-driven scammer to the loopback transport and push
simulated time through the same store/gateway/review/detector path a live
deployment uses. Months of exchange take milliseconds; a fixed seed gives a
byte-identical corpus.
"""

from __future__ import annotations

import hashlib
import heapq
import math
import random
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

from .errors import ValidationError
from .gateway import LoopbackTransport, SpoolMessage
from .model import Direction, DisclosureKind, Engagement, Mode, Persona
from .runtime import Runtime
from .store import Store
from .suggest import StubProvider
from .util import parse_duration, parse_rfc3339, read_kv_file, utc_second

_B58_ALPHABET = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz"


# ---------------------------------------------------------------------------
# valid identifier generation (the detector must accept these)


def make_iban(rng: random.Random) -> str:
    bban = "".join(rng.choice("0123456789") for _ in range(18))
    # check digits: shift country+00 to the back, digits of letters are 10..35
    rearranged = bban + "131400"  # D=13, E=14, 00
    check = 98 - int(rearranged) % 97
    return f"DE{check:02d}{bban}"


def make_btc(rng: random.Random) -> str:
    payload = bytes([0x00]) + rng.randbytes(20)
    digest = hashlib.sha256(hashlib.sha256(payload).digest()).digest()
    raw = payload + digest[:4]
    num = int.from_bytes(raw, "big")
    out = []
    while num:
        num, rem = divmod(num, 58)
        out.append(_B58_ALPHABET[rem])
    pad = len(raw) - len(raw.lstrip(b"\x00"))
    return "1" * pad + "".join(reversed(out))


def make_eth(rng: random.Random) -> str:
    return "0x" + "".join(rng.choice("0123456789abcdef") for _ in range(40))


def make_bank_account(rng: random.Random) -> str:
    return "".join(rng.choice("0123456789") for _ in range(10))


def disclosure_sentence(kind: DisclosureKind, rng: random.Random) -> str:
    if kind is DisclosureKind.IBAN:
        return f"Please wire the funds to my IBAN {make_iban(rng)} today."
    if kind is DisclosureKind.CRYPTO_WALLET_BTC:
        return f"Send the bitcoin to {make_btc(rng)} and confirm."
    if kind is DisclosureKind.CRYPTO_WALLET_ETH:
        return f"My wallet is {make_eth(rng)} for the transfer."
    if kind is DisclosureKind.BANK_ACCOUNT:
        return f"My account number for the wire is {make_bank_account(rng)}."
    raise ValidationError(f"no generator for disclosure kind {kind}")


# ---------------------------------------------------------------------------
# latency model


@dataclass(frozen=True, slots=True)
class LatencyComponent:
    weight: float
    lo_seconds: float
    hi_seconds: float


@dataclass(frozen=True, slots=True)
class LatencyModel:
    """Mixture over reply-time bands: a point-ish mass under one minute plus
    log-normal components clamped into their bands, so sampled latencies land
    in each band exactly at the configured weights."""

    components: tuple[LatencyComponent, ...]

    def __post_init__(self):
        total = sum(c.weight for c in self.components)
        if not math.isclose(total, 1.0, abs_tol=1e-9):
            raise ValidationError(f"latency weights sum to {total}, expected 1")
        for c in self.components:
            if not 0 < c.lo_seconds < c.hi_seconds:
                raise ValidationError("latency component bounds out of order")

    def sample(self, rng: random.Random) -> float:
        roll = rng.random()
        acc = 0.0
        component = self.components[-1]
        for c in self.components:
            acc += c.weight
            if roll < acc:
                component = c
                break
        lo, hi = component.lo_seconds, component.hi_seconds
        mu = (math.log(lo) + math.log(hi)) / 2
        sigma = (math.log(hi) - math.log(lo)) / 4
        value = rng.lognormvariate(mu, sigma)
        return min(max(value, lo), hi)


# Band shares measured on live traffic: most replies take hours, a solid
# eighth arrive near-instantly. The top band is capped at 48h so ordinary
# latency never masquerades as a death gap.
DEFAULT_LATENCY_MODEL = LatencyModel(
    components=(
        LatencyComponent(0.124, 5.0, 60.0),
        LatencyComponent(0.013, 60.0, 300.0),
        LatencyComponent(0.147, 300.0, 1800.0),
        LatencyComponent(0.149, 1800.0, 7200.0),
        LatencyComponent(0.408, 7200.0, 86400.0),
        LatencyComponent(0.159, 86400.0, 172800.0),
    )
)


# ---------------------------------------------------------------------------
# scammer profile


_CANNED_REPLIES = (
    "Thank you for your response. I need your full cooperation to proceed.",
    "This is a very urgent matter, please treat it with confidence.",
    "I have forwarded your details to our payment officer for processing.",
    "Kindly confirm you are ready so we can finalize the documentation.",
    "The bank requires a small clearance fee before the release of funds.",
    "I assure you everything is legitimate, my lawyer has certified it.",
)


@dataclass(frozen=True, slots=True)
class ScammerProfile:
    id: str
    reply_probability: float = 1.0
    latency_model: LatencyModel = DEFAULT_LATENCY_MODEL
    disclose_at_turn: int | None = None
    disclosure_kind: DisclosureKind = DisclosureKind.IBAN
    death_after_gap: timedelta | None = None
    replies_before_death: int = 2
    script: tuple[str, ...] = ()

    def __post_init__(self):
        if not 0.0 <= self.reply_probability <= 1.0:
            raise ValidationError("reply_probability must be within [0,1]")
        if self.disclose_at_turn is not None and self.disclose_at_turn < 2:
            raise ValidationError("disclose_at_turn must be at least 2")
        if self.replies_before_death < 1:
            raise ValidationError("replies_before_death must be at least 1")


@dataclass(frozen=True, slots=True)
class ScammerStep:
    reply_body: str
    delay: timedelta


def profile_rng(profile: ScammerProfile, seed: int) -> random.Random:
    """Per-engagement stream, stable across processes (no hash() involved)."""
    digest = hashlib.sha256(f"{seed}:{profile.id}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def step(
    profile: ScammerProfile, view: Engagement, rng: random.Random
) -> ScammerStep | None:
    """Decide the scammer's next move after a defender message.

    Returns None for permanent silence. All state is derived from the
    engagement view, so the function stays replayable; the rng must be the
    engagement's own stream, consumed only through step().
    """
    if not view.messages or view.messages[-1].direction is not Direction.DEFENDER:
        raise ValidationError("step() requires an unanswered defender message")
    replies_made = sum(1 for m in view.messages if m.direction is Direction.ATTACKER)

    if replies_made == 0 and rng.random() >= profile.reply_probability:
        return None

    # Where the death pulse sits: after the scripted number of replies, but
    # never before the disclosure has gone out.
    pulse_after = profile.replies_before_death
    if profile.disclose_at_turn is not None:
        pulse_after = max(pulse_after, (profile.disclose_at_turn + 1) // 2)
    if profile.death_after_gap is not None and replies_made > pulse_after:
        return None

    position = len(view.messages) + 1
    already_disclosed = profile.disclose_at_turn is not None and any(
        m.direction is Direction.ATTACKER and m.position >= profile.disclose_at_turn
        for m in view.messages
    )

    if profile.script:
        body = profile.script[min(replies_made, len(profile.script) - 1)]
    else:
        body = _CANNED_REPLIES[rng.randrange(len(_CANNED_REPLIES))]

    if (
        profile.disclose_at_turn is not None
        and not already_disclosed
        and position >= profile.disclose_at_turn
    ):
        body = f"{body}\n\n{disclosure_sentence(profile.disclosure_kind, rng)}"

    if profile.death_after_gap is not None and replies_made == pulse_after:
        delay = profile.death_after_gap
    else:
        delay = timedelta(seconds=max(5, round(profile.latency_model.sample(rng))))
    return ScammerStep(reply_body=body, delay=delay)


# ---------------------------------------------------------------------------
# virtual clock and experiment loop


class VirtualClock:
    def __init__(self, start: datetime):
        self._now = utc_second(start)

    def now(self) -> datetime:
        return self._now

    def advance_to(self, moment: datetime) -> None:
        moment = utc_second(moment)
        if moment < self._now:
            raise ValidationError("virtual clock cannot move backward")
        self._now = moment


DEFAULT_PERSONA = Persona(
    id="sim-persona",
    display_name="Margaret Whitfield",
    background="retired schoolteacher from Ohio who recently inherited some savings",
    tone="warm, chatty, slightly confused by technology",
    mailbox_address="margaret.whitfield@mailhost.example",
)


@dataclass(frozen=True, slots=True)
class DefenderConfig:
    mode: Mode = Mode.MODE_I
    persona: Persona = DEFAULT_PERSONA
    review_delay: timedelta = timedelta(minutes=45)
    edit_fraction: float = 0.0
    discard_fraction: float = 0.0
    seed_spacing: timedelta = timedelta(hours=7)

    def __post_init__(self):
        if not 0.0 <= self.edit_fraction <= 1.0:
            raise ValidationError("edit_fraction must be within [0,1]")
        if not 0.0 <= self.discard_fraction <= 1.0:
            raise ValidationError("discard_fraction must be within [0,1]")
        if self.edit_fraction + self.discard_fraction > 1.0:
            raise ValidationError("edit and discard fractions exceed 1 combined")


DEFAULT_START = datetime(2026, 1, 5, 8, 0, 0, tzinfo=timezone.utc)  # a Monday

_EDIT_SUFFIX = "\n\nP.S. Do write back soon, dear."


@dataclass(frozen=True, slots=True)
class _Event:
    at: datetime
    seq: int
    kind: str  # seed | deliver | decide
    address: str
    body: str = ""
    subject: str = ""

    def __lt__(self, other: "_Event") -> bool:
        return (self.at, self.seq) < (other.at, other.seq)


@dataclass(slots=True)
class _PeerState:
    profile: ScammerProfile
    rng: random.Random
    engagement_id: int | None = None
    reply_seq: int = 0


def run_experiment(
    population: list[ScammerProfile],
    defender: DefenderConfig,
    horizon: timedelta,
    *,
    seed: int = 0,
    start: datetime = DEFAULT_START,
    store: Store | None = None,
):
    """Run the full pipeline against the profile population and return the
    resulting corpus snapshot.

    Every defender message goes out through the gateway, every scammer reply
    comes back through poll and the detector; the only substitution versus a
    live deployment is the transport adapter and the clock.
    """
    clock = VirtualClock(start)
    if store is None:
        store = Store(clock=clock.now)
    else:
        store.clock = clock.now
    transport = LoopbackTransport(identity="simulator")
    provider = StubProvider(seed=seed)
    runtime = Runtime(store, transport, provider)
    runtime.ensure_persona(defender.persona)
    decider = random.Random(f"decider:{seed}")

    states: dict[str, _PeerState] = {}
    heap: list[_Event] = []
    seq = 0

    def push(at: datetime, kind: str, address: str, body: str = "", subject: str = "") -> None:
        nonlocal seq
        seq += 1
        heapq.heappush(heap, _Event(utc_second(at), seq, kind, address, body, subject))

    for i, profile in enumerate(population):
        address = f"{profile.id}@sim.example"
        states[address] = _PeerState(profile=profile, rng=profile_rng(profile, seed))
        push(start + i * defender.seed_spacing, "seed", address)

    end = start + horizon
    sent_cursor = 0

    def schedule_scammer_turns() -> None:
        """Consume newly sent defender mail and line up scammer replies."""
        nonlocal sent_cursor
        while sent_cursor < len(transport.sent):
            _, spool = transport.sent[sent_cursor]
            sent_cursor += 1
            state = states.get(spool.recipient)
            if state is None or state.engagement_id is None:
                continue
            view = store.engagement_view(state.engagement_id)
            move = step(state.profile, view, state.rng)
            if move is None:
                continue
            # Delay counts from the defender message's stamped time, which can
            # sit 1s past the wall clock; anchoring there keeps engineered
            # death gaps exact instead of one second short.
            push(
                view.messages[-1].timestamp + move.delay,
                "deliver",
                spool.recipient,
                body=move.reply_body,
                subject=f"Re: {spool.subject}" if not spool.subject.startswith("Re:") else spool.subject,
            )

    def maybe_queue_decision(engagement_id: int, address: str) -> None:
        if defender.mode is Mode.MODE_II and store.pending_review_for_engagement(engagement_id):
            push(clock.now() + defender.review_delay, "decide", address)

    while heap and heap[0].at <= end:
        event = heapq.heappop(heap)
        clock.advance_to(event.at)
        state = states[event.address]

        if event.kind == "seed":
            eid = runtime.seed(event.address, defender.persona.id, defender.mode)
            state.engagement_id = eid
            maybe_queue_decision(eid, event.address)
        elif event.kind == "deliver":
            state.reply_seq += 1
            transport.inject(
                SpoolMessage(
                    transport_msg_id=f"sim-{event.address}-{state.reply_seq:04d}",
                    sender=event.address,
                    recipient=defender.persona.mailbox_address,
                    subject=event.subject,
                    date=clock.now(),
                    body=event.body,
                )
            )
            runtime.poll_cycle()
            if state.engagement_id is not None:
                maybe_queue_decision(state.engagement_id, event.address)
        elif event.kind == "decide":
            pending = (
                None
                if state.engagement_id is None
                else store.pending_review_for_engagement(state.engagement_id)
            )
            if pending is not None:
                suggestion = store.get_suggestion(pending.suggestion_id)
                roll = decider.random()
                if roll < defender.discard_fraction:
                    runtime.decide(suggestion.id, "discard", reviewer="sim-operator")
                elif roll < defender.discard_fraction + defender.edit_fraction:
                    runtime.decide(
                        suggestion.id,
                        "edit",
                        final_body=suggestion.suggested_body + _EDIT_SUFFIX,
                        reviewer="sim-operator",
                    )
                else:
                    runtime.decide(suggestion.id, "approve", reviewer="sim-operator")
        schedule_scammer_turns()

    clock.advance_to(end)
    return store.snapshot()


# ---------------------------------------------------------------------------
# experiment config files


@dataclass(frozen=True, slots=True)
class Experiment:
    population: tuple[ScammerProfile, ...]
    defender: DefenderConfig
    horizon: timedelta
    seed: int
    start: datetime = DEFAULT_START


_PROFILE_KEYS = {
    "count",
    "reply_probability",
    "disclose_at_turn",
    "disclosure_kind",
    "death_after_gap",
    "replies_before_death",
}


def load_experiment(path: str | Path) -> Experiment:
    """Parse a key-value experiment file.

    Top-level keys: mode, horizon, seed, seed_spacing, review_delay,
    edit_fraction, discard_fraction, start. Population groups use
    population.<name>.<key> with keys count, reply_probability,
    disclose_at_turn, disclosure_kind, death_after_gap, replies_before_death.
    """
    kv = read_kv_file(path)
    groups: dict[str, dict[str, str]] = {}
    plain: dict[str, str] = {}
    for key, value in kv.items():
        if key.startswith("population."):
            parts = key.split(".")
            if len(parts) != 3 or parts[2] not in _PROFILE_KEYS:
                raise ValidationError(f"unknown population key {key!r}")
            groups.setdefault(parts[1], {})[parts[2]] = value
        else:
            plain[key] = value

    try:
        defender = DefenderConfig(
            mode=Mode(plain.get("mode", "I")),
            review_delay=parse_duration(plain.get("review_delay", "45m")),
            edit_fraction=float(plain.get("edit_fraction", "0")),
            discard_fraction=float(plain.get("discard_fraction", "0")),
            seed_spacing=parse_duration(plain.get("seed_spacing", "7h")),
        )
        horizon = parse_duration(plain.get("horizon", "120d"))
        seed = int(plain.get("seed", "0"))
        start = parse_rfc3339(plain["start"]) if "start" in plain else DEFAULT_START
    except ValueError as exc:
        raise ValidationError(f"bad experiment setting: {exc}") from exc

    if not groups:
        raise ValidationError("experiment defines no population groups")
    profiles: list[ScammerProfile] = []
    for name in sorted(groups):
        g = groups[name]
        try:
            count = int(g.get("count", "1"))
            template = dict(
                reply_probability=float(g.get("reply_probability", "1.0")),
                disclose_at_turn=int(g["disclose_at_turn"]) if "disclose_at_turn" in g else None,
                disclosure_kind=DisclosureKind(g.get("disclosure_kind", "iban")),
                death_after_gap=parse_duration(g["death_after_gap"])
                if "death_after_gap" in g
                else None,
                replies_before_death=int(g.get("replies_before_death", "2")),
            )
        except ValueError as exc:
            raise ValidationError(f"bad population group {name!r}: {exc}") from exc
        if count < 1:
            raise ValidationError(f"population group {name!r} has count < 1")
        for i in range(count):
            profiles.append(ScammerProfile(id=f"{name}-{i:04d}", **template))
    return Experiment(
        population=tuple(profiles),
        defender=defender,
        horizon=horizon,
        seed=seed,
        start=start,
    )
