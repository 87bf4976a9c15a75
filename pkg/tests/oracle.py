"""Independent reference implementations used to check the engine.

Nothing in here imports computation code from the package; metrics are
recomputed from raw snapshot data with deliberately different mechanics
(list scans instead of running sets, manual medians, hand-rolled Pearson,
BFS instead of dynamic programming) so agreement means something.
"""

from __future__ import annotations

import hashlib
import math
import random
import unicodedata
from collections import deque
from datetime import date, datetime

_MINUTE = 60.0
_HOUR = 3600.0
_DAY = 86400.0


# ---------------------------------------------------------------------------
# exhaustive edit-distance search


def edit_universe(alphabet: str = "abc", max_len: int = 6) -> list[str]:
    strings = [""]
    frontier = [""]
    for _ in range(max_len):
        frontier = [s + c for s in frontier for c in alphabet]
        strings.extend(frontier)
    return strings


def bfs_all_distances(alphabet: str = "abc", max_len: int = 6) -> tuple[list[str], list[bytes]]:
    """True edit distance between every pair of strings over the alphabet,
    found by breadth-first search over the single-edit graph.

    Restricting the graph to strings of length <= max_len is sound: an
    optimal edit script never needs an intermediate longer than the longer
    endpoint (do deletions and substitutions before insertions).
    """
    strings = edit_universe(alphabet, max_len)
    index = {s: i for i, s in enumerate(strings)}
    neighbors: list[list[int]] = []
    for s in strings:
        seen = set()
        for i in range(len(s)):
            seen.add(s[:i] + s[i + 1 :])  # delete
            for c in alphabet:
                if c != s[i]:
                    seen.add(s[:i] + c + s[i + 1 :])  # substitute
        if len(s) < max_len:
            for i in range(len(s) + 1):
                for c in alphabet:
                    seen.add(s[:i] + c + s[i:])  # insert
        neighbors.append([index[t] for t in seen])

    rows: list[bytes] = []
    for source in range(len(strings)):
        dist = bytearray(len(strings))
        unvisited = bytearray(b"\x01" * len(strings))
        unvisited[source] = 0
        queue = deque([source])
        while queue:
            node = queue.popleft()
            d = dist[node] + 1
            for nxt in neighbors[node]:
                if unvisited[nxt]:
                    unvisited[nxt] = 0
                    dist[nxt] = d
                    queue.append(nxt)
        rows.append(bytes(dist))
    return strings, rows


# ---------------------------------------------------------------------------
# identifier generation and validation, written from the standards


_IBAN_LENGTHS = {"DE": 22, "GB": 22, "FR": 27, "NL": 18, "ES": 24, "IT": 27, "CH": 21}
_B58 = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz"


def _mod97(text: str) -> int:
    # incremental remainder, digit by digit, letters mapping A=10..Z=35
    rem = 0
    for ch in text:
        if ch.isdigit():
            rem = (rem * 10 + int(ch)) % 97
        else:
            rem = (rem * 100 + (ord(ch) - ord("A") + 10)) % 97
    return rem


def gen_iban(rng: random.Random) -> str:
    country = rng.choice(sorted(_IBAN_LENGTHS))
    bban_len = _IBAN_LENGTHS[country] - 4
    bban = "".join(rng.choice("0123456789") for _ in range(bban_len))
    check = 98 - _mod97(bban + country + "00")
    return f"{country}{check:02d}{bban}"


def iban_ok(text: str) -> bool:
    compact = text.replace(" ", "").upper()
    if len(compact) < 5 or not compact[:2].isalpha() or not compact[2:4].isdigit():
        return False
    expected = _IBAN_LENGTHS.get(compact[:2])
    if expected is not None and len(compact) != expected:
        return False
    if not all(c.isalnum() and c.isascii() for c in compact):
        return False
    return _mod97(compact[4:] + compact[:4]) == 1


def _b58_encode(raw: bytes) -> str:
    num = int.from_bytes(raw, "big")
    digits = ""
    while num:
        num, rem = divmod(num, 58)
        digits = _B58[rem] + digits
    pad = 0
    for b in raw:
        if b == 0:
            pad += 1
        else:
            break
    return "1" * pad + digits


def _b58_decode(text: str) -> bytes | None:
    num = 0
    for ch in text:
        pos = _B58.find(ch)
        if pos < 0:
            return None
        num = num * 58 + pos
    body = num.to_bytes((num.bit_length() + 7) // 8, "big")
    pad = 0
    for ch in text:
        if ch == "1":
            pad += 1
        else:
            break
    return b"\x00" * pad + body


def gen_btc(rng: random.Random) -> str:
    version = rng.choice([b"\x00", b"\x05"])
    payload = version + bytes(rng.randrange(256) for _ in range(20))
    checksum = hashlib.sha256(hashlib.sha256(payload).digest()).digest()[:4]
    return _b58_encode(payload + checksum)


def btc_ok(text: str) -> bool:
    if not 26 <= len(text) <= 35 or text[0] not in "13":
        return False
    raw = _b58_decode(text)
    if raw is None or len(raw) != 25 or raw[0] not in (0x00, 0x05):
        return False
    checksum = hashlib.sha256(hashlib.sha256(raw[:21]).digest()).digest()[:4]
    return raw[21:] == checksum


def gen_eth(rng: random.Random) -> str:
    return "0x" + "".join(rng.choice("0123456789abcdef") for _ in range(40))


def eth_ok(text: str) -> bool:
    if len(text) != 42 or not text.startswith("0x"):
        return False
    return all(c in "0123456789abcdefABCDEF" for c in text[2:])


# ---------------------------------------------------------------------------
# metric recomputation helpers


def _mean(values) -> float:
    return sum(values) / len(values)


def _median(values) -> float:
    ordered = sorted(values)
    k = len(ordered)
    mid = k // 2
    if k % 2:
        return float(ordered[mid])
    return (ordered[mid - 1] + ordered[mid]) / 2


def _stat_dict(values) -> dict | None:
    if not values:
        return None
    return {
        "mean": _mean(values),
        "median": _median(values),
        "min": float(min(values)),
        "max": float(max(values)),
        "count": len(values),
    }


def _pearson(pairs) -> float | None:
    if len(pairs) < 2:
        return None
    xs = [p[0] for p in pairs]
    ys = [p[1] for p in pairs]
    mx, my = _mean(xs), _mean(ys)
    sxy = sum((x - mx) * (y - my) for x, y in pairs)
    sxx = sum((x - mx) ** 2 for x in xs)
    syy = sum((y - my) ** 2 for y in ys)
    if sxx == 0 or syy == 0:
        return None
    return sxy / math.sqrt(sxx * syy)


_MONDAY = date(2024, 1, 1)  # a known Monday
_WEEKDAYS = ("monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday")


def _weekday_name(moment: datetime) -> str:
    return _WEEKDAYS[(moment.date() - _MONDAY).days % 7]


def _speed_label(turns: int) -> str:
    if turns <= 3:
        return "very_fast"
    if turns <= 7:
        return "fast"
    if turns <= 15:
        return "medium"
    if turns <= 30:
        return "slow"
    return "very_slow"


def _edit_label(d: int) -> str:
    if d == 0:
        return "perfect"
    if d <= 5:
        return "minor"
    if d <= 20:
        return "moderate"
    if d <= 50:
        return "major"
    return "significant"


def _turn_label(n: int) -> str:
    if n <= 5:
        return "short"
    if n <= 15:
        return "medium"
    if n <= 30:
        return "long"
    if n <= 50:
        return "very_long"
    return "extreme"


def _suggestion_len_label(n: int) -> str:
    if n <= 50:
        return "<=50"
    if n <= 200:
        return "51-200"
    if n <= 500:
        return "201-500"
    return ">500"


def _seed_len_label(n: int) -> str:
    if n <= 50:
        return "<=50"
    if n <= 300:
        return "51-300"
    if n <= 500:
        return "301-500"
    return ">500"


def _latency_label(seconds: float) -> str:
    if seconds <= _MINUTE:
        return "<=1m"
    if seconds <= 5 * _MINUTE:
        return "1-5m"
    if seconds <= 30 * _MINUTE:
        return "5-30m"
    if seconds <= 120 * _MINUTE:
        return "30-120m"
    if seconds <= 24 * _HOUR:
        return "2-24h"
    return ">24h"


def _duration_label(seconds: float) -> str:
    if seconds < _HOUR:
        return "<1h"
    if seconds < _DAY:
        return "1h-1d"
    if seconds < 7 * _DAY:
        return "1d-7d"
    if seconds < 30 * _DAY:
        return "7d-30d"
    return ">30d"


def _is_attacker(msg) -> bool:
    return msg.direction.value == "attacker"


def _sorted_messages(engagement):
    return sorted(engagement.messages, key=lambda m: (m.timestamp, m.id))


def _matured(engagement) -> bool:
    return any(_is_attacker(m) for m in engagement.messages)


def _successful(engagement, disclosures) -> bool:
    return any(d.engagement_id == engagement.id for d in disclosures)


# ---------------------------------------------------------------------------
# tokenizer, written against the same rules but with different plumbing


def _tokens(text: str) -> list[str]:
    out = []
    for raw in text.lower().split():
        chars = list(raw)
        while chars and unicodedata.category(chars[0]).startswith("P"):
            chars.pop(0)
        while chars and unicodedata.category(chars[-1]).startswith("P"):
            chars.pop()
        if chars:
            out.append("".join(chars))
    return out


def _distinct_ngrams(tokens: list[str], n: int) -> list[tuple]:
    grams = []
    for i in range(len(tokens) - n + 1):
        g = tuple(tokens[i : i + n])
        if g not in grams:
            grams.append(g)
    return grams


def _freshness_rows(snapshot, n: int) -> list[dict]:
    mode_of = {e.id: e.mode.value for e in snapshot.engagements}
    ordinal: dict[tuple, int] = {}
    rows = []
    timeline = []
    for e in snapshot.engagements:
        for m in _sorted_messages(e):
            timeline.append(m)
    timeline.sort(key=lambda m: (m.timestamp, m.id))

    per_direction_history: dict[str, list[list[tuple]]] = {"attacker": [], "defender": []}
    for e in snapshot.engagements:
        for m in _sorted_messages(e):
            key = (e.id, m.direction.value)
            ordinal[key] = ordinal.get(key, 0) + 1
            ordinal[m.id] = ordinal[key]

    for m in timeline:
        grams = _distinct_ngrams(_tokens(m.body), n)
        direction = m.direction.value
        if grams:
            prior = per_direction_history[direction]
            novel = 0
            for g in grams:
                if not any(g in earlier for earlier in prior):
                    novel += 1
            rows.append(
                {
                    "message_id": m.id,
                    "engagement_id": m.engagement_id,
                    "direction": direction,
                    "mode": mode_of[m.engagement_id],
                    "ordinal": ordinal[m.id],
                    "value": novel / len(grams),
                }
            )
            prior.append(grams)
    return rows


def _freshness_block(snapshot, n: int) -> dict:
    rows = _freshness_rows(snapshot, n)
    values = [r["value"] for r in rows]

    def stats_of(pred):
        return _stat_dict([r["value"] for r in rows if pred(r)])

    by_position = {}
    for label in ("1", "2", "3", "4", "5"):
        by_position[label] = stats_of(lambda r, k=int(label): r["ordinal"] == k)
    by_position["6+"] = stats_of(lambda r: r["ordinal"] >= 6)
    return {
        "overall": _stat_dict(values),
        "by_direction": {
            "attacker": stats_of(lambda r: r["direction"] == "attacker"),
            "defender": stats_of(lambda r: r["direction"] == "defender"),
        },
        "by_mode": {
            "I": stats_of(lambda r: r["mode"] == "I"),
            "II": stats_of(lambda r: r["mode"] == "II"),
        },
        "by_position": by_position,
        "share_below_10pct": (
            None if not values else sum(1 for v in values if v < 0.1) / len(values)
        ),
        "share_above_90pct": (
            None if not values else sum(1 for v in values if v > 0.9) / len(values)
        ),
    }


# ---------------------------------------------------------------------------
# full report recomputation


def _first_disclosure(engagement, disclosures):
    mine = [d for d in disclosures if d.engagement_id == engagement.id]
    if not mine:
        return None
    return sorted(mine, key=lambda d: (d.turn_index, d.elapsed, d.id))[0]


def _gaps_for(engagement) -> list[float]:
    msgs = _sorted_messages(engagement)
    gaps = []
    for i, m in enumerate(msgs):
        if _is_attacker(m):
            continue
        answered = None
        for later in msgs[i + 1 :]:
            if _is_attacker(later):
                answered = later
                break
        if answered is not None:
            gaps.append((answered.timestamp - m.timestamp).total_seconds())
    return gaps


def _survival_block(snapshot) -> dict:
    matured = [e for e in snapshot.engagements if _matured(e)]
    max_gaps = []
    durations = []
    for e in matured:
        gaps = _gaps_for(e)
        if gaps:
            max_gaps.append(max(gaps))
        msgs = _sorted_messages(e)
        durations.append((msgs[-1].timestamp - msgs[0].timestamp).total_seconds())
    if not max_gaps:
        return {
            "count": 0,
            "grid_days": [],
            "gap_curve": [],
            "duration_curve": [],
            "cutoff_95_days": None,
        }
    lo = 60.0
    top = max(max_gaps + durations)
    hi = max(2 * lo, top * 1.01)
    grid = [math.exp(math.log(lo) + (math.log(hi) - math.log(lo)) * i / 63) for i in range(64)]
    gap_curve = [sum(1 for v in max_gaps if v >= g) / len(max_gaps) for g in grid]
    duration_curve = [sum(1 for v in durations if v >= g) / len(durations) for g in grid]
    cutoff = None
    for g, frac in zip(grid, gap_curve):
        if frac <= 0.05:
            cutoff = g / _DAY
            break
    return {
        "count": len(max_gaps),
        "grid_days": [g / _DAY for g in grid],
        "gap_curve": gap_curve,
        "duration_curve": duration_curve,
        "cutoff_95_days": cutoff,
    }


def _latency_block(snapshot) -> dict:
    latencies = []
    pairs = []
    for e in snapshot.engagements:
        msgs = _sorted_messages(e)
        for i, m in enumerate(msgs):
            if not _is_attacker(m):
                continue
            defender_prior = None
            for earlier in reversed(msgs[:i]):
                if not _is_attacker(earlier):
                    defender_prior = earlier
                    break
            if defender_prior is None:
                continue
            lat = (m.timestamp - defender_prior.timestamp).total_seconds()
            latencies.append(lat)
            # the defender message's own latency, if it answered an attacker
            j = msgs.index(defender_prior)
            attacker_before = None
            for earlier in reversed(msgs[:j]):
                if _is_attacker(earlier):
                    attacker_before = earlier
                    break
            if attacker_before is not None:
                d_lat = (defender_prior.timestamp - attacker_before.timestamp).total_seconds()
                pairs.append((d_lat, lat))
    histogram = {k: 0 for k in ("<=1m", "1-5m", "5-30m", "30-120m", "2-24h", ">24h")}
    for v in latencies:
        histogram[_latency_label(v)] += 1
    minutes = [v / _MINUTE for v in latencies]
    return {
        "count": len(latencies),
        "latency_minutes": _stat_dict(minutes),
        "latency_histogram": histogram,
        "pair_count": len(pairs),
        "pairwise_correlation": _pearson(pairs),
    }


def _har_block(snapshot, mode: str | None = "II") -> dict:
    if mode is None:
        eligible = {e.id for e in snapshot.engagements}
    else:
        eligible = {e.id for e in snapshot.engagements if e.mode.value == mode}
    decided = [
        s
        for s in snapshot.suggestions
        if s.engagement_id in eligible and s.final_body is not None
    ]
    distances = [s.edit_distance for s in decided]
    unedited = sum(1 for d in distances if d == 0)
    histogram = {k: 0 for k in ("perfect", "minor", "moderate", "major", "significant")}
    for d in distances:
        histogram[_edit_label(d)] += 1
    by_length = {}
    for label in ("<=50", "51-200", "201-500", ">500"):
        members = [s for s in decided if _suggestion_len_label(len(s.suggested_body)) == label]
        ok = sum(1 for s in members if s.edit_distance == 0)
        by_length[label] = {
            "reviewed": len(members),
            "unedited": ok,
            "har": ok / len(members) if members else None,
        }
    return {
        "rate": unedited / len(decided) if decided else None,
        "reviewed": len(decided),
        "unedited": unedited,
        "avg_edit_distance": _mean(distances) if distances else None,
        "edit_stats": _stat_dict(distances),
        "edit_histogram": histogram,
        "by_length": by_length,
    }


def _mode_block(snapshot, mode: str) -> dict:
    engagements = [e for e in snapshot.engagements if e.mode.value == mode]
    ids = {e.id for e in engagements}

    class Sub:
        pass

    sub = Sub()
    sub.engagements = engagements
    sub.suggestions = [s for s in snapshot.suggestions if s.engagement_id in ids]
    sub.disclosures = [d for d in snapshot.disclosures if d.engagement_id in ids]

    matured = [e for e in engagements if _matured(e)]
    successful = [e for e in engagements if _successful(e, sub.disclosures)]
    ids_rows = []
    for e in engagements:
        first = _first_disclosure(e, sub.disclosures)
        if first is not None:
            ids_rows.append((first.turn_index, first.elapsed.total_seconds()))
    end_turns = [len(e.messages) for e in matured]
    end_durs = []
    for e in matured:
        msgs = _sorted_messages(e)
        end_durs.append((msgs[-1].timestamp - msgs[0].timestamp).total_seconds() / _DAY)
    har = _har_block(sub, mode=None)
    latency = _latency_block(sub)
    return {
        "counts": {
            "seeded": len(engagements),
            "matured": len(matured),
            "successful": len(successful),
        },
        "idr_all": len(successful) / len(engagements) if engagements else None,
        "idr_matured": len(successful) / len(matured) if matured else None,
        "takeoff": len(matured) / len(engagements) if engagements else None,
        "har": har["rate"],
        "ids_turns": _stat_dict([r[0] for r in ids_rows]),
        "ids_time_days": _stat_dict([r[1] / _DAY for r in ids_rows]),
        "endurance_turns": _stat_dict(end_turns),
        "endurance_duration_days": _stat_dict(end_durs),
        "response_latency_minutes": latency["latency_minutes"],
    }


def oracle_report(snapshot, freshness_orders=(2, 3, 4)) -> dict:
    engagements = snapshot.engagements
    disclosures = snapshot.disclosures
    matured = [e for e in engagements if _matured(e)]
    successful = [e for e in engagements if _successful(e, disclosures)]

    ids_rows = []
    for e in engagements:
        first = _first_disclosure(e, disclosures)
        if first is not None:
            ids_rows.append((first.turn_index, first.elapsed.total_seconds()))
    speed_hist = {k: 0 for k in ("very_fast", "fast", "medium", "slow", "very_slow")}
    for turns, _ in ids_rows:
        speed_hist[_speed_label(turns)] += 1

    by_weekday = {}
    for day in _WEEKDAYS:
        members = [e for e in engagements if _weekday_name(e.seeded_at) == day]
        grown = sum(1 for e in members if _matured(e))
        by_weekday[day] = grown / len(members) if members else None
    by_seed_len = {}
    for label in ("<=50", "51-300", "301-500", ">500"):
        members = [
            e
            for e in engagements
            if e.messages
            and _seed_len_label(len(_sorted_messages(e)[0].body)) == label
        ]
        grown = sum(1 for e in members if _matured(e))
        by_seed_len[label] = grown / len(members) if members else None

    end_turns = [len(e.messages) for e in matured]
    end_durations = []
    for e in matured:
        msgs = _sorted_messages(e)
        end_durations.append((msgs[-1].timestamp - msgs[0].timestamp).total_seconds())
    turn_hist = {k: 0 for k in ("short", "medium", "long", "very_long", "extreme")}
    for t in end_turns:
        turn_hist[_turn_label(t)] += 1
    dur_hist = {k: 0 for k in ("<1h", "1h-1d", "1d-7d", "7d-30d", ">30d")}
    for d in end_durations:
        dur_hist[_duration_label(d)] += 1

    return {
        "idr_all": len(successful) / len(engagements) if engagements else None,
        "idr_matured": len(successful) / len(matured) if matured else None,
        "ids": {
            "count": len(ids_rows),
            "turns": _stat_dict([r[0] for r in ids_rows]),
            "time_days": _stat_dict([r[1] / _DAY for r in ids_rows]),
            "speed_histogram": speed_hist,
        },
        "har": _har_block(snapshot),
        "freshness_by_n": {str(n): _freshness_block(snapshot, n) for n in freshness_orders},
        "takeoff": {
            "ratio": len(matured) / len(engagements) if engagements else None,
            "seeded": len(engagements),
            "matured": len(matured),
            "by_weekday": by_weekday,
            "by_seed_length": by_seed_len,
        },
        "endurance": {
            "count": len(matured),
            "turns": _stat_dict(end_turns),
            "duration_days": _stat_dict([d / _DAY for d in end_durations]),
            "turn_histogram": turn_hist,
            "duration_histogram": dur_hist,
        },
        "response_invocation": _latency_block(snapshot),
        "survival": _survival_block(snapshot),
        "by_mode": {m: _mode_block(snapshot, m) for m in ("I", "II")},
    }
