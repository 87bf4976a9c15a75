"""Report assembly: one JSON-ready dict per corpus, plus a text summary and
a per-engagement CSV. The dict is built in a fixed key order and undefined
metrics become JSON null, so the same snapshot always serializes to the same
bytes regardless of where it was loaded from."""

from __future__ import annotations

import csv
import io
import json
from datetime import datetime
from pathlib import Path

from . import metrics as M
from .model import CorpusSnapshot, Direction, Mode
from .util import format_rfc3339

REPORT_SCHEMA = "baitline-report/1"

_MINUTE = 60.0
_DAY = 86400.0

DEFAULT_FRESHNESS_ORDERS = tuple(range(2, 11))


def _plain(value):
    if isinstance(value, M.Undefined):
        return None
    return value


def _stats(stats, divisor: float = 1.0):
    if isinstance(stats, M.Undefined):
        return None
    if divisor != 1.0:
        stats = stats.scaled(divisor)
    return {
        "mean": stats.mean,
        "median": stats.median,
        "min": stats.min,
        "max": stats.max,
        "count": stats.count,
    }


def _mode_block(snapshot: CorpusSnapshot, mode: Mode) -> dict:
    sub = M.filter_snapshot(snapshot, mode=mode)
    counts = M.corpus_counts(sub)
    ids = M.ids(sub)
    har = M.har(sub, mode=None)  # already restricted to one mode
    end = M.endurance(sub)
    resp = M.response_invocation(sub)
    return {
        "counts": {
            "seeded": counts.seeded,
            "matured": counts.matured,
            "successful": counts.successful,
        },
        "idr_all": _plain(M.idr(sub, scope="all")),
        "idr_matured": _plain(M.idr(sub, scope="matured")),
        "takeoff": _plain(M.takeoff_from_counts(counts.matured, counts.seeded)),
        "har": _plain(har.har),
        "ids_turns": _stats(ids.turns),
        "ids_time_days": _stats(ids.time_seconds, _DAY),
        "endurance_turns": _stats(end.turns),
        "endurance_duration_days": _stats(end.duration_seconds, _DAY),
        "response_latency_minutes": _stats(resp.latency_seconds, _MINUTE),
    }


def _freshness_block(snapshot: CorpusSnapshot, n: int) -> dict:
    summary = M.summarize_freshness(snapshot, n)
    return {
        "overall": _stats(summary.overall),
        "by_direction": {k: _stats(v) for k, v in summary.by_direction.items()},
        "by_mode": {k: _stats(v) for k, v in summary.by_mode.items()},
        "by_position": {k: _stats(v) for k, v in summary.by_position.items()},
        "share_below_10pct": _plain(summary.share_below_10pct),
        "share_above_90pct": _plain(summary.share_above_90pct),
    }


def build_report(
    snapshot: CorpusSnapshot,
    *,
    mode: Mode | None = None,
    since: datetime | None = None,
    freshness_orders: tuple[int, ...] = DEFAULT_FRESHNESS_ORDERS,
) -> dict:
    """Compute every metric over the (optionally filtered) snapshot."""
    snapshot = M.filter_snapshot(snapshot, mode=mode, since=since)
    counts = M.corpus_counts(snapshot)
    ids = M.ids(snapshot)
    har = M.har(snapshot)
    takeoff = M.takeoff(snapshot)
    end = M.endurance(snapshot)
    resp = M.response_invocation(snapshot)
    surv = M.survival(snapshot)

    return {
        "schema": REPORT_SCHEMA,
        "as_of": format_rfc3339(snapshot.as_of),
        "filters": {
            "mode": mode.value if mode is not None else None,
            "since": format_rfc3339(since) if since is not None else None,
        },
        "counts": {
            "seeded": counts.seeded,
            "matured": counts.matured,
            "successful": counts.successful,
            "dead": counts.dead,
            "messages": counts.messages,
            "attacker_messages": counts.attacker_messages,
            "defender_messages": counts.defender_messages,
            "special_content_messages": counts.special_content_messages,
            "suggestions": counts.suggestions,
            "suggestions_sent": counts.suggestions_sent,
            "by_mode": counts.by_mode,
        },
        "idr_all": _plain(M.idr(snapshot, scope="all")),
        "idr_matured": _plain(M.idr(snapshot, scope="matured")),
        "ids": {
            "count": len(ids.rows),
            "turns": _stats(ids.turns),
            "time_days": _stats(ids.time_seconds, _DAY),
            "speed_histogram": ids.speed_histogram,
        },
        "har": {
            "rate": _plain(har.har),
            "reviewed": har.reviewed,
            "unedited": har.unedited,
            "avg_edit_distance": None
            if isinstance(har.edit_stats, M.Undefined)
            else har.edit_stats.mean,
            "edit_stats": _stats(har.edit_stats),
            "edit_histogram": har.edit_histogram,
            "by_length": {
                label: {
                    "reviewed": row.reviewed,
                    "unedited": row.unedited,
                    "har": _plain(row.har),
                }
                for label, row in har.by_length.items()
            },
        },
        "freshness_by_n": {
            str(n): _freshness_block(snapshot, n) for n in freshness_orders
        },
        "takeoff": {
            "ratio": _plain(takeoff.rate),
            "seeded": takeoff.seeded,
            "matured": takeoff.matured,
            "by_weekday": {k: _plain(v) for k, v in takeoff.by_weekday.items()},
            "by_seed_length": {k: _plain(v) for k, v in takeoff.by_seed_length.items()},
        },
        "endurance": {
            "count": end.count,
            "turns": _stats(end.turns),
            "duration_days": _stats(end.duration_seconds, _DAY),
            "turn_histogram": end.turn_histogram,
            "duration_histogram": end.duration_histogram,
        },
        "response_invocation": {
            "count": resp.count,
            "latency_minutes": _stats(resp.latency_seconds, _MINUTE),
            "latency_histogram": resp.latency_histogram,
            "pair_count": resp.pair_count,
            "pairwise_correlation": _plain(resp.pairwise_correlation),
        },
        "survival": {
            "count": surv.count,
            "grid_days": [g / _DAY for g in surv.grid_seconds],
            "gap_curve": list(surv.gap_curve),
            "duration_curve": list(surv.duration_curve),
            "cutoff_95_days": None
            if isinstance(surv.cutoff_95_seconds, M.Undefined)
            else surv.cutoff_95_seconds / _DAY,
        },
        "by_mode": {m.value: _mode_block(snapshot, m) for m in Mode},
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# text summary


def _pct(value, digits: int = 2) -> str:
    if value is None:
        return "n/a"
    return f"{value * 100:.{digits}f}%"


def _num(value, digits: int = 2) -> str:
    if value is None:
        return "n/a"
    return f"{value:.{digits}f}"


def _stat_line(stats, unit: str = "") -> str:
    if stats is None:
        return "n/a"
    suffix = f" {unit}" if unit else ""
    return (
        f"mean {stats['mean']:.2f}{suffix}, median {stats['median']:.2f}{suffix},"
        f" range {stats['min']:.2f}-{stats['max']:.2f} (n={stats['count']})"
    )


def _histogram_lines(hist: dict[str, int], indent: str = "    ") -> list[str]:
    total = sum(hist.values())
    lines = []
    for label, count in hist.items():
        share = f"{count / total * 100:5.1f}%" if total else "    -"
        lines.append(f"{indent}{label:<12} {count:>7}  {share}")
    return lines


def render_summary(report: dict) -> str:
    """Plain-text counterpart of the JSON report for terminals and logs."""
    out = io.StringIO()
    w = out.write
    counts = report["counts"]
    w(f"corpus as of {report['as_of']}\n")
    w("\n== engagements ==\n")
    w(f"  seeded      {counts['seeded']}\n")
    w(f"  matured     {counts['matured']}\n")
    w(f"  successful  {counts['successful']}\n")
    w(f"  dead        {counts['dead']}\n")
    w(f"  messages    {counts['messages']} ")
    w(f"(attacker {counts['attacker_messages']}, defender {counts['defender_messages']})\n")
    w(f"  by mode     {counts['by_mode']}\n")

    w("\n== disclosure ==\n")
    w(f"  IDR (all seeded)   {_pct(report['idr_all'])}\n")
    w(f"  IDR (matured)      {_pct(report['idr_matured'])}\n")
    ids = report["ids"]
    w(f"  IDS turns          {_stat_line(ids['turns'])}\n")
    w(f"  IDS time           {_stat_line(ids['time_days'], 'd')}\n")
    w("  speed histogram\n")
    w("\n".join(_histogram_lines(ids["speed_histogram"])) + "\n")

    w("\n== suggestion acceptance ==\n")
    har = report["har"]
    w(f"  HAR                {_pct(har['rate'])} ({har['unedited']}/{har['reviewed']})\n")
    w(f"  edit distance      {_stat_line(har['edit_stats'], 'ch')}\n")
    w("  edit histogram\n")
    w("\n".join(_histogram_lines(har["edit_histogram"])) + "\n")
    w("  by suggestion length\n")
    for label, row in har["by_length"].items():
        w(f"    {label:<12} {_pct(row['har'])} ({row['unedited']}/{row['reviewed']})\n")

    w("\n== freshness ==\n")
    for n, block in report["freshness_by_n"].items():
        overall = block["overall"]
        att = block["by_direction"]["attacker"]
        dfd = block["by_direction"]["defender"]
        w(
            f"  n={n:<2} overall {_num(overall['mean'], 3) if overall else 'n/a'}"
            f"  attacker {_num(att['mean'], 3) if att else 'n/a'}"
            f"  defender {_num(dfd['mean'], 3) if dfd else 'n/a'}\n"
        )

    w("\n== takeoff ==\n")
    takeoff = report["takeoff"]
    w(f"  ratio              {_pct(takeoff['ratio'])} ({takeoff['matured']}/{takeoff['seeded']})\n")
    w("  by weekday\n")
    for day, v in takeoff["by_weekday"].items():
        w(f"    {day:<12} {_pct(v)}\n")
    w("  by seed length\n")
    for label, v in takeoff["by_seed_length"].items():
        w(f"    {label:<12} {_pct(v)}\n")

    w("\n== endurance ==\n")
    end = report["endurance"]
    w(f"  turns              {_stat_line(end['turns'])}\n")
    w(f"  duration           {_stat_line(end['duration_days'], 'd')}\n")
    w("  length histogram\n")
    w("\n".join(_histogram_lines(end["turn_histogram"])) + "\n")
    w("  duration histogram\n")
    w("\n".join(_histogram_lines(end["duration_histogram"])) + "\n")

    w("\n== response invocation ==\n")
    resp = report["response_invocation"]
    w(f"  latency            {_stat_line(resp['latency_minutes'], 'min')}\n")
    w("  latency histogram\n")
    w("\n".join(_histogram_lines(resp["latency_histogram"])) + "\n")
    corr = resp["pairwise_correlation"]
    w(f"  pairwise r         {_num(corr, 3)} over {resp['pair_count']} pairs\n")

    w("\n== survival ==\n")
    surv = report["survival"]
    w(f"  engagements        {surv['count']}\n")
    cutoff = surv["cutoff_95_days"]
    w(f"  95% gap cutoff     {_num(cutoff, 1)} days\n")
    return out.getvalue()


# ---------------------------------------------------------------------------
# per-engagement CSV


CSV_COLUMNS = (
    "engagement_id",
    "mode",
    "status",
    "dead",
    "persona_id",
    "scammer_address",
    "seeded_at",
    "weekday",
    "messages",
    "attacker_messages",
    "defender_messages",
    "duration_seconds",
    "first_disclosure_turn",
    "first_disclosure_seconds",
    "max_gap_seconds",
)


def write_engagement_csv(snapshot: CorpusSnapshot, path: str | Path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for e in snapshot.engagements:
            first = M.first_disclosure(e, snapshot.disclosures)
            duration = ""
            if e.messages:
                duration = (e.messages[-1].timestamp - e.messages[0].timestamp).total_seconds()
            gap = M.max_response_gap(e)
            writer.writerow(
                [
                    e.id,
                    e.mode.value,
                    e.status.value,
                    int(e.dead),
                    e.persona_id,
                    e.scammer_address,
                    format_rfc3339(e.seeded_at),
                    M.WEEKDAYS[e.seeded_at.weekday()],
                    len(e.messages),
                    sum(1 for m in e.messages if m.direction is Direction.ATTACKER),
                    sum(1 for m in e.messages if m.direction is Direction.DEFENDER),
                    duration,
                    first.turn_index if first else "",
                    first.elapsed.total_seconds() if first else "",
                    gap if gap is not None else "",
                ]
            )
    return path
