"""Small shared helpers: UTC timestamps, duration notation, key-value files."""

from __future__ import annotations

import re
from datetime import datetime, timedelta, timezone
from pathlib import Path

from .errors import ValidationError

RFC3339 = "%Y-%m-%dT%H:%M:%SZ"

_DURATION = re.compile(r"^\s*(\d+(?:\.\d+)?)\s*(s|m|h|d)\s*$")
_UNIT_SECONDS = {"s": 1.0, "m": 60.0, "h": 3600.0, "d": 86400.0}


def utc_now() -> datetime:
    return utc_second(datetime.now(timezone.utc))


def utc_second(dt: datetime) -> datetime:
    """Clamp a datetime to UTC at whole-second precision.

    All stored timestamps go through here; sub-second digits never reach disk.
    """
    if dt.tzinfo is None:
        raise ValidationError("naive datetime; timestamps must carry a timezone")
    return dt.astimezone(timezone.utc).replace(microsecond=0)


def format_rfc3339(dt: datetime) -> str:
    return utc_second(dt).strftime(RFC3339)


def parse_rfc3339(text: str) -> datetime:
    """Parse a timestamp in RFC-3339 form. Accepts 'Z' or a numeric offset."""
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(raw)
    except ValueError as exc:
        raise ValidationError(f"bad timestamp {text!r}") from exc
    if dt.tzinfo is None:
        raise ValidationError(f"timestamp {text!r} lacks a timezone offset")
    return utc_second(dt)


def parse_duration(text: str) -> timedelta:
    """Parse shorthand like '30s', '15m', '2h', '28d' into a timedelta."""
    m = _DURATION.match(text)
    if not m:
        raise ValidationError(f"bad duration {text!r}; expected <number><s|m|h|d>")
    return timedelta(seconds=float(m.group(1)) * _UNIT_SECONDS[m.group(2)])


def format_duration(delta: timedelta) -> str:
    secs = delta.total_seconds()
    for unit, size in (("d", 86400.0), ("h", 3600.0), ("m", 60.0)):
        if secs >= size and secs % size == 0:
            return f"{secs / size:g}{unit}"
    return f"{secs:g}s"


def read_kv_file(path: str | Path) -> dict[str, str]:
    """Read a `key: value` config file.

    Blank lines and lines starting with '#' are ignored. Keys are
    case-sensitive; later duplicates override earlier ones.
    """
    out: dict[str, str] = {}
    for i, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if ":" not in stripped:
            raise ValidationError(f"{path}:{i}: expected 'key: value', got {line!r}")
        key, _, value = stripped.partition(":")
        out[key.strip()] = value.strip()
    return out


def split_kv_header(text: str) -> tuple[dict[str, str], str]:
    """Split a file into a `Key: Value` header block and the body after the
    first blank line. Used by templates and spool messages alike."""
    header: dict[str, str] = {}
    lines = text.splitlines()
    i = 0
    for i, line in enumerate(lines):
        if not line.strip():
            break
        if ":" not in line:
            raise ValidationError(f"header line {i + 1} is not 'Key: Value': {line!r}")
        key, _, value = line.partition(":")
        header[key.strip()] = value.strip()
    else:
        return header, ""
    return header, "\n".join(lines[i + 1 :])
