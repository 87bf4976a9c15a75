from datetime import datetime, timedelta, timezone

import pytest

from baitline import ValidationError
from baitline.util import (
    format_duration,
    format_rfc3339,
    parse_duration,
    parse_rfc3339,
    read_kv_file,
    split_kv_header,
    utc_second,
)


def test_utc_second_strips_microseconds_and_converts():
    eastern = timezone(timedelta(hours=-5))
    dt = datetime(2026, 3, 1, 7, 30, 15, 123456, tzinfo=eastern)
    out = utc_second(dt)
    assert out == datetime(2026, 3, 1, 12, 30, 15, tzinfo=timezone.utc)
    assert out.microsecond == 0


def test_utc_second_rejects_naive():
    with pytest.raises(ValidationError):
        utc_second(datetime(2026, 3, 1))


def test_rfc3339_round_trip():
    dt = datetime(2026, 3, 1, 12, 30, 15, tzinfo=timezone.utc)
    assert format_rfc3339(dt) == "2026-03-01T12:30:15Z"
    assert parse_rfc3339("2026-03-01T12:30:15Z") == dt
    assert parse_rfc3339("2026-03-01T07:30:15-05:00") == dt


def test_parse_rfc3339_rejects_garbage():
    for bad in ("yesterday", "2026-03-01", "2026-03-01T12:30:15"):
        with pytest.raises(ValidationError):
            parse_rfc3339(bad)


@pytest.mark.parametrize(
    ("text", "seconds"),
    [("30s", 30), ("15m", 900), ("2h", 7200), ("28d", 28 * 86400), ("1.5h", 5400)],
)
def test_parse_duration(text, seconds):
    assert parse_duration(text).total_seconds() == seconds


def test_duration_round_trip():
    for text in ("45s", "15m", "2h", "28d", "90m"):
        assert parse_duration(format_duration(parse_duration(text))) == parse_duration(text)


def test_parse_duration_rejects_garbage():
    for bad in ("", "d", "3 weeks", "-4h"):
        with pytest.raises(ValidationError):
            parse_duration(bad)


def test_read_kv_file(tmp_path):
    path = tmp_path / "sample.conf"
    path.write_text("# comment\nname: alice\n\nrole:  admin \nname: bob\n", encoding="utf-8")
    assert read_kv_file(path) == {"name": "bob", "role": "admin"}


def test_read_kv_file_rejects_bare_line(tmp_path):
    path = tmp_path / "broken.conf"
    path.write_text("just words\n", encoding="utf-8")
    with pytest.raises(ValidationError):
        read_kv_file(path)


def test_split_kv_header():
    header, body = split_kv_header("A: 1\nB: two\n\nline one\n\nline two")
    assert header == {"A": "1", "B": "two"}
    assert body == "line one\n\nline two"


def test_split_kv_header_without_body():
    header, body = split_kv_header("A: 1\nB: 2")
    assert header == {"A": "1", "B": "2"}
    assert body == ""
