"""Detection and validation of financial identifiers in attacker mail.

Detection is two-stage: cheap candidate extraction with regular expressions,
then a strict validator per kind. IBANs must pass the country length table
and the mod-97 check; BTC addresses must pass base58check; ETH addresses are
format-only (0x plus 40 hex digits, no checksum exists at this layer). Bare
account numbers are only reported when the surrounding sentence mentions a
banking keyword, otherwise every long number in a shipping label would fire.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path

from .errors import ValidationError
from .model import Direction, DisclosureEvent, DisclosureKind, Message
from .util import read_kv_file

# Official IBAN lengths per country code (ISO 13616 registry).
IBAN_LENGTHS: dict[str, int] = {
    "AD": 24, "AE": 23, "AL": 28, "AT": 20, "AZ": 28, "BA": 20, "BE": 16,
    "BG": 22, "BH": 22, "BR": 29, "BY": 28, "CH": 21, "CR": 22, "CY": 28,
    "CZ": 24, "DE": 22, "DK": 18, "DO": 28, "EE": 20, "EG": 29, "ES": 24,
    "FI": 18, "FO": 18, "FR": 27, "GB": 22, "GE": 22, "GI": 23, "GL": 18,
    "GR": 27, "GT": 28, "HR": 21, "HU": 28, "IE": 22, "IL": 23, "IQ": 23,
    "IS": 26, "IT": 27, "JO": 30, "KW": 30, "KZ": 20, "LB": 28, "LC": 32,
    "LI": 21, "LT": 20, "LU": 20, "LV": 21, "MC": 27, "MD": 24, "ME": 22,
    "MK": 19, "MR": 27, "MT": 31, "MU": 30, "NL": 18, "NO": 15, "PK": 24,
    "PL": 28, "PS": 29, "PT": 25, "QA": 29, "RO": 24, "RS": 22, "SA": 24,
    "SC": 31, "SE": 24, "SI": 19, "SK": 24, "SM": 27, "TN": 24, "TR": 26,
    "UA": 29, "VA": 22, "VG": 24, "XK": 20,
}

_BASE58_ALPHABET = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz"
_BASE58_INDEX = {c: i for i, c in enumerate(_BASE58_ALPHABET)}

_IBAN_ANCHOR = re.compile(r"[A-Za-z]{2}[0-9]{2}")
_BTC_CANDIDATE = re.compile(r"\b[13][1-9A-HJ-NP-Za-km-z]{25,34}\b")
_ETH_CANDIDATE = re.compile(r"\b0x[0-9a-fA-F]{40}\b")
_SENTENCE_SPLIT = re.compile(r"[.!?\n;]")
_WORDCHAR = re.compile(r"[0-9A-Za-z]")


def validate_iban(value: str) -> bool:
    """Country length table plus the mod-97 remainder check."""
    compact = value.replace(" ", "").upper()
    if not re.fullmatch(r"[A-Z]{2}[0-9]{2}[A-Z0-9]+", compact):
        return False
    expected = IBAN_LENGTHS.get(compact[:2])
    if expected is None or len(compact) != expected:
        return False
    rearranged = compact[4:] + compact[:4]
    numeric = "".join(str(int(ch, 36)) for ch in rearranged)
    return int(numeric) % 97 == 1


def _b58decode(value: str) -> bytes | None:
    acc = 0
    for ch in value:
        digit = _BASE58_INDEX.get(ch)
        if digit is None:
            return None
        acc = acc * 58 + digit
    body = acc.to_bytes((acc.bit_length() + 7) // 8, "big") if acc else b""
    pad = len(value) - len(value.lstrip("1"))
    return b"\x00" * pad + body


def validate_btc(value: str) -> bool:
    """base58check: 25 decoded bytes, legacy version byte, double-SHA256 tag."""
    if not 26 <= len(value) <= 35 or value[0] not in "13":
        return False
    decoded = _b58decode(value)
    if decoded is None or len(decoded) != 25:
        return False
    if decoded[0] not in (0x00, 0x05):
        return False
    checksum = hashlib.sha256(hashlib.sha256(decoded[:21]).digest()).digest()[:4]
    return checksum == decoded[21:]


def validate_eth(value: str) -> bool:
    return re.fullmatch(r"0x[0-9a-fA-F]{40}", value) is not None


@dataclass(frozen=True)
class DetectorConfig:
    bank_keywords: tuple[str, ...] = ("account", "routing", "aba", "swift", "wire")
    min_account_digits: int = 8
    max_account_digits: int = 17
    # (name, regex) pairs surfaced as OTHER disclosures
    extra_patterns: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if self.min_account_digits < 1 or self.max_account_digits < self.min_account_digits:
            raise ValidationError("account digit bounds are inverted")
        for name, pattern in self.extra_patterns:
            try:
                re.compile(pattern)
            except re.error as exc:
                raise ValidationError(f"extra pattern {name!r} does not compile: {exc}") from exc

    @classmethod
    def from_file(cls, path: str | Path) -> "DetectorConfig":
        """Read detector settings from a `key: value` file.

        Recognized keys: bank_keywords (comma separated), account_digits
        (min-max), and any number of extra_pattern.<name> regex entries.
        """
        raw = read_kv_file(path)
        keywords = cls.bank_keywords
        if "bank_keywords" in raw:
            keywords = tuple(k.strip().lower() for k in raw["bank_keywords"].split(",") if k.strip())
        lo, hi = cls.min_account_digits, cls.max_account_digits
        if "account_digits" in raw:
            try:
                lo_s, _, hi_s = raw["account_digits"].partition("-")
                lo, hi = int(lo_s), int(hi_s)
            except ValueError as exc:
                raise ValidationError(f"{path}: account_digits must look like '8-17'") from exc
        extras = tuple(
            (key.split(".", 1)[1], value)
            for key, value in raw.items()
            if key.startswith("extra_pattern.")
        )
        return cls(
            bank_keywords=keywords,
            min_account_digits=lo,
            max_account_digits=hi,
            extra_patterns=extras,
        )


class Detector:
    def __init__(self, config: DetectorConfig | None = None):
        self.config = config if config is not None else DetectorConfig()
        joined = "|".join(re.escape(k) for k in self.config.bank_keywords)
        self._keyword_re = re.compile(rf"\b(?:{joined})\b", re.IGNORECASE) if joined else None
        self._digit_run = re.compile(
            rf"\b\d{{{self.config.min_account_digits},{self.config.max_account_digits}}}\b"
        )
        self._extras = [(name, re.compile(pattern)) for name, pattern in self.config.extra_patterns]

    # -- validation -----------------------------------------------------------

    def validate(self, kind: DisclosureKind, candidate: str) -> bool:
        if kind is DisclosureKind.IBAN:
            return validate_iban(candidate)
        if kind is DisclosureKind.CRYPTO_WALLET_BTC:
            return validate_btc(candidate)
        if kind is DisclosureKind.CRYPTO_WALLET_ETH:
            return validate_eth(candidate)
        if kind is DisclosureKind.BANK_ACCOUNT:
            return (
                candidate.isdigit()
                and self.config.min_account_digits <= len(candidate) <= self.config.max_account_digits
            )
        if kind is DisclosureKind.OTHER:
            return any(rx.search(candidate) for _, rx in self._extras)
        raise ValidationError(f"unknown disclosure kind {kind!r}")

    # -- scanning ---------------------------------------------------------------

    def scan(self, message: Message, *, seeded_at: datetime) -> list[DisclosureEvent]:
        """Find every validated identifier in one attacker message.

        Values are normalized (spaces removed, IBAN uppercased, ETH hex
        lowercased) before dedup, so one identifier written twice in two
        spellings yields a single event. Scanning a defender message is a
        programming error, not a no-op.
        """
        if message.direction is not Direction.ATTACKER:
            raise ValidationError("disclosures are only scanned in attacker messages")
        text = message.body
        found: dict[tuple[DisclosureKind, str], None] = {}
        claimed: list[tuple[int, int]] = []

        for start, end, compact in self._iban_candidates(text):
            if validate_iban(compact):
                found.setdefault((DisclosureKind.IBAN, compact.upper()), None)
                claimed.append((start, end))

        for m in _BTC_CANDIDATE.finditer(text):
            if self._overlaps(claimed, m.span()):
                continue
            if validate_btc(m.group()):
                found.setdefault((DisclosureKind.CRYPTO_WALLET_BTC, m.group()), None)
                claimed.append(m.span())

        for m in _ETH_CANDIDATE.finditer(text):
            if self._overlaps(claimed, m.span()):
                continue
            found.setdefault((DisclosureKind.CRYPTO_WALLET_ETH, m.group().lower()), None)
            claimed.append(m.span())

        for start, end, digits in self._account_candidates(text):
            if self._overlaps(claimed, (start, end)):
                continue
            found.setdefault((DisclosureKind.BANK_ACCOUNT, digits), None)

        for name, rx in self._extras:
            for m in rx.finditer(text):
                found.setdefault((DisclosureKind.OTHER, m.group()), None)

        elapsed = message.timestamp - seeded_at
        if elapsed < timedelta(0):
            elapsed = timedelta(0)
        return [
            DisclosureEvent(
                id=0,
                engagement_id=message.engagement_id,
                message_id=message.id,
                kind=kind,
                value=value,
                turn_index=message.position,
                elapsed=elapsed,
            )
            for kind, value in found
        ]

    # -- candidate extraction ---------------------------------------------------

    def _iban_candidates(self, text: str):
        """Yield (start, end, compact) for country-length-sized alnum runs,
        tolerating single spaces between groups."""
        for m in _IBAN_ANCHOR.finditer(text):
            start = m.start()
            if start > 0 and _WORDCHAR.match(text[start - 1]):
                continue
            expected = IBAN_LENGTHS.get(text[start : start + 2].upper())
            if expected is None:
                continue
            compact = []
            pos = start
            while pos < len(text) and len(compact) < expected:
                ch = text[pos]
                if _WORDCHAR.match(ch):
                    compact.append(ch)
                    pos += 1
                elif ch == " " and compact and pos + 1 < len(text) and _WORDCHAR.match(text[pos + 1]):
                    pos += 1
                else:
                    break
            if len(compact) != expected:
                continue
            if pos < len(text) and _WORDCHAR.match(text[pos]):
                continue  # run continues; this is part of a longer token
            yield start, pos, "".join(compact)

    def _account_candidates(self, text: str):
        if self._keyword_re is None:
            return
        boundaries = [0]
        for m in _SENTENCE_SPLIT.finditer(text):
            boundaries.append(m.end())
        boundaries.append(len(text))
        sentences = [
            (boundaries[i], boundaries[i + 1]) for i in range(len(boundaries) - 1)
        ]
        for m in self._digit_run.finditer(text):
            lo, hi = m.span()
            for s_lo, s_hi in sentences:
                if s_lo <= lo < s_hi:
                    if self._keyword_re.search(text[s_lo:s_hi]):
                        yield lo, hi, m.group()
                    break

    @staticmethod
    def _overlaps(claimed: list[tuple[int, int]], span: tuple[int, int]) -> bool:
        lo, hi = span
        return any(lo < c_hi and c_lo < hi for c_lo, c_hi in claimed)
