"""Reply suggestion: prompt assembly plus a pluggable completion provider.

A single prompt carries everything: the persona preamble, a transcript
window, and the standing objective. When a provider enforces a character
budget the transcript gives way first, oldest messages dropped one by one;
the preamble and objective always survive.

Providers implement one method, complete(prompt) -> text. The HTTP provider
speaks the minimal JSON contract documented in docs/api.md; the stub and
replay providers exist so every test runs offline.
"""

from __future__ import annotations

import hashlib
import json
from abc import ABC, abstractmethod
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path
from typing import Callable

import httpx

from .errors import GenerationError, RetryableGenerationError, ValidationError
from .model import Direction, Engagement, Persona, SuggestionRecord
from .store import Store
from .util import split_kv_header


@dataclass(frozen=True, slots=True)
class PromptTemplate:
    """Skeleton of the single prompt sent to the provider.

    The preamble is plain text with {persona.<field>} placeholders. The
    transcript window caps how many of the most recent messages are shown.
    """

    id: str
    system_preamble: str
    transcript_window: int
    objective_clause: str

    def __post_init__(self) -> None:
        if self.transcript_window < 0:
            raise ValidationError("transcript_window cannot be negative")
        if not self.system_preamble.strip():
            raise ValidationError("template preamble must not be empty")

    @classmethod
    def from_file(cls, path: str | Path) -> "PromptTemplate":
        """Load a template file: `Key: Value` header lines (id, window,
        objective), a blank line, then the preamble text."""
        header, body = split_kv_header(Path(path).read_text(encoding="utf-8"))
        try:
            window = int(header.get("window", "10"))
        except ValueError as exc:
            raise ValidationError(f"{path}: window must be an integer") from exc
        return cls(
            id=header.get("id", Path(path).stem),
            system_preamble=body.strip(),
            transcript_window=window,
            objective_clause=header.get("objective", "").strip(),
        )


class CompletionProvider(ABC):
    """Contract for text completion backends."""

    endpoint: str = ""
    model_name: str = ""
    timeout: timedelta = timedelta(seconds=30)
    max_prompt_chars: int | None = None

    @abstractmethod
    def complete(self, prompt: str) -> str:
        raise NotImplementedError


class StubProvider(CompletionProvider):
    """Deterministic offline provider: same prompt and seed, same reply."""

    model_name = "stub"

    _OPENERS = (
        "Oh my, thank you for getting back to me so quickly.",
        "I do apologise, my nephew usually helps me with the computer.",
        "That sounds wonderful, I have been hoping for good news.",
        "Goodness, I nearly missed your message in my inbox.",
        "I read your message twice to make sure I understood.",
    )
    _ASKS = (
        "Could you tell me exactly where I should send the money?",
        "Which account should I use for the transfer, dear?",
        "My bank asked me for the full payment details, could you spell them out?",
        "Before I go to the bank, what reference should I write on the form?",
        "Is there a safer way to get the funds to you directly?",
    )

    def __init__(self, seed: int = 0, script: list[str] | None = None):
        self.seed = seed
        self.script = list(script) if script else None
        self._calls = 0

    def complete(self, prompt: str) -> str:
        self._calls += 1
        if self.script:
            return self.script[(self._calls - 1) % len(self.script)]
        digest = hashlib.sha256(f"{self.seed}:{prompt}".encode("utf-8")).digest()
        opener = self._OPENERS[digest[0] % len(self._OPENERS)]
        ask = self._ASKS[digest[1] % len(self._ASKS)]
        return f"{opener} {ask}"


class ReplayProvider(CompletionProvider):
    """Serves completions recorded earlier; never touches the network.

    The fixture is a JSON object mapping sha256(prompt) hex digests to reply
    text. A prompt with no recorded completion is an error, which keeps
    accidental live calls impossible in tests.
    """

    model_name = "replay"

    def __init__(self, fixture_path: str | Path):
        self.fixture_path = Path(fixture_path)
        self._table: dict[str, str] = json.loads(self.fixture_path.read_text(encoding="utf-8"))

    def complete(self, prompt: str) -> str:
        key = hashlib.sha256(prompt.encode("utf-8")).hexdigest()
        if key not in self._table:
            raise GenerationError(f"no recorded completion for prompt digest {key[:12]}")
        return self._table[key]


class RecordingProvider(CompletionProvider):
    """Wraps a live provider and captures its answers into a replay fixture."""

    def __init__(self, inner: CompletionProvider, fixture_path: str | Path):
        self.inner = inner
        self.fixture_path = Path(fixture_path)
        self.model_name = inner.model_name
        if self.fixture_path.exists():
            self._table = json.loads(self.fixture_path.read_text(encoding="utf-8"))
        else:
            self._table = {}

    def complete(self, prompt: str) -> str:
        text = self.inner.complete(prompt)
        self._table[hashlib.sha256(prompt.encode("utf-8")).hexdigest()] = text
        self.fixture_path.parent.mkdir(parents=True, exist_ok=True)
        self.fixture_path.write_text(
            json.dumps(self._table, indent=2, ensure_ascii=False, sort_keys=True), encoding="utf-8"
        )
        return text


class HttpProvider(CompletionProvider):
    """POSTs {model, prompt, max_tokens, temperature} and expects {text}."""

    def __init__(
        self,
        endpoint: str,
        model_name: str,
        *,
        timeout: timedelta = timedelta(seconds=30),
        max_prompt_chars: int | None = None,
        temperature: float = 0.7,
        max_tokens: int = 400,
    ):
        self.endpoint = endpoint
        self.model_name = model_name
        self.timeout = timeout
        self.max_prompt_chars = max_prompt_chars
        self.temperature = temperature
        self.max_tokens = max_tokens

    def complete(self, prompt: str) -> str:
        payload = {
            "model": self.model_name,
            "prompt": prompt,
            "max_tokens": self.max_tokens,
            "temperature": self.temperature,
        }
        try:
            response = httpx.post(self.endpoint, json=payload, timeout=self.timeout.total_seconds())
        except httpx.TimeoutException as exc:
            raise RetryableGenerationError(f"completion timed out after {self.timeout}") from exc
        except httpx.HTTPError as exc:
            raise RetryableGenerationError(f"completion endpoint unreachable: {exc}") from exc
        if response.status_code != 200:
            raise GenerationError(f"completion endpoint returned {response.status_code}")
        try:
            text = response.json()["text"]
        except (KeyError, ValueError) as exc:
            raise GenerationError("completion endpoint returned malformed JSON") from exc
        return text


def _render_preamble(template: PromptTemplate, persona: Persona) -> str:
    try:
        return template.system_preamble.format(persona=persona)
    except (KeyError, AttributeError, IndexError) as exc:
        raise ValidationError(f"template {template.id!r} has a bad placeholder: {exc}") from exc


def _transcript_lines(engagement: Engagement, persona: Persona, window: int) -> list[str]:
    recent = engagement.messages[-window:] if window else ()
    lines = []
    for msg in recent:
        speaker = "Scammer" if msg.direction is Direction.ATTACKER else persona.display_name
        lines.append(f"{speaker}: {msg.body}")
    return lines


def build_prompt(
    engagement: Engagement,
    persona: Persona,
    template: PromptTemplate,
    *,
    max_chars: int | None = None,
) -> str:
    """Assemble the provider prompt.

    Over-budget prompts lose transcript lines oldest-first. If even an empty
    transcript cannot fit the budget the template itself is too big, which is
    a configuration problem, not something to truncate silently.
    """
    preamble = _render_preamble(template, persona)
    objective = template.objective_clause or "Write the next reply."
    lines = _transcript_lines(engagement, persona, template.transcript_window)

    def assemble(transcript: list[str]) -> str:
        if transcript:
            middle = "Conversation so far:\n" + "\n".join(transcript)
        else:
            middle = "No messages have been exchanged yet; write the opening message."
        return f"{preamble}\n\n{middle}\n\n{objective}\nReply as {persona.display_name}:"

    prompt = assemble(lines)
    while max_chars is not None and len(prompt) > max_chars and lines:
        lines.pop(0)
        prompt = assemble(lines)
    if max_chars is not None and len(prompt) > max_chars:
        raise ValidationError(
            f"prompt exceeds the provider budget of {max_chars} chars even with an empty transcript"
        )
    return prompt


def suggest_reply(
    store: Store,
    engagement_id: int,
    template: PromptTemplate,
    provider: CompletionProvider,
    *,
    clock: Callable[[], datetime] | None = None,
) -> SuggestionRecord:
    """Generate and persist one reply suggestion for an engagement."""
    engagement = store.engagement_view(engagement_id)
    persona = store.get_persona(engagement.persona_id)
    prompt = build_prompt(engagement, persona, template, max_chars=provider.max_prompt_chars)
    text = provider.complete(prompt).strip()
    if not text:
        raise GenerationError("provider returned empty text")
    moment = (clock if clock is not None else store.clock)()
    return store.append(
        SuggestionRecord(
            id=0,
            engagement_id=engagement_id,
            created_at=moment,
            prompt_text=prompt,
            suggested_body=text,
        )
    )


DEFAULT_TEMPLATE = PromptTemplate(
    id="default",
    system_preamble=(
        "You are {persona.display_name}. {persona.background}\n"
        "Write emails in a {persona.tone} voice. Never reveal that you are "
        "an assistant, never share real payment details, and keep the other "
        "party talking."
    ),
    transcript_window=10,
    objective_clause="Keep them engaged and steer them toward telling you where the money should go.",
)
