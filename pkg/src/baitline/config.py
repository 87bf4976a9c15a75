"""Deployment configuration: one key-value file, overridable from the
environment, turned into a wired Runtime."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from datetime import timedelta
from pathlib import Path

from .detector import Detector, DetectorConfig
from .errors import ValidationError
from .gateway import FileSpoolTransport
from .model import Mode, Persona
from .runtime import Runtime
from .store import DEFAULT_DEATH_THRESHOLD, Store
from .suggest import (
    DEFAULT_TEMPLATE,
    CompletionProvider,
    HttpProvider,
    PromptTemplate,
    ReplayProvider,
    StubProvider,
)
from .util import parse_duration, read_kv_file

ENV_PREFIX = "BAITLINE_"

# config key -> environment variable suffix; BAITLINE_STORE beats `store:`.
_ENV_KEYS = (
    "store",
    "spool",
    "listen",
    "provider",
    "provider_endpoint",
    "provider_model",
    "provider_fixture",
    "provider_seed",
    "default_mode",
    "personas",
    "template",
    "detector",
    "death_threshold",
    "seed_subject",
)


@dataclass(frozen=True, slots=True)
class ServiceConfig:
    store_path: Path = Path("baitline.jsonl")
    spool_dir: Path = Path("spool")
    listen_host: str = "127.0.0.1"
    listen_port: int = 8820
    provider: str = "stub"
    provider_endpoint: str = ""
    provider_model: str = ""
    provider_fixture: Path | None = None
    provider_seed: int = 0
    default_mode: Mode = Mode.MODE_II
    persona_dir: Path | None = None
    template_path: Path | None = None
    detector_path: Path | None = None
    death_threshold: timedelta = DEFAULT_DEATH_THRESHOLD
    seed_subject: str = "Hello there"
    extra: dict[str, str] = field(default_factory=dict)


def load_config(path: str | Path | None = None, env: dict[str, str] | None = None) -> ServiceConfig:
    """Read the config file (if any), then apply BAITLINE_* overrides."""
    env = os.environ if env is None else env
    kv = dict(read_kv_file(path)) if path is not None else {}
    for key in _ENV_KEYS:
        value = env.get(ENV_PREFIX + key.upper())
        if value is not None:
            kv[key] = value

    listen = kv.pop("listen", "127.0.0.1:8820")
    host, _, port_text = listen.rpartition(":")
    if not host or not port_text.isdigit():
        raise ValidationError(f"listen must look like host:port, got {listen!r}")

    try:
        return ServiceConfig(
            store_path=Path(kv.pop("store", "baitline.jsonl")),
            spool_dir=Path(kv.pop("spool", "spool")),
            listen_host=host,
            listen_port=int(port_text),
            provider=kv.pop("provider", "stub"),
            provider_endpoint=kv.pop("provider_endpoint", ""),
            provider_model=kv.pop("provider_model", ""),
            provider_fixture=Path(kv.pop("provider_fixture")) if "provider_fixture" in kv else None,
            provider_seed=int(kv.pop("provider_seed", "0")),
            default_mode=Mode(kv.pop("default_mode", "II")),
            persona_dir=Path(kv.pop("personas")) if "personas" in kv else None,
            template_path=Path(kv.pop("template")) if "template" in kv else None,
            detector_path=Path(kv.pop("detector")) if "detector" in kv else None,
            death_threshold=parse_duration(kv.pop("death_threshold", "28d")),
            seed_subject=kv.pop("seed_subject", "Hello there"),
            extra=kv,
        )
    except ValueError as exc:
        raise ValidationError(f"bad config value: {exc}") from exc


def load_persona_file(path: str | Path) -> Persona:
    kv = read_kv_file(path)
    try:
        return Persona(
            id=kv["id"],
            display_name=kv["display_name"],
            background=kv.get("background", ""),
            tone=kv.get("tone", ""),
            mailbox_address=kv["mailbox"],
        )
    except KeyError as exc:
        raise ValidationError(f"persona file {path} is missing key {exc}") from exc


def _build_provider(config: ServiceConfig) -> CompletionProvider:
    if config.provider == "stub":
        return StubProvider(seed=config.provider_seed)
    if config.provider == "replay":
        if config.provider_fixture is None:
            raise ValidationError("provider=replay needs provider_fixture")
        return ReplayProvider(config.provider_fixture)
    if config.provider == "http":
        if not config.provider_endpoint:
            raise ValidationError("provider=http needs provider_endpoint")
        return HttpProvider(config.provider_endpoint, config.provider_model or "default")
    raise ValidationError(f"unknown provider kind {config.provider!r}")


def build_runtime(config: ServiceConfig) -> Runtime:
    store = Store(config.store_path, death_threshold=config.death_threshold)
    transport = FileSpoolTransport(config.spool_dir)
    template: PromptTemplate = DEFAULT_TEMPLATE
    if config.template_path is not None:
        template = PromptTemplate.from_file(config.template_path)
    detector = None
    if config.detector_path is not None:
        detector = Detector(DetectorConfig.from_file(config.detector_path))
    runtime = Runtime(
        store,
        transport,
        _build_provider(config),
        template=template,
        detector=detector,
        seed_subject=config.seed_subject,
    )
    if config.persona_dir is not None:
        for path in sorted(Path(config.persona_dir).glob("*.persona")):
            runtime.ensure_persona(load_persona_file(path))
    return runtime
