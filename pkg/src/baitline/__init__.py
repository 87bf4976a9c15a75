"""Scambait engagement platform: seed conversations with scammers, draft
replies with a language model, gate them through human review, detect
financial disclosures, and measure the whole exchange."""

from .detector import Detector, DetectorConfig, validate_btc, validate_eth, validate_iban
from .errors import (
    BaitlineError,
    CorpusFormatError,
    GenerationError,
    IntegrityError,
    NotFoundError,
    RetryableGenerationError,
    RetryableTransportError,
    StateError,
    TransportError,
    ValidationError,
)
from .gateway import FileSpoolTransport, LoopbackTransport, MailGateway, SpoolMessage
from .metrics import UNDEFINED, Undefined
from .model import (
    CorpusSnapshot,
    Direction,
    DisclosureEvent,
    DisclosureKind,
    Engagement,
    EngagementStatus,
    Message,
    Mode,
    ModeConfig,
    Persona,
    ReviewItem,
    ReviewState,
    SpecialContent,
    SuggestionRecord,
)
from .reporting import build_report, render_summary, report_json
from .review import ReviewPipeline, levenshtein
from .runtime import CycleResult, Runtime
from .simulate import (
    DefenderConfig,
    LatencyModel,
    ScammerProfile,
    VirtualClock,
    load_experiment,
    run_experiment,
)
from .store import Store, export_jsonl, import_jsonl
from .suggest import (
    CompletionProvider,
    HttpProvider,
    PromptTemplate,
    ReplayProvider,
    StubProvider,
    build_prompt,
    suggest_reply,
)

__version__ = "0.1.0"

__all__ = [
    "BaitlineError",
    "CompletionProvider",
    "CorpusFormatError",
    "CorpusSnapshot",
    "CycleResult",
    "DefenderConfig",
    "Detector",
    "DetectorConfig",
    "Direction",
    "DisclosureEvent",
    "DisclosureKind",
    "Engagement",
    "EngagementStatus",
    "FileSpoolTransport",
    "GenerationError",
    "HttpProvider",
    "IntegrityError",
    "LatencyModel",
    "LoopbackTransport",
    "MailGateway",
    "Message",
    "Mode",
    "ModeConfig",
    "NotFoundError",
    "Persona",
    "PromptTemplate",
    "ReplayProvider",
    "RetryableGenerationError",
    "RetryableTransportError",
    "ReviewItem",
    "ReviewPipeline",
    "ReviewState",
    "Runtime",
    "ScammerProfile",
    "SpecialContent",
    "SpoolMessage",
    "StateError",
    "Store",
    "StubProvider",
    "SuggestionRecord",
    "TransportError",
    "UNDEFINED",
    "Undefined",
    "ValidationError",
    "VirtualClock",
    "build_prompt",
    "build_report",
    "export_jsonl",
    "import_jsonl",
    "levenshtein",
    "load_experiment",
    "render_summary",
    "report_json",
    "run_experiment",
    "suggest_reply",
    "validate_btc",
    "validate_eth",
    "validate_iban",
]
