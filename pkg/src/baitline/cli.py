"""Command-line entry point.

Non-interactive throughout; anything a command prints to stdout is meant for
pipes. Failures produce one JSON line on stderr and a class-specific exit
code: 1 usage, 2 validation (including not-found and conflicts), 3 transport
or provider trouble, 4 integrity violations.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .config import ServiceConfig, build_runtime, load_config
from .errors import (
    CorpusFormatError,
    GenerationError,
    IntegrityError,
    NotFoundError,
    StateError,
    TransportError,
    ValidationError,
)
from .model import Mode
from .reporting import build_report, render_summary, report_json, write_engagement_csv
from .runtime import Runtime
from .simulate import load_experiment, run_experiment
from .store import Store, export_jsonl, import_jsonl
from .util import parse_rfc3339


class _Parser(argparse.ArgumentParser):
    # usage failures are exit code 1; argparse's default of 2 is reserved
    # for validation errors here
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fail_line(code: str, message: str, line: int | None = None) -> None:
    payload: dict = {"error": code, "message": message}
    if line is not None:
        payload["line"] = line
    print(json.dumps(payload, ensure_ascii=False), file=sys.stderr)


def _config(args: argparse.Namespace) -> ServiceConfig:
    path = args.config or os.environ.get("BAITLINE_CONFIG")
    return load_config(path)


def _runtime(args: argparse.Namespace) -> Runtime:
    return build_runtime(_config(args))


def _store_only(args: argparse.Namespace) -> Store:
    config = _config(args)
    return Store(config.store_path, death_threshold=config.death_threshold)


def _mode(text: str) -> Mode:
    try:
        return Mode(text)
    except ValueError:
        raise ValidationError(f"mode must be I or II, got {text!r}") from None


# -- commands ----------------------------------------------------------------


def cmd_seed(args: argparse.Namespace) -> int:
    config = _config(args)
    runtime = build_runtime(config)
    mode = _mode(args.mode) if args.mode else config.default_mode
    body = Path(args.body).read_text(encoding="utf-8") if args.body else None
    engagement_id = runtime.seed(
        args.address, args.persona, mode, body=body, subject=args.subject
    )
    print(engagement_id)
    return 0


def cmd_poll(args: argparse.Namespace) -> int:
    runtime = _runtime(args)
    sent = runtime.retry_outbox()
    result = runtime.poll_cycle()
    print(
        f"ingested {len(result.ingested)} quarantined {len(result.quarantined)}"
        f" disclosures {len(result.disclosures)} suggestions {len(result.suggestions)}"
        f" outbox_sent {len(sent)}"
    )
    for engagement_id, message in result.failures:
        _fail_line("cycle_failure", f"engagement {engagement_id}: {message}")
    return 0


def cmd_review_list(args: argparse.Namespace) -> int:
    runtime = _runtime(args)
    for item, suggestion in runtime.store.pending_reviews():
        view = runtime.store.engagement_view(item.engagement_id)
        excerpt = " ".join(suggestion.suggested_body.split())
        if len(excerpt) > 70:
            excerpt = excerpt[:67] + "..."
        print(
            f"{suggestion.id}\t{item.engagement_id}\t{view.mode.value}"
            f"\t{view.scammer_address}\t{excerpt}"
        )
    return 0


def _print_decision(runtime: Runtime, suggestion_id: int) -> None:
    item = runtime.store.review_for_suggestion(suggestion_id)
    suggestion = runtime.store.get_suggestion(suggestion_id)
    distance = "-" if suggestion.edit_distance is None else suggestion.edit_distance
    print(f"{suggestion_id}\t{item.state.value}\tedit_distance={distance}")


def cmd_review_approve(args: argparse.Namespace) -> int:
    runtime = _runtime(args)
    runtime.decide(args.id, "approve", reviewer=args.reviewer)
    _print_decision(runtime, args.id)
    return 0


def cmd_review_edit(args: argparse.Namespace) -> int:
    runtime = _runtime(args)
    if args.file:
        final = Path(args.file).read_text(encoding="utf-8")
    elif args.text is not None:
        final = args.text
    else:
        raise ValidationError("review edit needs --file or --text")
    runtime.decide(args.id, "edit", final_body=final, reviewer=args.reviewer)
    _print_decision(runtime, args.id)
    return 0


def cmd_review_discard(args: argparse.Namespace) -> int:
    runtime = _runtime(args)
    runtime.decide(args.id, "discard", reviewer=args.reviewer)
    _print_decision(runtime, args.id)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    if args.jsonl:
        snapshot = import_jsonl(args.jsonl)
    else:
        snapshot = _store_only(args).snapshot()
    mode = _mode(args.mode) if args.mode else None
    since = parse_rfc3339(args.since) if args.since else None
    report = build_report(snapshot, mode=mode, since=since)
    text = report_json(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.figures:
        outdir = Path(args.figures)
        outdir.mkdir(parents=True, exist_ok=True)
        from .figures import render_figures  # matplotlib import is slow; keep it off other paths

        written = render_figures(report, outdir)
        summary_path = outdir / "summary.txt"
        summary_path.write_text(render_summary(report), encoding="utf-8")
        written.append(summary_path)
        written.append(write_engagement_csv(snapshot, outdir / "engagements.csv"))
        for path in written:
            print(f"wrote {path}", file=sys.stderr)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    experiment = load_experiment(args.experiment)
    seed = experiment.seed if args.seed is None else args.seed
    snapshot = run_experiment(
        list(experiment.population),
        experiment.defender,
        experiment.horizon,
        seed=seed,
        start=experiment.start,
    )
    export_jsonl(snapshot, args.out)
    messages = sum(len(e.messages) for e in snapshot.engagements)
    print(f"wrote {args.out} ({len(snapshot.engagements)} engagements, {messages} messages)")
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    snapshot = _store_only(args).snapshot()
    export_jsonl(snapshot, args.out)
    print(f"wrote {args.out} ({len(snapshot.engagements)} engagements)")
    return 0


def cmd_import(args: argparse.Namespace) -> int:
    snapshot = import_jsonl(args.infile)
    store = _store_only(args)
    store.import_snapshot(snapshot)
    messages = sum(len(e.messages) for e in snapshot.engagements)
    print(f"imported {len(snapshot.engagements)} engagements, {messages} messages")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    config = _config(args)
    runtime = build_runtime(config)
    app = create_app(runtime, default_mode=config.default_mode)
    host = args.host or config.listen_host
    port = args.port or config.listen_port
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0


# -- parser ------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="baitline", description="scambait engagement platform")
    parser.add_argument("--config", help="service config file (or BAITLINE_CONFIG)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("seed", help="open an engagement and send or draft its first message")
    p.add_argument("--address", required=True, help="scammer address to bait")
    p.add_argument("--persona", required=True, help="persona id")
    p.add_argument("--mode", choices=["I", "II"], help="engagement mode (default from config)")
    p.add_argument("--body", help="file with an explicit seed body (skips suggestion)")
    p.add_argument("--subject", help="seed subject line")
    p.set_defaults(func=cmd_seed)

    p = sub.add_parser("poll", help="run one inbound fetch cycle")
    p.set_defaults(func=cmd_poll)

    p = sub.add_parser("review", help="terminal review queue")
    rsub = p.add_subparsers(dest="review_command", required=True)
    r = rsub.add_parser("list", help="pending suggestions, tab-separated")
    r.set_defaults(func=cmd_review_list)
    r = rsub.add_parser("approve", help="send a suggestion verbatim")
    r.add_argument("id", type=int, help="suggestion id")
    r.add_argument("--reviewer", default="cli")
    r.set_defaults(func=cmd_review_approve)
    r = rsub.add_parser("edit", help="send an edited body")
    r.add_argument("id", type=int, help="suggestion id")
    r.add_argument("--file", help="file with the final body")
    r.add_argument("--text", help="final body given inline")
    r.add_argument("--reviewer", default="cli")
    r.set_defaults(func=cmd_review_edit)
    r = rsub.add_parser("discard", help="drop a suggestion, send nothing")
    r.add_argument("id", type=int, help="suggestion id")
    r.add_argument("--reviewer", default="cli")
    r.set_defaults(func=cmd_review_discard)

    p = sub.add_parser("report", help="compute metrics over the store or a corpus file")
    p.add_argument("--jsonl", help="corpus file instead of the live store")
    p.add_argument("--out", help="write report JSON here instead of stdout")
    p.add_argument("--mode", choices=["I", "II"], help="restrict to one mode")
    p.add_argument("--since", help="RFC-3339 floor on seeded_at")
    p.add_argument("--figures", help="directory for PNG figures, summary.txt and engagements.csv")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("simulate", help="run a scripted-scammer experiment")
    p.add_argument("--config", dest="experiment", required=True, help="experiment file")
    p.add_argument("--seed", type=int, help="override the experiment's seed")
    p.add_argument("--out", required=True, help="corpus JSONL to write")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("export", help="write the live store as corpus JSONL")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("import", help="load a corpus JSONL into an empty store")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CorpusFormatError as exc:
        _fail_line("validation", str(exc), line=exc.line_no)
        return 2
    except (ValidationError, NotFoundError) as exc:
        _fail_line("validation", str(exc))
        return 2
    except StateError as exc:
        _fail_line("conflict", str(exc))
        return 2
    except (TransportError, GenerationError) as exc:
        _fail_line("transport", str(exc))
        return 3
    except IntegrityError as exc:
        _fail_line("integrity", str(exc))
        return 4
    except OSError as exc:
        _fail_line("io", str(exc))
        return 3


if __name__ == "__main__":
    sys.exit(main())
