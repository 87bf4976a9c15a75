"""End-to-end exercises of the command surface: exit codes, the one-line
JSON stderr contract, and the report/corpus round trips."""

import json
from datetime import timedelta
from pathlib import Path

import pytest

from baitline import cli
from baitline.config import load_config, load_persona_file
from baitline.errors import GenerationError, IntegrityError, ValidationError
from baitline.gateway import render_spool_text
from baitline.model import Mode
from baitline.util import parse_rfc3339

PERSONA_TEXT = """\
id: margaret
display_name: Margaret Whitfield
background: retired schoolteacher
tone: warm, chatty
mailbox: margaret.whitfield@mailhost.example
"""

EXPERIMENT_TEXT = """\
mode: I
horizon: 30d
seed: 11
seed_spacing: 7h
start: 2026-02-02T09:00:00Z

population.eager.count: 6
population.eager.reply_probability: 1.0
population.eager.disclose_at_turn: 4
population.eager.disclosure_kind: iban
population.eager.death_after_gap: 2d
"""


def make_config(tmp_path, **overrides):
    personas = tmp_path / "personas"
    personas.mkdir(exist_ok=True)
    (personas / "margaret.persona").write_text(PERSONA_TEXT, encoding="utf-8")
    kv = {
        "store": str(tmp_path / "store.jsonl"),
        "spool": str(tmp_path / "spool"),
        "provider": "stub",
        "provider_seed": "7",
        "default_mode": "II",
        "personas": str(personas),
    }
    kv.update(overrides)
    path = tmp_path / "service.conf"
    path.write_text("".join(f"{k}: {v}\n" for k, v in kv.items()), encoding="utf-8")
    return str(path)


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def stderr_payload(err):
    lines = [line for line in err.splitlines() if line.strip()]
    assert len(lines) == 1, f"expected one stderr line, got {err!r}"
    return json.loads(lines[0])


# -- config loading ----------------------------------------------------------------


def test_load_config_defaults():
    config = load_config(None, env={})
    assert config.store_path == Path("baitline.jsonl")
    assert config.default_mode is Mode.MODE_II
    assert config.listen_port == 8820
    assert config.death_threshold == timedelta(days=28)


def test_env_overrides_file(tmp_path):
    path = make_config(tmp_path, store="from-file.jsonl")
    config = load_config(path, env={"BAITLINE_STORE": "from-env.jsonl"})
    assert config.store_path == Path("from-env.jsonl")


def test_bad_listen_rejected(tmp_path):
    path = make_config(tmp_path, listen="nonsense")
    with pytest.raises(ValidationError):
        load_config(path, env={})


def test_bad_mode_rejected(tmp_path):
    path = make_config(tmp_path, default_mode="III")
    with pytest.raises(ValidationError):
        load_config(path, env={})


def test_persona_file_missing_key(tmp_path):
    path = tmp_path / "p.persona"
    path.write_text("id: x\ndisplay_name: X\n", encoding="utf-8")  # no mailbox
    with pytest.raises(ValidationError):
        load_persona_file(path)


# -- usage and error mapping --------------------------------------------------------


def test_no_command_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 1


def test_unknown_command_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 1


def test_integrity_maps_to_exit_4(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr(cli, "cmd_poll", lambda args: (_ for _ in ()).throw(IntegrityError("boom")))
    code, out, err = run(capsys, "poll")
    assert code == 4
    assert stderr_payload(err) == {"error": "integrity", "message": "boom"}


def test_generation_maps_to_exit_3(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr(cli, "cmd_poll", lambda args: (_ for _ in ()).throw(GenerationError("no text")))
    code, out, err = run(capsys, "poll")
    assert code == 3
    assert stderr_payload(err)["error"] == "transport"


def test_missing_corpus_file_is_io_error(tmp_path, capsys):
    cfg = make_config(tmp_path)
    code, out, err = run(capsys, "--config", cfg, "report", "--jsonl", str(tmp_path / "absent.jsonl"))
    assert code == 3
    assert stderr_payload(err)["error"] == "io"


# -- seed / review ------------------------------------------------------------------


def test_seed_review_approve_cycle(tmp_path, capsys):
    cfg = make_config(tmp_path)
    code, out, _ = run(
        capsys, "--config", cfg, "seed",
        "--address", "scam@lure.example", "--persona", "margaret",
    )
    assert code == 0
    assert out == "1\n"

    code, out, _ = run(capsys, "--config", cfg, "review", "list")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 1
    sid, eid, mode, address, excerpt = lines[0].split("\t")
    assert (eid, mode, address) == ("1", "II", "scam@lure.example")
    assert excerpt

    code, out, _ = run(capsys, "--config", cfg, "review", "approve", sid)
    assert code == 0
    assert out == f"{sid}\tapproved\tedit_distance=0\n"
    assert (tmp_path / "spool" / "out").glob("*.msg")

    # the queue is drained and a second decision is refused
    code, out, _ = run(capsys, "--config", cfg, "review", "list")
    assert out == ""
    code, _, err = run(capsys, "--config", cfg, "review", "approve", sid)
    assert code == 2
    assert stderr_payload(err)["error"] == "conflict"


def test_seed_unknown_persona(tmp_path, capsys):
    cfg = make_config(tmp_path)
    code, _, err = run(
        capsys, "--config", cfg, "seed", "--address", "x@y.example", "--persona", "nobody"
    )
    assert code == 2
    assert stderr_payload(err)["error"] == "validation"


def test_review_edit_with_text(tmp_path, capsys):
    cfg = make_config(tmp_path)
    run(capsys, "--config", cfg, "seed", "--address", "s@lure.example", "--persona", "margaret")
    _, out, _ = run(capsys, "--config", cfg, "review", "list")
    sid = out.split("\t", 1)[0]
    code, out, _ = run(
        capsys, "--config", cfg, "review", "edit", sid, "--text", "A fully rewritten body."
    )
    assert code == 0
    printed = out.strip().split("\t")
    assert printed[1] == "edited"
    assert printed[2].startswith("edit_distance=")
    assert int(printed[2].split("=")[1]) > 0


def test_review_edit_needs_text_or_file(tmp_path, capsys):
    cfg = make_config(tmp_path)
    run(capsys, "--config", cfg, "seed", "--address", "s@lure.example", "--persona", "margaret")
    _, out, _ = run(capsys, "--config", cfg, "review", "list")
    sid = out.split("\t", 1)[0]
    code, _, err = run(capsys, "--config", cfg, "review", "edit", sid)
    assert code == 2
    assert stderr_payload(err)["error"] == "validation"


def test_config_via_environment(tmp_path, capsys, monkeypatch):
    cfg = make_config(tmp_path)
    monkeypatch.setenv("BAITLINE_CONFIG", cfg)
    code, out, _ = run(
        capsys, "seed", "--address", "env@lure.example", "--persona", "margaret"
    )
    assert code == 0
    assert out == "1\n"


# -- poll ---------------------------------------------------------------------------


def test_poll_picks_up_spooled_reply(tmp_path, capsys):
    cfg = make_config(tmp_path, default_mode="I")
    run(capsys, "--config", cfg, "seed", "--address", "scam@lure.example", "--persona", "margaret")
    seed_stamp = parse_rfc3339("2026-02-02T09:00:00Z")  # any stamp after the seed works
    reply = render_spool_text(
        "r-0001",
        "scam@lure.example",
        "margaret.whitfield@mailhost.example",
        "Re: hello",
        seed_stamp + timedelta(days=400),
        "My IBAN is DE89370400440532013000, send the fee.",
    )
    (tmp_path / "spool" / "in" / "r-0001.msg").write_text(reply, encoding="utf-8")
    code, out, _ = run(capsys, "--config", cfg, "poll")
    assert code == 0
    assert out.startswith("ingested 1 quarantined 0 disclosures 1 suggestions 1")


# -- simulate / report / export / import ---------------------------------------------


@pytest.fixture(scope="module")
def sim_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("sim")
    exp = root / "run.exp"
    exp.write_text(EXPERIMENT_TEXT, encoding="utf-8")
    out = root / "corpus.jsonl"
    code = cli.main(["simulate", "--config", str(exp), "--out", str(out)])
    assert code == 0
    return out


def test_simulate_writes_corpus(sim_corpus, capsys):
    lines = sim_corpus.read_text(encoding="utf-8").splitlines()
    assert json.loads(lines[0])["schema"] == "baitline/1"
    assert len(lines) > 10


def test_report_to_stdout(sim_corpus, capsys):
    code, out, _ = run(capsys, "report", "--jsonl", str(sim_corpus))
    assert code == 0
    report = json.loads(out)
    assert report["schema"] == "baitline-report/1"
    assert report["counts"]["seeded"] == 6
    assert report["idr_all"] == 1.0  # everyone replies and discloses


def test_report_bytes_stable_across_runs(sim_corpus, tmp_path, capsys):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert cli.main(["report", "--jsonl", str(sim_corpus), "--out", str(a)]) == 0
    assert cli.main(["report", "--jsonl", str(sim_corpus), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_report_figures_bundle(sim_corpus, tmp_path, capsys):
    figs = tmp_path / "figs"
    code, out, err = run(
        capsys, "report", "--jsonl", str(sim_corpus),
        "--out", str(tmp_path / "report.json"), "--figures", str(figs),
    )
    assert code == 0
    names = {p.name for p in figs.iterdir()}
    assert {
        "survival.png",
        "latency_histogram.png",
        "disclosure_speed.png",
        "freshness_by_n.png",
        "takeoff_weekday.png",
        "summary.txt",
        "engagements.csv",
    } <= names
    assert "== survival ==" in (figs / "summary.txt").read_text(encoding="utf-8")
    wrote = [line for line in err.splitlines() if line.startswith("wrote ")]
    assert len(wrote) == len(names)


def test_report_mode_filter_flag(sim_corpus, capsys):
    code, out, _ = run(capsys, "report", "--jsonl", str(sim_corpus), "--mode", "II")
    assert code == 0
    assert json.loads(out)["counts"]["seeded"] == 0  # the experiment ran in mode I


def test_import_then_export_round_trip(sim_corpus, tmp_path, capsys):
    cfg = make_config(tmp_path)
    code, out, _ = run(capsys, "--config", cfg, "import", "--in", str(sim_corpus))
    assert code == 0
    assert out.startswith("imported 6 engagements")

    # importing into the now-populated store is refused
    code, _, err = run(capsys, "--config", cfg, "import", "--in", str(sim_corpus))
    assert code == 2
    assert stderr_payload(err)["error"] == "conflict"

    exported = tmp_path / "exported.jsonl"
    code, out, _ = run(capsys, "--config", cfg, "export", "--out", str(exported))
    assert code == 0
    assert exported.exists()

    # engagement payloads survive the store unchanged
    def records(path):
        lines = path.read_text(encoding="utf-8").splitlines()
        recs = [json.loads(line) for line in lines[1:]]
        return [r for r in recs if r["type"] in ("message", "suggestion", "disclosure")]

    assert records(exported) == records(sim_corpus)


def test_corrupt_corpus_reports_line_number(sim_corpus, tmp_path, capsys):
    mangled = tmp_path / "mangled.jsonl"
    lines = sim_corpus.read_text(encoding="utf-8").splitlines()
    lines[2] = "{this is not json"
    mangled.write_text("\n".join(lines) + "\n", encoding="utf-8")
    code, _, err = run(capsys, "report", "--jsonl", str(mangled))
    assert code == 2
    payload = stderr_payload(err)
    assert payload["error"] == "validation"
    assert payload["line"] == 3
