"""CLI behavior: golden outputs, stage commands, exit codes, config handling."""

from __future__ import annotations

import json
import shutil
from importlib import resources
from pathlib import Path

import pytest

from coqex.cli import EXIT_INPUT, EXIT_OK, EXIT_PROVIDER, main
from coqex.corpus import load

GOLDEN = Path(__file__).parent / "golden"
FIXTURES = resources.files("coqex.data").joinpath("fixtures")


def fixture_path(name: str) -> str:
    return str(FIXTURES.joinpath(name))


def run_cli(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_passages(tmp_path: Path, record) -> Path:
    path = tmp_path / f"{record.id}.json"
    path.write_text(
        json.dumps(
            {
                "passages": [
                    {"id": p.id, "rank": p.rank, "url": p.url, "text": p.text}
                    for p in sorted(record.passages, key=lambda p: p.rank)
                ]
            }
        ),
        encoding="utf-8",
    )
    return path


# --- answer / stage commands -----------------------------------------------------


def test_answer_lennon_weighted_median(capsys):
    code, out, _ = run_cli(
        capsys,
        "answer",
        "How many songs did John Lennon write for the Beatles?",
        "--passages",
        fixture_path("lennon_passages.json"),
    )
    assert code == EXIT_OK
    package = json.loads(out)
    assert package["prediction"]["value"] == 180
    assert package["prediction"]["strategy"] == "weighted_median"
    assert package["contextualization"] is None
    assert package["instances"] is None
    assert package["evidence"]


def test_answer_median_strategy(capsys):
    code, out, _ = run_cli(
        capsys,
        "answer",
        "How many songs did John Lennon write for the Beatles?",
        "--passages",
        fixture_path("lennon_passages.json"),
        "--strategy",
        "median",
    )
    assert code == EXIT_OK
    package = json.loads(out)
    assert package["prediction"]["value"] == 150  # lower median of {5, 150, 180}


def test_answer_empty_passages(tmp_path, capsys):
    empty = tmp_path / "none.json"
    empty.write_text("[]", encoding="utf-8")
    code, out, _ = run_cli(capsys, "answer", "how many lakes", "--passages", str(empty))
    assert code == EXIT_OK
    package = json.loads(out)
    assert package["prediction"] is None
    assert package["evidence"] == []


def test_explain_k_limits_instances(capsys):
    code, out, _ = run_cli(
        capsys,
        "explain",
        "How many songs did John Lennon write for the Beatles?",
        "--passages",
        fixture_path("lennon_passages.json"),
        "--k",
        "1",
    )
    assert code == EXIT_OK
    package = json.loads(out)
    assert len(package["instances"]["items"]) == 1


def test_pipeline_indonesia_with_stub_cache(tmp_path, capsys):
    cache = tmp_path / "cache"
    shutil.copytree(fixture_path("indonesia_cache"), cache)
    code, out, _ = run_cli(
        capsys,
        "pipeline",
        "How many languages are spoken in Indonesia?",
        "--passages",
        fixture_path("indonesia_passages.json"),
        "--cache-dir",
        str(cache),
    )
    assert code == EXIT_OK
    ctx = json.loads(out)["contextualization"]
    assert ctx["cnp_rep"]["text"] == "estimated 700 languages"
    assert [c["text"] for c in ctx["synonyms"]] == ["700 languages", "750 dialects"]
    assert [c["text"] for c in ctx["subgroups"]] == [
        "27 major regional languages",
        "5 official languages",
    ]
    assert [c["text"] for c in ctx["incomparables"]] == [
        "2000 ethnic groups",
        "85 million native speakers",
    ]


# --- golden files ------------------------------------------------------------------


def test_pipeline_golden_files_byte_identical(tmp_path, capsys):
    records = load(fixture_path("coquad10.jsonl"))
    for record in records:
        passages = write_passages(tmp_path, record)
        outputs = []
        for _ in range(2):  # two runs must agree byte-for-byte
            code, out, _ = run_cli(capsys, "pipeline", record.query, "--passages", str(passages))
            assert code == EXIT_OK
            outputs.append(out)
        assert outputs[0] == outputs[1]
        golden = (GOLDEN / f"pipeline_{record.id}.json").read_text(encoding="utf-8")
        assert outputs[0] == golden, f"golden drift for {record.id}"


def test_evaluate_golden(capsys):
    code, out, _ = run_cli(capsys, "evaluate", "--dataset", fixture_path("coquad10.jsonl"))
    assert code == EXIT_OK
    golden = (GOLDEN / "evaluate_coquad10.json").read_text(encoding="utf-8")
    assert out == golden
    report = json.loads(out)
    assert report["count"]["relaxed_precision"] == 0.875
    assert report["count"]["coverage"] == 0.8


def test_evaluate_table_mode(capsys):
    code, out, _ = run_cli(
        capsys, "evaluate", "--dataset", fixture_path("coquad10.jsonl"), "--table"
    )
    assert code == EXIT_OK
    assert "relaxed_precision" in out
    assert "0.8750" in out


# --- label -----------------------------------------------------------------------------


def test_label_outputs_span_labels(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "label", "--dataset", fixture_path("coquad10.jsonl"))
    assert code == EXIT_OK
    lines = [json.loads(line) for line in out.strip().splitlines()]
    assert lines[0] == {"format": "coquad.v1"}
    first = lines[1]
    assert first["id"] == "coquad-0001"
    got = {(sl["count"], sl["label"]) for sl in first["span_labels"]}
    assert (180, "positive") in got
    assert (150, "negative") in got  # |150-180| = 30 > 18
    assert (5, "negative") in got
    # labeled output is still a loadable dataset (unknown fields preserved)
    out_path = tmp_path / "labeled.jsonl"
    out_path.write_text(out, encoding="utf-8")
    reloaded = load(out_path)
    assert reloaded[0].extra["span_labels"]


# --- errors and exit codes ---------------------------------------------------------------


def test_missing_passages_file_is_input_error(capsys):
    code, out, err = run_cli(capsys, "answer", "how many", "--passages", "/nonexistent.json")
    assert code == EXIT_INPUT
    assert out == ""
    assert "error" in err


def test_bad_dataset_reports_line(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"format": "coquad.v1"}\nnot-json\n', encoding="utf-8")
    code, out, err = run_cli(capsys, "evaluate", "--dataset", str(bad))
    assert code == EXIT_INPUT
    assert "line 2" in err


def test_remote_without_endpoint_is_input_error(capsys, monkeypatch):
    monkeypatch.delenv("COQEX_ENDPOINT", raising=False)
    code, _, err = run_cli(
        capsys,
        "answer",
        "how many",
        "--passages",
        fixture_path("lennon_passages.json"),
        "--provider",
        "remote",
    )
    assert code == EXIT_INPUT


@pytest.mark.parametrize("command", ["answer", "contextualize", "explain", "pipeline"])
def test_fail_fast_on_unreachable_endpoint(command, capsys):
    code, out, err = run_cli(
        capsys,
        command,
        "How many songs did John Lennon write for the Beatles?",
        "--passages",
        fixture_path("lennon_passages.json"),
        "--provider",
        "remote",
        "--endpoint",
        "http://127.0.0.1:1",
        "--timeout-ms",
        "300",
    )
    assert code == EXIT_PROVIDER
    assert out == ""  # no partial output
    assert "provider error" in err


def test_evaluate_fail_fast_on_unreachable_endpoint(capsys):
    code, out, err = run_cli(
        capsys,
        "evaluate",
        "--dataset",
        fixture_path("coquad10.jsonl"),
        "--provider",
        "remote",
        "--endpoint",
        "http://127.0.0.1:1",
        "--timeout-ms",
        "300",
    )
    assert code == EXIT_PROVIDER
    assert out == ""


def test_allow_degrade_recovers_offline(capsys):
    code, out, _ = run_cli(
        capsys,
        "answer",
        "How many songs did John Lennon write for the Beatles?",
        "--passages",
        fixture_path("lennon_passages.json"),
        "--provider",
        "remote",
        "--endpoint",
        "http://127.0.0.1:1",
        "--timeout-ms",
        "300",
        "--allow-degrade",
    )
    assert code == EXIT_OK
    assert json.loads(out)["prediction"]["value"] == 180


# --- config file -----------------------------------------------------------------------------


def test_config_file_sets_defaults_flags_win(tmp_path, capsys):
    config = tmp_path / "coqex.toml"
    config.write_text('strategy = "median"\nalpha = 0.1\nk = 2\n', encoding="utf-8")
    code, out, _ = run_cli(
        capsys,
        "--config",
        str(config),
        "answer",
        "How many songs did John Lennon write for the Beatles?",
        "--passages",
        fixture_path("lennon_passages.json"),
    )
    assert code == EXIT_OK
    assert json.loads(out)["prediction"]["strategy"] == "median"
    # the flag overrides the file
    code, out, _ = run_cli(
        capsys,
        "--config",
        str(config),
        "answer",
        "How many songs did John Lennon write for the Beatles?",
        "--passages",
        fixture_path("lennon_passages.json"),
        "--strategy",
        "weighted_median",
    )
    assert json.loads(out)["prediction"]["strategy"] == "weighted_median"


def test_env_endpoint_used_for_remote(capsys, monkeypatch):
    monkeypatch.setenv("COQEX_ENDPOINT", "http://127.0.0.1:1")
    monkeypatch.setenv("COQEX_TIMEOUT_MS", "300")
    code, out, _ = run_cli(
        capsys,
        "answer",
        "how many songs",
        "--passages",
        fixture_path("lennon_passages.json"),
        "--provider",
        "remote",
    )
    assert code == EXIT_PROVIDER
