"""Command-line behaviour: exit codes, configuration, reports and determinism."""

import json

import pytest

from vertop.cli import main

SMALL = ["--g", "1", "-N", "2", "--degree", "1", "--window=-1..1"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_passes_and_emits_json(capsys):
    code, out, _ = run(capsys, "check", "heisenberg", *SMALL)
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1 and doc["suite"] == "heisenberg"
    assert {e["status"] for e in doc["entries"]} == {"pass"}
    assert all(e["millis"] is None for e in doc["entries"])


@pytest.mark.parametrize("suite", ["heisenberg", "betagamma-axioms", "dual"])
def test_reports_are_byte_identical(capsys, suite):
    argv = ["check", suite, *SMALL, "--seed", "5"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_timing_is_opt_in(capsys):
    _, out, _ = run(capsys, "check", "pi-t", "--n", "1", "-N", "2", "--degree", "1", "--timing")
    assert all(isinstance(e["millis"], int) for e in json.loads(out)["entries"])


def test_text_format(capsys):
    code, out, _ = run(capsys, "check", "pi-t", "--n", "2", "--c", "4", "-N", "2", "--format", "text")
    assert code == 0
    assert "lambda: 1/4" in out and out.rstrip().endswith("2/2 passed")


def test_ope_identifies_the_zero_product(capsys):
    code, out, _ = run(capsys, "ope", "--expr", "nprod(beta[1],gamma[1],0)", "-N", "4")
    assert code == 0 and out.strip() == "tau * id"


def test_ope_on_currents(capsys):
    code, out, _ = run(capsys, "ope", "--expr", "nprod(current[1,2],current[2,1],0)", "-N", "3", "--window=-1..1")
    assert code == 0 and out.strip() == "H1"


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "heisenberg", "--window", "3..1"],
        ["check", "heisenberg", "--c", "2"],
        ["check", "heisenberg", "-N", "0"],
        ["check", "heisenberg", "--level", "1 +"],
        ["check", "sln", "--n", "1"],
        ["ope", "--expr", "beta[0]"],
        ["ope", "--expr", "nprod(beta[1],current[1,2],0)"],
    ],
)
def test_configuration_errors_exit_with_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_usage_errors_exit_with_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["check", "no-such-suite"])
    assert exc.value.code == 2


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# small run\nN = 2\ndegree=1\nwindow = -1..1\nseed = 9\n")
    code, out, _ = run(capsys, "check", "heisenberg", "--config", str(cfg), "-N", "3")
    assert code == 0
    echo = json.loads(out)["config"]
    assert echo["N"] == 3 and echo["seed"] == 9 and echo["window"] == "-1..1"


def test_config_file_rejects_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = run(capsys, "check", "heisenberg", "--config", str(cfg))
    assert code == 2 and "unknown key" in err


def test_report_subcommand_round_trip(tmp_path, capsys):
    _, out, _ = run(capsys, "check", "heisenberg", *SMALL)
    path = tmp_path / "r.json"
    path.write_text(out)
    code, again, _ = run(capsys, "report", str(path), "--format", "json")
    assert code == 0 and again == out


def test_report_subcommand_propagates_failures(tmp_path, capsys):
    doc = {
        "schema_version": 1,
        "suite": "x",
        "config": {},
        "entries": [{"name": "e", "params": {}, "status": "fail", "witness": "mode 1 on phi", "millis": None}],
    }
    path = tmp_path / "f.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "report", str(path))
    assert code == 1 and "witness: mode 1 on phi" in out


def test_failing_check_exits_with_one(capsys):
    code, out, _ = run(capsys, "check", "borcherds", "--algebra", "sl2", "--level", "2", "-N", "3", "--window=-1..1")
    assert code == 1
    assert any(e["status"] == "fail" and e.get("witness") for e in json.loads(out)["entries"])
