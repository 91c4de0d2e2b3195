import json

from vsc_lab.cli import main

OMEGA = "(\\x.x x) (\\x.x x)"


def test_eval_text(capsys):
    assert main(["eval", "(\\x.x) (\\y.y)", "--trace"]) == 0
    out = capsys.readouterr().out
    assert "-m->" in out and "normal: \\y.y (2 steps)" in out


def test_eval_json_cycle(capsys):
    assert main(["eval", OMEGA, "--strategy", "open", "--json"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["outcome"]["kind"] == "cycle"
    assert [s["rule"] for s in rec["trace"]] == ["m", "e"]


def test_eval_exhausted(capsys):
    main(["eval", "(\\x.x x) (\\y.y)", "--fuel", "1"])
    assert "exhausted" in capsys.readouterr().out


def test_parse_error_exit_code(capsys):
    assert main(["eval", "x \\y.y"]) == 2
    assert "parse error" in capsys.readouterr().err


def test_classify(capsys):
    assert main(["classify", "x[x <- y]"]) == 0
    out = capsys.readouterr().out
    assert "inert: true" in out and "fire-inert: n/a" in out


def test_type_and_check_round_trip(tmp_path, capsys):
    path = tmp_path / "d.json"
    assert main(["type", "(\\x.x) (\\y.y)", "--emit-derivation", str(path), "--show"]) == 0
    assert "shrinking true" in capsys.readouterr().out
    assert main(["check-derivation", str(path)]) == 0
    assert capsys.readouterr().out.startswith("valid:")
    obj = json.loads(path.read_text())
    obj["conclusion"]["subject"] = "\\y.y"
    path.write_text(json.dumps(obj))
    assert main(["check-derivation", str(path)]) == 1
    assert "invalid" in capsys.readouterr().out


def test_type_reports_cycles(capsys):
    assert main(["type", f"x (\\y.{OMEGA})"]) == 1
    assert "cycles" in capsys.readouterr().out
    assert main(["type", f"x (\\y.{OMEGA})", "--mode", "open"]) == 0


def test_props_and_demo(capsys):
    assert main(["props", "--suite", "fullness", "--max-size", "4", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["failures"] == 0
    assert main(["props", "--suite", "harmony-open", "--max-size", "3", "--no-examples"]) == 0
    assert "harmony-open: ok" in capsys.readouterr().out
    assert main(["demo", "omega-l"]) == 0
    assert "experiment omega-l: ok" in capsys.readouterr().out
