import io
import json
from pathlib import Path

import pytest

from structura.cli import EX_DATAERR, EX_USAGE, main

DEMO_CONFIG = Path(__file__).resolve().parents[1] / "demos" / "data" / "light_switch.json"


@pytest.fixture
def files(tmp_path):
    paths = {
        "empty": "domain:\n",
        "ab": "domain: a b\nR/2: (a,b)\n",
        "db": "R(a,b)\n",
        "onto": "# symmetric R\nAll x. All y. R(x,y) -> R(y,x)\n",
        "phi": "Ex x. Ex y. R(x,y)\n",
        "term": "s(R)\n",
    }
    out = {}
    for name, text in paths.items():
        p = tmp_path / f"{name}.txt"
        p.write_text(text)
        out[name] = str(p)
    return out


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_eval_liar_is_neither(capsys, files):
    code, out, _ = run(capsys, "eval", "--structure", files["empty"], "--expr", "C1 ~C1")
    assert code == 2 and out.strip() == "Neither"


def test_eval_exit_codes_and_json(capsys, files):
    assert run(capsys, "eval", "--structure", files["ab"], "--formula", files["phi"])[0] == 0
    code, out, _ = run(capsys, "eval", "--structure", files["ab"], "--expr", "Ex x. R(x,x)", "--json")
    assert code == 1 and json.loads(out)["outcome"] == "AbelardWins"
    code, _, _ = run(capsys, "eval", "--structure", files["empty"], "--expr", "C1 ins x. C1",
                     "--max-positions", "20")
    assert code == 3


def test_compile_and_alg_eval(capsys, files):
    assert run(capsys, "compile", "--expr", "x1=x2")[1].strip() == "I(J(u,u))"
    assert run(capsys, "compile", "--expr", "R(x2,x1,x2)")[1].strip() == "p(ex(I(p(p(R)))))"
    code, out, _ = run(capsys, "alg-eval", "--structure", files["ab"], "--term", files["term"])
    assert code == 0 and out.strip() == "2:{(b,a)}"


def test_oracle_parse_translate(capsys, files):
    code, out, _ = run(capsys, "oracle", "--structure", files["ab"], "--expr", "R(x,y)", "--assign", "x=a",
                       "--assign", "y=b")
    assert code == 0 and out.strip() == "true"
    code, out, _ = run(capsys, "parse", "--expr", "P(x)->Q(x)")
    assert out.strip() == "~P(x) | Q(x)"
    code, out, _ = run(capsys, "translate", "--expr", "~R(x,y)")
    assert out.startswith("it is falsifiable that")


def test_omq(capsys, files):
    code, out, _ = run(capsys, "omq", "--db", files["db"], "--ontology", files["onto"], "--query", "R(b,a)")
    assert code == 0 and out.startswith("entailed-up-to-bound")
    code, out, _ = run(capsys, "omq", "--db", files["db"], "--query", "R(x1,x2)", "--answer", "b,a")
    assert out.startswith("refuted") and "countermodel:" in out


def test_simulate_writes_trace(capsys, tmp_path):
    trace = tmp_path / "trace.txt"
    code, out, _ = run(capsys, "simulate", "--config", str(DEMO_CONFIG), "--trace", str(trace))
    assert code == 0 and "termination: StepBudget" in out
    assert trace.read_text().count("action:") == 6


def test_same_seed_same_report(capsys, monkeypatch):
    a = run(capsys, "--seed", "5", "simulate", "--config", str(DEMO_CONFIG))[1]
    b = run(capsys, "--seed", "5", "simulate", "--config", str(DEMO_CONFIG))[1]
    assert a == b
    monkeypatch.setenv("STRUCTURA_SEED", "5")
    assert run(capsys, "--seed", "99", "simulate", "--config", str(DEMO_CONFIG))[1] == a


def test_play_reads_stdin(capsys, files, monkeypatch, tmp_path):
    monkeypatch.setattr("sys.stdin", io.StringIO("0\n1\n"))
    transcript = tmp_path / "play.json"
    code, out, _ = run(capsys, "play", "--structure", files["ab"], "--formula", files["phi"],
                       "--transcript", str(transcript))
    assert code == 0 and "Eloise wins" in out
    assert json.loads(transcript.read_text())["result"] == "EloiseWins"
    monkeypatch.setattr("sys.stdin", io.StringIO(""))
    transcript2 = tmp_path / "quit.json"
    run(capsys, "play", "--structure", files["ab"], "--formula", files["phi"], "--transcript", str(transcript2))
    assert json.loads(transcript2.read_text())["abandoned"]


def test_selftest_subset(capsys):
    code, out, _ = run(capsys, "selftest", "--only", "2,5,9")
    assert code == 0 and out.count("[PASS]") == 3


def test_error_exit_codes(capsys, files):
    assert run(capsys, "parse", "--expr", "Ex x. R(x")[0] == EX_DATAERR
    assert run(capsys, "eval", "--structure", "/no/such/file", "--expr", "true")[0] == EX_DATAERR
    assert run(capsys, "parse")[0] == EX_USAGE
    assert run(capsys)[0] == EX_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--expr", "true"])
    assert exc.value.code == EX_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EX_USAGE
