import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from abdux.cli import main
from abdux.parser import parse_theory

from conftest import DATA

SCHEMA = json.loads((resources.files("abdux") / "schema.json").read_text())


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def json_lines(text):
    records = [json.loads(line) for line in text.splitlines() if line.strip()]
    for r in records:
        jsonschema.validate(r, SCHEMA)
    return records


def ex(name, expl=None):
    args = ["-t", DATA / f"{name}.abd", "-o", DATA / f"{name}.obs"]
    if expl:
        args += ["-e", DATA / f"{name}_{expl}.exp"]
    return args


def test_check_human_report(capsys):
    code, out, _ = run(capsys, "check", *ex("ex6", "d1"))
    assert code == 0
    assert out.strip() == "explanation: yes (types A,B,C,D), constrained: yes, degree: 0"
    code, out, _ = run(capsys, "check", *ex("ex6", "d3"))
    assert out.strip() == "explanation: yes (types A,B,C,D), constrained: no, degree: 1"


def test_check_not_an_explanation(capsys, tmp_path):
    empty = tmp_path / "empty.exp"
    empty.write_text("")
    code, out, _ = run(capsys, "check", *ex("ex6"), "-e", empty)
    assert code == 1 and out.startswith("explanation: no")


@pytest.mark.parametrize("expl, d", [("dx1x2", 2), ("dxx", 2), ("dx3", 1), ("d", 0)])
def test_degree(capsys, expl, d):
    code, out, _ = run(capsys, "degree", *ex("ex7", expl))
    assert code == 0 and out.strip() == str(d)
    code, out, _ = run(capsys, "degree", *ex("ex7", expl), "--json")
    assert json_lines(out)[0]["degree"] == d


def test_json_and_human_verdicts_agree(capsys):
    for expl in ("d1", "d2", "d3", "dx"):
        code_h, human, _ = run(capsys, "constrained", *ex("ex6", expl))
        code_j, out, _ = run(capsys, "constrained", *ex("ex6", expl), "--json")
        record = json_lines(out)[0]
        assert code_h == code_j
        assert record["verdict"] == (human.strip() == "constrained: yes")


def test_constrained_search(capsys):
    code, out, _ = run(capsys, "constrained", *ex("ex7"), "--max-add", 3, "--max-del", 0, "--json")
    record = json_lines(out)[0]
    assert code == 0 and record["explanation"] == {"add": ["t(a,c)"], "del": []}
    code, out, _ = run(capsys, "constrained", *ex("ex7"), "--max-add", 0, "--max-del", 0)
    assert code == 1 and out.startswith("no constrained explanation")


def test_find_stream_and_filters(capsys):
    code, out, _ = run(capsys, "find", *ex("ex6"), "--max-add", 1, "--max-del", 1, "--json")
    records = json_lines(out)
    assert code == 0 and records[0]["explanation"] == {"add": [], "del": ["q(1)"]}
    code, out, _ = run(capsys, "find", *ex("ex6"), "--max-add", 1, "--max-del", 1,
                       "--minimality", "card", "--rank-arbitrariness", "--json")
    records = json_lines(out)
    assert [r["degree"] for r in records] == sorted(r["degree"] for r in records)
    assert {len(r["explanation"]["add"]) + len(r["explanation"]["del"]) for r in records} == {1}
    code, out, _ = run(capsys, "find", *ex("ex6"), "--max-add", 1, "--max-del", 1, "--constrained")
    assert out.splitlines() == ["({}, {q(1)})", "({}, {q(2)})"]


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "-t", DATA / "ex6.abd", "--json")
    flags = json_lines(out)[0]["classification"]
    assert flags == {"stratified": True, "non_recursive": True, "horn": False, "constraints": 0}


def test_gen_and_oracle(capsys, tmp_path):
    cnf = tmp_path / "f.cnf"
    cnf.write_text("p cnf 1 2\n1 0\n-1 0\n")
    code, out, _ = run(capsys, "oracle", "sat", cnf)
    assert code == 1 and out.strip() == "false"
    code, _, _ = run(capsys, "gen", "thm4-sat", cnf, "--out", tmp_path / "inst")
    assert code == 0
    inst = tmp_path / "inst"
    assert sorted(p.name for p in inst.iterdir()) == ["explanation.exp", "observation.obs", "theory.abd"]
    parse_theory((inst / "theory.abd").read_text())
    code, out, _ = run(capsys, "constrained", "-t", inst / "theory.abd", "-o", inst / "observation.obs",
                       "-e", inst / "explanation.exp")
    assert code == 0 and out.strip() == "constrained: yes"
    qbf = tmp_path / "f.qdimacs"
    qbf.write_text("p cnf 2 2\ne 1 0\na 2 0\n1 0\n-2 0\n")
    code, out, _ = run(capsys, "oracle", "qbf", qbf, "--json")
    assert code == 0 and json_lines(out)[0]["verdict"] is True


@pytest.mark.parametrize("argv, code", [
    (["check", "-t", "missing.abd", "-o", "x", "-e", "y"], 2),
    (["check"], 2),
    (["find", "--max-add", "1"], 2),
])
def test_input_errors(capsys, argv, code):
    assert main(argv) == code
    assert "error" in capsys.readouterr().err


def test_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.abd"
    bad.write_text("p(X) :- not q(X).\n")
    code, _, err = run(capsys, "classify", "-t", bad)
    assert code == 2 and "bad.abd:1:1" in err


def test_gen_precondition_is_input_error(capsys, tmp_path):
    cnf = tmp_path / "f.cnf"
    cnf.write_text("p cnf 1 1\n-1 0\n")
    code, _, err = run(capsys, "gen", "thm4-sat", cnf)
    assert code == 2 and "all-false" in err


def test_usage_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["degree", "--type", "Z"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["find", "--max-add", "-1"])
    assert info.value.code == 2


def test_cap_exceeded_exit_3(capsys):
    code, _, err = run(capsys, "find", *ex("ex7"), "--max-add", 3, "--cap-candidates", 5)
    assert code == 3 and "cap" in err
    code, _, _ = run(capsys, "degree", *ex("ex7", "dx1x2"), "--cap-occurrences", 1)
    assert code == 3


def test_module_entry_point_and_pipe():
    cmd = [sys.executable, "-m", "abdux", "find", *map(str, ex("ex6")), "--max-add", "2", "--json"]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0
    lines = proc.stdout.splitlines()
    assert len(lines) > 2
    # exits quietly when the reader goes away early
    p1 = subprocess.Popen(cmd, stdout=subprocess.PIPE, stderr=subprocess.PIPE)
    p1.stdout.readline()
    p1.stdout.close()
    assert p1.wait() == 0
    assert b"Traceback" not in p1.stderr.read()
