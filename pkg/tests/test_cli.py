import json
import subprocess
import sys

import pytest

from lexmaxmin.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve(capsys):
    code, out, _ = run(capsys, "solve", "example1")
    assert code == 0 and out.splitlines()[0] == "u* = (3/5, 3/5, 7/10)"


def test_solve_json_is_exact(capsys):
    code, out, _ = run(capsys, "solve", "example1", "--format", "json")
    data = json.loads(out)
    assert data["leximin"] == ["3/5", "3/5", "7/10"]


def test_ks(capsys):
    assert "(1/2, 1/2, 1/2)" in run(capsys, "ks", "appendixA")[1]
    assert "(3/5, 3/5, 3/5)" in run(capsys, "ks", "example1")[1]


def test_check_assumption_exit_codes(capsys):
    assert run(capsys, "check-assumption", "appendixA")[0] == 3
    assert run(capsys, "check-assumption", "example1")[0] == 0


def test_compare(capsys):
    out = run(capsys, "compare", "--pair", "dominance_pair")[1]
    assert out.splitlines()[0] == "u ≻_L v; v strictly D-dominates u"
    out = run(capsys, "compare", "(1/3, 1/2)", "(1/3, 1/2)")[1]
    assert out.splitlines()[0] == "equivalent; mutual tie"
    out = run(capsys, "compare", "(1, 0)", "(0, 1)")[1]
    assert "equivalent under leximin order" in out and "mutual D-dominance tie" in out


def test_compare_length_mismatch(capsys):
    assert run(capsys, "compare", "(1, 0)", "(0, 1, 0)")[0] == 2


def test_knockout_extensive_two_agents(capsys, tmp_path):
    path = tmp_path / "g.json"
    assert run(capsys, "gen", "--seed", "4", "-n", "2", "--extras", "2", "-o", str(path))[0] == 0
    code, out, _ = run(capsys, "knockout", str(path), "--extensive")
    assert code == 0 and "analytic = extensive: agree" in out


def test_knockout_trace(capsys):
    code, out, _ = run(capsys, "knockout", "example1", "--x", "u*", "--y", "a", "--extensive", "--trace")
    assert code == 0 and "player 1:" in out


def test_extensive_limited_to_three_agents(capsys, tmp_path):
    path = tmp_path / "g4.json"
    run(capsys, "gen", "-n", "4", "-o", str(path))
    assert run(capsys, "knockout", str(path), "--extensive")[0] == 2


def test_budget_exit_code(capsys):
    code, _, err = run(capsys, "knockout", "example1", "--extensive", "--budget", "100")
    assert code == 4 and "budget" in err


def test_tree(capsys):
    code, out, _ = run(capsys, "tree", "example1")
    assert code == 0 and out.splitlines()[-1] == "root outcome (3/5, 3/5, 7/10)"
    code, out, _ = run(capsys, "tree", "example1", "--propose", "a", "--propose", "u*", "--propose", "b", "--extensive")
    assert code == 0 and "agree" in out and "bye" in out


def test_equilibrium(capsys):
    code, out, _ = run(capsys, "equilibrium", "example1")
    assert code == 0 and "no profitable deviations" in out
    code, out, _ = run(capsys, "equilibrium", "example1", "--propose", "a", "--propose", "b", "--propose", "c")
    assert "gains" in out


def test_mechanism_needs_assumption(capsys):
    assert run(capsys, "tree", "appendixA")[0] == 3


def test_auto_normalize_notice(capsys, tmp_path):
    path = tmp_path / "raw.json"
    path.write_text(json.dumps({"alternatives": ["s", "a", "b"], "utilities": [[1, 3, 1], [2, 2, 4]], "disagreement": "s"}))
    code, out, err = run(capsys, "solve", str(path))
    assert code == 0 and "notice" in err and "u* = (1/2, 1/2)" in out
    code, out, _ = run(capsys, "normalize", str(path))
    assert json.loads(out)["normalized"] is True


def test_malformed_instance_reports_line_and_field(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n "alternatives": ["s", "a"],\n "utilities": [[0, 1], [0, "x"]],\n "disagreement": "s"\n}')
    code, _, err = run(capsys, "solve", str(path))
    assert code == 2 and "line 3" in err and "utilities[1][1]" in err
    assert run(capsys, "solve", str(tmp_path / "missing.json"))[0] == 2


def test_gen_is_byte_identical(capsys):
    a = run(capsys, "gen", "--seed", "9", "-n", "3", "--extras", "2")[1]
    b = run(capsys, "gen", "--seed", "9", "-n", "3", "--extras", "2")[1]
    assert a == b
    assert run(capsys, "gen", "--seed", "1", "-n", "3")[1].count("\n") > 3


def test_verify_command(capsys):
    code, out, _ = run(capsys, "verify", "lemma2", "--count", "5", "--format", "json")
    assert code == 0 and json.loads(out)["ok"] is True
    code, out, _ = run(capsys, "verify", "lemma1", "--count", "3", "--grid", "1/10")
    assert code == 0 and "PASS" in out
    assert run(capsys, "verify", "lp", "--grid", "1/10")[0] == 2


def test_verify_json_is_reproducible(capsys):
    a = run(capsys, "verify", "theorem1", "--count", "4", "--seed", "5", "--format", "json")[1]
    b = run(capsys, "verify", "theorem1", "--count", "4", "--seed", "5", "--format", "json")[1]
    assert a == b


def test_unknown_suite_is_usage_error():
    with pytest.raises(SystemExit) as err:
        main(["verify", "lemma9"])
    assert err.value.code == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "lexmaxmin", "solve", "example2"], capture_output=True, text=True)
    assert out.returncode == 0 and "u* = (3/5, 3/5, 7/10)" in out.stdout
