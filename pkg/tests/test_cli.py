import json
import pathlib
import subprocess
import sys

import pytest

from golden_cases import CASES, EXPECTED_EXIT, run_case

GOLDEN = pathlib.Path(__file__).parent / "golden"


@pytest.mark.parametrize("fname,argv", CASES, ids=[c[0] for c in CASES])
def test_golden_outputs(fname, argv):
    code, text = run_case(argv)
    assert code == EXPECTED_EXIT.get(fname, 0)
    assert text == (GOLDEN / fname).read_text(encoding="utf-8")


def test_byte_identical_across_runs():
    for fname, argv in CASES[:6]:
        c1, t1 = run_case(argv)
        c2, t2 = run_case(argv)
        assert (c1, t1) == (c2, t2)


def test_json_reports_have_stable_key_order():
    _, text = run_case(["solve", "varieties/kleene.var", "and(x,not(x))",
                        "and(y,not(y))", "--json"])
    doc = json.loads(text)
    assert list(doc.keys()) == [
        "variety", "terms", "variables", "bound", "method", "kernel",
        "congruences", "g_congruences", "mcsg", "type", "properties",
        "caveats", "shortcut"]
    assert doc["mcsg"][0]["term"] == "and(z,not(z))"
    assert doc["type"]["kind"] == "unitary"


def test_solve_pairwise_flag():
    code, text = run_case(["solve", "varieties/kleene.var",
                           "and(x,not(x))", "and(y,not(y))",
                           "and(w,not(w))", "--pairwise", "--json"])
    assert code == 0
    doc = json.loads(text)
    assert doc["method"] == "pairwise-reduction"
    assert doc["mcsg"][0]["term"] == "and(z,not(z))"


def test_exit_code_budget_on_free_monoid_style(tmp_path):
    labels = [str(i) for i in range(10)]
    doc = {
        "name": "freemonoidish",
        "signature": [["oplus", 2], ["0", 0]],
        "algebras": [{
            "name": "M9",
            "universe": labels,
            "ops": {
                "oplus": [[labels[min(i + j, 9)] for j in range(10)]
                          for i in range(10)],
                "0": "0",
            },
        }],
    }
    path = tmp_path / "monoid.var"
    path.write_text(json.dumps(doc))
    code, _ = run_case(["free", str(path), "-n", "8"])
    assert code == 2
    code, _ = run_case(["solve", str(path), "oplus(x,x)", "oplus(y,y)",
                        "--budget", "200"])
    assert code == 2


def test_exit_code_inconclusive():
    code, _ = run_case(["solve", "varieties/n3.var", "oplus(x,x)",
                        "oplus(y,oplus(y,y))"])
    assert code == 3


def test_exit_code_usage_errors(tmp_path):
    code, _ = run_case(["solve", "varieties/boolean.var", "or(x"])
    assert code == 1
    code, _ = run_case(["solve", "varieties/boolean.var", "xor(x,y)"])
    assert code == 1
    code, _ = run_case(["validate", str(tmp_path / "missing.var")])
    assert code == 1
    code, _ = run_case(["kleene-dual", "varieties/kleene.var", "K9"])
    assert code == 1
    code, _ = run_case(["kleene-dual", "varieties/godel3.var", "G3"])
    assert code == 1  # not a Kleene signature


def test_lgg_with_signature_file():
    code, text = run_case(["lgg", "--file", "varieties/kleene.var",
                           "and(x,not(x))", "and(1,not(1))"])
    assert code == 0
    assert "lgg: and(g1,not(g1))" in text


def test_lgg_inconsistent_arity():
    code, _ = run_case(["lgg", "f(a)", "f(a,b)"])
    assert code == 1


def test_validate_json():
    code, text = run_case(["validate", "varieties/n3.var", "--json"])
    assert code == 0
    doc = json.loads(text)
    assert doc["ok"] is True
    assert doc["algebras"] == [{"name": "N3", "size": 4}]


def test_console_entry_point_subprocess():
    r = subprocess.run(
        [sys.executable, "-m", "algen.cli", "validate", "varieties/boolean.var"],
        capture_output=True, text=True, cwd=pathlib.Path(__file__).parent.parent)
    assert r.returncode == 0
    assert "variety boolean: ok" in r.stdout
