from __future__ import annotations

import json
import shutil
import subprocess
import sys
from importlib import resources

import pytest

from walkerlab.cli import main

BUILTIN = str(resources.files("walkerlab.model").joinpath("data/builtin.catalog"))


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# --- validate -------------------------------------------------------------------------------

def test_validate_builtin(capsys):
    code, out, _ = run(capsys, "validate", BUILTIN)
    assert code == 0 and "49 entries" in out


def test_validate_truncated_file(tmp_path, capsys):
    text = open(BUILTIN, encoding="utf-8").read()
    cut = text.index("[e2,e3] = 2*alpha*(e1+eps*e4)") + len("[e2,e3] = 2*alpha*(e1+")
    p = tmp_path / "cut.catalog"
    p.write_text(text[:cut], encoding="utf-8")
    code, _, err = run(capsys, "validate", str(p))
    assert code == 2
    assert err.startswith(f"{p}:")
    line, col = err.split(":")[1:3]
    assert int(line) > 0 and int(col) > 0


def test_validate_defers_jacobi_to_instantiate(tmp_path, capsys):
    p = tmp_path / "jac.catalog"
    p.write_text("[entry jac]\ndim_h = 0\n[e1,e2] = e3\n[e1,e3] = e1\n"
                 "g(1,1) = 1\ng(2,2) = 1\ng(3,3) = -1\ng(4,4) = -1\n", encoding="utf-8")
    assert run(capsys, "validate", str(p))[0] == 0
    code, _, err = run(capsys, "report", "jac", "--catalog", str(p))
    assert code == 2 and "Jacobi" in err


def test_validate_missing_file(capsys):
    assert run(capsys, "validate", "/nonexistent/file.catalog")[0] == 2


# --- report ------------------------------------------------------------------------------------

def test_report_one_one_two_json(capsys):
    code, out, _ = run(capsys, "report", "thm4.2-item1", "--params", "c1=1,c2=0,c3=0", "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert d["segre"]["render"] == "[(1,12)]"
    assert d["walker"]["line"]["verdict"] == "exists"
    assert d["walker"]["line"]["witnesses"] == [["0", "1", "1", "0"]]
    assert d["lambda"][1][1][2] == "3/2"
    assert "timing_ms" in d


def test_report_reductive_text(capsys):
    code, out, _ = run(capsys, "report", "1.3^1:2", "--params", "a=1,b=0,c=0,l=1")
    assert code == 0
    assert "plane exists: span(u1, u2)" in out
    assert "conformally_flat true" in out


def test_report_komrakov_alias(capsys):
    assert run(capsys, "report", "komrakov-1.3^1:2", "--params", "a=1,b=0,c=0,l=1", "--no-oracle")[0] == 0


@pytest.mark.parametrize("argv", [
    ["report", "thm4.2-item1", "--params", "c1=0"],
    ["report", "thm4.2-item1", "--params", "c1=0,c2=0,c3=0"],
    ["report", "nonexistent-id"],
    ["report", "1.3^1:30"],
    ["report", "thm4.2-item1", "--params", "c1=1,c2=0,c3=0,zz=1"],
    ["report", "thm4.2-item1", "--params", "c1=1.5,c2=0,c3=0"],
    ["report", "thm4.2-item1", "--params", "c1"],
])
def test_report_input_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_usage_error_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["report", "thm4.2-item1", "--format", "yaml"])
    assert exc.value.code == 2


def test_report_json_is_deterministic_without_timing(capsys):
    args = ("report", "thm4.1-(1,3)", "--params", "c1=-1/2,c2=1,sgn=1", "--format", "json", "--no-timing")
    a = run(capsys, *args)[1]
    b = run(capsys, *args)[1]
    assert a == b and "timing_ms" not in a
    d = json.loads(a)
    assert d["segre"]["render"] == "[(1,3)]"
    assert d["signature"] == [2, 2]
    assert d["walker"]["plane"]["verdict"] == "none" and d["walker"]["plane"]["certificate"]["exhaustive"]


def test_catalog_from_environment(tmp_path, monkeypatch, capsys):
    p = tmp_path / "env.catalog"
    p.write_text("[entry flat]\ndim_h = 0\ng(1,1) = 1\ng(2,2) = 1\ng(3,3) = -1\ng(4,4) = -1\n", encoding="utf-8")
    monkeypatch.setenv("WALKERLAB_CATALOG", str(p))
    code, out, _ = run(capsys, "report", "flat", "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert d["walker"]["plane"]["sentinel"] == "all-planes"


# --- verify-paper --------------------------------------------------------------------------

def test_verify_case_prefix(capsys):
    code, out, _ = run(capsys, "verify-paper", "--case", "thm3.2-i")
    assert code == 0
    assert "PASS thm3.2-i-eps+1" in out and "PASS thm3.2-i-eps-1" in out
    assert "line none (exhaustive=true" in out and "plane none (exhaustive=true" in out


def test_verify_stub(capsys):
    code, out, _ = run(capsys, "verify-paper", "--case", "1.3^1:30-stub")
    assert code == 0 and out.splitlines()[0] == "SKIPPED-STUB 1.3^1:30-stub"


def test_verify_unknown_case(capsys):
    assert run(capsys, "verify-paper", "--case", "zzz")[0] == 2


def test_verify_json_deterministic(capsys):
    args = ("verify-paper", "--case", "thm4.2-item3", "--format", "json", "--seed", "3")
    a = run(capsys, *args)[1]
    assert a == run(capsys, *args)[1]
    d = json.loads(a)
    assert d["passed"] == 1 and d["seed"] == 3 and d["entries"][0]["status"] == "PASS"


def test_verify_mismatch_exit_code(tmp_path, capsys):
    p = tmp_path / "wrong.catalog"
    p.write_text("[entry wrong]\ndim_h = 0\ng(1,1) = 1\ng(2,2) = 1\ng(3,3) = -1\ng(4,4) = -1\n"
                 "segre = [(22)]\nline = none\n", encoding="utf-8")
    code, out, _ = run(capsys, "verify-paper", "--case", "wrong", "--catalog", str(p))
    assert code == 1
    assert "FAIL wrong" in out and "segre: expected [(22)], got [(11,11)]" in out
    assert "line: expected none" in out


def test_user_brackets_complete_a_stub(tmp_path, capsys):
    """Attaching brackets to a metric-only row turns it into a verified entry.

    The brackets below are those of the 1.3^1:2 pair; merged with the row's
    metric and expected invariants, every trial run verifies."""
    p = tmp_path / "attach.catalog"
    p.write_text("[entry 1.3^1:4-stub]\ndim_h = 1\nparams: l\nconstraint: l != 0\nflag: full\n"
                 "[u1,u3] = -l*e1 + (l+1)*u1 + l*u2\n[u2,u4] = u2\n[e1,u3] = u1\n[e1,u4] = u2\n", encoding="utf-8")
    code, out, _ = run(capsys, "verify-paper", "--case", "1.3^1:4-stub", "--catalog", str(p))
    assert code == 0
    assert out.startswith("PASS 1.3^1:4-stub")


@pytest.mark.skipif(shutil.which("walkerlab") is None, reason="console script not installed")
def test_console_script():
    r = subprocess.run(["walkerlab", "verify-paper", "--case", "thm4.2-item2"], capture_output=True, text=True)
    assert r.returncode == 0 and "PASS thm4.2-item2" in r.stdout


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "walkerlab.cli", "validate", BUILTIN], capture_output=True, text=True)
    assert r.returncode == 0
