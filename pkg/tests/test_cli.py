import io
import json
import subprocess
import sys

import pytest

from tm1.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_run_det():
    code, out = run("run", "-m", "sweep_parity.tm", "-x", "101", "--mode", "det")
    assert code == 0
    assert "time=4" in out and "accept=false" in out


def test_run_jsonl():
    code, out = run("--report", "jsonl", "run", "-m", "guess_all.tm", "-x", "01")
    rec = json.loads(out.strip())
    assert code == 0 and rec["accepting"] == 4 and rec["accept"] is True


def test_run_prob_and_quantum():
    code, out = run("run", "-m", "all_heads.tm", "-x", "ab")
    assert code == 0 and "p=1/4" in out
    code, out = run("run", "-m", "rev_stationary.tm", "-x", "1")
    assert code == 0 and "accept=true" in out


def test_verify_gpfa_exact():
    code, out = run("verify", "--suite", "gpfa-exact", "-m", "coin_then_check.tm",
                    "--max-len", "6")
    assert code == 0 and "failed=0" in out


def test_convert_refuses_zigzag(tmp_path):
    code, out = run("convert", "-m", "pal_zigzag.tm", "--to", "dfa", "-o", str(tmp_path / "x"))
    assert code == 1 and "UnboundedCrossing" in out


def test_exit_codes(tmp_path):
    assert run("run", "-m", "missing.tm", "-x", "0")[0] == 2
    assert run("bogus")[0] == 2
    assert run("run", "-m", "looping.tm", "-x", "a", "--fuel", "10")[0] == 3
    bad = tmp_path / "bad.tm"
    bad.write_text("variant: deterministic\nstates: q\nnonsense here\n")
    assert run("run", "-m", str(bad), "-x", "")[0] == 2
    assert run("verify", "--suite", "reversible", "-m", "converge.tm", "--max-len", "3")[0] == 1


def test_convert_and_fold(tmp_path):
    out_tm = tmp_path / "q.tm"
    assert run("convert", "-p", "pfa_half.gpfa", "--to", "nqtm", "-o", str(out_tm))[0] == 0
    code, out = run("run", "-m", str(out_tm), "-x", "aa")
    assert "p=11943936/244140625" in out
    f = tmp_path / "f.tm"
    assert run("fold", "-m", "two_pass.tm", "--auto-k", "--max-len", "5", "-o", str(f))[0] == 0
    assert run("verify", "--suite", "step-sum", "-m", str(f), "--max-len", "3")[0] == 0
    g = tmp_path / "g.gpfa"
    assert run("convert", "-m", "guess_all.tm", "--to", "gaf", "-o", str(g))[0] == 0


def test_nonreg_and_reduce():
    code, out = run("nonreg", "--lang", "L_eq", "-n", "2")
    assert code == 0 and "value=3" in out
    code, out = run("reduce", "-m", "center_to_A.tm", "--lang", "A_hash", "-x", "011")
    assert code == 0 and "member=true" in out
    gp = ("reduce", "-m", "identity.tm", "--gpfa", "pfa_half.gpfa", "--cut", "1/2", "--cmp", "eq")
    code, out = run(*gp, "-x", "")
    assert code == 0 and "member=false" in out
    # identity outputs over 0/1/#, the automaton reads only 'a'
    assert run(*gp, "-x", "0")[0] == 2


@pytest.mark.parametrize("suite,target", [
    ("step-sum", "two_pass.tm"), ("gaf-exact", "count_as.tm"), ("sync-ptm", "pfa_thirds.gpfa"),
    ("nqtm-formula", "pfa_half.gpfa"), ("qtm-gap", "rev_stationary.tm"),
    ("refinement", "mark_one.tm"), ("dfa-equiv", "guess_11.tm"),
    ("support-transfer", "guess_11.tm"), ("reversible", "rev_stationary.tm"),
    ("norm", "prob_endcheck.tm")])
def test_suites(suite, target):
    assert run("verify", "--suite", suite, "-m", target, "--max-len", "3")[0] == 0


def test_deterministic_reports():
    a = run("--report", "jsonl", "crossings", "-m", "two_pass.tm", "-x", "011")
    b = run("--report", "jsonl", "crossings", "-m", "two_pass.tm", "-x", "011")
    assert a == b


def test_module_entry():
    r = subprocess.run([sys.executable, "-m", "tm1", "run", "-m", "sweep_parity.tm", "-x", "1"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "accept=true" in r.stdout
