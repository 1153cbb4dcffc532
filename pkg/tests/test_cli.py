import json
import subprocess
import sys

import mpmath as mp
import pytest

from cmmahler.cli import main, parse_t
from cmmahler.numerics import working


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def json_lines(text):
    rows = [json.loads(ln) for ln in text.splitlines() if ln.strip()]
    for row in rows:
        # printing a parsed row reproduces it exactly
        assert json.loads(json.dumps(row, sort_keys=True)) == row
    return rows


def test_classify_rational(capsys):
    code, out, _ = run(capsys, "classify", "P", "1", "--digits", "30", "--format", "json")
    assert code == 0
    rows = json_lines(out)
    rat = sorted(-r["minpoly"][0] // r["minpoly"][1] for r in rows if r.get("degree") == 1)
    assert rat == [-16, 8, 32]


def test_classify_Q_quadratic_census(capsys):
    code, out, _ = run(capsys, "classify", "--family", "Q", "--max-degree", "2",
                       "--digits", "30", "--format", "json")
    assert code == 0
    census = json_lines(out)[-1]["census"]
    assert census == {"rational": 3, "real quadratic": 15, "imaginary quadratic": 2}


def test_classify_needs_bound_above_four(capsys):
    code, _, err = run(capsys, "classify", "P", "5")
    assert code == 2 and "error" in err


def test_theta_text(capsys):
    code, out, _ = run(capsys, "theta", "P", "--cm", "16,0,1", "--coeffs", "16")
    assert code == 0
    lines = [ln.split() for ln in out.splitlines() if ln and ln[0].isdigit()]
    nz = [(int(n), int(c)) for n, c in lines if int(c)]
    assert nz == [(1, 32), (2, 64), (5, 64), (9, -96), (10, -128), (13, -192)]
    assert out.splitlines()[0].split()[1:] == ["64", "2", "16"]


def test_theta_json(capsys):
    code, out, _ = run(capsys, "theta", "Q", "--cm", "1,0,1", "--coeffs", "10", "--format", "json")
    row = json_lines(out)[0]
    assert code == 0 and row["coeffs"][1] == 4 and row["level"] == 36


def test_mahler_all_methods(capsys):
    code, out, _ = run(capsys, "mahler", "P", "--cm", "16,0,1", "--method", "all",
                       "--digits", "30", "--format", "json")
    row = json_lines(out)[0]
    assert code == 0
    with working(30):
        vals = [mp.mpf(v) for v in row["values"].values()]
        assert len(vals) == 3
        assert all(abs(v - mp.mpf("1.2009988725127329117648305174")) < 1e-25 for v in vals)
        assert mp.mpf(row["max_deviation"]) < 1e-25


def test_mahler_modified_branch_note(capsys):
    code, out, _ = run(capsys, "mahler", "Q", "--t", "24", "--digits", "25")
    assert code == 0
    assert "modified" in out
    assert "-1.80071452138923" in out


def test_mahler_complex_input(capsys):
    code, out, _ = run(capsys, "mahler", "P", "--t", "8+8i√3", "--digits", "25", "--format", "json")
    row = json_lines(out)[0]
    with working(30):
        from cmmahler.mahler import mu
        ref = mu(8 + 8j * mp.sqrt(3), 25)
        assert code == 0 and abs(mp.mpf(row["values"]["quad"]) - ref) < 1e-20


def test_parse_t_forms():
    with working(40):
        v, _ = parse_t("minpoly:-8,-16,1:1", 30)
        assert abs(v - (8 + 6 * mp.sqrt(2))) < mp.mpf(10) ** -28
        v, _ = parse_t("8+6sqrt(2)", 30)
        assert abs(v - (8 + 6 * mp.sqrt(2))) < mp.mpf(10) ** -28
        _, p = parse_t("cm:16,16,5", 30)
        assert tuple(p) == (16, 16, 5)
        v, _ = parse_t("-73-70√2+i(161+115√2)", 30)
        assert abs(v - mp.mpc(-73 - 70 * mp.sqrt(2), 161 + 115 * mp.sqrt(2))) < mp.mpf(10) ** -25


def test_mahler_usage_errors(capsys):
    code, _, _ = run(capsys, "mahler", "P")
    assert code == 2
    code, _, _ = run(capsys, "mahler", "P", "--t", "30", "--method", "ek")
    assert code == 2
    code, _, _ = run(capsys, "mahler", "X", "--t", "30")
    assert code == 2
    code, _, _ = run(capsys, "mahler", "P", "--t", "30", "--digits", "10")
    assert code == 2


def test_verify_pass_and_missing(capsys):
    code, out, _ = run(capsys, "verify", "--id", "1", "--digits", "40", "--format", "json")
    rep = json_lines(out)[0]
    assert code == 0 and rep["pass"] and mp.mpf(rep["residual"]) < 1e-30
    code, _, _ = run(capsys, "verify", "--id", "999")
    assert code == 3


def test_verify_16(capsys):
    code, out, _ = run(capsys, "verify", "--id", "16", "--digits", "30")
    assert code == 0 and "#16: pass" in out


def test_discover_two_by_two(capsys):
    code, out, _ = run(capsys, "discover", "--id", "1", "--format", "json")
    row = json_lines(out)[0]
    assert code == 0 and row["matches_record"] and row["relation"] == [1, -1, -128]


def test_lvalue_form_file(capsys):
    code, out, _ = run(capsys, "lvalue", "--form", "f64aa1.txt", "--digits", "30", "--format", "json")
    row = json_lines(out)[0]
    assert code == 0 and row["L2"].startswith("1.02314765207255079")
    code, _, _ = run(capsys, "lvalue", "--form", "nonexistent.txt")
    assert code == 3


def test_lvalue_theta(capsys):
    code, out, _ = run(capsys, "lvalue", "--theta", "P:16,0,1", "--digits", "25")
    with working(30):
        ref = 4 * mp.pi ** 2 * mp.mpf("1.2009988725127329117648305174")
        assert code == 0 and abs(mp.mpf(out.split("=")[1]) - ref) < 1e-20


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cmmahler.cli", "theta", "P", "--cm", "16,0,1",
                           "--coeffs", "3", "--format", "json"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["coeffs"] == [0, 32, 64, 0]
