import csv
import io
import json
import os
import subprocess
import sys

import pytest

from eulercf.cli import main
from eulercf.linforms import APTEKAREV_SPEC, GAMMA_SPEC
from eulercf.numkit import gamma_digits


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def usage(capsys, *argv):
    # argparse errors exit through SystemExit(2); our own usage errors return 2
    try:
        code = main(list(argv))
    except SystemExit as exc:
        code = exc.code
    capsys.readouterr()
    return code


def test_seq_gamma(capsys):
    code, out, _ = run(capsys, "seq", "gamma", "--max-n", "4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n q p"
    assert lines[-1] == "4 209 725/6"
    assert len(lines) == 6


def test_seq_stieltjes(capsys):
    code, out, _ = run(capsys, "seq", "stieltjes", "--max-n", "3", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert [r[1] for r in rows[1:]] == ["0", "1", "4", "20"]


@pytest.mark.parametrize("name", ["aptekarev", "rivoal", "delta-cap", "discrepancy"])
def test_seq_small_ranges(capsys, name):
    code, out, _ = run(capsys, "seq", name, "--max-n", "1", "--format", "json")
    assert code == 0
    assert [r["n"] for r in json.loads(out)] == [0, 1]


def test_seq_values_in_json(capsys):
    run_code, out, _ = run(capsys, "seq", "discrepancy", "--max-n", "5", "--format", "json")
    rows = json.loads(out)
    assert rows[5] == {"n": 5, "frak_d": "787/5", "delta_cap": 787}
    _, out, _ = run(capsys, "seq", "rivoal", "--max-n", "3", "--format", "json")
    assert json.loads(out)[3]["Q"] == "727/6"


def test_usage_errors(capsys):
    assert usage(capsys, "seq", "gamma", "--max-n", "-1") == 2
    assert usage(capsys, "seq", "nosuch") == 2
    assert usage(capsys, "cf", "nosuch") == 2
    assert usage(capsys, "cf", "laplace", "--a", "x") == 2
    assert usage(capsys, "seq", "gamma", "-P", "5") == 2
    assert usage(capsys, "seq", "gamma", "--format", "xml") == 2
    assert usage(capsys, "verify", "nosuch") == 2
    assert usage(capsys, "table", "gamma-main", "--ns", "") == 2
    assert usage(capsys, "table", "gamma-main", "--ns", "1600", "-P", "40") == 2
    assert usage(capsys) == 2


def test_cf(capsys):
    code, out, _ = run(capsys, "cf", "gamma", "-N", "3")
    assert code == 0
    assert out.splitlines()[-1].split()[-1] == "59/102"
    code, out, _ = run(capsys, "cf", "evenpart", "--a", "1", "--z", "1", "-N", "2")
    assert out.splitlines()[-1].split()[-1] == "4/7"
    code, out, _ = run(capsys, "cf", "laplace", "--a", "1/2", "--z", "5", "-N", "2",
                       "--format", "csv", "--elements-only")
    assert out.splitlines() == ["index,a_num,a_den,b_num,b_den", "1,1,1,5,1", "2,1,2,1,1"]


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify", "telescope", "--max-n", "50")
    assert code == 0
    assert out.count("[PASS]") == 2 and "FAIL" not in out
    code, out, _ = run(capsys, "verify", "integrality", "--max-n", "200")
    assert code == 0
    code, out, _ = run(capsys, "verify", "asymptotics", "--ns", "100,400,900,1600", "-P", "120")
    assert code == 0
    assert out.count("[PASS]") == 5


def test_verify_all(capsys):
    code, out, _ = run(capsys, "verify", "all", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["suite", "check", "status", "detail"]
    assert {r[0] for r in rows[1:]} == {"integrality", "telescope", "cf-consistency", "asymptotics", "lemma-i"}
    assert all(r[2] == "PASS" for r in rows[1:])


def test_verify_failure_exit_1(capsys, tmp_path):
    # a wrong digit at position 50 slips past the n=400 gate but not the n=1600 ratio
    digits = gamma_digits()
    i = 2 + 50
    path = tmp_path / "gamma.txt"
    path.write_text(digits[:i] + str((int(digits[i]) + 5) % 10) + digits[i + 1 :] + "\n")
    code, out, _ = run(capsys, "verify", "asymptotics", "--gamma-digits", str(path))
    assert code == 1
    assert "[FAIL]" in out


def test_gamma_digits_override(capsys, tmp_path):
    short = tmp_path / "short.txt"
    # delta at P digits needs gamma to P + 10
    short.write_text(gamma_digits()[:42] + "\n")
    code, out, _ = run(capsys, "constants", "-P", "20", "--gamma-digits", str(short))
    assert code == 0
    assert "gamma 0.57721566490153286060" in out
    assert usage(capsys, "constants", "-P", "40", "--gamma-digits", str(short)) == 2
    junk = tmp_path / "junk.txt"
    junk.write_text("3.14159\n")
    assert usage(capsys, "constants", "--gamma-digits", str(junk)) == 2
    assert usage(capsys, "constants", "--gamma-digits", str(tmp_path / "missing.txt")) == 2
    corrupt = tmp_path / "corrupt.txt"
    d = gamma_digits()
    corrupt.write_text(d[:12] + str((int(d[12]) + 1) % 10) + d[13:])
    assert usage(capsys, "constants", "--gamma-digits", str(corrupt)) == 2


def test_constants(capsys):
    code, out, _ = run(capsys, "constants", "-P", "10")
    assert code == 0
    assert out.splitlines() == [
        "name value", "gamma 0.5772156649", "delta 0.5963473623", "pi 3.1415926535", "e 2.7182818284",
    ]


def test_linform(capsys, tmp_path):
    spec = tmp_path / "gamma.json"
    spec.write_text(GAMMA_SPEC.to_json())
    code, out, _ = run(capsys, "linform", "--spec", str(spec), "-n", "2")
    assert code == 0
    n, q, p, F = out.splitlines()[1].split()
    assert (n, q, p) == ("2", "7", "4")
    assert len(F.split(".")[1]) == 60
    spec.write_text(APTEKAREV_SPEC.to_json())
    code, out, _ = run(capsys, "linform", "--spec", str(spec), "-n", "2", "--format", "json")
    # rationals are written as strings so large values survive JSON readers
    assert json.loads(out)[0]["q"] == "50" and json.loads(out)[0]["p"] == "31"


def test_linform_improper(capsys, tmp_path):
    spec = tmp_path / "improper.json"
    spec.write_text(json.dumps({"num": [[1, 0], [0, 1]], "den": [[0, 1], [1, 0]], "m": [1, 0]}))
    code, out, err = run(capsys, "linform", "--spec", str(spec), "-n", "3")
    assert code == 0
    assert "improper: gamma coefficient is zero" in err
    assert out.splitlines()[1].split()[1] == "0"


def test_linform_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"num": [[1]]}')
    assert usage(capsys, "linform", "--spec", str(bad), "-n", "1") == 2
    assert usage(capsys, "linform", "-n", "1") == 2
    pole = tmp_path / "pole.json"
    pole.write_text(json.dumps({"num": [[1, -2]], "den": [[0, 1]], "m": [1, 0]}))
    code, _, err = run(capsys, "linform", "--spec", str(pole), "-n", "1")
    assert code == 1
    assert "not well formed" in err


def test_table(capsys):
    code, out, _ = run(capsys, "table", "gamma-main", "--ns", "10,20", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "family,n,approx_num,approx_den,err,predicted,ratio"
    code, out, _ = run(capsys, "table", "aptekarev", "--ns", "20,10")
    assert out.splitlines()[-1] == "trend decreasing"


def test_output_is_atomic_and_reproducible(capsys, tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    for target in (out1, out2):
        code, stdout, _ = run(capsys, "table", "rivoal", "--ns", "10,20,30", "--format", "csv", "--out", str(target))
        assert code == 0 and stdout == ""
    assert out1.read_bytes() == out2.read_bytes()
    assert sorted(os.listdir(tmp_path)) == ["a.csv", "b.csv"]


def test_failed_write_leaves_no_partial_file(capsys, tmp_path, monkeypatch):
    target = tmp_path / "out.csv"
    target.write_text("old\n")

    def boom(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        main(["seq", "gamma", "--max-n", "3", "--out", str(target)])
    assert target.read_text() == "old\n"
    assert os.listdir(tmp_path) == ["out.csv"]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "eulercf", "seq", "stieltjes", "--max-n", "3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[-1] == "3 20"
