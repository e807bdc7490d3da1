import csv
import io
import json
import math
import os
import subprocess
import sys

import pytest

from qsummation import cli


def invoke(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_complex():
    assert cli.parse_complex("0.5") == 0.5
    assert cli.parse_complex("1+2j") == 1 + 2j
    z = cli.parse_complex("0.5@-7.0")
    assert z.modulus == 0.5 and z.argument == -7.0
    with pytest.raises(ValueError):
        cli.parse_complex("abc")


def test_list(capsys):
    code, out, _ = invoke(capsys, "verify", "--list")
    names = [line.split()[0] for line in out.splitlines()]
    assert code == 0 and len(names) >= 12
    for need in ("theta", "heine", "watson", "thm-identity", "stokes", "tschakaloff"):
        assert need in names
    code, out, _ = invoke(capsys, "sweep", "--list")
    assert "confluence-lt1" in out


def test_eval_theta(capsys):
    code, out, _ = invoke(capsys, "eval", "--target", "theta", "--q", "0.5", "--x", "1",
                          "--no-timestamp")
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == 1 and doc["status"] == "OK"
    case = doc["cases"][0]
    assert abs(case["value_re"] - 3.28326512131030773) < 1e-12
    assert case["terms_used"] is not None and case["abs_err"] >= 0


def test_eval_surface_point(capsys):
    code, out, _ = invoke(capsys, "eval", "--target", "euler-ray", "--q", "2",
                          "--x", "0.4@-4.0", "--no-timestamp")
    assert code == 0
    assert json.loads(out)["cases"][0]["value_re"] is not None


def test_verify_identity(capsys):
    code, out, _ = invoke(capsys, "verify", "--target", "thm-identity", "--q", "2",
                          "--tol", "1e-8", "--no-timestamp")
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "PASS"
    assert doc["max_residual"] < 1e-8 and len(doc["cases"]) == 5


def test_sweep_csv(capsys):
    code, out, _ = invoke(capsys, "sweep", "--target", "confluence-lt1", "--x", "1",
                          "--q-grid", "0.9,0.99,0.999", "--output", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == ["param", "value_re", "value_im", "abs_err", "residual", "pass"]
    assert len(rows) == 4
    err = [float(r[4]) for r in rows[1:]]
    assert err[0] > err[1] > err[2]
    assert all(r[5] == "true" for r in rows[1:])


def test_sweep_fail_exit_code(capsys):
    code, out, _ = invoke(capsys, "sweep", "--target", "confluence-lt1", "--x", "1",
                          "--q-grid", "0.999,0.99,0.9", "--no-timestamp")
    assert code == 1 and json.loads(out)["status"] == "FAIL"


def test_numerical_error_exit_code(capsys):
    code, out, err = invoke(capsys, "eval", "--target", "theta", "--q", "0.5", "--x", "0")
    assert code == 1 and out == ""
    assert err.startswith("error: ZeroArgument")


@pytest.mark.parametrize("argv,key", [
    (("verify", "--target", "nope"), "target"),
    (("verify", "--target", "theta", "--tol", "1"), "tol"),
    (("verify", "--target", "theta", "--tol", "1e-20"), "tol"),
    (("verify", "--target", "theta", "--q", "2"), "q"),
    (("verify", "--target", "theta", "--lam", "1"), "lam"),
    (("sweep", "--target", "confluence-lt1", "--q-grid", "0.9,0.9"), "q-grid"),
    (("verify", "--target", "theta", "--x", "zz"), "x"),
    (("verify", "--target", "q-factorial", "--kernel", "gauss"), "kernel"),
    (("verify",), "target"),
])
def test_usage_errors(capsys, argv, key):
    code, out, err = invoke(capsys, *argv)
    assert code == 2 and out == ""
    assert err.startswith(f"usage error: {key}")


def test_threads_env(capsys, monkeypatch):
    monkeypatch.setenv("QSUM_THREADS", "0")
    code, _, err = invoke(capsys, "verify", "--target", "theta")
    assert code == 2 and "QSUM_THREADS" in err
    monkeypatch.setenv("QSUM_THREADS", "4")
    code4, out4, _ = invoke(capsys, "verify", "--target", "omega", "--samples", "8",
                            "--no-timestamp")
    monkeypatch.setenv("QSUM_THREADS", "1")
    code1, out1, _ = invoke(capsys, "verify", "--target", "omega", "--samples", "8",
                            "--no-timestamp")
    assert code4 == code1 == 0 and out4 == out1


def test_deterministic_and_seeded(capsys):
    args = ("verify", "--target", "heine", "--samples", "4", "--no-timestamp")
    a = invoke(capsys, *args, "--seed", "7")[1]
    b = invoke(capsys, *args, "--seed", "7")[1]
    c = invoke(capsys, *args, "--seed", "8")[1]
    assert a == b and a != c


def test_timestamp_present(capsys):
    doc = json.loads(invoke(capsys, "verify", "--target", "theta", "--x", "1.5")[1])
    assert "timestamp" in doc and len(doc["cases"]) == 1


def test_pinned_parameters_single_case(capsys):
    code, out, _ = invoke(capsys, "verify", "--target", "stokes", "--q", "2",
                          "--x", "0.4@-1.5707963", "--no-timestamp")
    doc = json.loads(out)
    assert code == 0 and len(doc["cases"]) == 1


@pytest.mark.parametrize("target", [t.name for t in cli.registry("verify")
                                    if t.name not in ("modified-tschakaloff",)])
def test_every_verify_target_passes(capsys, target):
    code, out, _ = invoke(capsys, "verify", "--target", target, "--samples", "2",
                          "--no-timestamp")
    assert code == 0, out


def test_module_entry_point():
    env = dict(os.environ, QSUM_THREADS="1")
    r = subprocess.run([sys.executable, "-m", "qsummation", "verify", "--list"],
                       capture_output=True, text=True, env=env, check=False)
    assert r.returncode == 0 and "watson" in r.stdout
