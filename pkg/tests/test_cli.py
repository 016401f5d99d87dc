import json
import math

import numpy as np
import pytest

from conftest import PUBLISHED_GAMMA2, PUBLISHED_LAMBDA, PUBLISHED_LAMBDA0, PUBLISHED_T0
from spheroidal_pde import cli
from spheroidal_pde.cli import fmt_float, main, to_json
from spheroidal_pde.verify import Check, rng_for


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    lines = text.strip().splitlines()
    return lines[0].split(","), np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])


def test_theta_scan_published(capsys):
    code, out, _ = run(capsys, "theta-scan", "--mu", 1, "--a", 5, "--b", 0)
    assert code == 0
    header, rows = csv_rows(out)
    assert header == ["lambda", "theta"]
    assert len(rows) == 81
    lam, th = rows[:, 0], rows[:, 1]
    i = int(np.argmin(np.abs(lam + 0.85)))
    assert lam[i] == pytest.approx(-0.85, abs=1e-12) and lam[i + 1] == pytest.approx(-0.80, abs=1e-12)
    assert th[i] * th[i + 1] < 0


def test_theta_scan_zero_surface(capsys):
    code, out, _ = run(capsys, "theta-scan", "--mu", 1, "--a", 0, "--b", 0)
    assert code == 0
    _, rows = csv_rows(out)
    assert np.all(rows[:, 1] == 0.0)


def test_theta_scan_single_row(capsys):
    code, out, _ = run(capsys, "theta-scan", "--mu", 1, "--a", 5, "--b", 0, "--lambda-min", -1, "--lambda-max", 0, "--step", 2)
    assert code == 0
    _, rows = csv_rows(out)
    assert rows.shape == (1, 2) and rows[0, 0] == -1.0


def test_theta_scan_json(capsys):
    code, out, _ = run(capsys, "theta-scan", "--mu", 1, "--a", 5, "--b", 0, "--step", 0.5, "--format", "json")
    data = json.loads(out)
    assert code == 0 and len(data["lambda"]) == len(data["theta"]) == 9


def test_theta_command(capsys):
    code, out, _ = run(capsys, "theta", "--mu", 1, "--u1", 0, "--u2", 0, "--u3", 0, "--lam", 0)
    data = json.loads(out)
    assert code == 0 and data["theta"] == 0.0 and data["converged"] is True
    code, out, _ = run(capsys, "theta", "--mu", 1, "--u1", 5, "--u2", 0, "--u3", 0, "--lam", 0, "--method", "frobenius")
    assert json.loads(out)["theta"] == pytest.approx(0.033312848357495392595, rel=1e-10)


def test_theta_command_reports_best_on_no_convergence(capsys):
    code, out, err = run(capsys, "theta", "--mu", 1, "--u1", 2, "--u2", 0.5, "--u3", -1, "--lam", 0.3, "--k-max", 50, "--tol", 1e-15)
    assert code == 0 and "warning" in err
    assert json.loads(out)["converged"] is False


def test_root_command(capsys):
    code, out, _ = run(capsys, "root", "--mu", 1, "--a", 5, "--b", 0)
    roots = json.loads(out)["roots"]
    assert code == 0 and len(roots) == 5
    assert min(abs(r - PUBLISHED_LAMBDA0) for r in roots) <= 1e-9


@pytest.mark.parametrize(
    "a,b,lam",
    [(5.0, 0.0, PUBLISHED_LAMBDA), (1e-6, 0.0, 2.0), (5.0, 0.3, -3.5904119)],
)
def test_eigen_examples(capsys, a, b, lam):
    code, out, _ = run(capsys, "eigen", "--mu", 1, "--a", a, "--b", b)
    data = json.loads(out)
    assert code == 0
    assert data["oracle_match"] is True
    assert data["lambda"] == pytest.approx(lam, abs=1e-5)


def test_eigen_published_values(capsys):
    _, out, _ = run(capsys, "eigen", "--mu", 1, "--a", 5, "--b", 0)
    data = json.loads(out)
    assert abs(data["lambda0"] - PUBLISHED_LAMBDA0) <= 1e-9
    assert abs(data["t0"] - PUBLISHED_T0) <= 1e-7
    assert data["gamma2"] == pytest.approx(PUBLISHED_GAMMA2, rel=1e-6)
    assert data["lambda"] == pytest.approx(PUBLISHED_LAMBDA, rel=1e-6)
    assert data["psi_drift_max"] <= 1e-9


def test_trace_csv(capsys):
    code, out, err = run(capsys, "trace", "--mu", 1, "--a", 5, "--b", 0, "--lambda0", PUBLISHED_LAMBDA0, "--t-max", 0.4)
    assert code == 0 and err == ""
    header, rows = csv_rows(out)
    assert header == ["t", "u1", "u2", "u3", "lambda", "psi"]
    t, lam = rows[:, 0], rows[:, 4]
    i = np.nonzero(np.diff(np.sign(lam)))[0]
    assert len(i) >= 1 and 0.279 <= t[i[0]] <= 0.2794 <= t[i[0] + 1] <= 0.281
    np.testing.assert_allclose(rows[:, 1], 5.0 * np.exp(2.0 * t), rtol=1e-12)


def test_trace_truncated_at_escape(capsys):
    code, out, err = run(capsys, "trace", "--mu", 1, "--a", 5, "--b", 0, "--lambda0", PUBLISHED_LAMBDA0, "--t-max", 0.5)
    assert code == 0 and "escapes" in err
    _, rows = csv_rows(out)
    assert 0.44 <= rows[-1, 0] <= 0.46


def test_trace_json(capsys):
    _, out, _ = run(capsys, "trace", "--mu", 1, "--a", 5, "--b", 0, "--lambda0", PUBLISHED_LAMBDA0, "--t-max", 0.3, "--format", "json")
    data = json.loads(out)
    assert abs(data["t0"] - PUBLISHED_T0) <= 1e-7 and len(data["t"]) == 301


def test_oracle_command(capsys):
    code, out, _ = run(capsys, "oracle", "--mu", 1, "--gamma2", 0, "--modes", 3)
    data = json.loads(out)
    assert code == 0 and data["stable"] is True
    np.testing.assert_allclose(data["lambdas"], [2.0, 6.0, 12.0], atol=1e-12)


def test_oracle_command_unstable(capsys):
    code, out, err = run(capsys, "oracle", "--mu", 1, "--gamma2", 400, "--N", 15)
    assert code == 0 and json.loads(out)["stable"] is False and "warning" in err


def test_verify_deformation(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "deformation")
    data = json.loads(out)
    assert code == 0 and data["passed"] is True and data["seed"] == 42
    assert data["deformation.value"] <= 1e-11


def test_verify_failure_exit_code(capsys, monkeypatch):
    monkeypatch.setitem(cli.SUITES, "deformation", lambda rng: [Check("broken", False, 1.0, 0.5)])
    code, out, _ = run(capsys, "verify", "--suite", "deformation")
    assert code == 5 and json.loads(out)["passed"] is False


@pytest.mark.parametrize(
    "argv",
    [
        ["theta-scan", "--mu", -1, "--a", 5, "--b", 0],
        ["theta-scan", "--mu", 1, "--a", 5, "--b", 0, "--lambda-min", 1, "--lambda-max", 0],
        ["theta-scan", "--mu", 1, "--a", 5, "--b", 0, "--step", 0],
        ["theta", "--mu", 1, "--u1", 0, "--u2", 0, "--u3", 0, "--lam", 0, "--tol", 0],
        ["trace", "--mu", 1, "--a", 5, "--b", 0, "--lambda0", 0, "--h", 0],
        ["oracle", "--mu", 1, "--gamma2", 1, "--modes", 5, "--N", 10],
    ],
)
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and "error" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["eigen", "--mu", "1"])
    assert info.value.code == 2


def test_no_root_exit_code(capsys):
    code, out, err = run(capsys, "eigen", "--mu", 1, "--a", 5, "--b", 0, "--lambda-min", 0.2, "--lambda-max", 0.5)
    assert code == 3 and out == "" and "no sign change" in err
    code, _, _ = run(capsys, "root", "--mu", 1, "--a", 5, "--b", 0, "--lambda-min", 0.2, "--lambda-max", 0.5)
    assert code == 3


def test_no_crossing_exit_code(capsys):
    code, out, _ = run(capsys, "trace", "--mu", 1, "--a", 5, "--b", 0, "--lambda0", PUBLISHED_LAMBDA0, "--t-max", 0.1)
    assert code == 4 and out == ""


def test_output_deterministic(capsys):
    argv = ["theta-scan", "--mu", 1, "--a", 5, "--b", 0.3, "--step", 0.1]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_output_file(capsys, tmp_path):
    path = tmp_path / "scan.csv"
    code, out, _ = run(capsys, "--output", path, "theta-scan", "--mu", 1, "--a", 5, "--b", 0, "--step", 0.5)
    assert code == 0 and out == ""
    _, direct, _ = run(capsys, "theta-scan", "--mu", 1, "--a", 5, "--b", 0, "--step", 0.5)
    assert path.read_text() == direct


def test_fmt_float_round_trips():
    rng = rng_for(0)
    for x in np.concatenate([rng.standard_normal(200) * 10.0 ** rng.integers(-300, 300, 200), [0.1, 1 / 3, 5e-324]]):
        assert float(fmt_float(x)) == x
    assert fmt_float(math.nan) == "nan" and fmt_float(-math.inf) == "-inf"


def test_to_json_non_finite_is_null():
    data = json.loads(to_json({"a": math.nan, "b": [1.0, math.inf], "c": True, "d": "x\"y", "e": None}))
    assert data == {"a": None, "b": [1.0, None], "c": True, "d": 'x"y', "e": None}
    with pytest.raises(TypeError):
        to_json({"a": object()})
