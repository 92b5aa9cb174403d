import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from logpot.cli import fmt, main, to_json, write_atomic


def run(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out.strip(), err.strip()


def test_capacity_exact_strings(capsys):
    assert run(capsys, "capacity", "--set", '{"intervals": [[0, 1]]}') == (0, "0.25", "")
    assert run(capsys, "capacity", "--set", '{"intervals": [[-2, 2]]}') == (0, "1", "")


def test_capacity_from_file(tmp_path, capsys):
    path = tmp_path / "E.json"
    path.write_text('{"intervals": [[-2, -1], [1, 2]]}')
    status, out, _ = run(capsys, "capacity", "--set", str(path))
    assert status == 0
    assert float(out) == pytest.approx(np.sqrt(3) / 2, abs=1e-12)


@pytest.mark.parametrize("arg", ['{"intervals": [[0, 1]],}', "missing.json", '{"interval": [[0, 1]]}'])
def test_malformed_set_exit_2(capsys, arg):
    status, out, err = run(capsys, "capacity", "--set", arg)
    assert status == 2 and out == ""
    assert err.startswith("error E_SET_PARSE:")


def test_semantic_error_keeps_code(capsys):
    status, _, err = run(capsys, "capacity", "--set", '{"intervals": [[1, 0]]}')
    assert status == 2
    assert err.startswith("error E_MALFORMED_INTERVAL:")


def test_solver_error_exit_3(capsys, tmp_path):
    from logpot import cli
    from logpot.errors import SolveFailed

    def boom(args):
        raise SolveFailed("no convergence", 1.0)

    cli.COMMANDS["capacity"], saved = boom, cli.COMMANDS["capacity"]
    try:
        status, _, err = run(capsys, "capacity", "--set", '{"intervals": [[0, 1]]}')
    finally:
        cli.COMMANDS["capacity"] = saved
    assert status == 3 and err.startswith("error E_")


def test_fmt_17_digits():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(2.0) == "2"
    assert float(fmt(np.pi)) == np.pi
    assert to_json({"x": [1.5, 1 + 2j], "ok": True, "n": 3}) == '{"x": [1.5, [1, 2]], "ok": true, "n": 3}'


def test_write_atomic_replaces(tmp_path):
    target = tmp_path / "sub" / "out.csv"
    write_atomic(str(target), "a\n")
    write_atomic(str(target), "b\n")
    assert target.read_text() == "b\n"
    assert [p.name for p in target.parent.iterdir()] == ["out.csv"]


def test_equilibrium_csv(tmp_path, capsys):
    out = tmp_path / "density.csv"
    status, text, _ = run(capsys, "equilibrium", "--set", '{"intervals": [[-1, 1]]}',
                          "--grid", "16", "--out", str(out))
    assert status == 0
    report = json.loads(text)
    assert report["capacity"] == pytest.approx(0.5)
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["x", "density"]
    x, d = np.array(rows[1:], dtype=float).T
    assert np.allclose(d, 1 / (np.pi * np.sqrt(1 - x ** 2)), rtol=1e-8)


def test_green_points(capsys):
    status, text, _ = run(capsys, "green", "--set", '{"intervals": [[-2, 2]]}', "--points", '[3, [0, 1]]')
    g = json.loads(text)["green"]
    assert status == 0
    assert g[0] == pytest.approx(np.arccosh(1.5), abs=1e-12)
    assert g[1] == pytest.approx(np.arcsinh(0.5), abs=1e-12)


def test_chebyshev_and_bounds(capsys):
    _, text, _ = run(capsys, "chebyshev", "--set", '{"intervals": [[-1, 1]]}', "--degree", "4")
    assert json.loads(text)["sup_norm"] == pytest.approx(2 ** -3, rel=1e-9)
    _, text, _ = run(capsys, "bounds-chain", "--set", '{"intervals": [[0, 1], [2, 3]]}', "--degree", "4")
    assert json.loads(text)["holds"] is True


def test_fekete(capsys):
    _, text, _ = run(capsys, "fekete", "--set", '{"intervals": [[-1, 1]]}', "--n", "4")
    pts = json.loads(text)["points"]
    assert pts[0] == pytest.approx(-1) and pts[-1] == pytest.approx(1)


def test_zeros_and_regularity(tmp_path, capsys):
    jac = tmp_path / "j.json"
    jac.write_text(json.dumps({"a": [1.0] * 20, "b": [0.0] * 20}))
    out = tmp_path / "nu.csv"
    status, text, _ = run(capsys, "zeros", "--jacobi", str(jac), "--n", "5", "--out", str(out))
    assert status == 0 and json.loads(text)["max"] == pytest.approx(np.sqrt(3))
    assert out.read_text().splitlines()[0] == "x,weight"
    _, text, _ = run(capsys, "regularity", "--jacobi", str(jac), "--set", '{"intervals": [[-2, 2]]}',
                     "--n", "5,10,20")
    assert json.loads(text)["verdict"] == "regular"


def test_stahl_totik_measure_formats(capsys):
    _, text, _ = run(capsys, "stahl-totik", "--measure", '{"kind": "dyadic_atoms", "y": 0.1}',
                     "--m", "64", "--eta", "2.0")
    assert 0 < json.loads(text)["bad_length"] <= 1
    status, _, err = run(capsys, "stahl-totik", "--measure", '{"nodes": [0, 1], "weight": [1, 1]}',
                         "--m", "4", "--eta", "1")
    assert status == 2 and err.startswith("error E_MEASURE_PARSE:")


def test_opuc_commands(tmp_path, capsys):
    alpha = tmp_path / "a.json"
    alpha.write_text(json.dumps({"alpha": [[0.3, 0.1], [-0.2, 0.2], [0.1, 0.0]]}))
    _, text, _ = run(capsys, "opuc-zeros", "--alpha", str(alpha), "--n", "3")
    zeros = np.array(json.loads(text)["zeros"])
    assert zeros.shape == (3, 2) and np.all(np.hypot(*zeros.T) < 1)
    out = tmp_path / "F.csv"
    _, text, _ = run(capsys, "balayage", "--alpha", str(alpha), "--n", "3", "--grid", "512", "--out", str(out))
    assert json.loads(text)["max_moment_error"] < 1e-10
    assert out.read_text().startswith("theta,F\n")


def test_lyapunov_family_flags(capsys):
    _, text, _ = run(capsys, "lyapunov", "--family", "free", "--z", "3", "--n", "2000")
    r = json.loads(text)
    assert r["gamma"] == pytest.approx(np.arccosh(1.5), abs=1e-3)
    status, text, _ = run(capsys, "lyapunov", "--family", "am", "--lambda", "4", "--freq", "golden",
                          "--z", "0+0.0001i", "--n", "20000", "--samples", "2")
    assert status == 0 and json.loads(text)["gamma"] == pytest.approx(np.log(2), abs=5e-2)


def test_negative_values_accepted(tmp_path, capsys):
    out = tmp_path / "dos.csv"
    status, text, _ = run(capsys, "dos", "--family", "anderson", "--range", "-1,1", "--n", "200",
                          "--samples", "2", "--out", str(out))
    assert status == 0 and json.loads(text)["points"] == 400
    status, _, _ = run(capsys, "lyapunov", "--family", "anderson", "--z", "-1+0.1i", "--n", "1000")
    assert status == 0


def test_thouless(tmp_path, capsys):
    zs = tmp_path / "zs.json"
    zs.write_text("[[3, 0], [0, 1]]")
    _, text, _ = run(capsys, "thouless", "--family", "free", "--z-file", str(zs), "--n", "2000")
    assert json.loads(text)["max_residual"] < 1e-3


def test_family_config_strict(tmp_path, capsys):
    good = tmp_path / "f.json"
    good.write_text(json.dumps({"kind": "anderson", "parameters": {"coupling": [-2, 2]}, "seed": 3}))
    assert run(capsys, "lyapunov", "--family-config", str(good), "--z", "0", "--n", "1000")[0] == 0
    bad = tmp_path / "g.json"
    bad.write_text(json.dumps({"kind": "anderson", "parameters": {}, "sed": 3}))
    status, _, err = run(capsys, "lyapunov", "--family-config", str(bad), "--z", "0", "--n", "1000")
    assert status == 2 and "E_CONFIG" in err


def test_run_config(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "capacity", "set": {"intervals": [[0, 4]]}}))
    assert run(capsys, "--config", str(cfg))[:2] == (0, "1")
    cfg.write_text(json.dumps({"command": "regularity", "jacobi": {"a": [1] * 12, "b": [0] * 12},
                               "set": {"intervals": [[-2, 2]]}, "n": [4, 8]}))
    assert run(capsys, "--config", str(cfg))[0] == 0
    cfg.write_text(json.dumps({"command": "capacity", "set": {"intervals": [[0, 4]]}, "extra": 1}))
    status, _, err = run(capsys, "--config", str(cfg))
    assert status == 2 and err.startswith("error E_CONFIG:")


def test_suite_regression(capsys):
    assert run(capsys, "suite", "regression")[0] == 0


def test_console_script_threads_env():
    proc = subprocess.run([sys.executable, "-m", "logpot.cli", "capacity", "--set", '{"intervals": [[0, 1]]}'],
                          capture_output=True, text=True, env={"LOGPOT_THREADS": "1", "PATH": ""})
    assert proc.returncode == 0 and proc.stdout.strip() == "0.25"
