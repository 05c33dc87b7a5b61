import json
import subprocess
import sys

BASE = [sys.executable, "-m", "plevylab.cli"]


def run(*args, env=None):
    import os
    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    return subprocess.run(BASE + list(args), capture_output=True,
                          text=True, env=full_env)


def test_constant_row():
    out = run("constant", "--d", "3", "--p", "2", "--n", "100000")
    assert out.returncode == 0
    header, row = out.stdout.strip().split("\n")
    cols = dict(zip(header.split(","), row.split(",")))
    assert abs(float(cols["value_mean"]) - 1.0 / 3.0) < 1e-10
    assert abs(float(cols["value_closed"]) - 1.0 / 3.0) < 1e-10
    assert float(cols["discrepancy"]) < 1e-10


def test_kernel_check_normalized():
    out = run("kernel-check", "--family", "stable", "--d", "2", "--p", "1",
              "--eps", "0.1")
    assert out.returncode == 0
    header, row = out.stdout.strip().split("\n")
    cols = dict(zip(header.split(","), row.split(",")))
    assert abs(float(cols["normalization"]) - 1.0) < 1e-6


def test_energy_deterministic_value():
    out = run("energy", "--field", "linear", "--domain", "interval",
              "--eps", "0.1", "--p", "2", "--d", "1", "--mode",
              "deterministic-1d")
    assert out.returncode == 0
    header, row = out.stdout.strip().split("\n")
    cols = dict(zip(header.split(","), row.split(",")))
    assert abs(float(cols["value"]) - 1.9 / 2.2) < 1e-8


def test_generator_json():
    out = run("generator", "--field", "gaussian", "--d", "1", "--p", "2",
              "--eps", "0.1", "--format", "json")
    assert out.returncode == 0
    rows = json.loads(out.stdout)
    assert abs(float(rows[0]["value"]) - 0.9735042655627755) < 1e-6


def test_usage_error_exit_code():
    assert run("bogus").returncode == 1
    assert run("sweep", "--case", "no-such-case").returncode == 1


def test_numerical_error_exit_code():
    # eps beyond the stable family validity window
    out = run("energy", "--family", "stable", "--eps", "3.0", "--p", "2",
              "--d", "1")
    assert out.returncode == 2
    assert "numerical failure" in out.stderr


def test_config_file_merged_under_flags(tmp_path):
    cfg = tmp_path / "kernel.cfg"
    cfg.write_text("family=stable\nd=2\np=1\neps=0.1\n")
    out = run("kernel-check", "--config", str(cfg))
    assert out.returncode == 0
    lines = out.stdout.strip().split("\n")
    cols = dict(zip(lines[0].split(","), lines[1].split(",")))
    assert cols["d"] == "2"
    # explicit flag wins over the file
    out2 = run("kernel-check", "--config", str(cfg), "--d", "1")
    lines2 = out2.stdout.strip().split("\n")
    cols2 = dict(zip(lines2[0].split(","), lines2[1].split(",")))
    assert cols2["d"] == "1"


def test_single_sweep_case_runs():
    out = run("sweep", "--case", "generator-gaussian-d1", "--format",
              "json")
    assert out.returncode == 0
    payload = json.loads(out.stdout)
    assert payload["all_ok"] is True
    assert payload["cases"][0]["report"]["verdict"] == "converged"
