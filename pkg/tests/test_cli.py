import json
import shutil
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from blaschke_lab import __version__, certify
from blaschke_lab.cli import RunConfig, config_from_args, main, parse_k_range, parse_n
from blaschke_lab.errors import ConfigError
from blaschke_lab.norms import SWEEP_COLUMNS


def run_cli(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_n():
    assert parse_n("256:4096:x2") == [256, 512, 1024, 2048, 4096]
    assert parse_n("1,5,3") == [1, 3, 5]
    assert parse_n("2:6:2") == [2, 4, 6]
    assert parse_n("7") == [7]
    for bad in ("", "a", "1:2:x1", "0:8:x2", "1:2:3:4", "-3"):
        with pytest.raises(ConfigError):
            parse_n(bad)


def test_parse_k_range():
    assert parse_k_range("3:9") == (3, 9)
    assert parse_k_range(None) is None
    with pytest.raises(ConfigError):
        parse_k_range("9:3")


def test_sweep_example(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--lambda", "0.5,0.7", "--n", "256:4096:x2", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ",".join(SWEEP_COLUMNS)
    # two lambdas times five dyadic n
    assert len(lines) - 1 == 10
    assert all(len(line.split(",")) == len(SWEEP_COLUMNS) for line in lines)


def test_beta_example(capsys):
    code, out, _ = run_cli(capsys, "beta", "--lambda", "0.5")
    assert code == 0
    doc = json.loads(out)
    row = doc["rows"][0]
    assert abs(row["residual"]) < 1e-10 and {"beta", "target"} <= set(row)
    assert doc["metadata"]["version"] == __version__
    assert set(doc["metadata"]) == {"engine", "precision_bits", "tail_bound", "version"}


def test_certify_small_grid(capsys):
    code, out, _ = run_cli(capsys, "certify", "--small-grid")
    assert code == 0
    suites = [line.split(",")[0] for line in out.splitlines()[1:]]
    assert suites == ["cross_engine", "parseval", "derivatives"]


def test_certify_failure_exit_code(capsys, monkeypatch):
    monkeypatch.setattr(certify, "run_all", lambda small: [certify.SuiteResult("parseval", 1, 2.0)])
    code, _, err = run_cli(capsys, "certify", "--small-grid")
    assert code == 2 and "parseval" in err


def test_config_error_exit_codes(capsys):
    assert run_cli(capsys, "nope")[0] == 64
    assert run_cli(capsys, "sweep", "--n", "x")[0] == 64
    assert run_cli(capsys, "sweep", "--lambda", "1.5")[0] == 64
    assert run_cli(capsys, "coeffs", "--lambda", "0.5,0.6", "--n", "3")[0] == 64
    assert run_cli(capsys, "sweep", "--format", "svg")[0] == 64


def test_capacity_exit_code(capsys):
    assert run_cli(capsys, "sweep", "--lambda", "0.9995", "--n", "4")[0] == 3


def test_numerical_error_exit_code(capsys):
    code, _, err = run_cli(capsys, "beta", "--lambda", "0.1")
    assert code == 1 and "NoRoot" in err


@pytest.mark.parametrize(
    "args",
    [
        ("sweep", "--lambda", "0.5,0.7", "--n", "64:256:x2"),
        ("coeffs", "--lambda", "0.5", "--n", "5", "--k-range", "0:20"),
        ("equidist", "--lambda", "0.5", "--n", "1000,2000", "--table", "weyl"),
        ("asymptotics", "--lambda", "0.75", "--n", "128"),
        ("norms", "--lambda", "0.6", "--n", "40"),
    ],
)
@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_byte_determinism(tmp_path, args, fmt):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main([*args, "--format", fmt, "--out", str(a)]) == 0
    assert main([*args, "--format", fmt, "--out", str(b), "--threads", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert "np." not in text
    if fmt == "json":
        json.loads(text)


def test_coeffs_csv(capsys):
    code, out, _ = run_cli(capsys, "coeffs", "--lambda", "0.5", "--n", "1", "--k-range", "0:2")
    assert code == 0 and out == "k,coeff\n0,-0.5\n1,0.5\n2,0.625\n"


def test_coeffs_json_metadata(capsys):
    code, out, _ = run_cli(capsys, "coeffs", "--lambda", "0.5", "--n", "3", "--format", "json")
    doc = json.loads(out)
    assert doc["metadata"]["engine"] == "Recurrence"
    assert doc["metadata"]["tail_bound"] < 1e-9
    assert doc["columns"] == ["k", "coeff"]


def test_tol_l1_controls_truncation(capsys):
    _, loose, _ = run_cli(capsys, "coeffs", "--lambda", "0.5", "--n", "3", "--tol-l1", "1e-3")
    _, tight, _ = run_cli(capsys, "coeffs", "--lambda", "0.5", "--n", "3", "--tol-l1", "1e-12")
    assert len(loose.splitlines()) < len(tight.splitlines())


def test_beta_override(capsys):
    _, out, _ = run_cli(capsys, "beta", "--lambda", "0.5", "--beta", "0.4", "--format", "csv")
    row = out.splitlines()[1].split(",")
    assert float(row[2]) == 0.4 and float(row[5]) != 0.0


def test_precision_bits_equidist(capsys):
    _, lo, _ = run_cli(capsys, "equidist", "--lambda", "0.5", "--n", "500")
    _, hi, _ = run_cli(capsys, "equidist", "--lambda", "0.5", "--n", "500", "--precision-bits", "113")
    a = [float(v) for v in lo.splitlines()[1].split(",")]
    b = [float(v) for v in hi.splitlines()[1].split(",")]
    assert a == pytest.approx(b, rel=1e-12)


@pytest.mark.parametrize(
    "args",
    [
        ("sweep", "--lambda", "0.5", "--n", "64:512:x2"),
        ("equidist", "--lambda", "0.5", "--n", "500:2000:x2"),
        ("asymptotics", "--lambda", "0.5", "--n", "64"),
        ("coeffs", "--lambda", "0.5", "--n", "8"),
    ],
)
def test_svg_with_csv(tmp_path, args):
    out = tmp_path / "plot.svg"
    assert main([*args, "--format", "svg", "--out", str(out)]) == 0
    svg = out.read_text()
    assert svg.startswith("<svg") and "<polyline" in svg
    assert (tmp_path / "plot.csv").read_text().count("\n") > 1


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "beta", "lambda": "0.7", "format": "csv"}))
    _, out, _ = run_cli(capsys, "beta", "--config", str(cfg))
    assert out.splitlines()[1].startswith("0.7,")
    _, out, _ = run_cli(capsys, "beta", "--config", str(cfg), "--lambda", "0.5")
    assert out.splitlines()[1].startswith("0.5,")


def test_config_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "beta", "colour": "red"}))
    code, _, err = run_cli(capsys, "beta", "--config", str(cfg))
    assert code == 64 and "colour" in err


def test_config_from_args_defaults():
    cfg = config_from_args(["sweep"])
    assert cfg.format == "csv" and cfg.threads == 1
    assert config_from_args(["beta"]).format == "json"


configs = st.builds(
    RunConfig,
    command=st.sampled_from(["coeffs", "norms", "asymptotics", "equidist", "sweep", "beta", "certify"]),
    lam=st.sampled_from(["0.5", "0.6,0.7", "0.25"]),
    n=st.sampled_from(["16", "256:4096:x2", "1,2,3"]),
    k_range=st.one_of(st.none(), st.just("0:10")),
    beta=st.one_of(st.none(), st.floats(0.3, 0.9)),
    precision_bits=st.integers(53, 256),
    tol_l1=st.one_of(st.none(), st.floats(1e-14, 1e-3)),
    threads=st.integers(1, 8),
    format=st.sampled_from(["csv", "json"]),
    out=st.one_of(st.none(), st.just("out.csv")),
    small_grid=st.booleans(),
)


@given(configs)
def test_run_config_round_trip(cfg):
    again = RunConfig.from_json(cfg.to_json())
    assert again == cfg
    assert again.to_json() == cfg.to_json()


def test_run_config_rejects_unknown_key():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"command": "beta", "bogus": 1})


@pytest.mark.skipif(shutil.which("blaschke-lab") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["blaschke-lab", "beta", "--lambda", "0.5", "--format", "csv"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout.startswith("lambda,alpha,beta")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "blaschke_lab.cli", "nope"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 64
