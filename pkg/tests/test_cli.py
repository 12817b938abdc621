import json
import os
import time

import numpy as np
import pytest
from mpmath import mp, mpf

from hprates import cli, serialize as ser
from hprates import model as model_mod
from hprates.model import mp_to_str


def write_config(tmp_path, **fields):
    cfg = {"A": "2", "B": "3", "digits": 120}
    cfg.update(fields)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out.split(), err


def test_minimal_pade_solve(tmp_path, capsys):
    cfg = write_config(tmp_path, kinds=["pade"], index_ranges={"pade": [1, 5]})
    code, files, _ = run(["solve", "--config", cfg, "--out", str(tmp_path / "out")], capsys)
    assert code == 0
    assert len(files) == 3
    names = sorted(os.path.basename(f) for f in files)
    assert names[1:] == ["manifest_solve.json", "polynomials_pade.json"]
    doc = ser.load_json(files[1] if "polynomials" in files[1] else [f for f in files if "polynomials" in f][0])
    assert doc["schema_version"] == 1 and doc["tool_version"]
    assert [r["index"] for r in doc["results"]] == [1, 2, 3, 4, 5]
    assert all(isinstance(c, str) for r in doc["results"] for p in r["polynomials"] for c in p)


def test_invalid_parameter_is_reported(tmp_path, capsys):
    cfg = write_config(tmp_path, A="0.5")
    code, _, err = run(["solve", "--config", cfg, "--out", str(tmp_path)], capsys)
    assert code == 2
    rec = json.loads(err.strip().splitlines()[-1])
    assert rec["document"] == "error" and "1 < A" in rec["message"]


@pytest.mark.parametrize(
    "fields,needle",
    [
        ({"node_count": 16}, "node_count"),
        ({"kinds": ["hp4"]}, "kinds"),
        ({"kinds": ["hp2"], "index_ranges": {"hp2": [3, 1]}}, "index_ranges"),
        ({"theta": ["-1"]}, "theta"),
        ({"probe_points": [["0.5", "0"]]}, "lies on E"),
        ({"bogus": 1}, "unknown"),
        ({"digits": 20}, "decimal_digits"),
    ],
)
def test_config_validation(tmp_path, capsys, fields, needle):
    cfg = write_config(tmp_path, **fields)
    code, _, err = run(["equilibrium", "--config", cfg, "--out", str(tmp_path)], capsys)
    assert code == 2
    assert needle in json.loads(err.strip().splitlines()[-1])["message"]


def test_default_digits_follow_largest_system(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"A": "2", "B": "3", "kinds": ["hp3"], "index_ranges": {"hp3": [1, 45]}}))
    assert cli.load_config(str(path))["digits"] == 4 * 181
    path.write_text(json.dumps({"A": "2", "B": "3"}))
    assert cli.load_config(str(path))["digits"] == 200


def test_equilibrium_output_and_round_trip(tmp_path, capsys):
    cfg = write_config(tmp_path, theta=["3"], node_count=64)
    out = tmp_path / "eq"
    code, files, _ = run(["equilibrium", "--config", cfg, "--out", str(out)], capsys)
    assert code == 0
    path = str(out / "equilibrium_theta3.json")
    doc = ser.load_json(path)
    for key in ("c_E", "c_F", "identity_residuals"):
        assert key in doc
    assert float(doc["identity_residuals"]["constants"]["residual"]) < 1e-7
    assert float(doc["c_E"]) == pytest.approx(5.353068055077404, abs=1e-8)
    with open(path, encoding="ascii") as fh:
        assert ser.dumps(ser.load_json(path)) == fh.read()
    header, rows = ser.load_csv(str(out / "equilibrium_theta3_density.csv"))
    assert header == ("segment", "x", "density", "arcsine_relative_density")
    assert len(rows) == 128


def test_identical_config_gives_identical_bytes(tmp_path, capsys):
    cfg = write_config(tmp_path, kinds=["hp2"], index_ranges={"hp2": [1, 3]}, theta=["1"], node_count=48)
    a, b = tmp_path / "a", tmp_path / "b"
    run(["solve", "--config", cfg, "--out", str(a)], capsys)
    model_mod.clear_laurent_cache()
    run(["solve", "--config", cfg, "--out", str(b)], capsys)
    names = sorted(os.listdir(a))
    assert names == sorted(os.listdir(b))
    for name in names:
        if name == "cache":
            continue
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
    for name in os.listdir(a / "cache"):
        assert (a / "cache" / name).read_bytes() == (b / "cache" / name).read_bytes()


def test_rates_outputs_are_consistent(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        kinds=["pade"],
        index_ranges={"pade": [6, 14]},
        probe_points=[["2", "0"], ["0", "1.5"]],
    )
    out = tmp_path / "r"
    code, files, _ = run(["rates", "--config", cfg, "--out", str(out)], capsys)
    assert code == 0
    summary = ser.load_json(str(out / "rates_summary.json"))
    for entry in summary["entries"]:
        header, rows = ser.load_csv(str(out / f"rates_z{entry['probe_index']}.csv"))
        assert header == ser.RATES_CSV_COLUMNS
        N = np.array([float(r[0]) for r in rows if r[2] == entry["kind"]])
        y = np.array([float(r[1]) for r in rows if r[2] == entry["kind"]])
        fitted = np.polyfit(N, y, 1)[0]
        pred = float(entry["predicted_slope"])
        assert float(entry["fitted_slope"]) == pytest.approx(fitted, rel=1e-12)
        assert float(entry["relative_gap"]) == pytest.approx(abs(fitted - pred) / abs(pred), rel=1e-12)
    z0 = summary["entries"][0]
    assert float(z0["predicted_slope"]) == pytest.approx(-np.log(2 + np.sqrt(3)), abs=1e-15)


def test_rates_with_no_kinds_is_a_warning(tmp_path, capsys, caplog):
    cfg = write_config(tmp_path, probe_points=[["2", "0"]])
    code, files, _ = run(["rates", "--config", cfg, "--out", str(tmp_path / "x")], capsys)
    assert code == 0 and files == []
    assert "nothing to do" in caplog.text


def test_check_command_passes(tmp_path, capsys):
    cfg = write_config(tmp_path, kinds=["hp2"], index_ranges={"hp2": [1, 4]}, node_count=64)
    out = tmp_path / "chk"
    code, _, _ = run(["check", "--config", cfg, "--out", str(out)], capsys)
    assert code == 0
    doc = ser.load_json(str(out / "check_report.json"))
    assert doc["passed"] and len(doc["checks"]) > 10


def test_digits_flag_overrides_config(tmp_path):
    path = write_config(tmp_path)
    assert cli.load_config(path, {"digits": 90})["digits"] == 90


@pytest.mark.slow
def test_warm_cache_skips_recomputation(tmp_path, caplog):
    path = write_config(tmp_path, digits=200, kinds=["pade"], index_ranges={"pade": [1, 200]})
    cfg = cli.load_config(path, {"output_dir": str(tmp_path / "w")})
    model_mod.clear_laurent_cache()
    t0 = time.perf_counter()
    cli.ensure_laurent_cache(cfg)
    cold = time.perf_counter() - t0
    model_mod.clear_laurent_cache()
    caplog.set_level("INFO", logger="hprates")
    t0 = time.perf_counter()
    cli.ensure_laurent_cache(cfg)
    warm = time.perf_counter() - t0
    assert "cache hit" in caplog.text
    assert cold >= 5 * warm
    # the reloaded coefficients are the computed ones
    c = model_mod.laurent_coeffs(model_mod.make_model("2", "3", 200), 401)
    model_mod.clear_laurent_cache()
    with mp.workdps(200):
        ref = model_mod.laurent_coeffs(model_mod.make_model("2", "3", 200), 401)
        assert max(abs(x - y) for x, y in zip(c, ref)) < mpf(10) ** -195


def test_serialization_round_trip():
    with mp.workdps(100):
        x = mpf(1) / 3
        s = ser.num(x, 100)
        assert mpf(s) == x
        assert mp_to_str(x, 100) == s
    assert ser.num(0.1) == "0.1" and ser.num(7) == "7"
    with pytest.raises(TypeError):
        ser.num(True)
    assert ser.complex_pair(1 - 2j) == ["1.0", "-2.0"]


def test_config_hash_ignores_output_dir():
    a = {"A": "2", "B": "3", "output_dir": "x"}
    b = {"A": "2", "B": "3", "output_dir": "y"}
    assert ser.config_hash(a) == ser.config_hash(b)
    assert ser.config_hash(a) != ser.config_hash({"A": "2", "B": "4"})


def test_csv_text_layout():
    text = ser.csv_text([("3", "-1.5", "pade", "2", "0")])
    assert text == "N,log_error,kind,z_re,z_im\n3,-1.5,pade,2,0\n"
