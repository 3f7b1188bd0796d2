import csv
import io
import json
import math

import pytest

from discnorm import cli
from discnorm import verify as V


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_norm_all_routes_agree(capsys):
    code, out, _ = run(capsys, "norm", "--f", "poly(1,1)", "--alpha", "0.5", "--p", "2", "--method", "all")
    assert code == 0
    rows = json.loads(out)
    assert {r["method"] for r in rows} == {"definition", "littlewood_paley", "coefficients"}
    for r in rows:
        assert math.isclose(r["p_power_value"], 3.0, rel_tol=1e-12)


def test_sweep_from_kappa_matches_kernel_closed_form(capsys):
    code, out, _ = run(capsys, "sweep", "--f", "kernel(w=0.5,kappa=0.25)", "--alpha-grid", "0.25:2.0:8",
                       "--p", "from-kappa", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 8
    for r in rows:
        a = float(r["alpha"])
        assert math.isclose(float(r["p"]), a / 0.25)
        assert math.isclose(float(r["p_power_value"]), (1 - 0.25) ** -a, rel_tol=1e-8)


def test_csv_floats_round_trip(capsys):
    code, out, _ = run(capsys, "norm", "--f", "kernel(w=0.3i, kappa=0.35)", "--alpha", "0.7", "--p", "2",
                       "--format", "csv")
    row = next(csv.DictReader(io.StringIO(out)))
    code2, out2, _ = run(capsys, "norm", "--f", "kernel(w=0.3i, kappa=0.35)", "--alpha", "0.7", "--p", "2")
    assert float(row["value"]) == json.loads(out2)[0]["value"]


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"f": "poly(0, 1)", "alpha": 0.25, "p": 2, "method": "coefficients"}))
    code, out, _ = run(capsys, "norm", "--config", str(cfg))
    assert code == 0 and math.isclose(json.loads(out)[0]["p_power_value"], 4.0)
    code, out, _ = run(capsys, "norm", "--config", str(cfg), "--alpha", "0.5")
    assert math.isclose(json.loads(out)[0]["p_power_value"], 2.0)


def test_out_file(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code, stdout, _ = run(capsys, "norm", "--f", "const(2)", "--alpha", "1", "--p", "3", "--format", "csv",
                          "--out", str(out))
    assert code == 0 and stdout == ""
    assert out.read_text().startswith("f,alpha,p,method")


@pytest.mark.parametrize("argv", [
    ["norm", "--bogus", "1"],
    ["norm", "--f", "poly(1", "--alpha", "1", "--p", "2"],
    ["norm", "--f", "poly(1)", "--alpha", "-1", "--p", "2"],
    ["norm", "--f", "poly(1)", "--alpha", "1", "--p", "1.5", "--method", "coefficients"],
    ["norm", "--f", "poly(1)", "--alpha", "1"],
    ["sweep", "--f", "poly(1)", "--alpha-grid", "1:2"],
    ["sweep", "--f", "poly(1)", "--alpha-grid", "1:2:3", "--p", "from-kappa"],
    ["verify", "--check", "contractive", "--f", "poly(1)", "--alpha", "0.5", "--p", "1", "--beta", "1", "--q", "3"],
    ["norm", "--f", "poly(1)", "--alpha", "1", "--p", "2", "--out", "/nonexistent/dir/x.json"],
])
def test_usage_errors_exit_1(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert "error" in err


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"f": "poly(1)", "alpah": 1}))
    assert run(capsys, "norm", "--config", str(cfg))[0] == 1


def test_help_lists_every_flag(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["norm", "--help"])
    assert e.value.code == 0
    text = capsys.readouterr().out
    for flag in ("--f", "--config", "--alpha", "--p", "--beta", "--q", "--sigma", "--w", "--method", "--n-theta",
                 "--radial-n", "--levelset-n", "--t-grid", "--seed", "--out", "--format"):
        assert flag + " " in text or flag + "\n" in text


def test_single_checks(capsys):
    code, out, _ = run(capsys, "verify", "--check", "kernel_closed_form", "--w", "0.5", "--alpha", "1", "--p", "2")
    assert code == 0 and json.loads(out)[0]["passed"]
    code, out, _ = run(capsys, "verify", "--check", "majorant", "--alpha", "1", "--p", "4", "--r", "0.5",
                       "--format", "csv")
    assert code == 0 and out.splitlines()[1].split(",")[1] == "true"


def test_verify_exit_code_reflects_failures(monkeypatch, capsys):
    from discnorm.funcrep import SpaceParams

    def jobs(name, seed, grid, lg):
        good = ("a/ok", lambda: V.check_kernel_closed_form(0.2, SpaceParams(1.0, 2.0), check_id="a/ok"))
        bad = ("b/bad", lambda: V.VerificationReport("b/bad", {}, 1.0, 0.0, -1.0, 1e-9, "inequality"))
        return [good, bad] if name == "full" else [good]

    monkeypatch.setattr(V, "build_jobs", jobs)
    code, out, _ = run(capsys, "verify", "--suite", "quick", "--format", "csv", "--seed", "0xD15C")
    assert code == 0 and out.splitlines()[0] == "check_id,pass,margin,tolerance"
    code, out, _ = run(capsys, "verify", "--suite", "full", "--timings")
    reps = json.loads(out)
    assert code == 2 and [r["check_id"] for r in reps] == ["a/ok", "b/bad"] and "runtime_ms" in reps[0]


def test_explore_and_levelset(capsys):
    code, out, _ = run(capsys, "explore", "--f", "poly(1,0.5)", "--alpha", "0.5", "--p-grid", "1:2:2")
    rows = json.loads(out)
    assert code == 0 and {r["kind"] for r in rows} == {"p_sweep", "quasi_triangle"}
    code, out, _ = run(capsys, "levelset", "--f", "const(2)", "--sigma", "1", "--levelset-n", "32", "--t-grid", "5",
                       "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "t,mu,g" and len(lines) == 1 + 1 + 24 + 5
