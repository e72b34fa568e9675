import csv
import io
import re

import numpy as np
import pytest

from xycorr import cli, xymodel
from xycorr.errors import QuadratureNoConvergence


def run(argv, capsys):
    rc = cli.main(argv)
    out, err = capsys.readouterr()
    return rc, out, err


def rows(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for k in list(__import__("os").environ):
        if k.startswith(cli.ENV_PREFIX):
            monkeypatch.delenv(k)


class TestSweep:
    ARGS = ["sweep", "--gamma", "0.5,1", "--kt", "0,0.1", "--lambda-min", "0.9",
            "--lambda-max", "1.1", "--lambda-step", "0.02", "--measures", "all"]

    def test_deterministic_bytes(self, tmp_path, capsys):
        out = tmp_path / "a.csv"
        assert cli.main(self.ARGS + ["--out", str(out)]) == 0
        first = out.read_bytes()
        xymodel.clear_cache()
        assert cli.main(self.ARGS + ["--out", str(out)]) == 0
        assert out.read_bytes() == first
        assert b"\r" not in first
        # parallel evaluation changes only the recorded worker count
        assert cli.main(self.ARGS + ["--out", str(out), "--workers", "2"]) == 0
        par = out.read_bytes()
        assert par.split(b"\n")[3:] == first.split(b"\n")[3:]
        assert b"workers=2" in par.split(b"\n")[1]

    def test_header_and_order(self, capsys):
        rc, out, _ = run(self.ARGS + ["--seed", "7"], capsys)
        assert rc == 0
        head = out.splitlines()
        assert head[0].startswith("# xycorr ") and head[0].endswith(" sweep")
        assert head[1].startswith("# config: ") and "gamma=0.5,1" in head[1]
        assert head[2] == "# seed: 7"
        assert head[3] == "gamma,lambda,kT,r,measure,value,d1,d2"
        data = rows(out)
        assert len(data) == 2 * 2 * 11 * 5
        keys = [(float(d["gamma"]), float(d["kT"]), float(d["lambda"]), int(d["r"]), d["measure"])
                for d in data]
        assert keys == sorted(keys)

    def test_single_point_grid(self, capsys):
        rc, out, _ = run(["sweep", "--gamma", "1", "--kt", "0", "--lambda-min", "1",
                          "--lambda-max", "1", "--measures", "MIN"], capsys)
        assert rc == 0
        (row,) = rows(out)
        assert row["d1"] == "" and row["d2"] == "" and float(row["value"]) > 0

    def test_full_precision(self, capsys):
        _, out, _ = run(["sweep", "--gamma", "1", "--kt", "0.1", "--lambda-min", "0.7",
                         "--lambda-max", "0.7", "--measures", "WYSIM"], capsys)
        (row,) = rows(out)
        from xycorr.measures import MeasureKind, evaluate
        exact = evaluate(MeasureKind.WYSIM, xymodel.reduced_state(xymodel.ModelParams(1, 0.7, 0.1), 1))
        assert float(row["value"]) == exact

    def test_ising_ground_state_extrema(self, capsys):
        _, out, _ = run(["sweep", "--gamma", "1", "--kt", "0", "--measures", "all"], capsys)
        data = rows(out)
        for m in ("MIN", "WYSIM", "OMQC", "CONCURRENCE"):
            sub = [d for d in data if d["measure"] == m and d["d1"] != ""]
            lam = np.array([float(d["lambda"]) for d in sub])
            # OMQC has a cusp rather than a divergent slope at the CP
            col = "d2" if m == "OMQC" else "d1"
            d = np.abs([float(x[col]) for x in sub])
            inner = (lam > 0.05) & (lam < 1.95)
            assert lam[inner][np.argmax(d[inner])] == pytest.approx(1.0)

    def test_factorization_zero(self, capsys):
        _, out, _ = run(["sweep", "--gamma", "0.5", "--kt", "0", "--lambda-min", "1.1",
                         "--lambda-max", "1.2", "--lambda-step", "0.0005", "--measures",
                         "CONCURRENCE"], capsys)
        data = rows(out)
        lam = np.array([float(d["lambda"]) for d in data])
        val = np.array([float(d["value"]) for d in data])
        assert abs(lam[np.argmin(val)] - 2 / np.sqrt(3)) < 1e-3
        assert val.min() < 1e-3 and val[0] > 1e-3

    def test_svg_panels(self, tmp_path, capsys):
        svg = tmp_path / "svg"
        args = ["sweep", "--gamma", "1", "--kt", "0,0.1", "--lambda-step", "0.1", "--svg", str(svg),
                "--out", str(tmp_path / "s.csv")]
        assert cli.main(args) == 0
        files = sorted(svg.glob("*.svg"))
        assert len(files) == 2
        first = [f.read_bytes() for f in files]
        for f in first:
            assert b"<svg" in f and b"<image" not in f
            refs = re.findall(rb'xlink:href="([^"]*)"', f)
            assert refs and all(ref.startswith(b"#") for ref in refs)
        assert cli.main(args) == 0
        assert [f.read_bytes() for f in files] == first


class TestCp:
    def test_flat_curve_reason(self, capsys):
        rc, out, _ = run(["cp", "--gamma", "1", "--kt", "0.5", "--r", "2", "--measures",
                          "CONCURRENCE"], capsys)
        assert rc == 0
        (row,) = rows(out)
        assert row["reason"] == "FlatCurve" and row["lambda_hat"] == ""

    def test_ising_low_temperature(self, capsys):
        rc, out, _ = run(["cp", "--gamma", "1", "--kt", "0.05", "--lambda-step", "0.001",
                          "--deriv-order", "auto"], capsys)
        assert rc == 0
        data = rows(out)
        assert len(data) == 4
        for d in data:
            assert abs(float(d["lambda_hat"]) - 1) < 0.05, d
        orders = {d["measure"]: d["deriv_order"] for d in data}
        assert orders == {"CONCURRENCE": "1", "MIN": "1", "OMQC": "2", "WYSIM": "1"}

    def test_isotropic_min_matches_omqc(self, capsys):
        _, out, _ = run(["cp", "--gamma", "0.001", "--kt", "0.05", "--lambda-step", "0.001",
                         "--measures", "MIN,OMQC"], capsys)
        lam = {d["measure"]: float(d["lambda_hat"]) for d in rows(out)}
        assert abs(lam["MIN"] - lam["OMQC"]) < 0.01

    def test_zero_temperature_rejected(self, capsys):
        rc, _, err = run(["cp", "--kt", "0,0.1"], capsys)
        assert rc == 2 and "kT > 0" in err


class TestLongRange:
    def test_profiles(self, capsys):
        rc, out, _ = run(["longrange", "--gamma", "1", "--kt", "0.1", "--lambda", "1.5",
                          "--rmax", "10", "--measures", "MIN,WYSIM,OMQC"], capsys)
        assert rc == 0
        data = rows(out)
        assert len(data) == 30
        profile = {m: [float(d["value"]) for d in data if d["measure"] == m]
                   for m in ("MIN", "WYSIM", "OMQC")}
        v = profile["OMQC"]
        assert abs(v[9] - v[8]) < 1e-3 and v[9] > 0.01
        # total correlations level off more slowly but stay finite
        for m in ("MIN", "WYSIM"):
            v = profile[m]
            assert v[9] > 0.8 * v[0] and abs(v[9] - v[8]) < 0.01

    def test_decay(self, capsys):
        _, out, _ = run(["longrange", "--gamma", "0.001", "--kt", "0.5", "--lambda", "0.75",
                         "--measures", "MIN,WYSIM,OMQC"], capsys)
        assert all(float(d["value"]) < 1e-3 for d in rows(out) if d["r"] == "10")

    def test_zero_field(self, capsys):
        _, out, _ = run(["longrange", "--gamma", "0.5", "--kt", "0.2", "--lambda", "0",
                         "--rmax", "4", "--measures", "all"], capsys)
        assert all(abs(float(d["value"])) < 1e-10 for d in rows(out))

    def test_rmax_validated(self, capsys):
        assert run(["longrange", "--rmax", "1"], capsys)[0] == 2


class TestVerify:
    def test_only_ordering(self, capsys):
        rc, out, _ = run(["verify", "--only", "ordering"], capsys)
        assert rc == 0
        checks = [line for line in out.splitlines() if line[:4] in ("PASS", "FAIL")]
        assert checks and all(" ordering/" in line for line in checks)

    def test_injected_fault(self, capsys, tmp_path):
        report = tmp_path / "report.txt"
        rc, out, _ = run(["verify", "--only", "measures", "--tol-scale", "0", "--out", str(report)],
                         capsys)
        assert rc == 1
        assert "FAIL measures/bell_states_equal_one" in report.read_text()

    def test_unknown_suite(self, capsys):
        assert run(["verify", "--only", "nonsense"], capsys)[0] == 2


class TestConfig:
    def test_precedence(self, tmp_path, monkeypatch):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# experiment\ngamma = 0.5\nkt = 0.3\nr = 2\n")
        flags = {"config": str(cfg)}
        c = cli.resolve("sweep", flags, environ={})
        assert c["gamma"] == [0.5] and c["kt"] == [0.3] and c["r"] == [2]
        c = cli.resolve("sweep", flags, environ={"XYCORR_GAMMA": "0.8"})
        assert c["gamma"] == [0.8] and c["kt"] == [0.3]
        c = cli.resolve("sweep", dict(flags, gamma="1"), environ={"XYCORR_GAMMA": "0.8"})
        assert c["gamma"] == [1.0]

    def test_environment_in_main(self, monkeypatch, capsys):
        monkeypatch.setenv("XYCORR_SEED", "42")
        _, out, _ = run(["sweep", "--gamma", "1", "--kt", "0", "--lambda-min", "1",
                         "--lambda-max", "1", "--measures", "MIN"], capsys)
        assert "# seed: 42" in out

    @pytest.mark.parametrize("argv", [
        ["sweep", "--gamma", "1.5"],
        ["sweep", "--measures", "ENTROPY"],
        ["sweep", "--lambda-step", "0"],
        ["cp", "--window", "1.5,0.5"],
        ["sweep", "--r", "1.5"],
        ["sweep", "--bogus", "1"],
        ["sweep", "--config", "/nonexistent/file.cfg"],
    ])
    def test_bad_config(self, argv, capsys):
        rc, _, err = run(argv, capsys)
        assert rc == 2 and "configuration error" in err

    def test_malformed_file(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("gamma 0.5\n")
        rc, _, err = run(["sweep", "--config", str(cfg)], capsys)
        assert rc == 2 and "bad.cfg:1" in err


def test_numerical_failure_names_point(monkeypatch, capsys):
    def boom(p, r, g=None):
        raise QuadratureNoConvergence("depth limit reached")
    monkeypatch.setattr(cli, "reduced_state", boom)
    rc, _, err = run(["sweep", "--gamma", "0.5", "--kt", "0.2", "--lambda-min", "1",
                      "--lambda-max", "1", "--measures", "MIN"], capsys)
    assert rc == 3
    assert "gamma=0.5" in err and "lambda=1" in err and "kT=0.2" in err
