import json
import subprocess
import sys

import numpy as np
import pytest

from mosqdyn.cli import main, parse_args, run
from mosqdyn.errors import UsageError
from mosqdyn.geometry import RegionBounds, omega_bounds

P0_FLAGS = ["--alpha", "0.5", "--beta", "2", "--mu", "0.8", "--d0", "0.3"]


class TestParseArgs:
    def test_simulate_mapping(self):
        cfg = parse_args(["simulate", *P0_FLAGS, "--x0", "1", "--y0", "0.5"])
        assert cfg.subcommand == "simulate"
        assert (cfg.params.alpha, cfg.params.beta) == (0.5, 2.0)
        assert (cfg.x0, cfg.y0) == (1.0, 0.5)
        assert cfg.seed == 0 and cfg.stride == 1
        assert cfg.fmt == "csv"

    def test_equilibria_boundary_regime(self):
        cfg = parse_args(["equilibria", "--alpha", "0.5", "--beta", "1.28",
                          "--mu", "0.8", "--d0", "0.3"])
        assert cfg.subcommand == "equilibria"
        assert cfg.params.beta == 1.28
        assert cfg.fmt == "json"

    def test_negative_alpha_names_the_flag(self):
        with pytest.raises(UsageError, match="--alpha"):
            parse_args(["simulate", "--alpha", "-1", "--beta", "2", "--mu", "0.8",
                        "--d0", "0.3", "--x0", "1", "--y0", "0.5"])

    def test_missing_subcommand(self):
        with pytest.raises(UsageError):
            parse_args([])

    def test_unknown_flag(self):
        with pytest.raises(UsageError):
            parse_args(["simulate", *P0_FLAGS, "--bogus", "1"])

    def test_simulate_needs_initial_point(self):
        with pytest.raises(UsageError, match="--x0/--y0"):
            parse_args(["simulate", *P0_FLAGS])

    def test_regime_violations_name_flags(self):
        with pytest.raises(UsageError, match="--d1"):
            parse_args(["verify", *P0_FLAGS, "--d1", "0.1"])
        with pytest.raises(UsageError, match="--mu"):
            parse_args(["verify", "--alpha", "0.5", "--beta", "2", "--mu", "1.5",
                        "--d0", "0.3"])
        with pytest.raises(UsageError, match="--alpha/--d0"):
            parse_args(["verify", "--alpha", "0.8", "--beta", "2", "--mu", "0.8",
                        "--d0", "0.3"])

    def test_csv_not_available_for_json_reports(self):
        with pytest.raises(UsageError, match="--format"):
            parse_args(["verify", *P0_FLAGS, "--format", "csv"])

    def test_config_file_with_flag_override(self, tmp_path):
        cfg_file = tmp_path / "run.json"
        cfg_file.write_text(json.dumps(
            {"alpha": 0.5, "beta": 2.0, "mu": 0.8, "d0": 0.3, "seed": 5,
             "samples": 1234}
        ))
        cfg = parse_args(["verify", "--config", str(cfg_file), "--seed", "9"])
        assert cfg.params.beta == 2.0
        assert cfg.seed == 9  # flag wins
        assert cfg.n_samples == 1234

    def test_config_unknown_key(self, tmp_path):
        cfg_file = tmp_path / "run.json"
        cfg_file.write_text(json.dumps({"alpha": 0.5, "bogus": 1}))
        with pytest.raises(UsageError, match="bogus"):
            parse_args(["verify", "--config", str(cfg_file)])

    def test_parse_is_deterministic(self):
        argv = ["verify", *P0_FLAGS, "--samples", "10", "--seed", "3"]
        assert parse_args(argv) == parse_args(argv)


class TestSimulate:
    def test_csv_schema_and_convergence(self, capsys):
        status = run(parse_args(
            ["simulate", *P0_FLAGS, "--x0", "1", "--y0", "0.5", "--stride", "50"]
        ))
        out = capsys.readouterr().out
        lines = out.strip().split("\n")
        assert status == 0
        assert lines[0] == "n,x,y,phi,region"
        first = lines[1].split(",")
        assert first[0] == "0" and first[4] == "omega4"
        last = lines[-1].split(",")
        assert float(last[1]) == pytest.approx(1.5, abs=1e-6)
        assert float(last[2]) == pytest.approx(0.375, abs=1e-6)

    def test_json_mirror(self, capsys):
        status = run(parse_args(
            ["simulate", *P0_FLAGS, "--x0", "1.5", "--y0", "0.375",
             "--format", "json"]
        ))
        payload = json.loads(capsys.readouterr().out)
        assert status == 0
        assert payload["limit"] == "converged_to_positive_fixed_point"
        assert payload["iterations_used"] == 0
        assert payload["boundary_regime"] is False


class TestEquilibria:
    def test_reference_payload(self, capsys):
        status = run(parse_args(["equilibria", *P0_FLAGS]))
        payload = json.loads(capsys.readouterr().out)
        assert status == 0
        assert payload["regime"]["threshold"] == pytest.approx(1.28, rel=1e-12)
        assert payload["regime"]["x_star"] == pytest.approx(1.5, rel=1e-12)
        kinds = [fp["classification"] for fp in payload["fixed_points"]]
        assert kinds == ["saddle", "attracting"]
        eig = payload["fixed_points"][0]["eigenvalues"]
        assert eig[0]["re"] == pytest.approx(1.2, abs=1e-12)
        assert eig[1]["re"] == pytest.approx(-0.8, abs=1e-12)

    def test_boundary_payload(self, capsys):
        status = run(parse_args(["equilibria", "--alpha", "0.5", "--beta", "1.28",
                                 "--mu", "0.8", "--d0", "0.3"]))
        payload = json.loads(capsys.readouterr().out)
        assert status == 0
        assert payload["regime"]["x_star"] is None
        assert [fp["classification"] for fp in payload["fixed_points"]] == [
            "non_hyperbolic"
        ]


class TestVerify:
    def test_exit_zero_on_reference(self, tmp_path):
        out = tmp_path / "verify.json"
        status = run(parse_args(
            ["verify", *P0_FLAGS, "--samples", "5000", "--seed", "1",
             "--out", str(out)]
        ))
        assert status == 0
        payload = json.loads(out.read_text())
        assert payload["ok"] is True
        assert payload["n_violations"] == 0
        regions = [r["region"] for r in payload["invariance"]]
        assert regions == ["omega_only", "omega1", "omega2"]
        claims = [r["claim"] for r in payload["lyapunov"]["regions"]]
        assert claims == ["nondecreasing", "nonincreasing"]

    def test_corrupted_region_bound_fails_with_exit_one(self, tmp_path, monkeypatch):
        real = omega_bounds

        def corrupted(p):
            b = real(p)
            return RegionBounds(0.5 * b.x_max, b.y_max, b.x_star, b.y_star)

        monkeypatch.setattr("mosqdyn.geometry.omega_bounds", corrupted)
        out = tmp_path / "verify.json"
        status = run(parse_args(
            ["verify", *P0_FLAGS, "--samples", "5000", "--seed", "1",
             "--out", str(out)]
        ))
        assert status == 1
        payload = json.loads(out.read_text())
        assert payload["ok"] is False
        assert payload["n_violations"] > 0

    def test_below_threshold_verifies_rectangle_only(self, capsys):
        status = run(parse_args(
            ["verify", "--alpha", "0.5", "--beta", "1.0", "--mu", "0.8",
             "--d0", "0.3", "--samples", "2000"]
        ))
        payload = json.loads(capsys.readouterr().out)
        assert status == 0
        assert [r["region"] for r in payload["invariance"]] == ["omega_only"]
        assert payload["lyapunov"] is None


class TestCycles:
    def test_reference_certificate_and_empty_search(self, capsys):
        status = run(parse_args(["cycles", *P0_FLAGS, "--grid-n", "20"]))
        payload = json.loads(capsys.readouterr().out)
        assert status == 0
        assert payload["ok"] is True
        assert payload["certificate"]["branch"] == "b0_positive"
        assert payload["certificate"]["all_positive"] is True
        assert [b["period"] for b in payload["brute_force"]] == [2, 3, 4]
        assert all(b["cycles"] == [] for b in payload["brute_force"])

    def test_below_threshold_has_no_certificate_but_searches(self, capsys):
        status = run(parse_args(
            ["cycles", "--alpha", "0.5", "--beta", "1.0", "--mu", "0.8",
             "--d0", "0.3", "--grid-n", "15"]
        ))
        payload = json.loads(capsys.readouterr().out)
        assert status == 0
        assert payload["certificate"] is None
        assert payload["ok"] is True


class TestBasin:
    def test_reference_codes(self, tmp_path):
        out = tmp_path / "basin.csv"
        status = run(parse_args(
            ["basin", *P0_FLAGS, "--grid-n", "8", "--out", str(out)]
        ))
        assert status == 0
        codes = np.loadtxt(out, delimiter=",", dtype=int)
        assert codes.shape == (8, 8)
        assert codes[0, 0] == 0  # the origin cell
        flat = codes.ravel()
        assert np.all(flat[1:] == 1)

    def test_json_mirror(self, capsys):
        status = run(parse_args(["basin", *P0_FLAGS, "--grid-n", "4",
                                 "--format", "json"]))
        payload = json.loads(capsys.readouterr().out)
        assert status == 0
        assert len(payload["xs"]) == 4
        assert payload["codes"][0][0] == 0


class TestSweep:
    def test_regime_table(self, capsys):
        status = run(parse_args(
            ["sweep", "--alpha", "0.5", "--beta", "2.56", "--mu", "0.8",
             "--d0", "0.3", "--grid-n", "4"]
        ))
        out = capsys.readouterr().out
        lines = out.strip().split("\n")
        assert status == 0
        assert lines[0] == "beta,regime,origin_class,x_star,y_star,certificate_ok"
        rows = [line.split(",") for line in lines[1:]]
        assert len(rows) == 4
        regimes = [r[1] for r in rows]
        assert regimes == ["below_threshold", "at_threshold",
                           "above_threshold", "above_threshold"]
        assert [r[2] for r in rows] == ["attracting", "non_hyperbolic",
                                        "saddle", "saddle"]
        assert rows[0][5] == "na" and rows[1][5] == "true"
        assert rows[0][3] == "nan" and float(rows[2][3]) > 0.0


class TestDeterminismAndExitCodes:
    def test_verify_and_basin_are_byte_identical(self, tmp_path):
        pairs = []
        for name, argv in [
            ("verify", ["verify", *P0_FLAGS, "--samples", "3000", "--seed", "1"]),
            ("basin", ["basin", *P0_FLAGS, "--grid-n", "6"]),
        ]:
            files = []
            for i in (1, 2):
                out = tmp_path / f"{name}_{i}"
                assert main([*argv, "--out", str(out)]) == 0
                files.append(out.read_bytes())
            pairs.append(files)
        for a, b in pairs:
            assert a == b

    def test_thread_env_does_not_change_bytes(self, tmp_path, monkeypatch):
        argv = ["verify", *P0_FLAGS, "--samples", "3000", "--seed", "1"]
        one = tmp_path / "one"
        assert main([*argv, "--out", str(one)]) == 0
        monkeypatch.setenv("MOSQDYN_THREADS", "3")
        two = tmp_path / "two"
        assert main([*argv, "--out", str(two)]) == 0
        assert one.read_bytes() == two.read_bytes()

    def test_usage_errors_exit_two(self, capsys):
        assert main(["simulate", "--alpha", "-1", "--beta", "2", "--mu", "0.8",
                     "--d0", "0.3", "--x0", "1", "--y0", "0.5"]) == 2
        assert main([]) == 2
        assert "error" in capsys.readouterr().err

    def test_invalid_thread_env_exits_two(self, monkeypatch, capsys):
        monkeypatch.setenv("MOSQDYN_THREADS", "zero")
        assert main(["verify", *P0_FLAGS, "--samples", "100"]) == 2
        assert "MOSQDYN_THREADS" in capsys.readouterr().err

    def test_console_entry_point(self, tmp_path):
        out = tmp_path / "eq.json"
        proc = subprocess.run(
            [sys.executable, "-m", "mosqdyn", "equilibria", *P0_FLAGS,
             "--out", str(out)],
            capture_output=True,
        )
        assert proc.returncode == 0
        assert json.loads(out.read_text())["regime"]["x_star"] == pytest.approx(1.5)

    def test_csv_floats_carry_full_precision(self, capsys):
        status = run(parse_args(
            ["simulate", *P0_FLAGS, "--x0", "0.1", "--y0", "0.2",
             "--max-iter", "1"]
        ))
        out = capsys.readouterr().out
        assert status == 0
        row = out.strip().split("\n")[1].split(",")
        # 17 significant digits always round-trip to the exact double
        assert float(row[1]) == 0.1 and float(row[2]) == 0.2
        assert row[1] == format(0.1, ".17g")
        from mosqdyn import State, step_w0, validate_params

        p = validate_params(0.5, 2.0, 0.8, 0.3, 0.0)
        expected = step_w0(p, State(0.1, 0.2))
        last = out.strip().split("\n")[-1].split(",")
        assert float(last[1]) == expected.x and float(last[2]) == expected.y
