import io

import numpy as np
import pytest

from conftest import make_blobs, make_blobs_with_noise
from drscreen.cli import (
    CSV_HEADER,
    EXIT_DATA,
    EXIT_OK,
    EXIT_SOLVER,
    EXIT_USAGE,
    EXIT_VIOLATION,
    ExperimentConfig,
    UsageError,
    main,
    parse_a_grid,
    parse_label_map,
    parse_lambda_grid,
    run_grid,
    validate_oracle,
)
from drscreen.data import write_dense_csv
from drscreen.oracle import verify_sample_screening
from drscreen.screening import WeightBall, robust_screen_samples, screen_at_weights
from drscreen.solver import train_hinge_l2


@pytest.fixture
def libsvm_file(tmp_path, rng):
    ds = make_blobs(rng, 30, 3)
    lines = []
    for i in range(ds.n):
        feats = " ".join(
            f"{j + 1}:{ds.x[i, j]:.17g}" for j in range(ds.d - 1)
        )
        lines.append(f"{int(ds.y[i])} {feats}")
    path = tmp_path / "toy30"
    path.write_text("\n".join(lines) + "\n")
    return path, ds


@pytest.fixture
def feature_file(tmp_path, rng):
    ds = make_blobs_with_noise(rng, 30, 2, 5)
    lines = []
    for i in range(ds.n):
        feats = " ".join(
            f"{j + 1}:{ds.x[i, j]:.17g}" for j in range(ds.d - 1)
        )
        lines.append(f"{int(ds.y[i])} {feats}")
    path = tmp_path / "toyfeat"
    path.write_text("\n".join(lines) + "\n")
    return path, ds


class TestGridParsing:
    def test_anchored_n(self):
        kind, exps = parse_lambda_grid("n:0:-0.5:-3")
        assert kind == "n"
        assert exps == pytest.approx([0, -0.5, -1, -1.5, -2, -2.5, -3])

    def test_anchored_lmax_fraction(self):
        kind, exps = parse_lambda_grid("lmax:0:-1/3:-2")
        assert kind == "lmax"
        assert len(exps) == 7
        assert exps[1] == pytest.approx(-1.0 / 3.0)

    def test_explicit_list(self):
        assert parse_lambda_grid("65.8, 34.7") == ("explicit", [65.8, 34.7])

    def test_bad_grid(self):
        with pytest.raises(UsageError):
            parse_lambda_grid("n:0:0.5:-3")
        with pytest.raises(UsageError):
            parse_lambda_grid("-1.0")

    def test_a_grid_default_span(self):
        grid = parse_a_grid("0.9:1.1:0.005")
        assert len(grid) == 41
        assert grid[0] == pytest.approx(0.9)
        assert grid[-1] == pytest.approx(1.1)

    def test_a_grid_list(self):
        assert parse_a_grid("0.98,1.0") == [0.98, 1.0]

    def test_label_map(self):
        assert parse_label_map("0=-1,1=1") == {0.0: -1.0, 1.0: 1.0}
        with pytest.raises(UsageError):
            parse_label_map("0;1")

    def test_wide_grid_needs_flag(self, libsvm_file):
        path, _ = libsvm_file
        with pytest.raises(UsageError):
            ExperimentConfig(
                data=str(path), task="drsss",
                lambda_grid=("explicit", [1.0]), a_grid=[0.5],
            )
        ExperimentConfig(
            data=str(path), task="drsss",
            lambda_grid=("explicit", [1.0]), a_grid=[0.5], allow_wide=True,
        )


class TestRunGrid:
    def test_schema_and_rates(self, libsvm_file):
        path, ds = libsvm_file
        config = ExperimentConfig(
            data=str(path), task="drsss",
            lambda_grid=("explicit", [3.0]),
            a_grid=parse_a_grid("0.96,0.98,1.0,1.02,1.04"),
        )
        rows, failed = run_grid(config)
        assert not failed
        assert len(rows) == 5
        for row in rows:
            fields = row.split(",")
            assert len(fields) == len(CSV_HEADER.split(","))
            assert fields[0] == "toy30"
            assert fields[8] == "ok"
            assert 0.0 <= float(fields[7]) <= 1.0
            assert int(fields[6]) == ds.n

    def test_a_equal_one_matches_wcss(self, libsvm_file):
        path, ds = libsvm_file
        config = ExperimentConfig(
            data=str(path), task="drsss",
            lambda_grid=("explicit", [3.0]), a_grid=[1.0],
        )
        rows, _ = run_grid(config)
        w = np.ones(ds.n)
        tol = 1e-10 * max(1.0, float(np.sum(w)))
        sol = train_hinge_l2(ds, w, 3.0, gap_tol=tol, seed=0)
        rep = screen_at_weights(sol, ds, w, "sample")
        assert int(rows[0].split(",")[5]) == int(rep.screened.sum())

    def test_rate_non_increasing_in_offset(self, libsvm_file):
        path, _ = libsvm_file
        config = ExperimentConfig(
            data=str(path), task="drsss",
            lambda_grid=("n", [0.0, -0.5, -1.0]),
            a_grid=parse_a_grid("0.9:1.1:0.01"),
        )
        rows, _ = run_grid(config)
        by_lambda = {}
        for row in rows:
            f = row.split(",")
            by_lambda.setdefault(f[2], []).append((abs(float(f[3]) - 1.0),
                                                   float(f[7])))
        for cells in by_lambda.values():
            cells.sort()
            rates = [r for _, r in cells]
            assert all(a >= b - 1e-12 for a, b in zip(rates, rates[1:]))

    def test_feature_task(self, feature_file):
        path, ds = feature_file
        config = ExperimentConfig(
            data=str(path), task="drsfs",
            lambda_grid=("lmax", [-1.0 / 3.0]),
            a_grid=[0.98, 1.0, 1.02],
        )
        rows, failed = run_grid(config)
        assert not failed
        for row in rows:
            fields = row.split(",")
            assert int(fields[6]) == ds.d - 1
            assert fields[8] == "ok"

    def test_determinism(self, libsvm_file, tmp_path):
        path, _ = libsvm_file
        outs = []
        for run in range(2):
            out = tmp_path / f"out{run}.csv"
            code = main([
                "run", "--data", str(path), "--task", "drsss",
                "--lambda-grid", "3.0,1.0", "--a-grid", "0.95:1.05:0.01",
                "--seed", "7", "--out", str(out),
            ])
            assert code == EXIT_OK
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        assert outs[0].startswith(CSV_HEADER.encode())

    def test_determinism_across_processes(self, libsvm_file, tmp_path):
        import subprocess
        import sys

        path, _ = libsvm_file
        outs = []
        for run in range(2):
            out = tmp_path / f"proc{run}.csv"
            res = subprocess.run(
                [sys.executable, "-m", "drscreen.cli", "run",
                 "--data", str(path), "--task", "drsss",
                 "--lambda-grid", "3.0", "--a-grid", "0.98,1.0,1.02",
                 "--seed", "11", "--out", str(out)],
                capture_output=True,
            )
            assert res.returncode == EXIT_OK, res.stderr
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_training_happens_once_per_lambda(self, libsvm_file, monkeypatch):
        import drscreen.cli as cli_mod

        path, _ = libsvm_file
        calls = []
        real = cli_mod.solver.train_hinge_l2

        def counting(*args, **kwargs):
            calls.append(args[2])
            return real(*args, **kwargs)

        monkeypatch.setattr(cli_mod.solver, "train_hinge_l2", counting)
        config = ExperimentConfig(
            data=str(path), task="drsss",
            lambda_grid=("explicit", [3.0, 1.0]),
            a_grid=parse_a_grid("0.9:1.1:0.01"),
        )
        rows, _ = run_grid(config)
        assert len(rows) == 2 * 21
        assert len(calls) == 2  # one training per lambda, not per cell

    def test_solver_failure_rows_and_exit_code(self, libsvm_file, tmp_path):
        path, _ = libsvm_file
        out = tmp_path / "fail.csv"
        code = main([
            "run", "--data", str(path), "--task", "drsss",
            "--lambda-grid", "3.0", "--a-grid", "1.0,1.02",
            "--gap-tol", "1e-18", "--out", str(out),
        ])
        assert code == EXIT_SOLVER
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 3
        for row in lines[1:]:
            assert row.endswith("solver_failed")

    def test_violation_exit_code(self, libsvm_file, monkeypatch):
        import drscreen.cli as cli_mod

        path, _ = libsvm_file
        monkeypatch.setattr(cli_mod, "validate_oracle",
                            lambda config: (["fake line"], 3))
        code = main([
            "validate", "--data", str(path), "--task", "drsss",
            "--lambda-grid", "3.0", "--a-grid", "1.0",
        ])
        assert code == EXIT_VIOLATION


class TestValidate:
    def test_no_violations(self, libsvm_file, capsys):
        path, _ = libsvm_file
        code = main([
            "validate", "--data", str(path), "--task", "drsss",
            "--lambda-grid", "3.0", "--a-grid", "0.98", "--samples", "20",
        ])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "total violations: 0" in out

    def test_zero_radius_single_sample(self, tmp_path, capsys):
        # at lambda = 4 the optimum is beta = (1/2, 0): margins are 0.5 and
        # 1.5, so no sample is margin-tied and the S=0 mask is float-stable
        path = tmp_path / "strict"
        path.write_text("+1 1:1\n+1 1:3\n-1 1:-1\n-1 1:-3\n")
        code = main([
            "validate", "--data", str(path), "--task", "drsss",
            "--lambda-grid", "4.0", "--a-grid", "1.0", "--samples", "1",
        ])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "screened=2/4" in out
        assert "total violations: 0" in out

    def test_corrupted_mask_detected(self, rng):
        # harness self-test: flipping one unscreened bit must raise violations
        ds = make_blobs(rng, 30, 3)
        w = np.ones(30)
        lam = 3.0
        sol = train_hinge_l2(ds, w, lam, gap_tol=1e-12 * 30)
        ball = WeightBall(w, 0.3)
        rep = robust_screen_samples(sol, ds, ball)
        margins = ds.xcheck @ sol.beta
        victim = int(np.argmin(margins))  # a clear support vector
        assert not rep.screened[victim]
        corrupted = rep.screened.copy()
        corrupted[victim] = True
        check = verify_sample_screening(ds, lam, ball, corrupted, count=20,
                                        seed=3)
        assert check.violations >= 1

    def test_guard_requires_force(self, libsvm_file):
        path, _ = libsvm_file
        config = ExperimentConfig(
            data=str(path), task="drsss",
            lambda_grid=("explicit", [3.0]), a_grid=[1.0],
            samples=40_000,
        )
        with pytest.raises(UsageError):
            validate_oracle(config)


class TestCliEndToEnd:
    def test_lambda_max_command(self, capsys, tmp_path):
        path = tmp_path / "two"
        path.write_text("+1 1:1\n-1 1:-1\n")
        code = main(["lambda-max", "--data", str(path)])
        assert code == EXIT_OK
        assert capsys.readouterr().out.strip() == "4"

    def test_dense_csv_input(self, tmp_path, rng):
        ds = make_blobs(rng, 20, 3)
        buf = io.StringIO()
        write_dense_csv(ds, buf)
        path = tmp_path / "dense.csv"
        path.write_text(buf.getvalue())
        code = main([
            "run", "--data", str(path), "--dense-csv", "--task", "drsss",
            "--lambda-grid", "2.0", "--a-grid", "1.0,1.02",
            "--out", str(tmp_path / "o.csv"),
        ])
        assert code == EXIT_OK

    def test_label_map_flag(self, tmp_path, capsys):
        path = tmp_path / "zeroone"
        path.write_text("0 1:1\n1 1:-1\n")
        code = main(["lambda-max", "--data", str(path),
                     "--label-map", "0=-1,1=1"])
        assert code == EXIT_OK

    def test_missing_file_is_data_error(self, capsys):
        code = main(["lambda-max", "--data", "/nonexistent/file"])
        assert code == EXIT_DATA

    def test_unmapped_labels_data_error(self, tmp_path, capsys):
        path = tmp_path / "bad"
        path.write_text("0 1:1\n2 1:-1\n")
        code = main(["lambda-max", "--data", str(path)])
        assert code == EXIT_DATA

    def test_usage_error_exit_code(self, capsys):
        assert main(["run", "--task", "drsss"]) == EXIT_USAGE
        assert main(["frobnicate"]) == EXIT_USAGE

    def test_bad_grid_usage_exit(self, tmp_path, capsys):
        path = tmp_path / "t"
        path.write_text("+1 1:1\n-1 1:-1\n")
        code = main([
            "run", "--data", str(path), "--task", "drsss",
            "--lambda-grid", "nope:1:2:3,", "--a-grid", "1.0",
        ])
        assert code == EXIT_USAGE
