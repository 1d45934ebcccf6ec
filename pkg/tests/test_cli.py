import json
import math

import pytest

from saddlescape import cli
from saddlescape.schedules import TkPropertyReport


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestToyCommand:
    def test_csv_with_two_blocks(self, capsys, tmp_path):
        out = tmp_path / "fig1.csv"
        code, _, err = run_cli(
            capsys,
            "toy", "--delta", "0.02", "--alpha", "0.75", "--beta", "0.985",
            "--x0", "0.25,0.01", "--iters", "500", "--thin", "5", "--out", str(out),
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "method,iter,x1,x2"
        methods = {line.split(",")[0] for line in lines[1:]}
        assert methods == {"steepest_descent", "heavy_ball"}
        assert "config" in err and "toy" in err

    def test_json_format(self, capsys):
        code, out, _ = run_cli(capsys, "toy", "--iters", "20", "--json")
        assert code == 0
        data = json.loads(out)
        assert set(data) >= {"descent", "heavy_ball", "thin"}

    def test_bad_x0_rejected(self, capsys):
        code, _, _ = run_cli(capsys, "toy", "--x0", "1,2,3")
        assert code == 1


class TestSpectrumCommand:
    def test_single_eigenvalue_roots(self, capsys):
        code, out, err = run_cli(
            capsys, "spectrum", "--lambda=-0.02", "--alpha", "3", "--beta", "0.94", "--json"
        )
        assert code == 0
        block = json.loads(out)["blocks"][0]
        root = math.sqrt(0.06)
        assert abs(block["mu_hi"]["re"] - (1.0 + root)) <= 1e-12
        assert abs(block["mu_lo"]["re"] - (1.0 - root)) <= 1e-12
        assert block["mu_hi"]["im"] == 0.0
        assert block["class"] == "unstable"
        assert "spectrum" in err

    def test_problem_mode(self, capsys):
        code, out, _ = run_cli(
            capsys, "spectrum", "--n", "20", "--p", "2", "--delta", "0.01",
            "--seed", "5", "--beta", "0.9",
        )
        assert code == 0
        data = json.loads(out)
        assert data["unstable_dim"] == 2
        assert len(data["blocks"]) == 20

    def test_csv_format(self, capsys):
        code, out, _ = run_cli(
            capsys, "spectrum", "--lambda=-0.02", "--alpha", "3", "--beta", "0.94",
            "--format", "csv",
        )
        assert code == 0
        assert out.splitlines()[0] == "lambda,mu_hi_re,mu_hi_im,mu_lo_re,mu_lo_im,class"

    def test_missing_mode_flags(self, capsys):
        code, _, err = run_cli(capsys, "spectrum", "--beta", "0.9")
        assert code == 1
        assert "error" in err


class TestRatesCommand:
    def test_json_report_keys(self, capsys):
        code, out, _ = run_cli(
            capsys, "rates", "--lambda=-0.01", "--alpha", "0.99", "--schedule", "nesterov",
            "--iters", "500",
        )
        assert code == 0
        data = json.loads(out)
        assert set(data) == {
            "lambda", "alpha", "schedule", "b_final", "b_limit", "predicted_escape_iters",
        }
        assert data["schedule"] == {"kind": "nesterov"}
        assert 0.0 < data["b_final"] < data["b_limit"]

    def test_csv_sequence(self, capsys):
        code, out, _ = run_cli(
            capsys, "rates", "--lambda=-0.01", "--alpha", "0.5", "--schedule",
            "constant:0.5,0.5", "--iters", "10", "--format", "csv",
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "iter,b"
        assert len(lines) == 12
        assert float(lines[1].split(",")[1]) == 0.0

    def test_toy_schedule_uses_curvature(self, capsys):
        code, out, _ = run_cli(
            capsys, "rates", "--lambda=-0.02", "--alpha", "0.75", "--schedule", "toy",
            "--iters", "10",
        )
        assert code == 0
        data = json.loads(out)
        assert data["schedule"]["kind"] == "toy"
        assert data["schedule"]["delta"] == 0.02

    def test_positive_lambda_rejected(self, capsys):
        code, _, err = run_cli(capsys, "rates", "--lambda", "0.1", "--alpha", "0.5")
        assert code == 1
        assert "negative" in err


class TestSimulateCommand:
    def test_identical_bytes_for_identical_argv(self, capsys, tmp_path):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for path in paths:
            code, _, _ = run_cli(
                capsys, "simulate", "--n", "40", "--delta", "0.01", "--seed", "3",
                "--iters", "200", "--out", str(path),
            )
            assert code == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_header_and_series(self, capsys):
        code, out, err = run_cli(capsys, "simulate", "--n", "30", "--iters", "50")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "iter,steepest_descent,heavy_ball,accelerated,predicted"
        assert len(lines) == 52
        assert "seed" in err

    def test_perturbed_predecessor(self, capsys):
        code, out, _ = run_cli(
            capsys, "simulate", "--n", "30", "--iters", "50", "--eps-perturb", "1e-6",
            "--format", "json",
        )
        assert code == 0
        json.loads(out)


class TestTableCommand:
    def test_csv_output(self, capsys):
        code, out, _ = run_cli(
            capsys, "table", "--n", "30", "--delta", "0.02", "--trials", "3", "--seed", "2",
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("n,delta,row_type")
        assert len([l for l in lines if ",trial," in l]) == 3

    def test_json_output(self, capsys):
        code, out, _ = run_cli(
            capsys, "table", "--n", "30", "--delta", "0.02", "0.01", "--trials", "2",
            "--json",
        )
        assert code == 0
        data = json.loads(out)
        assert len(data["cells"]) == 2


class TestVerifyTkCommand:
    def test_reports_pass_and_exits_zero(self, capsys):
        code, out, err = run_cli(capsys, "verify-tk", "--K", "1000")
        assert code == 0
        data = json.loads(out)
        assert data["identity_max_err"] <= 1e-9
        assert data["passed"] is True
        assert "verify-tk" in err

    def test_violation_exits_two(self, capsys, monkeypatch):
        failing = TkPropertyReport(
            count=10, identity_max_err=1.0, bound_ok=False,
            ratio_monotone=False, ratio_gap=1.0, final_ratio=0.0,
        )
        monkeypatch.setattr(cli, "verify_tk_properties", lambda count: failing)
        code, out, _ = run_cli(capsys, "verify-tk", "--K", "10")
        assert code == 2
        assert json.loads(out)["passed"] is False


class TestCliContract:
    @pytest.mark.parametrize(
        "command",
        [["toy"], ["spectrum"], ["rates"], ["simulate"], ["table"], ["verify-tk"]],
    )
    def test_help_exits_zero(self, capsys, command):
        code, out, _ = run_cli(capsys, *command, "--help")
        assert code == 0
        assert "usage" in out

    def test_unknown_flag_exits_one(self, capsys):
        code, _, err = run_cli(capsys, "toy", "--bogus", "1")
        assert code == 1
        assert "error" in err

    def test_unknown_subcommand_exits_one(self, capsys):
        code, _, _ = run_cli(capsys, "dance")
        assert code == 1

    def test_missing_subcommand_exits_one(self, capsys):
        code, _, _ = run_cli(capsys)
        assert code == 1

    def test_unwritable_output_path(self, capsys):
        code, _, err = run_cli(
            capsys, "verify-tk", "--K", "10", "--out", "/nonexistent-dir/report.json"
        )
        assert code == 1
        assert "error" in err

    def test_config_echo_includes_resolved_seed(self, capsys):
        _, _, err = run_cli(capsys, "simulate", "--n", "30", "--iters", "10")
        assert '"seed": 0' in err
