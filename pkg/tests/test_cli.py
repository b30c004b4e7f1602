"""Tests for the command-line front end."""

import json

import pytest

import aircomp.simo as simo
from aircomp.cli import EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, build_parser, main
from aircomp.harness import CSV_HEADER, read_csv


def _scenario(tmp_path, **fields):
    doc = {"num_wds": 4, "num_rx_antennas": 1, "power_budget": 10.0, "est_error_var": 0.1,
           "noise_var": 1.0, "master_seed": 5}
    doc.update(fields)
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(doc))
    return str(path)


class TestSingle:
    def test_worked_instance(self, tmp_path, capsys):
        path = _scenario(tmp_path, num_wds=1, power_budget=1.0, est_error_var=0.0,
                         channel_var=1.0, est_channels=[1.0])
        assert main(["single", path]) == EXIT_OK
        out = capsys.readouterr().out
        assert "denoise factor w = 0.5" in out
        assert "objective    = 0.5" in out
        assert "k* = 1" in out

    def test_multi_antenna_reports_iterations(self, tmp_path, capsys):
        path = _scenario(tmp_path, num_rx_antennas=10)
        assert main(["single", path, "--n-starts", "2"]) == EXIT_OK
        assert "AO iterations =" in capsys.readouterr().out

    def test_dump(self, tmp_path):
        out = tmp_path / "design.json"
        assert main(["single", _scenario(tmp_path), "--dump", str(out)]) == EXIT_OK
        doc = json.loads(out.read_text())
        assert len(doc["tx_coeff"]) == 4 and doc["mse"]["total"] > 0

    def test_override(self, tmp_path, capsys):
        assert main(["single", _scenario(tmp_path), "--set", "num_rx_antennas=2"]) == EXIT_OK
        assert "N_r=2" in capsys.readouterr().out

    def test_missing_file(self, tmp_path, capsys):
        assert main(["single", str(tmp_path / "none.json")]) == EXIT_USAGE
        assert "scenario" in capsys.readouterr().err

    def test_bad_field_named(self, tmp_path, capsys):
        assert main(["single", _scenario(tmp_path, noise_var=-1.0)]) == EXIT_USAGE
        assert "noise_var" in capsys.readouterr().err

    def test_numeric_failure(self, tmp_path, monkeypatch):
        def broken(*args, **kw):
            raise FloatingPointError("overflow")
        monkeypatch.setattr("aircomp.cli.solve_siso", broken)
        assert main(["single", _scenario(tmp_path)]) == EXIT_NUMERIC


class TestSweep:
    def test_antenna_sweep_rows(self, tmp_path):
        out = tmp_path / "nr.csv"
        path = _scenario(tmp_path)
        assert main(["sweep", path, "--var", "nr", "--grid", "1,2,4,8,16,32,64",
                     "--trials", "2", "--out", str(out)]) == EXIT_OK
        assert len(read_csv(out)) == 7 * 4

    def test_same_seed_same_file(self, tmp_path):
        path = _scenario(tmp_path)
        for name in ("a.csv", "b.csv"):
            assert main(["sweep", path, "--var", "p", "--grid=-10,0,10", "--trials", "3",
                         "--seed", "9", "--out", str(tmp_path / name)]) == EXIT_OK
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_error_variance_sweep_dominance(self, tmp_path):
        out = tmp_path / "se.csv"
        grid = ",".join(f"{0.05 * i:.2f}" for i in range(11))
        assert main(["sweep", _scenario(tmp_path), "--var", "se", "--grid", grid, "--trials", "20",
                     "--schemes", "proposed,ignore_csi", "--out", str(out),
                     "--plot-data", str(tmp_path / "se.dat")]) == EXIT_OK
        rows = read_csv(out)
        by = {(r["grid_value"], r["scheme"]): r["mean_mse"] for r in rows}
        for g in {r["grid_value"] for r in rows}:
            assert by[(g, "proposed")] <= by[(g, "ignore_csi")] + 1e-12
        assert (tmp_path / "se.dat").exists()

    def test_threads_flag(self, tmp_path):
        out = tmp_path / "t.csv"
        assert main(["sweep", _scenario(tmp_path), "--var", "p", "--grid", "0", "--trials", "3",
                     "--threads", "2", "--out", str(out)]) == EXIT_OK
        assert out.read_text().startswith(",".join(CSV_HEADER))

    @pytest.mark.parametrize("flags", [
        ["--var", "bogus", "--grid", "1"],
        ["--var", "p", "--grid", "1,x"],
        ["--var", "p", "--grid", "2,1"],
        ["--var", "p", "--grid", "1", "--schemes", "nope"],
        ["--var", "p", "--grid", "1", "--trials", "0"],
        ["--var", "p", "--grid", "1", "--threads", "0"],
        ["--var", "p"],
    ])
    def test_invalid_flags(self, tmp_path, flags):
        out = tmp_path / "never.csv"
        assert main(["sweep", _scenario(tmp_path), *flags, "--out", str(out)]) == EXIT_USAGE
        assert not out.exists()

    def test_help_states_db(self):
        sub = build_parser()._subparsers._group_actions[0].choices["sweep"]
        assert "dB" in sub.format_help()


class TestVerify:
    def test_quick_passes(self, capsys):
        assert main(["verify", "--level", "quick"]) == EXIT_OK
        assert "[FAIL]" not in capsys.readouterr().out

    def test_mutated_solver_fails(self, monkeypatch, capsys):
        original = simo._sum_mmse
        monkeypatch.setattr(simo, "_sum_mmse", lambda est, b, config: -original(est, b, config))
        assert main(["verify", "--level", "quick"]) == EXIT_VERIFY
        assert "first failing check is" in capsys.readouterr().out

    def test_usage_errors(self):
        assert main([]) == EXIT_USAGE
        assert main(["verify", "--level", "huge"]) == EXIT_USAGE
        assert main(["--help"]) == EXIT_OK
