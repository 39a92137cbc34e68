import json

import numpy as np
import pytest

from cavity_retrieval.cli import main
from cavity_retrieval.errors import ConfigError
from cavity_retrieval.sweep import (CSV_HEADER, GridAxis, SweepConfig,
                                    load_config, run_point, run_sweep,
                                    write_sweep_csv)


def read_rows(path):
    with open(path) as fh:
        header = fh.readline().strip()
        rows = [line.strip().split(",") for line in fh]
    return header, rows


class TestGridAxis:
    def test_parse_range(self):
        axis = GridAxis.parse("-300:300:21")
        assert (axis.lo, axis.hi, axis.steps) == (-300.0, 300.0, 21)
        assert len(axis.values()) == 21

    def test_parse_scalar(self):
        axis = GridAxis.parse("80")
        assert axis.values().tolist() == [80.0]

    @pytest.mark.parametrize("bad", ["1:2", "a:b:3", "5:1:3", "1:9:0"])
    def test_parse_rejects(self, bad):
        with pytest.raises(ConfigError):
            GridAxis.parse(bad)


class TestSweepConfig:
    def test_requires_coupling(self):
        with pytest.raises(ConfigError):
            SweepConfig(C=None, w_mhz=None)

    def test_rejects_inconsistent_coupling(self):
        with pytest.raises(ConfigError):
            SweepConfig(C=100, w_mhz=46.5)

    def test_accepts_consistent_pair(self):
        SweepConfig(C=100, w_mhz=np.sqrt(2700))

    def test_config_file_round_trip(self, tmp_path):
        path = tmp_path / "sweep.ini"
        path.write_text(
            "[fixed]\nkappa_MHz = 9\ngamma_MHz = 3\nC = 100\ntau_ns = 150\n"
            "[grid]\nDelta_MHz = -100:100:3\nOmega_MHz = 40\n"
            "[run]\nmode = no-detune-opt\njobs = 1\n"
            "[outputs]\ncsv = out.csv\n")
        config = load_config(str(path))
        assert config.C == 100.0
        assert config.delta_grid.steps == 3
        assert config.omega_grid.values().tolist() == [40.0]
        assert config.mode == "no-detune-opt"
        assert config.out == "out.csv"

    def test_missing_file(self):
        with pytest.raises(ConfigError):
            load_config("/nonexistent/sweep.ini")


class TestRunPoint:
    def test_plateau_report(self):
        config = SweepConfig(C=100, mode="no-detune-opt")
        res = run_point(config, 0.0, 80.0)
        assert res.eta == pytest.approx(0.99, abs=0.01)
        assert abs(res.nu_opt_mhz) < 0.05
        assert res.error == ""

    def test_zero_drive_note(self):
        config = SweepConfig(C=100, mode="no-detune-opt")
        res = run_point(config, 0.0, 0.0)
        assert res.eta == 0.0
        assert "ZeroField" in res.error
        assert res.nu_opt_mhz != res.nu_opt_mhz  # NaN

    def test_chi_eta_objective_detuning(self):
        config = SweepConfig(w_mhz=46.5, objective="chi-eta")
        res = run_point(config, 120.0, 13.0)
        assert res.delta_opt_mhz == pytest.approx(15.5, abs=0.3)


@pytest.fixture(scope="module")
def small_sweep(tmp_path_factory):
    config = SweepConfig(C=100, mode="no-detune-opt", jobs=1,
                         delta_grid=GridAxis(-100.0, 100.0, 2),
                         omega_grid=GridAxis(40.0, 40.0, 2))
    rows = run_sweep(config)
    out = tmp_path_factory.mktemp("sweep") / "sweep.csv"
    write_sweep_csv(rows, config, str(out))
    return config, rows, out


class TestRunSweep:

    def test_row_count_and_order(self, small_sweep):
        _, rows, _ = small_sweep
        assert len(rows) == 4
        keys = [(r.Delta_mhz, r.Omega_mhz) for r in rows]
        assert keys == sorted(keys)

    def test_symmetric_in_detuning_sign(self, small_sweep):
        _, rows, _ = small_sweep
        eta = {(r.Delta_mhz): r.eta for r in rows}
        assert abs(eta[-100.0] - eta[100.0]) < 1e-4
        nu = {(r.Delta_mhz): r.nu_opt_mhz for r in rows}
        assert nu[-100.0] == pytest.approx(-nu[100.0], abs=2e-4)

    def test_csv_schema(self, small_sweep):
        _, _, out = small_sweep
        header, rows = read_rows(out)
        assert header == CSV_HEADER
        assert all(len(r) == 10 for r in rows)

    def test_metadata_sidecar(self, small_sweep):
        config, _, out = small_sweep
        meta = json.loads((out.parent / (out.name + ".meta.json")).read_text())
        assert meta["rows"] == 4
        assert meta["config"]["C"] == 100
        assert meta["config"]["mode"] == "no-detune-opt"

    def test_deterministic_data_section(self, small_sweep, tmp_path):
        config, rows, out = small_sweep
        again = run_sweep(config)
        out2 = tmp_path / "again.csv"
        write_sweep_csv(again, config, str(out2))
        # identical except the wall_ms column (9th) and metadata
        _, a = read_rows(out)
        _, b = read_rows(out2)
        for ra, rb in zip(a, b):
            assert ra[:8] == rb[:8]
            assert ra[9] == rb[9]

    def test_matches_run_point(self, small_sweep):
        config, rows, _ = small_sweep
        single = run_point(config, 100.0, 40.0)
        match = [r for r in rows if r.Delta_mhz == 100.0][0]
        assert single.eta == match.eta
        assert single.nu_opt_mhz == match.nu_opt_mhz

    def test_parallel_matches_serial(self):
        config = SweepConfig(C=100, mode="no-detune-opt", jobs=2,
                             delta_grid=GridAxis(-50.0, 50.0, 2),
                             omega_grid=GridAxis(30.0, 30.0, 1))
        serial = run_sweep(SweepConfig(C=100, mode="no-detune-opt", jobs=1,
                                       delta_grid=GridAxis(-50.0, 50.0, 2),
                                       omega_grid=GridAxis(30.0, 30.0, 1)))
        parallel = run_sweep(config)
        for a, b in zip(serial, parallel):
            assert a.eta == b.eta
            assert a.chi_eta == b.chi_eta


class TestFullMap:
    def test_fine_map_plateau_and_subgrid_consistency(self):
        # the coarse 9x9 grid shares every point with the 41x41 grid
        # (spacings 12.375 = 5 * 2.475 MHz and 75 = 5 * 15 MHz), so the
        # coarse run is an oracle for the fine run's subsampled values
        box = dict(C=100, mode="no-detune-opt", jobs=0)
        fine = run_sweep(SweepConfig(delta_grid=GridAxis(-300.0, 300.0, 41),
                                     omega_grid=GridAxis(1.0, 100.0, 41), **box))
        coarse = run_sweep(SweepConfig(delta_grid=GridAxis(-300.0, 300.0, 9),
                                       omega_grid=GridAxis(1.0, 100.0, 9), **box))
        fine_eta = {(r.Delta_mhz, r.Omega_mhz): r.eta for r in fine}
        for row in coarse:
            key = min(fine_eta, key=lambda k: abs(k[0] - row.Delta_mhz)
                      + abs(k[1] - row.Omega_mhz))
            assert abs(key[0] - row.Delta_mhz) < 1e-9
            assert abs(key[1] - row.Omega_mhz) < 1e-9
            assert fine_eta[key] == pytest.approx(row.eta, abs=1e-12)
        plateau = [r.eta for r in fine if r.Omega_mhz >= 60.0]
        assert len(plateau) == 41 * 17
        assert min(plateau) >= 0.98


class TestCli:
    def test_point_exit_ok(self, capsys):
        code = main(["point", "--Delta", "0", "--Omega", "80", "--C", "100",
                     "--no-detune-opt"])
        out = capsys.readouterr().out
        assert code == 0
        assert "eta" in out and "chi*eta" in out

    def test_point_validation_error(self, capsys):
        code = main(["point", "--Delta", "0", "--Omega", "80", "--C", "100",
                     "--w", "46.5"])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_sweep_cli_and_config_override(self, tmp_path, capsys):
        cfg = tmp_path / "s.ini"
        cfg.write_text("[fixed]\nC = 100\n[grid]\nDelta_MHz = 0\n"
                       "Omega_MHz = 80\n[run]\nmode = no-detune-opt\njobs = 1\n")
        out = tmp_path / "s.csv"
        code = main(["sweep", "--config", str(cfg), "--out", str(out),
                     "--quiet"])
        assert code == 0
        header, rows = read_rows(out)
        assert header == CSV_HEADER
        assert len(rows) == 1

    def test_dump_trajectory_cli(self, tmp_path):
        out = tmp_path / "traj.csv"
        code = main(["dump-trajectory", "--Delta", "0", "--Omega", "40",
                     "--C", "100", "--out", str(out)])
        assert code == 0
        with open(out) as fh:
            assert fh.readline().startswith("t_ns,Re_E")

    def test_point_dump_phase(self, tmp_path):
        out = tmp_path / "phase.csv"
        code = main(["point", "--Delta", "120", "--Omega", "13", "--C", "100",
                     "--delta", "15.5", "--dump-phase", str(out)])
        assert code == 0
        with open(out) as fh:
            assert fh.readline().strip() == "t_ns,theta_E_rad,theta_LO_rad,abs_E"
