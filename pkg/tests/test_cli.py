"""CLI surface tests: JSON points, CSV sweeps, manifests, exit codes."""

import json
import math
import os
from pathlib import Path

import pytest

from discrim3.cli import main

PI4 = 0.25 * math.pi
DATA = Path(__file__).parent / "data"


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestBound:
    def test_kink_region_point(self, capsys):
        code, obj = run_json(capsys, ["bound", "--theta", "0.7853981634", "--k", "0.25"])
        assert code == 0
        assert abs(obj["c_mh"] - 0.1464466) < 1e-6
        assert obj["winning_strategy"] == "guess_both"
        assert abs(obj["k_opt"] - 0.2038204) < 1e-6

    def test_orthogonal(self, capsys):
        code, obj = run_json(capsys, ["bound", "--theta", "1.5707963268", "--k", "0.9"])
        assert code == 0
        assert abs(obj["c_mh"]) < 1e-9

    def test_negative_k_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["bound", "--theta", "0.7853981634", "--k", "-0.1"])
        assert exc.value.code == 2

    def test_k_exclusive_with_w_d(self):
        with pytest.raises(SystemExit) as exc:
            main(["bound", "--theta", "0.5", "--k", "0.2", "--w", "1.0"])
        assert exc.value.code == 2

    def test_degrees_flag(self, capsys):
        _, rad = run_json(capsys, ["bound", "--theta", str(PI4), "--k", "0.25"])
        _, deg = run_json(capsys, ["bound", "--theta", "45", "--degrees", "--k", "0.25"])
        assert rad == deg


class TestOptimize:
    def test_kink_point(self, capsys):
        code, obj = run_json(
            capsys, ["optimize", "--theta", str(PI4), "--k", "0.2038204"]
        )
        assert code == 0
        assert abs(obj["c_min"] - 0.123581887) < 1e-6
        assert abs(obj["delta"] - 0.0228647) < 1e-5
        assert obj["s"] < 1.0
        assert obj["converged"] is True

    def test_helstrom_regime_no_violation(self, capsys):
        code, obj = run_json(capsys, ["optimize", "--theta", str(PI4), "--k", "0.6"])
        assert code == 0
        assert abs(obj["delta"]) <= 1e-8

    def test_noise_above_threshold_kills_violation(self, capsys):
        code, obj = run_json(
            capsys,
            ["optimize", "--theta", str(PI4), "--k", "0.2038204", "--p-m", "0.05"],
        )
        assert code == 0
        assert obj["delta"] <= 1e-8

    def test_bad_noise_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["optimize", "--theta", "0.5", "--k", "0.2", "--p-m", "0.7"])
        assert exc.value.code == 2


class TestSweep:
    def test_golden_csv(self, capsys):
        code = main(["sweep", "--thetas", "0.5,1.0", "--k-grid", "0.1:0.3:3"])
        assert code == 0
        out = capsys.readouterr().out
        golden = (DATA / "golden_sweep.csv").read_text()
        assert out == golden

    def test_schema_columns(self, capsys):
        main(["sweep", "--thetas", "0.5", "--k-grid", "0.2:0.2:1"])
        header = capsys.readouterr().out.splitlines()[0]
        assert header == "theta,k,c_mh,c_min,delta,p_dp,p_m,mode"

    def test_malformed_k_grid_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["sweep", "--thetas", "0.5", "--k-grid", "0.1:0.3"])
        assert exc.value.code == 2

    def test_fig1_preset_rows(self, capsys):
        code = main(["sweep", "--figure", "fig1a", "--k-points", "6"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 1 + 5 * 6
        for line in lines[1:]:
            fields = line.split(",")
            assert fields[-1] == "absolute"
            assert float(fields[4]) >= -1e-8  # delta column

    def test_fig2c_preset_has_param_columns(self, capsys):
        code = main(["sweep", "--figure", "fig2c", "--n-theta", "4"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "theta,k,c_mh,c_min,delta,p_dp,p_m,mode,s,phi1,phi2"
        assert len(lines) == 1 + 2 * 4  # two p_m levels

    def test_unknown_figure_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["sweep", "--figure", "fig9z"])
        assert exc.value.code == 2

    def test_manifest_roundtrip_across_jobs(self, capsys, tmp_path):
        out1 = tmp_path / "grid.csv"
        main([
            "sweep", "--thetas", "0.5,1.0", "--k-grid", "0.1:0.3:3",
            "--out", str(out1), "--jobs", "1",
        ])
        capsys.readouterr()
        manifest = Path(str(out1) + ".manifest.json")
        assert manifest.exists()
        out2 = tmp_path / "grid2.csv"
        main([
            "sweep", "--from-manifest", str(manifest), "--out", str(out2), "--jobs", "2",
        ])
        capsys.readouterr()
        assert out1.read_bytes() == out2.read_bytes()

    def test_outdir_env_var(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("DISCRIM3_OUTDIR", str(tmp_path))
        main(["sweep", "--thetas", "0.5", "--k-grid", "0.2:0.2:1", "--out", "rel.csv"])
        capsys.readouterr()
        assert (tmp_path / "rel.csv").exists()


class TestThreshold:
    def test_coarse_misidentify(self, capsys):
        code, obj = run_json(capsys, ["threshold", "--channel", "misidentify", "--coarse"])
        assert code == 0
        assert abs(obj["threshold"] - 0.041) < 0.01
        assert obj["degenerate"] is False
        assert 0.0 < obj["theta_at_peak"] <= 0.5 * math.pi


class TestSimulate:
    ORTHO = [
        "simulate", "--theta", str(0.5 * math.pi), "--phi1", "0",
        "--phi2", str(0.5 * math.pi), "--s", "1", "--trials", "1000",
    ]

    def test_orthogonal_ideal_zero_z(self, capsys):
        code, obj = run_json(capsys, self.ORTHO)
        assert code == 0
        assert obj["z_scores"] == [0, 0, 0]
        assert obj["counts"]["correct"] == 1000

    def test_same_seed_byte_identical(self, capsys):
        main(self.ORTHO + ["--seed", "3"])
        first = capsys.readouterr().out
        main(self.ORTHO + ["--seed", "3"])
        second = capsys.readouterr().out
        assert first == second

    def test_invalid_s_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["simulate", "--theta", "0.5", "--phi1", "0", "--phi2", "1", "--s", "1.5"])
        assert exc.value.code == 2

    def test_metadata_present(self, capsys):
        _, obj = run_json(capsys, self.ORTHO + ["--seed", "9"])
        assert obj["seed"] == 9
        assert "pcg64" in obj["rng"]
