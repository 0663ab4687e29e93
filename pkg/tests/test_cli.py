"""Integration tests for the batch CLI: exit codes, files, determinism."""

import json
from pathlib import Path

import numpy as np
import pytest

from sqnn.cli import SCHEMAS_BY_COMMAND, build_parser, main

QRC_SMALL = """
[dataset]
source = synthetic
synthetic_length = 1300
synthetic_seed = 7

[reservoir]
modes = 3
input_squeezing = 0.75
cavity_squeezing = 0.5
network_seed = 6
relative_noise = 0.05
noise_seed = 11
washout = 100
train = 800
test = 300
"""

SWEEP_SMALL = QRC_SMALL + """
[sweep]
cavity_squeezing = 0.0, 0.5
relative_noise = 0.0, 0.2
realizations = 3
"""

QAM_SMALL = """
[resonator]
drive_order = 2
dissipation_order = 2
detuning = 0.2
drive_strength = 0.6
gamma_m = 0.2
cutoff = 40
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def run_cli(command, config, out, extra=()):
    return main([command, "--config", config, "--out", str(out), *extra])


def read_rows(path):
    lines = Path(path).read_text().strip().splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


class TestQrcCommands:
    def test_run_produces_files(self, tmp_path):
        cfg = write(tmp_path, "qrc.ini", QRC_SMALL)
        out = tmp_path / "out"
        assert run_cli("qrc-run", cfg, out) == 0
        header, rows = read_rows(out / "predictions.csv")
        assert header == ["k", "target", "prediction"]
        assert len(rows) == 300
        manifest = json.loads((out / "run_manifest.json").read_text())
        assert "test_nmse" in manifest
        assert manifest["artifact_version"]

    def test_sweep_grid_cardinality(self, tmp_path):
        cfg = write(tmp_path, "sweep.ini", SWEEP_SMALL)
        out = tmp_path / "out"
        assert run_cli("qrc-sweep", cfg, out, ["--threads", "2"]) == 0
        header, rows = read_rows(out / "sweep.csv")
        assert header == ["cavity_squeezing_db", "noise_relative_intensity", "seed",
                          "train_nmse", "test_nmse"]
        assert len(rows) == 2 * 2 * 3

    def test_rerun_byte_identical(self, tmp_path):
        cfg = write(tmp_path, "qrc.ini", QRC_SMALL)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert run_cli("qrc-run", cfg, out_a) == 0
        assert run_cli("qrc-run", cfg, out_b) == 0
        assert (out_a / "predictions.csv").read_bytes() == \
            (out_b / "predictions.csv").read_bytes()
        assert (out_a / "run_manifest.json").read_bytes() == \
            (out_b / "run_manifest.json").read_bytes()


class TestQamCommands:
    def test_steady_vacuum_without_drive(self, tmp_path):
        cfg = write(tmp_path, "qam.ini", QAM_SMALL.replace(
            "drive_strength = 0.6", "drive_strength = 0.0").replace(
            "cutoff = 40", "cutoff = 16") + "\n[steady]\nwigner_points = 21\nwigner_extent = 3.0\n")
        out = tmp_path / "out"
        assert run_cli("qam-steady", cfg, out) == 0
        header, rows = read_rows(out / "fock_distribution.csv")
        populations = np.array([float(r[1]) for r in rows])
        assert populations[0] == pytest.approx(1.0, abs=1e-8)
        assert np.all(populations[1:] < 1e-8)
        _, wrows = read_rows(out / "wigner.csv")
        w = {(float(r[0]), float(r[1])): float(r[2]) for r in wrows}
        assert w[(0.0, 0.0)] == pytest.approx(1 / np.pi, rel=1e-6)

    def test_spectrum_table(self, tmp_path):
        cfg = write(tmp_path, "qam.ini", QAM_SMALL + "\n[spectrum]\ncount = 4\n")
        out = tmp_path / "out"
        assert run_cli("qam-spectrum", cfg, out) == 0
        header, rows = read_rows(out / "spectrum.csv")
        assert header == ["index", "re", "im", "abs_re", "gap_ratio"]
        assert float(rows[0][3]) < 1e-8
        assert all(float(r[1]) <= 1e-8 for r in rows)

    def test_trajectories_files(self, tmp_path):
        # probes at 1.5 lobe amplitudes need headroom beyond the steady cutoff
        cfg = write(tmp_path, "qam.ini", QAM_SMALL.replace("cutoff = 40",
                                                           "cutoff = 48") + """
[trajectories]
count = 2
seed = 5
time_points = 41
t_max = auto
""")
        out = tmp_path / "out"
        assert run_cli("qam-trajectories", cfg, out) == 0
        for index in range(2):
            header, rows = read_rows(out / f"trajectory_{index:03d}.csv")
            assert header == ["t", "re_a", "im_a", "n", "mandel_q", "assigned_lobe"]
            assert len(rows) == 41
            assert (out / f"jumps_{index:03d}.csv").exists()

    def test_success_and_determinism(self, tmp_path):
        cfg = write(tmp_path, "qam.ini", QAM_SMALL + """
[success]
mean_photons = 6.0
trajectories = 10
seed = 4
time_points = 41
""")
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert run_cli("qam-success", cfg, out_a) == 0
        assert run_cli("qam-success", cfg, out_b) == 0
        header, rows = read_rows(out_a / "success.csv")
        assert header == ["n", "m", "mean_photon", "trajectories", "p_hat",
                          "stderr", "baseline"]
        assert float(rows[0][6]) == 0.5
        assert (out_a / "success.csv").read_bytes() == (out_b / "success.csv").read_bytes()

    def test_basins(self, tmp_path):
        cfg = write(tmp_path, "qam.ini", QAM_SMALL + """
[basins]
mean_photon = 6.0
radius_factors = 1.0
angles = 6
window_times = 3
""")
        out = tmp_path / "out"
        assert run_cli("qam-basins", cfg, out) == 0
        header, rows = read_rows(out / "basins.csv")
        assert header == ["re_alpha", "im_alpha", "assigned_lobe"]
        assert len(rows) == 6

    def test_check_convergence(self, tmp_path):
        cfg = write(tmp_path, "qam.ini", QAM_SMALL.replace("cutoff = 40",
                                                           "cutoff = auto"))
        out = tmp_path / "out"
        assert run_cli("check-convergence", cfg, out) == 0
        report = json.loads((out / "convergence.json").read_text())
        assert report["converged"]
        assert report["accepted_cutoff"] >= 32


class TestExitCodes:
    def test_unknown_config_key_exits_2(self, tmp_path):
        cfg = write(tmp_path, "bad.ini", QRC_SMALL + "\n[reservoir2]\nx = 1\n")
        assert run_cli("qrc-run", cfg, tmp_path / "out") == 2

    def test_missing_config_exits_2(self, tmp_path):
        assert run_cli("qrc-run", str(tmp_path / "nope.ini"), tmp_path / "out") == 2

    def test_dataset_too_short_exits_2(self, tmp_path):
        cfg = write(tmp_path, "short.ini",
                    QRC_SMALL.replace("synthetic_length = 1300",
                                      "synthetic_length = 600"))
        assert run_cli("qrc-run", cfg, tmp_path / "out") == 2

    def test_no_metastable_gap_exits_4(self, tmp_path):
        # <n> = 4 two-lobe setting has t_start > t_end (checked in the unit suite)
        cfg = write(tmp_path, "qam.ini", QAM_SMALL + """
[success]
mean_photons = 4.0
trajectories = 4
time_points = 21
""")
        assert run_cli("qam-success", cfg, tmp_path / "out") == 4

    def test_unconverged_cutoff_exits_4_unless_forced(self, tmp_path):
        cfg = write(tmp_path, "qam.ini", QAM_SMALL.replace("cutoff = 40",
                                                           "cutoff = 12"))
        cfg_full = cfg
        out = tmp_path / "out"
        assert run_cli("qam-steady", cfg_full, out) == 4
        assert run_cli("qam-steady", cfg_full, out, ["--force"]) == 0


class TestCliSurface:
    def test_help_lists_all_config_keys(self, capsys):
        parser = build_parser()
        for command, schemas in SCHEMAS_BY_COMMAND.items():
            with pytest.raises(SystemExit):
                parser.parse_args([command, "--help"])
            text = capsys.readouterr().out
            for schema in schemas:
                for key in schema.keys:
                    assert key in text, f"{command} help is missing {key}"

    def test_writes_stay_inside_out_dir(self, tmp_path, monkeypatch):
        cfg = write(tmp_path, "qrc.ini", QRC_SMALL)
        workdir = tmp_path / "cwd"
        workdir.mkdir()
        monkeypatch.chdir(workdir)
        out = tmp_path / "only_here"
        assert run_cli("qrc-run", str(cfg), out) == 0
        assert list(workdir.iterdir()) == []
        assert sorted(p.name for p in out.iterdir()) == \
            ["predictions.csv", "run_manifest.json"]
