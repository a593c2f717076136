import json
from pathlib import Path

import numpy as np
import pytest

from rfmvm import cli, energy as en

FIXTURES = Path(__file__).parent / "fixtures"


class TestConfigParsing:
    def test_key_value_lines(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text("n = 64\n# comment\ntrials=5  # trailing\n")
        cfg = cli.parse_config_file(str(p))
        assert cfg == {"n": "64", "trials": "5"}

    def test_malformed_line(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text("just a line\n")
        with pytest.raises(cli.ConfigError):
            cli.parse_config_file(str(p))

    def test_snr_range(self):
        assert cli.parse_snr_list("5:10:2.5") == [5.0, 7.5, 10.0]
        assert cli.parse_snr_list("1,2,3") == [1.0, 2.0, 3.0]
        with pytest.raises(cli.ConfigError):
            cli.parse_snr_list("5:10")

    def test_missing_config_file_exit_code(self, tmp_path):
        rc = cli.main(
            ["ip-bench", "--config", str(tmp_path / "nope.cfg"),
             "--out-dir", str(tmp_path)]
        )
        assert rc == cli.EXIT_CONFIG

    def test_missing_required_key_exit_code(self, tmp_path):
        rc = cli.main(["ip-bench", "--out-dir", str(tmp_path)])
        assert rc == cli.EXIT_CONFIG


class TestIpBench:
    def test_report_and_manifest(self, tmp_path):
        rc = cli.main([
            "ip-bench", "--out-dir", str(tmp_path), "--seed", "3",
            "--trials", "10", "--snr-db", "10,20",
            "--set", "n=64",
        ])
        assert rc == cli.EXIT_OK
        lines = (tmp_path / "report.csv").read_text().strip().splitlines()
        assert lines[0] == "scheme,n,snr_db,rmse,bits"
        assert len(lines) == 3
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["seed"] == 3
        assert "fitted_db_per_bit" in manifest
        assert "wall_time_s" in manifest

    def test_rows_rederivable_from_library(self, tmp_path):
        from rfmvm import bench

        rc = cli.main([
            "ip-bench", "--out-dir", str(tmp_path), "--seed", "5",
            "--trials", "8", "--snr-db", "15", "--set", "n=32",
        ])
        assert rc == cli.EXIT_OK
        row = (tmp_path / "report.csv").read_text().strip().splitlines()[1]
        rmse_csv = float(row.split(",")[3])
        point = bench.ip_point(32, 15.0, 8, 5, 0)
        assert rmse_csv == pytest.approx(point.rmse, rel=1e-10)

    def test_thread_count_does_not_change_bytes(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out, threads in ((a, "1"), (b, "4")):
            rc = cli.main([
                "ip-bench", "--out-dir", str(out), "--seed", "9",
                "--trials", "6", "--snr-db", "5:15:5",
                "--threads", threads, "--set", "n=32",
            ])
            assert rc == cli.EXIT_OK
        assert (a / "report.csv").read_bytes() == (b / "report.csv").read_bytes()


class TestEnergyCommand:
    def test_matches_library(self, tmp_path):
        rc = cli.main([
            "energy", "--out-dir", str(tmp_path), "--scheme", "w-precode",
            "--snr-db", "25", "--set", "n_list=784", "--set", "m=300",
            "--set", "alpha=0.33",
        ])
        assert rc == cli.EXIT_OK
        lines = (tmp_path / "report.csv").read_text().strip().splitlines()
        assert lines[0] == en.ENERGY_CSV_HEADER
        fields = lines[1].split(",")
        b = en.energy_breakdown(
            "w-precode", 784, 300, en.HardwareProfile(snr_db=25.0), alpha=0.33
        )
        assert float(fields[8]) == pytest.approx(b.e2, rel=1e-9)


class TestClassifyCommand:
    def test_fixture_accuracy_at_high_snr(self, tmp_path):
        rc = cli.main([
            "classify", "--out-dir", str(tmp_path), "--snr-db", "60",
            "--set", f"model={FIXTURES / 'model_16_8_4.wts'}",
            "--set", f"vectors={FIXTURES / 'vectors_16.vec'}",
            "--set", "limit=16",
        ])
        assert rc == cli.EXIT_OK
        line = (tmp_path / "report.csv").read_text().strip().splitlines()[1]
        fields = line.split(",")
        accuracy, digital = float(fields[3]), float(fields[4])
        assert accuracy == pytest.approx(digital, abs=1e-9)

    def test_missing_model_is_io_error(self, tmp_path):
        rc = cli.main([
            "classify", "--out-dir", str(tmp_path),
            "--set", "model=/nonexistent.wts",
            "--set", f"vectors={FIXTURES / 'vectors_16.vec'}",
        ])
        assert rc == cli.EXIT_IO


class TestSyncBench:
    def test_row_shape(self, tmp_path):
        rc = cli.main([
            "sync-bench", "--out-dir", str(tmp_path), "--snr-db", "15",
            "--trials", "50", "--seed", "2",
        ])
        assert rc == cli.EXIT_OK
        lines = (tmp_path / "report.csv").read_text().strip().splitlines()
        assert lines[0] == "snr_db,detect_rate,timing_error_max,cfo_error_max,trials"
        rate = float(lines[1].split(",")[1])
        assert rate > 0.9
