import hashlib
import json

import pytest

from ratecov.cli import main


@pytest.fixture()
def single_tier_config(tmp_path):
    cfg = tmp_path / "one_tier.json"
    cfg.write_text(json.dumps({
        "tiers": [{"density_per_km2": 1.0, "power_dbm": 0.0, "alpha": 4.0}],
        "noise_dbm": "none",
        "bandwidth_hz": 1_000_000.0,
        "eta": 0.5,
    }))
    return cfg


def read_rows(path):
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    return header, [dict(zip(header, line.split(","))) for line in lines[1:]]


def manifest_of(path):
    with open(str(path) + ".manifest.json") as fh:
        return json.load(fh)


class TestCoverage:
    def test_columns_and_first_row(self, table1_config, tmp_path):
        out = tmp_path / "cov.csv"
        rc = main([
            "coverage", "--config", str(table1_config), "--out", str(out),
            "--tau-min", "0", "--tau-max", "4000000", "--points", "3",
            "--methods", "exact,indep,coherent",
        ])
        assert rc == 0
        header, rows = read_rows(out)
        assert header == ["tau_bps", "pc_exact", "pc_indep", "pc_coherent"]
        assert rows[0]["tau_bps"] == "0"
        assert rows[0]["pc_exact"] == "1.000000"
        assert rows[0]["pc_coherent"] == "1.000000"
        taus = [int(r["tau_bps"]) for r in rows]
        assert taus == sorted(taus)
        # diversity split sits above the coherent baseline at mid threshold
        assert float(rows[1]["pc_exact"]) >= float(rows[1]["pc_coherent"])

    def test_manifest_checksum(self, table1_config, tmp_path):
        out = tmp_path / "cov.csv"
        main([
            "coverage", "--config", str(table1_config), "--out", str(out),
            "--tau-min", "1000000", "--tau-max", "2000000", "--points", "2",
            "--methods", "coherent",
        ])
        man = manifest_of(out)
        digest = hashlib.sha256(out.read_bytes()).hexdigest()
        assert man["checksum_sha256"][str(out)] == digest
        assert man["command"] == "coverage"
        assert man["outputs"] == [str(out)]

    def test_eta_override(self, table1_config, tmp_path):
        out = tmp_path / "cov.csv"
        rc = main([
            "coverage", "--config", str(table1_config), "--out", str(out),
            "--eta", "0.5", "--tau-min", "0", "--tau-max", "1000000", "--points", "2",
            "--methods", "exact",
        ])
        assert rc == 0
        assert manifest_of(out)["params"]["eta"] == 0.5

    def test_unknown_method_is_config_error(self, table1_config, tmp_path):
        rc = main([
            "coverage", "--config", str(table1_config), "--out", str(tmp_path / "x.csv"),
            "--tau-min", "0", "--tau-max", "1", "--points", "2", "--methods", "bogus",
        ])
        assert rc == 2

    def test_bad_grid_is_config_error(self, table1_config, tmp_path):
        rc = main([
            "coverage", "--config", str(table1_config), "--out", str(tmp_path / "x.csv"),
            "--tau-min", "0", "--tau-max", "1", "--points", "1", "--methods", "exact",
        ])
        assert rc == 2

    def test_missing_config_file(self, tmp_path):
        rc = main([
            "coverage", "--config", str(tmp_path / "nope.json"),
            "--out", str(tmp_path / "x.csv"),
            "--tau-min", "0", "--tau-max", "1", "--points", "2", "--methods", "exact",
        ])
        assert rc == 2

    def test_malformed_config_file(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{oops")
        rc = main([
            "coverage", "--config", str(bad), "--out", str(tmp_path / "x.csv"),
            "--tau-min", "0", "--tau-max", "1", "--points", "2", "--methods", "exact",
        ])
        assert rc == 2


class TestRuntime:
    def test_fifty_point_grid_within_budget(self, table1_config, tmp_path):
        import time

        out = tmp_path / "cov50.csv"
        t0 = time.monotonic()
        rc = main([
            "coverage", "--config", str(table1_config), "--out", str(out),
            "--tau-min", "0", "--tau-max", "12000000", "--points", "50",
            "--methods", "exact",
        ])
        elapsed = time.monotonic() - t0
        assert rc == 0
        assert len(out.read_text().strip().splitlines()) == 51
        assert elapsed < 120.0, f"50-point exact grid took {elapsed:.0f}s"


class TestGain:
    def test_zero_eta_row_and_monotone_gain(self, single_tier_config, tmp_path):
        out = tmp_path / "gain.csv"
        rc = main([
            "gain", "--config", str(single_tier_config), "--out", str(out),
            "--pc", "0.9", "--eta", "0,0.5",
        ])
        assert rc == 0
        header, rows = read_rows(out)
        assert header == ["pc", "eta", "tau_eta_bps", "tau0_bps", "gain"]
        assert rows[0]["gain"] == "0.000000"
        assert rows[0]["tau_eta_bps"] == rows[0]["tau0_bps"]
        assert float(rows[1]["gain"]) > 0.0


class TestDeviation:
    def test_degenerate_split_row_is_zero(self, single_tier_config, tmp_path):
        out = tmp_path / "dev.csv"
        rc = main([
            "deviation", "--config", str(single_tier_config), "--out", str(out),
            "--pc", "0.8", "--eta", "0,0.5",
        ])
        assert rc == 0
        header, rows = read_rows(out)
        assert header == ["pc", "eta", "tau_exact_bps", "tau_indep_bps",
                          "deviation", "abs_diff_bps"]
        assert rows[0]["deviation"] == "0.000000"
        assert rows[0]["abs_diff_bps"] == "0"
        assert float(rows[1]["deviation"]) > 0.0


class TestValidate:
    def test_passes_and_reruns_byte_identical(self, table1_config, tmp_path, capsys):
        out1 = tmp_path / "val1.csv"
        out2 = tmp_path / "val2.csv"
        args = [
            "validate", "--config", str(table1_config),
            "--tau-min", "2000000", "--tau-max", "6000000", "--points", "3",
            "--trials", "600", "--seed", "12345",
        ]
        rc1 = main(args + ["--out", str(out1)])
        rc2 = main(args + ["--out", str(out2)])
        assert rc1 == 0 and rc2 == 0
        assert out1.read_bytes() == out2.read_bytes()
        header, rows = read_rows(out1)
        assert header == ["tau_bps", "pc_exact", "pc_mc", "mc_stderr", "z_score"]
        assert "PASS" in capsys.readouterr().out
        assert manifest_of(out1)["seeds"] == [12345]

    def test_single_trial_exits_cleanly(self, table1_config, tmp_path):
        rc = main([
            "validate", "--config", str(table1_config), "--out", str(tmp_path / "v.csv"),
            "--tau-min", "2000000", "--tau-max", "6000000", "--points", "2",
            "--trials", "1", "--seed", "1",
        ])
        assert rc in (0, 4)
