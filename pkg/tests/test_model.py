import json
import math

import pytest
from hypothesis import given, strategies as st

from ratecov.model import (
    CoverageCurve,
    ResourceSplit,
    Scenario,
    TierParams,
    ValidationError,
    dbm_to_mw,
    load_scenario,
    save_scenario,
    split_from_eta,
)


class TestLoadScenario:
    def test_table1_file(self, table1_config):
        scenario, split = load_scenario(table1_config)
        assert scenario.num_tiers == 3
        assert scenario.tiers[0].density == pytest.approx(4e-6)
        assert scenario.tiers[0].tx_power == pytest.approx(10.0**4.6)
        assert scenario.tiers[2].path_loss_exp == 3.5
        assert scenario.noise_power == pytest.approx(10.0 ** (-10.4))
        assert split.total == pytest.approx(8_820_000.0)
        assert split.eta == pytest.approx(0.2)

    def test_minimal_single_tier(self, tmp_path):
        cfg = tmp_path / "one.json"
        cfg.write_text(json.dumps({
            "tiers": [{"density_per_km2": 1.0, "power_dbm": 0.0, "alpha": 4.0}],
            "noise_dbm": "none",
            "bandwidth_hz": 1e6,
            "eta": 0.5,
        }))
        scenario, split = load_scenario(cfg)
        assert scenario.num_tiers == 1
        assert scenario.tiers[0].tx_power == 1.0  # 0 dBm
        assert scenario.noise_power == 0.0

    def test_alpha_at_boundary_rejected(self, tmp_path):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({
            "tiers": [{"density_per_km2": 1.0, "power_dbm": 0.0, "alpha": 2.0}],
            "noise_dbm": "none",
            "bandwidth_hz": 1e6,
            "eta": 0.5,
        }))
        with pytest.raises(ValidationError, match="exponent"):
            load_scenario(cfg)

    def test_malformed_json(self, tmp_path):
        cfg = tmp_path / "broken.json"
        cfg.write_text("{not json")
        with pytest.raises(json.JSONDecodeError):
            load_scenario(cfg)

    def test_missing_key_named(self, tmp_path):
        cfg = tmp_path / "missing.json"
        cfg.write_text(json.dumps({"tiers": [], "noise_dbm": 0.0, "eta": 0.5}))
        with pytest.raises(ValidationError, match="bandwidth_hz"):
            load_scenario(cfg)

    def test_roundtrip_bit_exact(self, table1_config, tmp_path):
        scenario, split = load_scenario(table1_config)
        out = tmp_path / "resaved.json"
        save_scenario(out, scenario, split)
        again, split2 = load_scenario(out)
        for a, b in zip(scenario.tiers, again.tiers):
            assert a.density == b.density
            assert a.tx_power == b.tx_power
            assert a.path_loss_exp == b.path_loss_exp
        assert scenario.noise_power == again.noise_power

    @given(
        st.floats(0.01, 500.0),
        st.floats(-30.0, 60.0),
        st.floats(2.01, 6.0),
        st.one_of(st.none(), st.floats(-140.0, -60.0)),
    )
    def test_roundtrip_random_params(self, tmp_path_factory, dens, dbm, alpha, noise_dbm):
        tmp = tmp_path_factory.mktemp("rt")
        scenario = Scenario(
            (TierParams.from_external(dens, dbm, alpha),),
            0.0 if noise_dbm is None else dbm_to_mw(noise_dbm),
        )
        split = split_from_eta(1e7, 0.3)
        path = tmp / "s.json"
        save_scenario(path, scenario, split)
        again, _ = load_scenario(path)
        assert again.tiers[0].density == scenario.tiers[0].density
        assert again.tiers[0].tx_power == scenario.tiers[0].tx_power
        assert again.noise_power == scenario.noise_power


class TestInvariants:
    def test_tier_validation(self):
        with pytest.raises(ValidationError):
            TierParams(0.0, 1.0, 4.0)
        with pytest.raises(ValidationError):
            TierParams(1e-6, 0.0, 4.0)
        with pytest.raises(ValidationError):
            TierParams(1e-6, 1.0, 2.0)

    def test_scenario_validation(self):
        with pytest.raises(ValidationError):
            Scenario((), 0.0)
        with pytest.raises(ValidationError):
            Scenario((TierParams(1e-6, 1.0, 4.0),), -1.0)

    def test_split_validation(self):
        with pytest.raises(ValidationError):
            ResourceSplit(-1.0, 2.0)
        with pytest.raises(ValidationError):
            ResourceSplit(0.0, 0.0)

    def test_coherent_flag(self):
        assert ResourceSplit(0.0, 5.0).is_coherent
        assert ResourceSplit(5.0, 0.0).is_coherent
        assert not ResourceSplit(1.0, 4.0).is_coherent


class TestSplitFromEta:
    def test_equal_split(self):
        s = split_from_eta(8_820_000.0, 0.5)
        assert s.n1 == s.n2 == 4_410_000.0

    def test_degenerate(self):
        s = split_from_eta(8_820_000.0, 0.0)
        assert s.n1 == 0.0 and s.n2 == 8_820_000.0 and s.is_coherent

    def test_fifth(self):
        s = split_from_eta(8_820_000.0, 0.2)
        assert s.n1 == pytest.approx(1_764_000.0, abs=1e-6)
        assert s.n2 == pytest.approx(7_056_000.0, abs=1e-6)

    def test_out_of_range(self):
        with pytest.raises(ValidationError):
            split_from_eta(1e6, 1.5)
        with pytest.raises(ValidationError):
            split_from_eta(0.0, 0.5)

    @given(st.floats(1.0, 1e9), st.floats(0.0, 1.0))
    def test_parts_sum_to_total(self, total, eta):
        s = split_from_eta(total, eta)
        assert abs(s.n1 + s.n2 - total) <= math.ulp(total)


class TestCoverageCurve:
    def test_valid(self):
        c = CoverageCurve((0.0, 1.0, 2.0), {"exact": (1.0, 0.6, 0.2)})
        assert c.methods == ("exact",)

    def test_rejects_non_ascending_grid(self):
        with pytest.raises(ValidationError):
            CoverageCurve((0.0, 0.0, 2.0), {"exact": (1.0, 0.6, 0.2)})

    def test_rejects_out_of_range_values(self):
        with pytest.raises(ValidationError):
            CoverageCurve((0.0, 1.0), {"exact": (1.1, 0.5)})

    def test_rejects_increasing_column(self):
        with pytest.raises(ValidationError):
            CoverageCurve((0.0, 1.0), {"exact": (0.5, 0.7)})

    def test_tolerates_noise_level_wiggle(self):
        CoverageCurve((0.0, 1.0), {"exact": (0.5, 0.5 + 1e-7)})
