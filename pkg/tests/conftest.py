import hypothesis
import pytest

from ratecov import Scenario, TierParams, split_from_eta

hypothesis.settings.register_profile(
    "default", deadline=None, max_examples=50, derandomize=True
)
hypothesis.settings.load_profile("default")

# three-tier reference scenario: macro / pico / femto
TABLE1 = ((4.0, 46.0, 3.76), (16.0, 30.0, 3.67), (40.0, 24.0, 3.5))
NOISE_DBM = -104.0
BANDWIDTH_HZ = 8_820_000.0


@pytest.fixture(scope="session")
def table1():
    return Scenario(
        tuple(TierParams.from_external(d, p, a) for d, p, a in TABLE1),
        noise_power=10.0 ** (NOISE_DBM / 10.0),
    )


@pytest.fixture(scope="session")
def table1_split():
    return split_from_eta(BANDWIDTH_HZ, 0.2)


@pytest.fixture(scope="session")
def single_tier_a4():
    """One tier per km^2, 0 dBm, alpha 4, no noise: everything closed-form."""
    return Scenario((TierParams(1e-6, 1.0, 4.0),), 0.0)


@pytest.fixture()
def table1_config(tmp_path):
    cfg = tmp_path / "three_tier.json"
    cfg.write_text(
        """{
  "tiers": [
    {"density_per_km2": 4.0, "power_dbm": 46.0, "alpha": 3.76},
    {"density_per_km2": 16.0, "power_dbm": 30.0, "alpha": 3.67},
    {"density_per_km2": 40.0, "power_dbm": 24.0, "alpha": 3.5}
  ],
  "noise_dbm": -104.0,
  "bandwidth_hz": 8820000.0,
  "eta": 0.2
}
"""
    )
    return cfg
