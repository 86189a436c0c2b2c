"""Scenario configuration for K-tier downlink networks.

Internal units are meters, milliwatts, hertz and bit/s throughout; dBm and
per-km^2 figures exist only at the JSON boundary.  All types are immutable
after construction and safe to share across workers.

Scenario file schema::

    {
      "tiers": [
        {"density_per_km2": 4.0, "power_dbm": 46.0, "alpha": 3.76},
        ...
      ],
      "noise_dbm": -104.0,        # or "none" for zero noise power
      "bandwidth_hz": 8820000.0,
      "eta": 0.5                  # fraction of bandwidth in block 1
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

__all__ = [
    "CoverageCurve",
    "ResourceSplit",
    "Scenario",
    "TierParams",
    "ValidationError",
    "dbm_to_mw",
    "load_scenario",
    "mw_to_dbm",
    "save_scenario",
    "split_from_eta",
]


class ValidationError(ValueError):
    """A scenario or split violates one of its invariants."""


def dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


def mw_to_dbm(mw: float) -> float:
    if mw <= 0.0:
        raise ValidationError(f"cannot express nonpositive power {mw} mW in dBm")
    return 10.0 * math.log10(mw)


@dataclass(frozen=True)
class TierParams:
    """One tier of base stations.

    density:       BS intensity per m^2
    tx_power:      transmit power, linear mW
    path_loss_exp: path-loss exponent, must exceed 2
    """

    density: float
    tx_power: float
    path_loss_exp: float

    def __post_init__(self) -> None:
        if not self.density > 0.0:
            raise ValidationError(f"tier density must be > 0, got {self.density}")
        if not self.tx_power > 0.0:
            raise ValidationError(f"tier tx_power must be > 0 mW, got {self.tx_power}")
        if not self.path_loss_exp > 2.0:
            raise ValidationError(
                f"path-loss exponent must be > 2, got {self.path_loss_exp}"
            )

    @classmethod
    def from_external(cls, density_per_km2: float, power_dbm: float, alpha: float) -> "TierParams":
        return cls(density_per_km2 / 1e6, dbm_to_mw(power_dbm), alpha)


@dataclass(frozen=True)
class Scenario:
    """A K-tier network: tier parameters plus AWGN power (linear mW).

    noise_power = 0 selects the interference-limited regime.
    """

    tiers: tuple[TierParams, ...]
    noise_power: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "tiers", tuple(self.tiers))
        if len(self.tiers) < 1:
            raise ValidationError("a scenario needs at least one tier")
        if self.noise_power < 0.0:
            raise ValidationError(f"noise power must be >= 0 mW, got {self.noise_power}")

    @property
    def num_tiers(self) -> int:
        return len(self.tiers)


@dataclass(frozen=True)
class ResourceSplit:
    """Bandwidth partition (n1, n2) in Hz between the two fading blocks."""

    n1: float
    n2: float

    def __post_init__(self) -> None:
        if self.n1 < 0.0 or self.n2 < 0.0:
            raise ValidationError(f"block bandwidths must be >= 0, got ({self.n1}, {self.n2})")
        if not self.n1 + self.n2 > 0.0:
            raise ValidationError("total bandwidth must be positive")

    @property
    def total(self) -> float:
        return self.n1 + self.n2

    @property
    def eta(self) -> float:
        return self.n1 / self.total

    @property
    def is_coherent(self) -> bool:
        """True when all resources sit in a single fading block."""
        return self.n1 == 0.0 or self.n2 == 0.0

    def swapped(self) -> "ResourceSplit":
        return ResourceSplit(self.n2, self.n1)


def split_from_eta(total_hz: float, eta: float) -> ResourceSplit:
    """Split a total bandwidth so that block 1 carries the fraction eta."""
    if not total_hz > 0.0:
        raise ValidationError(f"total bandwidth must be positive, got {total_hz}")
    if not 0.0 <= eta <= 1.0:
        raise ValidationError(f"eta must lie in [0, 1], got {eta}")
    return ResourceSplit(eta * total_hz, (1.0 - eta) * total_hz)


# monotonicity slack for stored coverage columns; computed curves carry
# quadrature/Monte-Carlo noise of this order in flat regions
_MONOTONE_SLACK = 5e-6


@dataclass(frozen=True)
class CoverageCurve:
    """Coverage probability columns over an ascending rate-threshold grid."""

    tau_grid: tuple[float, ...]
    columns: dict[str, tuple[float, ...]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "tau_grid", tuple(float(t) for t in self.tau_grid))
        object.__setattr__(
            self,
            "columns",
            {k: tuple(float(v) for v in vs) for k, vs in self.columns.items()},
        )
        grid = self.tau_grid
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValidationError("tau_grid must be strictly ascending")
        for label, vals in self.columns.items():
            if len(vals) != len(grid):
                raise ValidationError(f"column {label!r} length differs from tau_grid")
            if any(not 0.0 <= v <= 1.0 for v in vals):
                raise ValidationError(f"column {label!r} has values outside [0, 1]")
            if any(b > a + _MONOTONE_SLACK for a, b in zip(vals, vals[1:])):
                raise ValidationError(f"column {label!r} is not non-increasing")

    @property
    def methods(self) -> tuple[str, ...]:
        return tuple(self.columns)


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValidationError(msg)


def load_scenario(path: str | Path) -> tuple[Scenario, ResourceSplit]:
    """Load and validate a scenario file; returns (Scenario, ResourceSplit).

    Unit conversions (dBm to mW, per-km^2 to per-m^2) happen here.  Raises
    json.JSONDecodeError on malformed files and ValidationError naming the
    violated invariant otherwise.
    """
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)

    _require(isinstance(raw, dict), "scenario file must contain a JSON object")
    for key in ("tiers", "noise_dbm", "bandwidth_hz", "eta"):
        _require(key in raw, f"missing required key {key!r}")

    tiers_raw = raw["tiers"]
    _require(isinstance(tiers_raw, list) and len(tiers_raw) >= 1,
             "'tiers' must be a non-empty list")
    tiers = []
    for i, t in enumerate(tiers_raw):
        _require(isinstance(t, dict), f"tier {i} must be an object")
        for key in ("density_per_km2", "power_dbm", "alpha"):
            _require(key in t, f"tier {i} missing key {key!r}")
            _require(isinstance(t[key], (int, float)) and not isinstance(t[key], bool),
                     f"tier {i} key {key!r} must be a number")
        tiers.append(TierParams.from_external(t["density_per_km2"], t["power_dbm"], t["alpha"]))

    noise_raw = raw["noise_dbm"]
    if noise_raw == "none":
        noise = 0.0
    else:
        _require(isinstance(noise_raw, (int, float)) and not isinstance(noise_raw, bool),
                 "'noise_dbm' must be a number or \"none\"")
        noise = dbm_to_mw(noise_raw)

    bw = raw["bandwidth_hz"]
    _require(isinstance(bw, (int, float)) and not isinstance(bw, bool) and bw > 0,
             "'bandwidth_hz' must be a positive number")
    eta = raw["eta"]
    _require(isinstance(eta, (int, float)) and not isinstance(eta, bool),
             "'eta' must be a number")

    return Scenario(tuple(tiers), noise), split_from_eta(float(bw), float(eta))


def _exact_inverse(forward, target: float, guess: float) -> float:
    """Nudge guess by ulps until forward(guess) reproduces target exactly.

    Serialization emits boundary units (dBm, per-km^2); log/exp pairs round
    trip only to within an ulp or two, so the emitted value is corrected to
    the representable neighbor whose conversion is bit-exact.
    """
    if forward(guess) == target:
        return guess
    for direction in (math.inf, -math.inf):
        cand = guess
        for _ in range(4):
            cand = math.nextafter(cand, direction)
            if forward(cand) == target:
                return cand
    return guess


def save_scenario(path: str | Path, scenario: Scenario, split: ResourceSplit) -> None:
    """Write a scenario file that reloads to bit-identical linear values."""
    tiers = []
    for t in scenario.tiers:
        km2 = _exact_inverse(lambda x: x / 1e6, t.density, t.density * 1e6)
        dbm = _exact_inverse(dbm_to_mw, t.tx_power, mw_to_dbm(t.tx_power))
        tiers.append({"density_per_km2": km2, "power_dbm": dbm, "alpha": t.path_loss_exp})
    noise = ("none" if scenario.noise_power == 0.0
             else _exact_inverse(dbm_to_mw, scenario.noise_power,
                                 mw_to_dbm(scenario.noise_power)))
    total = split.total
    eta = _exact_inverse(lambda e: e * total, split.n1, split.eta)
    doc = {"tiers": tiers, "noise_dbm": noise, "bandwidth_hz": total, "eta": eta}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
