"""Ground-truth Monte Carlo simulator for the two-block rate model.

Base stations of each tier are drawn as a Poisson point process on a disk
around the typical user at the origin; association picks the strongest
long-term received power; each base station gets one Exp(1) fading gain per
block, independent across blocks and stations.  The same interferer
positions feed both blocks, which is exactly the spatial correlation the
analytic model accounts for.

Randomness is counter-based: trial i consumes the Philox stream jumped i
blocks ahead of the seed, so results are reproducible bit for bit no matter
how trials are chunked across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from .model import ResourceSplit, Scenario

__all__ = [
    "EmptyNetworkError",
    "McEstimate",
    "NetworkRealization",
    "associate",
    "estimate_rate_coverage",
    "realize_rate",
    "sample_network",
    "simulate_rates",
]

DEFAULT_REGION_RADIUS_M = 5000.0


class EmptyNetworkError(RuntimeError):
    """A realization contains no base station at all."""


@dataclass(frozen=True, eq=False)
class NetworkRealization:
    """Sampled BS positions, one (n_k, 2) array per tier, within a disk.

    distances caches the origin distances exactly as drawn (the polar radii
    carry one fewer rounding than rebuilding them from the coordinates);
    realizations constructed by hand may leave it None.
    """

    positions: tuple[np.ndarray, ...]
    region_radius: float
    distances: tuple[np.ndarray, ...] | None = None

    def tier_distances(self) -> tuple[np.ndarray, ...]:
        if self.distances is not None:
            return self.distances
        return tuple(np.hypot(xy[:, 0], xy[:, 1]) for xy in self.positions)


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo coverage estimate with its binomial standard error."""

    p_hat: float
    std_err: float
    trials: int
    seed: int


def _philox_key(seed: int) -> np.ndarray:
    """The Philox key that np.random.Philox(seed) would derive."""
    return np.random.SeedSequence(seed).generate_state(2, np.uint64)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Dedicated counter-based generator for one trial index.

    Trial i draws from the Philox stream with counter i * 2^128, i.e. the
    stream of np.random.Philox(seed) jumped i times; streams never overlap.
    """
    return np.random.Generator(np.random.Philox(key=_philox_key(seed),
                                                counter=trial << 128))


def sample_network(
    scenario: Scenario,
    region_radius: float,
    rng: np.random.Generator,
) -> NetworkRealization:
    """Draw one network realization on a disk of the given radius (meters).

    Per tier the count is Poisson(lambda * pi * r^2) and positions are
    uniform on the disk; tiers are independent.  Draw order per tier:
    count, radii, angles.
    """
    if not region_radius > 0.0:
        raise ValueError(f"region radius must be positive, got {region_radius}")
    area = math.pi * region_radius**2
    pts = []
    dists = []
    for tier in scenario.tiers:
        n = int(rng.poisson(tier.density * area))
        u = rng.random((2, n))
        r = region_radius * np.sqrt(u[0])
        phi = 2.0 * math.pi * u[1]
        xy = np.empty((n, 2))
        np.multiply(r, np.cos(phi), out=xy[:, 0])
        np.multiply(r, np.sin(phi), out=xy[:, 1])
        pts.append(xy)
        dists.append(r)
    return NetworkRealization(tuple(pts), region_radius, tuple(dists))


def _received_powers(scenario: Scenario, realization: NetworkRealization) -> list[np.ndarray]:
    """Long-term received power P_k * d^(-alpha_k) at the origin, per tier."""
    return _rx_of(scenario, realization.tier_distances())


def _strongest(scenario: Scenario, realization: NetworkRealization,
               rx: list[np.ndarray]) -> tuple[int, int]:
    """(tier0, index) of the max received power.

    Ties (a probability-zero event) resolve to the lowest tier, then to the
    lexicographically smallest position within the tier.
    """
    best_tier, best_idx, best_rx = _serving(rx)
    ties = np.flatnonzero(rx[best_tier] == best_rx)
    if ties.size > 1:
        xy = realization.positions[best_tier][ties]
        order = np.lexsort((xy[:, 1], xy[:, 0]))
        best_idx = int(ties[order[0]])
    return best_tier, best_idx


def associate(
    scenario: Scenario,
    realization: NetworkRealization,
) -> tuple[int, np.ndarray, float]:
    """Serving station under max received power: (tier 1-based, position, distance)."""
    rx = _received_powers(scenario, realization)
    k0, i = _strongest(scenario, realization, rx)
    pos = realization.positions[k0][i]
    return k0 + 1, pos.copy(), float(realization.tier_distances()[k0][i])


def _block_gains(realization: NetworkRealization, rng) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """One Exp(1) gain per station per block; per tier, block 1 then block 2."""
    g1, g2 = [], []
    for xy in realization.positions:
        g = rng.exponential(size=(2, len(xy)))
        g1.append(g[0])
        g2.append(g[1])
    return g1, g2


def _dot_sum(gains: list[np.ndarray], rx: list[np.ndarray]) -> float:
    """sum_k gains_k . rx_k accumulated in tier order (fixed rounding)."""
    total = 0.0
    for gk, rxk in zip(gains, rx):
        total += float(gk @ rxk)
    return total


def _sinr(signal: float, denom: float) -> float:
    return signal / denom if denom > 0.0 else math.inf


def _rate_of(split: ResourceSplit, sinr1: float, sinr2: float) -> float:
    rate = 0.0
    if split.n1 > 0.0:
        rate += split.n1 * math.log2(1.0 + sinr1)
    if split.n2 > 0.0:
        rate += split.n2 * math.log2(1.0 + sinr2)
    return rate


def realize_rate(
    scenario: Scenario,
    split: ResourceSplit,
    realization: NetworkRealization,
    rng: np.random.Generator,
) -> float:
    """Rate delivered to the typical user for one realization, bit/s.

    Both blocks see the same interferer positions; only the fading gains
    differ.  rng needs only an `exponential(size=...)` method, which lets
    tests substitute deterministic gains.
    """
    rx = _received_powers(scenario, realization)
    k0, i = _strongest(scenario, realization, rx)
    g1, g2 = _block_gains(realization, rng)
    sigma2 = scenario.noise_power
    rx_o = rx[k0][i]
    sinr = []
    for g in (g1, g2):
        itf = _dot_sum(g, rx) - g[k0][i] * rx_o
        sinr.append(_sinr(g[k0][i] * rx_o, itf + sigma2))
    return _rate_of(split, sinr[0], sinr[1])


def _rate_independent(
    scenario: Scenario,
    split: ResourceSplit,
    realization: NetworkRealization,
    rng: np.random.Generator,
) -> float:
    """Rate with block-2 interferers resampled afresh (correlation removed).

    The serving station and its distance stay fixed; each tier's block-2
    interferer set is a fresh Poisson draw restricted to the region where
    the received power stays below the serving one (the conditional law of
    an interferer field given the association, by Poisson independence).
    """
    rx = _received_powers(scenario, realization)
    k0, i = _strongest(scenario, realization, rx)
    g1, _ = _block_gains(realization, rng)
    sigma2 = scenario.noise_power
    rx_o = rx[k0][i]

    itf1 = _dot_sum(g1, rx) - g1[k0][i] * rx_o
    sinr1 = _sinr(g1[k0][i] * rx_o, itf1 + sigma2)

    fresh = sample_network(scenario, realization.region_radius, rng)
    rx2 = _received_powers(scenario, fresh)
    itf2 = 0.0
    for rxk in rx2:
        kept = rxk[rxk < rx_o]
        itf2 += float(rng.exponential(size=kept.size) @ kept)
    g2_serving = float(rng.exponential())
    sinr2 = _sinr(g2_serving * rx_o, itf2 + sigma2)

    return _rate_of(split, sinr1, sinr2)


class _TrialStreams:
    """Reusable generator that rewinds to any trial's counter stream.

    Mutating the bit-generator state avoids reconstructing Philox objects
    (whose __init__ insists on gathering fresh OS entropy) in the trial loop;
    at(i) leaves the generator in exactly the state of trial_rng(seed, i).
    """

    def __init__(self, seed: int):
        self._bg = np.random.Philox(key=_philox_key(seed))
        self._template = self._bg.state
        self.generator = np.random.Generator(self._bg)

    def at(self, trial: int) -> np.random.Generator:
        counter = np.zeros(4, dtype=np.uint64)
        counter[2] = trial & 0xFFFFFFFFFFFFFFFF
        counter[3] = trial >> 64
        self._template["state"]["counter"] = counter
        self._bg.state = self._template
        return self.generator


def _sample_distances(scenario, region_radius, rng) -> list[np.ndarray]:
    """Distance draws of sample_network without materializing positions.

    Consumes the identical random stream (count then a (2, n) uniform block
    per tier), so rates computed from these distances match the
    sample_network/realize_rate pair draw for draw.
    """
    area = math.pi * region_radius**2
    out = []
    for tier in scenario.tiers:
        n = int(rng.poisson(tier.density * area))
        u = rng.random((2, n))
        out.append(region_radius * np.sqrt(u[0]))
    return out


def _rx_of(scenario, dists: list[np.ndarray]) -> list[np.ndarray]:
    return [t.tx_power * d ** (-t.path_loss_exp)
            for t, d in zip(scenario.tiers, dists)]


def _serving(rx: list[np.ndarray]) -> tuple[int, int, float]:
    best = (-1, -1, -math.inf)
    for k, rxk in enumerate(rx):
        if rxk.size:
            i = int(np.argmax(rxk))
            if rxk[i] > best[2]:
                best = (k, i, float(rxk[i]))
    if best[0] < 0:
        raise EmptyNetworkError("realization contains no base station")
    return best


def _chunk_rates(scenario, split, seed, start, count, region_radius, correlated):
    rates = np.empty(count)
    streams = _TrialStreams(seed)
    for j in range(count):
        rng = streams.at(start + j)
        dists = _sample_distances(scenario, region_radius, rng)
        rx = _rx_of(scenario, dists)
        try:
            k0, i, rx_o = _serving(rx)
        except EmptyNetworkError:
            rates[j] = 0.0  # no station anywhere: nothing is delivered
            continue
        sigma2 = scenario.noise_power
        itf1 = 0.0
        itf2 = 0.0
        g_serv1 = g_serv2 = 0.0
        for k, rxk in enumerate(rx):
            g = rng.exponential(size=(2, rxk.size))
            itf1 += float(g[0] @ rxk)
            itf2 += float(g[1] @ rxk)
            if k == k0:
                g_serv1 = g[0][i]
                g_serv2 = g[1][i]
        itf1 -= g_serv1 * rx_o
        itf2 -= g_serv2 * rx_o
        if not correlated:
            # fresh interferer field for block 2, restricted to stations
            # weaker than the serving one (the conditional law given the
            # association, by Poisson independence over disjoint regions)
            fresh = _rx_of(scenario, _sample_distances(scenario, region_radius, rng))
            itf2 = 0.0
            for rxk in fresh:
                kept = rxk[rxk < rx_o]
                itf2 += float(rng.exponential(size=kept.size) @ kept)
            g_serv2 = float(rng.exponential())
        s1 = _sinr(g_serv1 * rx_o, itf1 + sigma2)
        s2 = _sinr(g_serv2 * rx_o, itf2 + sigma2)
        rates[j] = _rate_of(split, s1, s2)
    return rates


def simulate_rates(
    scenario: Scenario,
    split: ResourceSplit,
    trials: int,
    seed: int,
    region_radius: float = DEFAULT_REGION_RADIUS_M,
    correlation_mode: str = "correlated",
    n_jobs: int = 1,
) -> np.ndarray:
    """Per-trial delivered rates (bit/s), deterministic in (seed, trials).

    correlation_mode "correlated" shares interferer positions across blocks;
    "independent" resamples them for block 2.  The result is bit-identical
    for any n_jobs because trial i always uses its own counter stream.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if correlation_mode not in ("correlated", "independent"):
        raise ValueError(f"unknown correlation mode {correlation_mode!r}")
    correlated = correlation_mode == "correlated"
    if n_jobs == 1 or trials < 256:
        return _chunk_rates(scenario, split, seed, 0, trials, region_radius, correlated)
    n_chunks = min(8 * abs(n_jobs) if n_jobs > 0 else 16, max(1, trials // 128))
    bounds = np.linspace(0, trials, n_chunks + 1).astype(int)
    chunks = Parallel(n_jobs=n_jobs)(
        delayed(_chunk_rates)(scenario, split, seed, int(a), int(b - a),
                              region_radius, correlated)
        for a, b in zip(bounds[:-1], bounds[1:]) if b > a
    )
    return np.concatenate(chunks)


def estimate_rate_coverage(
    scenario: Scenario,
    split: ResourceSplit,
    tau: float,
    trials: int,
    seed: int,
    region_radius: float = DEFAULT_REGION_RADIUS_M,
    correlation_mode: str = "correlated",
    n_jobs: int = 1,
) -> McEstimate:
    """Monte Carlo estimate of P(R >= tau) over `trials` realizations."""
    rates = simulate_rates(scenario, split, trials, seed, region_radius,
                           correlation_mode, n_jobs)
    p_hat = float(np.count_nonzero(rates >= tau)) / trials
    std_err = math.sqrt(p_hat * (1.0 - p_hat) / trials)
    return McEstimate(p_hat, std_err, trials, seed)
