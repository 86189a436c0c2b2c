"""Analytic rate coverage for K-tier downlink networks under two-block fading.

The offered rate is R = n1*log2(1+SINR_1) + n2*log2(1+SINR_2) where the two
SINRs share interferer locations (a common Poisson field per tier) but fade
independently.  Coverage P(R >= tau) is evaluated as an iterated integral:
the outer variable is the rate carried by block 2, the inner variable the
serving-BS distance, with the block-2 rate density formed analytically by
differentiating the conditional Laplace-functional exponent.

Every probability depends on bandwidths only through tau/total and
eta = n1/total, so the engine works in normalized rate units internally;
this also keeps the outer integration variable O(1).
"""

from __future__ import annotations

import math
from enum import Enum
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .model import CoverageCurve, ResourceSplit, Scenario, split_from_eta
from .quadrature import QuadratureError, find_root_decreasing, integrate, integrate_semi_infinite
from .specfun import _df_db, f_correlated, psi, psi_dp

__all__ = [
    "CoverageMethod",
    "MethodError",
    "UnreachableTargetError",
    "association_probability",
    "coverage_curve",
    "deviation_ignoring_correlation",
    "distance_pdf",
    "gain_vs_coherent",
    "rate_at_coverage",
    "rate_coverage",
]

_LN2 = math.log(2.0)

# Outer integration stops once the block-2 SINR threshold reaches this value;
# the residual coverage mass beyond it scales like THETA_MAX^(-2/alpha)
# (polynomial, not exponential), so 1e19 keeps the truncation below ~1e-9
# for alpha >= 3.  The integrand is asserted negligible at the cutoff.
_THETA_MAX = 1e19
_TAIL_BOUND = 1e-8

# default absolute tolerance for coverage probabilities, split roughly 10:1
# between the outer rate integral and each inner distance integral
_COVERAGE_TOL = 1e-6

_BRACKET_GROWTH_LIMIT = 2.0**40

# exp2 argument beyond which a block's SINR threshold no longer fits in a
# double; coverage there is indistinguishable from zero
_EXP_OVERFLOW = 700.0


class MethodError(ValueError):
    """The requested method is incompatible with the scenario or split."""


class UnreachableTargetError(ValueError):
    """No rate threshold attains the requested coverage probability."""


class CoverageMethod(Enum):
    """Evaluation route for the rate coverage probability."""

    EXACT = "exact"
    INDEPENDENT = "indep"
    COHERENT = "coherent"
    NO_NOISE_EQUAL_ALPHA = "no_noise_equal_alpha"


def _tier_index(scenario: Scenario, l: int) -> int:
    if not 1 <= l <= scenario.num_tiers:
        raise ValueError(f"tier index {l} outside 1..{scenario.num_tiers}")
    return l - 1


def _named(name: str, fn, *args, **kwargs):
    """Run a quadrature call, prefixing failures with the integral's name."""
    try:
        return fn(*args, **kwargs)
    except QuadratureError as exc:
        raise QuadratureError(f"{name}: {exc}", exc.estimate, exc.error_estimate) from exc


def _arrays(scenario: Scenario):
    lam = np.array([t.density for t in scenario.tiers])
    pw = np.array([t.tx_power for t in scenario.tiers])
    al = np.array([t.path_loss_exp for t in scenario.tiers])
    return lam, pw, al


@lru_cache(maxsize=64)
def _serving_geometry(scenario: Scenario):
    """Per serving tier: coefficients T_k = pi*lam_k*(P_k/P_l)^(2/alpha_k)
    and exponents e_k = alpha_l/alpha_k of the squared-distance variable."""
    lam, pw, al = _arrays(scenario)
    coeffs = []
    exps = []
    for l0 in range(scenario.num_tiers):
        coeffs.append(np.pi * lam * (pw / pw[l0]) ** (2.0 / al))
        exps.append(al[l0] / al)
    return tuple(coeffs), tuple(exps)


def _unit_scale(T: np.ndarray, e: np.ndarray) -> float:
    """u at which sum_k T_k u^e_k = 1 (sets the distance-integral scale)."""

    def s(u: float) -> float:
        return float(np.sum(T * u**e))

    u = 1.0
    for _ in range(400):
        if s(u) > 1.0:
            break
        u *= 16.0
    lo = u / 16.0
    for _ in range(400):
        if s(lo) < 1.0:
            break
        lo /= 16.0
    hi = u
    for _ in range(80):
        mid = math.sqrt(lo * hi)
        if s(mid) > 1.0:
            hi = mid
        else:
            lo = mid
    return math.sqrt(lo * hi)


@lru_cache(maxsize=64)
def _association_all(scenario: Scenario) -> tuple[float, ...]:
    lam, _, _ = _arrays(scenario)
    coeffs, exps = _serving_geometry(scenario)
    out = []
    for l0 in range(scenario.num_tiers):
        T, e = coeffs[l0], exps[l0]
        scale = _unit_scale(T, e)

        def g(u: np.ndarray) -> np.ndarray:
            return np.exp(-(u[:, None] ** e[None, :]) @ T)

        res = integrate_semi_infinite(g, 0.0, abs_tol=1e-10 / (math.pi * lam[l0]),
                                      scale=scale)
        out.append(math.pi * lam[l0] * res.value)
    return tuple(out)


def association_probability(scenario: Scenario, l: int) -> float:
    """Probability that a typical user is served by tier l (1-based).

    Computed from the nearest-in-received-power association rule:
    A_l = 2*pi*lam_l int_0^inf y exp(-pi sum_k lam_k (P_k/P_l)^(2/a_k)
    y^(2*a_l/a_k)) dy.  The values sum to 1 over tiers.
    """
    return _association_all(scenario)[_tier_index(scenario, l)]


def distance_pdf(scenario: Scenario, l: int, y) -> np.ndarray | float:
    """PDF of the serving-BS distance given association with tier l (1-based).

    Accepts a scalar or array of distances in meters.
    """
    l0 = _tier_index(scenario, l)
    lam, _, _ = _arrays(scenario)
    coeffs, exps = _serving_geometry(scenario)
    T, e = coeffs[l0], exps[l0]
    a_l = _association_all(scenario)[l0]
    y_arr = np.asarray(y, dtype=float)
    u = y_arr**2
    val = 2.0 * math.pi * lam[l0] * y_arr / a_l * np.exp(
        -(u[..., None] ** e) @ T
    )
    return val if y_arr.ndim else float(val)


def _pair_correlated(beta: float, gamma: float, alpha: float) -> tuple[float, float]:
    return f_correlated(beta, gamma, alpha), _df_db(beta, gamma, alpha)


def _pair_independent(beta: float, gamma: float, alpha: float) -> tuple[float, float]:
    return psi(beta, alpha) + psi(gamma, alpha), psi_dp(gamma, alpha)


def _two_block_pc(
    scenario: Scenario,
    eta: float,
    tau_n: float,
    correlated: bool,
    abs_tol: float,
) -> float:
    """Normalized-coverage engine for a genuine two-block split.

    tau_n is the rate threshold divided by the total bandwidth.  The outer
    variable zeta is the normalized rate carried by block 2; for each zeta
    the serving-distance integral is evaluated per tier in the squared
    distance u = y^2 (the serving-tier void term is then linear in u).
    """
    lam, pw, al = _arrays(scenario)
    K = scenario.num_tiers
    coeffs, exps = _serving_geometry(scenario)
    sigma2 = scenario.noise_power
    pair = _pair_correlated if correlated else _pair_independent

    inner_tol = 0.1 * abs_tol / K
    zeta_max = (1.0 - eta) * math.log2(1.0 + _THETA_MAX)

    def outer_scalar(zeta: float) -> float:
        x1 = _LN2 * max(tau_n - zeta, 0.0) / eta
        if x1 > _EXP_OVERFLOW:
            return 0.0  # block 1 cannot carry its share; density is dead here
        beta = math.expm1(x1)
        gamma = math.expm1(_LN2 * zeta / (1.0 - eta))
        gdot = _LN2 / (1.0 - eta) * (gamma + 1.0)
        fvals = np.empty(K)
        dvals = np.empty(K)
        for k in range(K):
            fvals[k], dvals[k] = pair(beta, gamma, al[k])
        total = 0.0
        for l0 in range(K):
            T, e = coeffs[l0], exps[l0]
            cs = T * (1.0 + fvals)
            ds = T * (gdot * dvals)
            sig = sigma2 / pw[l0]
            c_noise = (beta + gamma) * sig
            d_noise = gdot * sig
            half_al = 0.5 * al[l0]
            u_scale = 1.0 / cs[l0]

            def g(u: np.ndarray) -> np.ndarray:
                p = u[:, None] ** e[None, :]
                expo = -(p @ cs)
                bracket = p @ ds
                if sig > 0.0:
                    un = u**half_al
                    expo -= c_noise * un
                    bracket += d_noise * un
                return np.exp(expo) * bracket

            res = _named(
                f"serving-distance integral (tier {l0 + 1})",
                integrate_semi_infinite,
                g, 0.0, abs_tol=inner_tol / (math.pi * lam[l0]), scale=u_scale,
            )
            total += math.pi * lam[l0] * res.value
        return total

    tail = outer_scalar(zeta_max)
    if tail > _TAIL_BOUND:
        raise QuadratureError(
            f"outer rate integrand has not decayed at its cutoff "
            f"(value {tail:.3e})", float("nan"), tail,
        )

    def outer(zs: np.ndarray) -> np.ndarray:
        return np.array([outer_scalar(z) for z in zs])

    kinks = [tau_n * (1.0 - eta), tau_n]  # beta=gamma crossing, beta kink
    res = _named("outer rate integral", integrate, outer, 0.0, zeta_max,
                 abs_tol=abs_tol, breakpoints=[x for x in kinks if 0.0 < x < zeta_max])
    return res.value


def _coherent_pc(scenario: Scenario, total_hz: float, tau: float, abs_tol: float) -> float:
    """Single-block coverage: all resources share one fading realization."""
    lam, pw, al = _arrays(scenario)
    K = scenario.num_tiers
    coeffs, exps = _serving_geometry(scenario)
    x = _LN2 * tau / total_hz
    if x > _EXP_OVERFLOW:
        return 0.0
    theta = math.expm1(x)
    sigma2 = scenario.noise_power
    psis = np.array([psi(theta, a) for a in al])
    inner_tol = 0.5 * abs_tol / K
    total = 0.0
    for l0 in range(K):
        T, e = coeffs[l0], exps[l0]
        cs = T * (1.0 + psis)
        sig = theta * sigma2 / pw[l0]
        half_al = 0.5 * al[l0]
        u_scale = 1.0 / cs[l0]

        def g(u: np.ndarray) -> np.ndarray:
            expo = -(u[:, None] ** e[None, :]) @ cs
            if sig > 0.0:
                expo -= sig * u**half_al
            return np.exp(expo)

        res = _named(
            f"single-block distance integral (tier {l0 + 1})",
            integrate_semi_infinite,
            g, 0.0, abs_tol=inner_tol / (math.pi * lam[l0]), scale=u_scale,
        )
        total += math.pi * lam[l0] * res.value
    return total


def _equal_alpha_no_noise_pc(alpha: float, eta: float, tau_n: float, abs_tol: float) -> float:
    """Interference-limited equal-exponent reduction to a single integral.

    With zero noise and a common path-loss exponent the distance integral
    collapses and P_c = int_0^inf gamma'(z) * dF/db(beta, gamma, alpha)
    / (1 + F(beta, gamma, alpha))^2 dz in normalized units.
    """
    zeta_max = (1.0 - eta) * math.log2(1.0 + _THETA_MAX)

    def outer_scalar(zeta: float) -> float:
        x1 = _LN2 * max(tau_n - zeta, 0.0) / eta
        if x1 > _EXP_OVERFLOW:
            return 0.0
        beta = math.expm1(x1)
        gamma = math.expm1(_LN2 * zeta / (1.0 - eta))
        gdot = _LN2 / (1.0 - eta) * (gamma + 1.0)
        fv = f_correlated(beta, gamma, alpha)
        dv = _df_db(beta, gamma, alpha)
        return gdot * dv / (1.0 + fv) ** 2

    def outer(zs: np.ndarray) -> np.ndarray:
        return np.array([outer_scalar(z) for z in zs])

    kinks = [tau_n * (1.0 - eta), tau_n]
    res = _named("equal-exponent rate integral", integrate, outer, 0.0, zeta_max,
                 abs_tol=abs_tol, breakpoints=[x for x in kinks if 0.0 < x < zeta_max])
    return res.value


def _validate_method(scenario: Scenario, split: ResourceSplit, method: CoverageMethod) -> None:
    if method is CoverageMethod.COHERENT and not split.is_coherent:
        raise MethodError("coherent method requires a degenerate split (n1 or n2 zero)")
    if method is CoverageMethod.NO_NOISE_EQUAL_ALPHA:
        if scenario.noise_power != 0.0:
            raise MethodError("equal-alpha reduction requires zero noise power")
        alphas = {t.path_loss_exp for t in scenario.tiers}
        if len(alphas) != 1:
            raise MethodError("equal-alpha reduction requires a common path-loss exponent")
        if split.is_coherent:
            raise MethodError("equal-alpha reduction requires a two-block split")


def rate_coverage(
    scenario: Scenario,
    split: ResourceSplit,
    tau: float,
    method: CoverageMethod = CoverageMethod.EXACT,
    abs_tol: float = _COVERAGE_TOL,
) -> float:
    """P(R >= tau) for the typical user, in [0, 1] and non-increasing in tau.

    EXACT and INDEPENDENT delegate degenerate splits to the single-block
    evaluation (a one-block partition is the coherent model, where the two
    interference models coincide); COHERENT accepts only degenerate splits.
    """
    if tau < 0.0:
        raise ValueError(f"rate threshold must be >= 0, got {tau}")
    _validate_method(scenario, split, method)
    if tau == 0.0:
        return 1.0  # rates are nonnegative

    if method is CoverageMethod.COHERENT or split.is_coherent:
        val = _coherent_pc(scenario, split.total, tau, abs_tol)
    elif method is CoverageMethod.NO_NOISE_EQUAL_ALPHA:
        alpha = scenario.tiers[0].path_loss_exp
        val = _equal_alpha_no_noise_pc(alpha, split.eta, tau / split.total, abs_tol)
    else:
        correlated = method is CoverageMethod.EXACT
        val = _two_block_pc(scenario, split.eta, tau / split.total, correlated, abs_tol)
    return min(1.0, max(0.0, val))


def coverage_curve(
    scenario: Scenario,
    split: ResourceSplit,
    tau_grid: Sequence[float],
    methods: Iterable[CoverageMethod] = (CoverageMethod.EXACT,),
) -> CoverageCurve:
    """Coverage columns over an ascending rate grid, one per method.

    The coherent column is evaluated on a degenerate split of the same
    total bandwidth.
    """
    grid = [float(t) for t in tau_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("tau_grid must be strictly ascending")
    columns: dict[str, tuple[float, ...]] = {}
    for method in methods:
        msplit = split_from_eta(split.total, 0.0) if method is CoverageMethod.COHERENT else split
        vals = [rate_coverage(scenario, msplit, t, method) for t in grid]
        columns[method.value] = tuple(vals)
    return CoverageCurve(tuple(grid), columns)


def rate_at_coverage(
    scenario: Scenario,
    split: ResourceSplit,
    pc_target: float,
    method: CoverageMethod = CoverageMethod.EXACT,
    rate_rel_tol: float = 1e-5,
) -> float:
    """Rate threshold tau at which coverage equals pc_target.

    Inverts the non-increasing tau -> P_c map by bisection after growing the
    bracket geometrically from [0, total bandwidth].
    """
    if not 0.0 < pc_target < 1.0:
        raise UnreachableTargetError(f"coverage target must lie in (0, 1), got {pc_target}")

    def short(tau: float) -> float:
        return rate_coverage(scenario, split, tau, method) - pc_target

    n = split.total
    lo, hi = 0.0, n
    while short(hi) > 0.0:
        lo = hi
        hi *= 2.0
        if hi > n * _BRACKET_GROWTH_LIMIT:
            raise UnreachableTargetError(
                f"coverage never drops to {pc_target} within the search range"
            )
    return find_root_decreasing(short, lo, hi, tol=rate_rel_tol * n)


def gain_vs_coherent(scenario: Scenario, eta: float, pc_target: float) -> float:
    """Relative rate gain of a two-block split over the single-block baseline
    at equal coverage: (tau(eta) - tau(0)) / tau(0).

    Bandwidth-free: relative gains depend only on eta and the target.
    """
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie strictly inside (0, 1), got {eta}")
    tau_eta = rate_at_coverage(scenario, split_from_eta(1.0, eta), pc_target,
                               CoverageMethod.EXACT)
    tau_0 = rate_at_coverage(scenario, split_from_eta(1.0, 0.0), pc_target,
                             CoverageMethod.COHERENT)
    return (tau_eta - tau_0) / tau_0


def deviation_ignoring_correlation(scenario: Scenario, eta: float, pc_target: float) -> float:
    """Relative rate overestimate caused by treating the two blocks'
    interference as independent: (tau_indep - tau_exact) / tau_exact.

    Zero exactly for degenerate splits, where the models coincide.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    split = split_from_eta(1.0, eta)
    tau_exact = rate_at_coverage(scenario, split, pc_target, CoverageMethod.EXACT)
    tau_indep = rate_at_coverage(scenario, split, pc_target, CoverageMethod.INDEPENDENT)
    return (tau_indep - tau_exact) / tau_exact
