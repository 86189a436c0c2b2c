"""Adaptive 1-D quadrature and bracketing root finding.

Gauss-Kronrod (G10, K21) panels refined through an error-priority queue.
Integrands must accept a 1-D numpy array of abscissae and return an array
of the same shape; each panel costs a single integrand call.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "BracketError",
    "QuadratureError",
    "QuadResult",
    "find_root_decreasing",
    "integrate",
    "integrate_semi_infinite",
]


class QuadratureError(RuntimeError):
    """Evaluation budget exhausted before the tolerance was met.

    Carries the best available estimate so callers can decide whether the
    achieved accuracy is still usable.
    """

    def __init__(self, message: str, estimate: float, error_estimate: float):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate


class BracketError(ValueError):
    """Root-finding bracket does not satisfy the required sign condition."""


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    evaluations: int


# 21-point Kronrod abscissae/weights with embedded 10-point Gauss rule
# (QUADPACK dqk21 constants, positive half).
_XGK_HALF = (
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
)
_WGK_HALF = (
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
)
_WG_HALF = (
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
)

_XGK = np.array([-x for x in _XGK_HALF] + [x for x in reversed(_XGK_HALF[:-1])])
_WGK = np.array(list(_WGK_HALF) + list(reversed(_WGK_HALF[:-1])))
# Gauss nodes sit at the odd Kronrod positions.
_GAUSS_IDX = np.arange(1, 21, 2)
_WG = np.array(list(_WG_HALF) + list(reversed(_WG_HALF)))

_EPS = np.finfo(float).eps


def _panel(f, a: float, b: float):
    """Evaluate one GK21 panel; returns (value, error_estimate)."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fv = np.asarray(f(c + h * _XGK), dtype=float)
    if fv.shape != (21,):
        raise TypeError("integrand must map a length-n array to a length-n array")
    if not np.all(np.isfinite(fv)):
        bad = c + h * _XGK[~np.isfinite(fv)]
        raise ValueError(f"integrand returned non-finite values near {bad[0]}")
    resk = h * float(_WGK @ fv)
    resg = h * float(_WG @ fv[_GAUSS_IDX])
    resabs = abs(h) * float(_WGK @ np.abs(fv))
    mean = resk / (b - a)
    resasc = abs(h) * float(_WGK @ np.abs(fv - mean))
    err = abs(resk - resg)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    err = max(err, 50.0 * _EPS * resabs)
    return resk, err


def _initial_edges(lo: float, hi: float, breakpoints: Sequence[float]) -> list[float]:
    inner = sorted({float(b) for b in breakpoints if lo < b < hi})
    return [lo] + inner + [hi]


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    abs_tol: float,
    breakpoints: Sequence[float] = (),
    rel_tol: float = 0.0,
    max_evals: int = 1_000_000,
) -> QuadResult:
    """Integrate f over [lo, hi] to |error| <= max(abs_tol, rel_tol*|I|).

    breakpoints mark kink locations (not poles); they become initial panel
    edges so the adaptive refinement never straddles them.  Raises
    QuadratureError (carrying the best estimate) if the evaluation budget
    runs out first.
    """
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValueError(f"invalid interval [{lo}, {hi}]")
    if abs_tol <= 0.0 and rel_tol <= 0.0:
        raise ValueError("at least one of abs_tol, rel_tol must be positive")

    edges = _initial_edges(lo, hi, breakpoints)
    # heap entries: (-err, insertion counter, a, b, value, err); the counter
    # makes ordering deterministic when error estimates tie
    heap: list[tuple[float, int, float, float, float, float]] = []
    frozen: list[tuple[float, float, float]] = []  # unsplittable: (a, value, err)
    counter = 0
    evals = 0
    val_sum = 0.0  # running sums steer refinement; the returned result is
    err_sum = 0.0  # re-summed in a fixed (left-edge) order below
    for a, b in zip(edges[:-1], edges[1:]):
        val, err = _panel(f, a, b)
        evals += 21
        heapq.heappush(heap, (-err, counter, a, b, val, err))
        counter += 1
        val_sum += val
        err_sum += err

    def exact_totals():
        panels = sorted(
            [(a, val, err) for (_, _, a, _, val, err) in heap] + frozen
        )
        value = math.fsum(v for _, v, _ in panels)
        error = math.fsum(e for _, _, e in panels)
        return value, error

    while True:
        if err_sum <= max(abs_tol, rel_tol * abs(val_sum)):
            value, error = exact_totals()
            if error <= max(abs_tol, rel_tol * abs(value)):
                return QuadResult(value, error, evals)
            val_sum, err_sum = value, error  # running sums had drifted; go on
            continue
        if not heap:
            value, error = exact_totals()
            raise QuadratureError(
                f"quadrature stalled at error {error:.3e} (target {abs_tol:.3e})",
                value,
                error,
            )
        if evals + 42 > max_evals:
            value, error = exact_totals()
            raise QuadratureError(
                f"quadrature budget of {max_evals} evaluations exhausted at "
                f"error {error:.3e} (target {abs_tol:.3e})",
                value,
                error,
            )
        _, _, a, b, val, err = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            # interval at floating-point resolution; keep as-is
            frozen.append((a, val, err))
            continue
        val_sum -= val
        err_sum -= err
        for aa, bb in ((a, mid), (mid, b)):
            v, e = _panel(f, aa, bb)
            evals += 21
            heapq.heappush(heap, (-e, counter, aa, bb, v, e))
            counter += 1
            val_sum += v
            err_sum += e


def integrate_semi_infinite(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    abs_tol: float,
    breakpoints: Sequence[float] = (),
    rel_tol: float = 0.0,
    scale: float = 1.0,
    max_evals: int = 1_000_000,
) -> QuadResult:
    """Integrate f over [lo, inf) via the map u = lo + scale*s/(1-s).

    The integrand must decay at least as fast as u^-2 (the mapped integrand
    is then bounded at s = 1; slower tails turn into an endpoint singularity
    whose error estimate cannot be trusted).  scale sets the abscissa at
    which half the unit interval is spent (s = 1/2 maps to lo + scale); pass
    the decay length of f when it is far from 1.
    """
    if scale <= 0.0 or not math.isfinite(scale):
        raise ValueError("scale must be positive and finite")

    def g(s: np.ndarray) -> np.ndarray:
        # nodes rounding onto s = 1 (possible after deep refinement) take the
        # limit value 0, which is exact for any integrable decaying f
        one_m = 1.0 - s
        interior = one_m > 0.0
        u = lo + scale * np.where(interior, s, 0.0) / np.where(interior, one_m, 1.0)
        vals = np.asarray(f(u), dtype=float) * (scale / np.where(interior, one_m, 1.0) ** 2)
        return np.where(interior, vals, 0.0)

    mapped = [(b - lo) / ((b - lo) + scale) for b in breakpoints if b > lo]
    return integrate(g, 0.0, 1.0, abs_tol, mapped, rel_tol, max_evals)


def find_root_decreasing(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float,
) -> float:
    """Bisection root of a non-increasing f with f(lo) >= 0 >= f(hi).

    Returns the bracket midpoint once the bracket width is <= tol.
    """
    if not (lo < hi):
        raise ValueError(f"invalid bracket [{lo}, {hi}]")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    flo = f(lo)
    fhi = f(hi)
    if flo < 0.0 or fhi > 0.0:
        raise BracketError(
            f"need f(lo) >= 0 >= f(hi); got f({lo}) = {flo}, f({hi}) = {fhi}"
        )
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # bracket below float resolution
            break
        if f(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
