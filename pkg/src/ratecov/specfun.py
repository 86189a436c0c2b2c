"""Special functions of the two-block interference model.

The building block is the path-loss tail integral

    Psi(p, q) = int_1^inf p / (p + t^(q/2)) dt,   p >= 0, q > 2,

through which a Poisson field of Rayleigh-faded interferers enters every
coverage expression.  On top of it sit the per-block SINR threshold maps
beta/gamma, the correlation functional F (joint Laplace transform of the
two blocks' interference seen from common interferer locations), its
independent-blocks counterpart, and the derivative of F needed when the
block-2 rate density is formed analytically.

Useful exact identities (obtained by integration by parts of Psi):

    p * dPsi/dp = (2/q) * (Psi(p,q) + p/(1+p))
    Psi(p, 4)   = sqrt(p) * arctan(sqrt(p))
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import hyp2f1

from .quadrature import integrate

__all__ = [
    "BlockThresholds",
    "beta_of",
    "df_dw_at_z",
    "f_correlated",
    "f_independent",
    "gamma_of",
    "hyp_psi",
    "psi",
    "psi_dp",
]

_LN2 = math.log(2.0)

# Relative |a-b| below which F and dF/db switch to their series limit.  The
# difference quotients lose ~half the significant digits per decade of
# closeness, so with Psi accurate to ~1e-12 both branches stay at or below
# ~1e-6 relative error when the switch sits at 1e-4.
_DIAG_SWITCH = 1e-4

# p below which dPsi/dp uses its small-p series instead of the identity
# (the identity divides Psi(p) ~ O(p) by p, amplifying the quadrature floor).
_SMALL_P = 1e-6


def _check_exponent(q: float) -> None:
    if not q > 2.0:
        raise ValueError(f"path-loss exponent must exceed 2, got {q}")


def psi(p: float, q: float) -> float:
    """Tail integral int_1^inf p/(p + t^(q/2)) dt.

    Strictly increasing in p, zero at p = 0, finite for q > 2.  q = 4 uses
    the arctangent closed form; other exponents integrate the exact
    transformed form

        Psi(p,q) = (4/(q-2)) * int_0^1 v*p / (1 + p*v^(2q/(q-2))) dv

    (substitute t = v^(-4/(q-2)) in the definition), whose integrand is
    smooth and bounded on [0, 1].
    """
    _check_exponent(q)
    if p < 0.0 or not math.isfinite(p):
        raise ValueError(f"threshold must be finite and >= 0, got {p}")
    if p == 0.0:
        return 0.0
    if q == 4.0:
        sq = math.sqrt(p)
        return sq * math.atan(sq)
    return _psi_quad(p, q)


def _psi_quad(p: float, q: float) -> float:
    """Quadrature evaluation of Psi on the transformed unit interval."""
    m2 = 2.0 * q / (q - 2.0)

    def integrand(v: np.ndarray) -> np.ndarray:
        return v * p / (1.0 + p * v**m2)

    # for large p the integrand transitions sharply near v* = p^(-1/m2)
    hints = []
    vstar = p ** (-1.0 / m2)
    if vstar < 0.5:
        hints.append(vstar)
    res = integrate(integrand, 0.0, 1.0, abs_tol=1e-14, breakpoints=hints, rel_tol=1e-12)
    return 4.0 / (q - 2.0) * res.value


def psi_dp(p: float, q: float) -> float:
    """dPsi/dp = int_1^inf t^(q/2)/(p + t^(q/2))^2 dt, nonnegative.

    Evaluated through the integration-by-parts identity
    p*Psi'(p) = (2/q)(Psi(p) + p/(1+p)); near p = 0 through the series
    Psi'(p) = 2/(q-2) - 2p/(q-1) + O(p^2).
    """
    _check_exponent(q)
    if p < 0.0 or not math.isfinite(p):
        raise ValueError(f"threshold must be finite and >= 0, got {p}")
    if p < _SMALL_P:
        return 2.0 / (q - 2.0) - 2.0 * p / (q - 1.0)
    return (2.0 / q) * (psi(p, q) + p / (1.0 + p)) / p


def _psi_dp2(p: float, q: float) -> float:
    """d^2 Psi/dp^2 = -2 int_1^inf t^(q/2)/(p + t^(q/2))^3 dt (negative)."""
    if p < _SMALL_P:
        return -2.0 / (q - 1.0) + 12.0 * p / (3.0 * q - 2.0)
    return ((2.0 / q - 1.0) * psi_dp(p, q) + (2.0 / q) / (1.0 + p) ** 2) / p


def hyp_psi(p: float, q: float) -> float:
    """Psi through its Gauss hypergeometric representation.

    2*pi*p^(2/q)*csc(2*pi/q)/q - 2F1(1, 2/q; 1 + 2/q; -1/p).  Cross-check
    path only; the integral form in psi() is the reference evaluation.
    """
    _check_exponent(q)
    if not p > 0.0:
        raise ValueError(f"hypergeometric form needs p > 0, got {p}")
    s = 2.0 / q
    return 2.0 * math.pi * p**s / (q * math.sin(2.0 * math.pi / q)) - float(
        hyp2f1(1.0, s, 1.0 + s, -1.0 / p)
    )


def beta_of(z: float, tau: float, n1: float) -> float:
    """Block-1 SINR threshold 2^((tau - z)^+ / n1) - 1."""
    if n1 <= 0.0:
        raise ValueError("block-1 bandwidth must be positive; coherent splits"
                         " belong to the single-block path")
    if z < 0.0 or tau < 0.0:
        raise ValueError("rates must be nonnegative")
    return math.expm1(_LN2 * max(tau - z, 0.0) / n1)


def gamma_of(w: float, n2: float) -> float:
    """Block-2 SINR threshold 2^(w / n2) - 1, strictly increasing in w."""
    if n2 <= 0.0:
        raise ValueError("block-2 bandwidth must be positive; coherent splits"
                         " belong to the single-block path")
    if w < 0.0:
        raise ValueError("rates must be nonnegative")
    return math.expm1(_LN2 * w / n2)


@dataclass(frozen=True)
class BlockThresholds:
    """Per-block SINR thresholds (beta for block 1, gamma for block 2)."""

    beta: float
    gamma: float

    def __post_init__(self) -> None:
        if self.beta < 0.0 or self.gamma < 0.0:
            raise ValueError("thresholds must be nonnegative")

    @classmethod
    def from_rates(cls, z: float, tau: float, split) -> "BlockThresholds":
        """Thresholds at split rate z for target rate tau on a two-block split."""
        return cls(beta_of(z, tau, split.n1), gamma_of(z, split.n2))


def _phi(x: float, c: float) -> float:
    return x * psi(x, c)


def _phi_prime(x: float, c: float) -> float:
    return psi(x, c) + x * psi_dp(x, c)


def f_correlated(a: float, b: float, c: float) -> float:
    """Correlated-interference functional (a*Psi(a,c) - b*Psi(b,c))/(a - b).

    Symmetric in (a, b) and increasing in each argument.  Near the diagonal
    the quotient is replaced by its midpoint limit Psi(m) + m*Psi'(m),
    m = (a+b)/2, which the quotient approaches with O((a-b)^2) error.
    """
    _check_exponent(c)
    if a < 0.0 or b < 0.0:
        raise ValueError("thresholds must be nonnegative")
    m = 0.5 * (a + b)
    if abs(a - b) <= _DIAG_SWITCH * max(1.0, m):
        return _phi_prime(m, c)
    return (_phi(a, c) - _phi(b, c)) / (a - b)


def f_independent(a: float, b: float, c: float) -> float:
    """Independent-blocks functional Psi(a,c) + Psi(b,c)."""
    _check_exponent(c)
    if a < 0.0 or b < 0.0:
        raise ValueError("thresholds must be nonnegative")
    return psi(a, c) + psi(b, c)


def _df_db(a: float, b: float, c: float) -> float:
    """Partial derivative of f_correlated in its second argument.

    Away from the diagonal this is the exact rearrangement

        [a*Psi(a) - (a-b)*(2/c)*b/(1+b) - (a + (2/c)(a-b))*Psi(b)] / (a-b)^2

    of the difference-quotient derivative (equivalent through the
    p*Psi'(p) identity; multiplying the singular 1/a prefactor through
    keeps the a = 0 case finite).  On the diagonal it degenerates to
    phi''(m)/2 with phi(x) = x*Psi(x).
    """
    m = 0.5 * (a + b)
    h = a - b
    if abs(h) <= _DIAG_SWITCH * max(1.0, m):
        return psi_dp(m, c) + 0.5 * m * _psi_dp2(m, c)
    s = 2.0 / c
    num = _phi(a, c) - h * s * b / (1.0 + b) - (a + s * h) * psi(b, c)
    return num / (h * h)


def df_dw_at_z(z: float, tau: float, split, c: float) -> float:
    """d/dw of f_correlated(beta(z), gamma(w), c) evaluated at w = z.

    Requires a genuine two-block split (n1 > 0 and n2 > 0).
    """
    _check_exponent(c)
    if split.n1 <= 0.0 or split.n2 <= 0.0:
        raise ValueError("derivative requires a non-degenerate two-block split")
    beta = beta_of(z, tau, split.n1)
    gamma = gamma_of(z, split.n2)
    gdot = _LN2 / split.n2 * (gamma + 1.0)
    return gdot * _df_db(beta, gamma, c)
