"""Rate coverage of K-tier downlink cellular networks under two-block
frequency diversity, with spatially correlated interference, plus a Poisson
point process Monte Carlo validator."""

__version__ = "0.1.0"

from .analytic import (
    CoverageMethod,
    association_probability,
    coverage_curve,
    deviation_ignoring_correlation,
    distance_pdf,
    gain_vs_coherent,
    rate_at_coverage,
    rate_coverage,
)
from .model import (
    CoverageCurve,
    ResourceSplit,
    Scenario,
    TierParams,
    ValidationError,
    load_scenario,
    save_scenario,
    split_from_eta,
)
from .montecarlo import (
    McEstimate,
    NetworkRealization,
    associate,
    estimate_rate_coverage,
    realize_rate,
    sample_network,
    simulate_rates,
)
from .specfun import (
    BlockThresholds,
    beta_of,
    df_dw_at_z,
    f_correlated,
    f_independent,
    gamma_of,
    hyp_psi,
    psi,
    psi_dp,
)

__all__ = [
    "BlockThresholds",
    "CoverageCurve",
    "CoverageMethod",
    "McEstimate",
    "NetworkRealization",
    "ResourceSplit",
    "Scenario",
    "TierParams",
    "ValidationError",
    "associate",
    "association_probability",
    "beta_of",
    "coverage_curve",
    "deviation_ignoring_correlation",
    "df_dw_at_z",
    "distance_pdf",
    "estimate_rate_coverage",
    "f_correlated",
    "f_independent",
    "gain_vs_coherent",
    "gamma_of",
    "hyp_psi",
    "load_scenario",
    "psi",
    "psi_dp",
    "rate_at_coverage",
    "rate_coverage",
    "realize_rate",
    "sample_network",
    "save_scenario",
    "simulate_rates",
    "split_from_eta",
]
