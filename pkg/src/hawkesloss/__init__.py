"""Self-exciting loss processes: exact simulation, premium series, bounds.

The package simulates claim-arrival paths whose intensity feeds back on
past events, prices stop-loss style contracts through an enforced-jump
series with rigorous truncation remainders, computes lower and upper
premium bounds, and cross-checks everything against a brute-force Monte
Carlo oracle.
"""

from .contracts import (AffineCapped, ClaimModel, CompensationMap, Contract,
                        ContractError, DeterministicMarks, ExponentialMarks,
                        IdentityCapped, IndicatorAbove, LognormalMarks,
                        generalized_loss_value, loss_value,
                        premium_decomposition_mc, sample_claims,
                        stoploss_payoff, unit_map)
from .expansion import (ChainMass, PathFunctionalSpec, SeriesEstimate,
                        SeriesTerm, chain_mass_upper_bound, expansion_estimate,
                        sample_simplex, sample_simplex_batch,
                        series_remainder_bound, simplex_chain_mass)
from .kernels import (ConstantKernel, ExponentialKernel, HawkesParams,
                      Kernel, StabilityError, TableKernel,
                      mean_intensity_bound, zero_kernel)
from .oracle import OracleEstimate, TailEstimate, mc_premium, mc_tail
from .pricing import (BoundResult, DeductibleSurplus, PremiumBounds,
                      deductible_surplus_lower_bound, lower_bound_poisson,
                      lower_bound_simple, poisson_surplus, premium_expansion,
                      upper_bound)
from .rng import RngStream
from .shifted import ShiftSpec, dominating_params, history_baseline, simulate_shifted
from .simulate import (EventPath, TAG_ENFORCED, TAG_EXCITED, TAG_SPONTANEOUS,
                       intensity_at, simulate_generalized,
                       simulate_poisson_base, simulate_standard,
                       write_paths_csv)
from .volterra import (VolterraSolution, moment_constants, solve_mean_factor,
                       solve_second_factor, solve_volterra)

__version__ = "0.1.0"

__all__ = [
    "AffineCapped", "BoundResult", "ChainMass", "ClaimModel",
    "CompensationMap", "ConstantKernel", "Contract", "ContractError",
    "DeductibleSurplus", "DeterministicMarks", "EventPath",
    "ExponentialKernel", "ExponentialMarks", "HawkesParams", "IdentityCapped",
    "IndicatorAbove", "Kernel", "LognormalMarks", "OracleEstimate",
    "PathFunctionalSpec", "PremiumBounds", "RngStream", "SeriesEstimate",
    "SeriesTerm", "ShiftSpec", "StabilityError", "TableKernel",
    "TailEstimate", "VolterraSolution", "TAG_ENFORCED", "TAG_EXCITED",
    "TAG_SPONTANEOUS", "chain_mass_upper_bound",
    "deductible_surplus_lower_bound", "dominating_params",
    "expansion_estimate", "generalized_loss_value", "history_baseline",
    "intensity_at", "loss_value", "lower_bound_poisson", "lower_bound_simple",
    "mc_premium", "mc_tail", "mean_intensity_bound", "moment_constants",
    "poisson_surplus", "premium_decomposition_mc", "premium_expansion",
    "sample_claims", "sample_simplex", "sample_simplex_batch",
    "series_remainder_bound", "simplex_chain_mass", "simulate_generalized",
    "simulate_poisson_base", "simulate_shifted", "simulate_standard",
    "solve_mean_factor", "solve_second_factor", "solve_volterra",
    "stoploss_payoff", "unit_map", "upper_bound", "write_paths_csv",
    "zero_kernel",
]
