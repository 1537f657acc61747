"""Runtime invariant battery behind the ``validate`` subcommand.

Each check re-verifies, on the configured scenario, a property the engine
is supposed to guarantee by construction: pathwise couplings, composition
identities, solver invariants, and the ordering of bounds against the
Monte Carlo oracle.  Checks are deterministic given the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .contracts import premium_decomposition_mc
from .expansion import chain_mass_upper_bound, simplex_chain_mass
from .kernels import mean_intensity_bound
from .oracle import mc_premium
from .pricing import (lower_bound_poisson, lower_bound_simple,
                      premium_expansion, upper_bound)
from .rng import RngStream
from .shifted import (dominating_params, history_baseline, simulate_shifted)
from .simulate import (TAG_ENFORCED, intensity_at, simulate_generalized,
                       simulate_poisson_base, simulate_standard)
from .volterra import solve_volterra


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def _kernel_invariants(config: RunConfig) -> CheckResult:
    kernel = config.params.kernel
    horizon = config.params.horizon
    grid = np.linspace(0.0, horizon, 10_001)
    vals = kernel.eval(grid)
    ok = bool(np.all(vals >= 0.0)) and kernel.l1_norm() < 1.0
    if kernel.non_increasing:
        ok = ok and bool(np.all(np.diff(vals) <= 1e-12 * max(1.0, kernel.sup_value())))
    return CheckResult("kernel_invariants", ok,
                       f"l1={kernel.l1_norm():.6f} sup={kernel.sup_value():.6f}")


def _poisson_layer_subset(config: RunConfig, seed: int, n: int = 400) -> CheckResult:
    params = config.params
    bad = 0
    for i in range(n):
        stream = RngStream(seed, i)
        hawkes = simulate_standard(params, stream)
        base = simulate_poisson_base(params.mu, params.horizon, stream)
        if not np.isin(base.times, hawkes.times).all():
            bad += 1
    return CheckResult("poisson_layer_subset", bad == 0,
                       f"{bad}/{n} paths violated the inclusion")


def _shift_sandwich(config: RunConfig, seed: int, n: int = 300) -> CheckResult:
    params = config.params
    shifts = (0.3 * params.horizon, 0.6 * params.horizon)
    dom = dominating_params(params, len(shifts))
    bad = 0
    for i in range(n):
        stream = RngStream(seed, i)
        base = simulate_poisson_base(params.mu, params.horizon, stream)
        shifted = simulate_shifted(params, shifts, stream)
        dominating = simulate_standard(dom, stream)
        lo = len(shifts) + base.count
        hi = len(shifts) + dominating.count
        if not lo <= shifted.count <= hi:
            bad += 1
    return CheckResult("shift_sandwich", bad == 0,
                       f"{bad}/{n} paths violated the count sandwich")


def _shift_composition(config: RunConfig, seed: int, n: int = 100) -> CheckResult:
    params = config.params
    horizon = params.horizon
    gen = RngStream(seed, 0).generator(99)
    bad = 0
    for i in range(n):
        stream = RngStream(seed, 1000 + i)
        v = np.sort(gen.random(2)) * 0.9 * horizon + 0.05 * horizon
        v2, v1 = float(v[0]), float(v[1])
        if v2 >= v1:
            continue
        direct = simulate_shifted(params, (v2, v1), stream)
        one = simulate_shifted(params, (v1,), stream)
        prefix = one.times[one.times < v2]
        hist1 = np.concatenate([prefix, [v2]])
        fn1, sup1 = history_baseline(params, hist1, v2)
        piece1 = simulate_generalized(v2, fn1, None, 0, params, stream,
                                      baseline_sup=sup1, until=v1)
        hist2 = np.concatenate([hist1, piece1.times, [v1]])
        fn2, sup2 = history_baseline(params, hist2, v1)
        piece2 = simulate_generalized(v1, fn2, None, 0, params, stream,
                                      baseline_sup=sup2)
        composed = np.concatenate([prefix, [v2], piece1.times, [v1], piece2.times])
        if composed.size != direct.times.size or not np.array_equal(
                np.sort(composed), direct.times):
            bad += 1
    return CheckResult("shift_composition", bad == 0,
                       f"{bad}/{n} compositions diverged")


def _volterra_invariants(config: RunConfig) -> CheckResult:
    params = config.params
    step = params.horizon / 1000.0
    sol = solve_volterra(params.kernel, params.horizon, step)
    fine = solve_volterra(params.kernel, params.horizon, step / 2.0)
    ok = bool(np.all(sol.mean_factor >= 1.0 - 1e-12))
    ok = ok and bool(np.all(sol.second_factor >= sol.mean_factor ** 2 - 1e-9))
    ok = ok and bool(np.all(np.diff(sol.mean_factor) >= -1e-12))
    drift = abs(fine.lin_coeff - sol.lin_coeff) / max(1.0, abs(fine.lin_coeff))
    drift = max(drift,
                abs(fine.quad_coeff - sol.quad_coeff) / max(1.0, abs(fine.quad_coeff)))
    ok = ok and drift < 1e-5
    return CheckResult("volterra_invariants", ok, f"halving drift {drift:.2e}")


def _chain_mass_consistency(config: RunConfig, seed: int) -> CheckResult:
    kernel = config.params.kernel
    horizon = config.params.horizon
    detail = []
    ok = True
    for order in (2, 3):
        quad = simplex_chain_mass(kernel, horizon, order, method="quadrature")
        mc = simplex_chain_mass(kernel, horizon, order, method="mc",
                                samples=100_000, stream=RngStream(seed, order))
        gap = abs(quad.value - mc.value)
        tol = 3.0 * mc.stderr + 1e-12
        ok = ok and gap <= tol
        detail.append(f"n={order} gap={gap:.2e} tol={tol:.2e}")
    for order in range(1, 9):
        mass = simplex_chain_mass(kernel, horizon, order,
                                  stream=RngStream(seed, 50 + order))
        if mass.value > chain_mass_upper_bound(kernel, horizon, order) \
                + 3.0 * mass.stderr + 1e-12:
            ok = False
            detail.append(f"n={order} mass above envelope")
    return CheckResult("chain_mass_consistency", ok, "; ".join(detail))


def _intensity_floor(config: RunConfig, seed: int, n: int = 50) -> CheckResult:
    params = config.params
    grid = np.linspace(params.horizon / 10.0, params.horizon, 10)
    worst = math.inf
    for i in range(n):
        path = simulate_standard(params, RngStream(seed, i))
        for t in grid:
            worst = min(worst, intensity_at(params, path, float(t)) - params.mu)
    return CheckResult("intensity_floor", worst >= -1e-12,
                       f"min(intensity - mu) = {worst:.3e}")


def _mean_intensity_envelope(config: RunConfig, seed: int,
                             n: int = 4_000) -> CheckResult:
    params = config.params
    grid = np.linspace(params.horizon / 5.0, params.horizon, 5)
    samples = np.empty((n, grid.size))
    for i in range(n):
        path = simulate_standard(params, RngStream(seed, i))
        for j, t in enumerate(grid):
            samples[i, j] = intensity_at(params, path, float(t))
    bound = mean_intensity_bound(params)
    mean = samples.mean(axis=0)
    se = samples.std(axis=0, ddof=1) / math.sqrt(n)
    worst = float(np.max(mean + 3.0 * se - bound))
    return CheckResult("mean_intensity_envelope", worst <= 1e-9,
                       f"max(mean+3se-bound) = {worst:.3e}")


def _bound_sandwich(config: RunConfig, seed: int) -> CheckResult:
    params, model = config.params, config.model
    contract = config.require_contract()
    numerics = config.numerics
    oracle = mc_premium(contract, params, model, min(numerics.paths, 20_000),
                        seed)
    lo1 = lower_bound_simple(contract, params, model, numerics.bound_samples,
                             RngStream(seed, 1))
    lo2 = lower_bound_poisson(contract, params, model, numerics.bound_samples,
                              RngStream(seed, 2), p_max=numerics.p_max)
    up = upper_bound(contract, params, model, numerics.bound_samples,
                     RngStream(seed, 3), p_max=numerics.p_max,
                     volterra_step=numerics.volterra_step)
    slack1 = lo2.value - lo1.value + 3.0 * (lo1.stderr + lo2.stderr) + 1e-9
    slack2 = oracle.mean + 3.0 * (oracle.stderr + lo2.stderr) - lo2.value + 1e-9
    slack3 = up.value - oracle.mean + 3.0 * (oracle.stderr + up.stderr) + 1e-9
    ok = slack1 >= 0.0 and slack2 >= 0.0 and slack3 >= 0.0
    return CheckResult(
        "bound_sandwich", ok,
        f"lower_simple={lo1.value:.6f} lower_poisson={lo2.value:.6f} "
        f"oracle={oracle.mean:.6f}+-{oracle.stderr:.6f} upper={up.value:.6f}")


def _series_bracket(config: RunConfig, seed: int) -> CheckResult:
    params, model = config.params, config.model
    contract = config.require_contract()
    series = premium_expansion(contract, params, model, 3_000,
                               RngStream(seed, 7), truncation_order=2,
                               inner_claim_draws=16)
    oracle = mc_premium(contract, params, model, 20_000, seed + 1)
    gap = abs(series.total - oracle.mean)
    tol = series.remainder_bound + 3.0 * (series.stderr() + oracle.stderr)
    return CheckResult("series_bracket", gap <= tol,
                       f"|series-oracle|={gap:.6f} tol={tol:.6f}")


def _decomposition_consistency(config: RunConfig, seed: int) -> CheckResult:
    contract = config.require_contract()
    if contract.cap is None or contract.attachment is None:
        return CheckResult("decomposition_consistency", True,
                           "skipped: contract has no band")
    result = premium_decomposition_mc(contract, config.params, config.model,
                                      5_000, RngStream(seed, 11))
    gap = abs(result.band_total - result.payoff_mc)
    return CheckResult(
        "decomposition_consistency", gap <= 1e-9,
        f"band-payoff gap={gap:.2e}; as-written discrepancy={result.discrepancy:.6f}")


def run_validation(config: RunConfig, seed: int,
                   threads: int = 1) -> tuple[list[CheckResult], bool]:
    """Run every check; returns results plus the overall verdict."""
    checks = [
        _kernel_invariants(config),
        _poisson_layer_subset(config, seed),
        _shift_sandwich(config, seed),
        _shift_composition(config, seed),
        _volterra_invariants(config),
        _chain_mass_consistency(config, seed),
        _intensity_floor(config, seed),
        _mean_intensity_envelope(config, seed),
        _decomposition_consistency(config, seed),
    ]
    if config.contract is not None:
        checks.append(_bound_sandwich(config, seed))
        checks.append(_series_bracket(config, seed))
    return checks, all(c.passed for c in checks)
