"""Premium series and rigorous lower/upper bounds for stop-loss contracts.

The premium ``E[covered * h(activating)]`` is expanded over enforced-jump
scenarios (see :mod:`hawkesloss.expansion`): the order-n term prices the
contract on paths carrying n extra claims at kernel-weighted times.  The
order-1 term is exactly the homogeneous-Poisson premium formula, so the
rest of the series is the surplus attributable to self-excitation.

Bounds replace the unknown jumps of the enforced-jump paths:

* the simple lower bound keeps only the enforced claims;
* the Poisson lower bound adds the baseline-Poisson layer of claims
  (a Poisson(mu*T) count at uniform times);
* the upper bound dominates the remaining jumps with the raised-baseline
  process, whose zero-count probability is explicit and whose second
  moment comes from the Volterra constants, giving the Markov weights
  ``min(c_n / p^2, 1)`` on ``p`` extra claims.

Truncations are handled so every reported number keeps its meaning: lower
bounds only drop non-negative terms (tail masses are reported), while the
upper bound *adds* computable envelopes for both its claim-count tail and
its order tail.

All order-1 weights use the time integral ``T`` (with discounting, its
discounted analogue); kernel-chain masses enter from order 2 up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .contracts import ClaimModel, Contract
from .expansion import (PathFunctionalSpec, SeriesEstimate, chain_mass_upper_bound,
                        expansion_estimate, sample_simplex_batch,
                        simplex_chain_mass)
from .kernels import HawkesParams, Kernel
from .oracle import OracleEstimate
from .rng import BOUND_CLAIMS_TAG, RngStream
from .volterra import VolterraSolution, solve_volterra

P_MAX_DEFAULT = 200
_AUTO_REL_TOL = 1e-6
_AUTO_ABS_TOL = 1e-12
_AUTO_ORDER_CAP = 30
_MASS_STREAM_SEED = 271828


def poisson_pmf(lam: float, p_max: int) -> np.ndarray:
    """Probabilities 0..p_max of a Poisson(lam) count, by stable recurrence."""
    pmf = np.empty(p_max + 1)
    pmf[0] = math.exp(-lam)
    for k in range(1, p_max + 1):
        pmf[k] = pmf[k - 1] * lam / k
    return pmf


def poisson_tail_above(lam: float, k: int) -> float:
    """``P[Poisson(lam) > k]``; equals one for negative ``k``."""
    if k < 0:
        return 1.0
    return float(max(0.0, 1.0 - poisson_pmf(lam, k).sum()))


@lru_cache(maxsize=4096)
def _cached_mass(kernel: Kernel, horizon: float, order: int):
    # deterministic internal stream keeps bound values reproducible
    return simplex_chain_mass(kernel, horizon, order,
                              stream=RngStream(_MASS_STREAM_SEED, order))


def _term_weight(kernel: Kernel, horizon: float, order: int):
    """Time-integral weight of one series order: T at order 1, chain mass after."""
    if order == 1:
        return horizon, 0.0
    mass = _cached_mass(kernel, horizon, order)
    return mass.value, mass.stderr


# ---------------------------------------------------------------------------
# premium series
# ---------------------------------------------------------------------------

def premium_expansion(contract: Contract, params: HawkesParams,
                      model: ClaimModel, samples_per_term: int,
                      stream: RngStream, *,
                      truncation_order: int | None = None,
                      inner_claim_draws: int = 64,
                      eps_target: float = 1e-4,
                      max_order: int = 12) -> SeriesEstimate:
    """Series estimate of ``E[covered * h(activating)]``.

    Each order-n sample enforces jumps at a flat-Dirichlet point, attaches
    fresh claims to the enforced jumps (the one at the latest time carries
    the compensation weight) and ordinary claims to the remaining jumps,
    and averages the weight-payoff product over ``inner_claim_draws`` mark
    draws.  Deterministic mark models collapse the inner average to one
    draw.
    """
    contract.require_bounded()
    horizon = params.horizon
    kappa = model.kappa
    severity = model.severity
    compensation = model.compensation
    h = contract.h
    inner = 1 if model.marks.is_deterministic else inner_claim_draws
    if inner < 1:
        raise ValueError("inner_claim_draws must be >= 1")

    if model.marks.is_deterministic:
        # marks are constants: the claim average collapses to scalar algebra
        eta0, theta0 = model.marks.sample(1, None)
        sev_unit = float(severity.apply(eta0[0]))
        comp_unit = float(compensation.apply(eta0[0], theta0[0]))

        def evaluate(path, shifts_asc, gen):
            if kappa:
                enforced_part = sev_unit * float(
                    np.exp(-kappa * (horizon - shifts_asc)).sum())
                other = path.random_times
                other_part = sev_unit * float(
                    np.exp(-kappa * (horizon - other)).sum()) if other.size else 0.0
                weight = comp_unit * math.exp(-kappa * (horizon - shifts_asc[-1]))
            else:
                enforced_part = sev_unit * shifts_asc.size
                other_part = sev_unit * (path.count - shifts_asc.size)
                weight = comp_unit
            payoff = contract.h_scalar(enforced_part + other_part)
            return weight * payoff, abs(weight), abs(payoff)

        spec = PathFunctionalSpec(evaluate=evaluate,
                                  weight_sup=compensation.sup,
                                  payoff_sup=contract.h_sup)
        return expansion_estimate(spec, params, samples_per_term, stream,
                                  truncation_order=truncation_order,
                                  eps_target=eps_target, max_order=max_order)

    def evaluate(path, shifts_asc, gen):
        n = shifts_asc.size
        other = path.random_times
        m = other.size
        eta_bar, theta_bar = model.marks.sample(inner * n, gen)
        eta_bar = eta_bar.reshape(inner, n)
        theta_bar = theta_bar.reshape(inner, n)
        disc_bar = np.exp(-kappa * (horizon - shifts_asc)) if kappa else 1.0
        # the enforced jump at the latest time carries the compensation weight
        weight = compensation.apply(eta_bar[:, -1], theta_bar[:, -1])
        if kappa:
            weight = weight * math.exp(-kappa * (horizon - shifts_asc[-1]))
        enforced_part = (severity.apply(eta_bar) * disc_bar).sum(axis=1)
        if m:
            eta_o, _ = model.marks.sample(inner * m, gen)
            disc_o = (np.exp(-kappa * (horizon - other)) if kappa else 1.0)
            other_part = (severity.apply(eta_o.reshape(inner, m)) * disc_o).sum(axis=1)
        else:
            other_part = 0.0
        payoff = h(enforced_part + other_part)
        zf = float(np.mean(weight * payoff))
        return zf, float(np.max(np.abs(weight))), float(np.max(np.abs(payoff)))

    spec = PathFunctionalSpec(evaluate=evaluate,
                              weight_sup=compensation.sup,
                              payoff_sup=contract.h_sup)
    return expansion_estimate(spec, params, samples_per_term, stream,
                              truncation_order=truncation_order,
                              eps_target=eps_target, max_order=max_order)


def poisson_surplus(series: SeriesEstimate) -> tuple[float, float]:
    """Split a premium series into (order-1 part, self-excitation surplus)."""
    poisson_part = sum(t.value for t in series.terms if t.order == 1)
    surplus_part = sum(t.value for t in series.terms if t.order >= 2)
    return poisson_part, surplus_part


# ---------------------------------------------------------------------------
# shared claim tables for the kappa = 0 bounds
# ---------------------------------------------------------------------------

class _ClaimTables:
    """Cumulative enforced-claim and extra-claim severities per sample.

    Column ``n-1`` of ``bar_cum`` is the severity total of ``n`` enforced
    claims; column ``p`` of ``extra_cum`` is the total of ``p`` ordinary
    claims (column 0 is zero).  ``weight`` is the compensation of the first
    enforced claim, the one the premium formula singles out.
    """

    def __init__(self, model: ClaimModel, samples: int, p_max: int,
                 gen: np.random.Generator):
        self.model = model
        self.samples = samples
        self.gen = gen
        eta, theta = model.marks.sample(samples, gen)
        self.weight = model.compensation.apply(eta, theta)
        self._bar = model.severity.apply(eta).reshape(samples, 1)
        extra_eta, _ = model.marks.sample(samples * p_max, gen)
        extras = model.severity.apply(extra_eta).reshape(samples, p_max)
        self.extra_cum = np.concatenate(
            [np.zeros((samples, 1)), np.cumsum(extras, axis=1)], axis=1)

    def bar_cum(self, order: int) -> np.ndarray:
        while self._bar.shape[1] < order:
            grow = self._bar.shape[1]
            eta, _ = self.model.marks.sample(self.samples * grow, self.gen)
            new = self.model.severity.apply(eta).reshape(self.samples, grow)
            self._bar = np.concatenate([self._bar, new], axis=1)
        return np.cumsum(self._bar[:, :order], axis=1)[:, -1]


def _stop_order(kernel: Kernel, horizon: float, mu: float, g_sup: float,
                h_sup: float, order: int, running_total: float) -> bool:
    envelope = mu * chain_mass_upper_bound(kernel, horizon, order + 1) * g_sup * h_sup
    return (envelope < max(_AUTO_REL_TOL * abs(running_total), _AUTO_ABS_TOL)
            or order >= _AUTO_ORDER_CAP)


@dataclass(frozen=True)
class BoundResult:
    """One premium bound with its MC error and truncation bookkeeping.

    ``tail_reported`` is mass a lower bound dropped (still valid without
    it); ``tail_added`` is what the upper bound added to stay above the
    dropped terms.
    """

    kind: str
    value: float
    stderr: float
    n_terms: int
    p_max: int | None = None
    tail_reported: float = 0.0
    tail_added: float = 0.0

    def to_dict(self) -> dict:
        return {"kind": self.kind, "value": self.value, "stderr": self.stderr,
                "n_terms": self.n_terms, "p_max": self.p_max,
                "tail_reported": self.tail_reported,
                "tail_added": self.tail_added}


def _check_bound_inputs(contract: Contract, samples: int) -> None:
    contract.require_non_decreasing()
    contract.require_bounded()
    if samples < 2:
        raise ValueError("samples must be >= 2")


# ---------------------------------------------------------------------------
# lower bounds
# ---------------------------------------------------------------------------

def lower_bound_simple(contract: Contract, params: HawkesParams,
                       model: ClaimModel, samples: int, stream: RngStream, *,
                       n_terms: int | None = None) -> BoundResult:
    """Keep only the enforced claims of each scenario (very conservative).

    Valid for non-decreasing payoffs: dropping jumps can only lower
    ``h``.  With no discounting the time integrals collapse to the chain
    masses and only the claim expectation is sampled.
    """
    _check_bound_inputs(contract, samples)
    if model.kappa == 0.0:
        return _lower_kappa0(contract, params, model, samples, stream,
                             n_terms=n_terms, with_poisson_layer=False,
                             p_max=0)
    return _lower_discounted(contract, params, model, samples, stream,
                             n_terms=n_terms, with_poisson_layer=False,
                             p_max=0)


def lower_bound_poisson(contract: Contract, params: HawkesParams,
                        model: ClaimModel, samples: int, stream: RngStream, *,
                        n_terms: int | None = None,
                        p_max: int = P_MAX_DEFAULT) -> BoundResult:
    """Enforced claims plus the baseline-Poisson layer of ordinary claims.

    Tighter than the simple bound (the extra claims only help a
    non-decreasing payoff) and exact in the no-excitation limit.  The
    Poisson count is truncated at ``p_max``; the dropped probability mass
    is reported, not silently ignored.
    """
    _check_bound_inputs(contract, samples)
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    if model.kappa == 0.0:
        return _lower_kappa0(contract, params, model, samples, stream,
                             n_terms=n_terms, with_poisson_layer=True,
                             p_max=p_max)
    return _lower_discounted(contract, params, model, samples, stream,
                             n_terms=n_terms, with_poisson_layer=True,
                             p_max=p_max)


def _lower_kappa0(contract, params, model, samples, stream, *, n_terms,
                  with_poisson_layer, p_max):
    kernel, horizon, mu = params.kernel, params.horizon, params.mu
    g_sup = model.compensation.sup
    h_sup = contract.h_sup
    gen = stream.generator(BOUND_CLAIMS_TAG)
    tables = _ClaimTables(model, samples, p_max if with_poisson_layer else 0, gen)

    lam = mu * horizon
    if with_poisson_layer:
        pmf = poisson_pmf(lam, p_max)
        tail_mass = float(max(0.0, 1.0 - pmf.sum()))
    else:
        pmf = np.ones(1)
        tail_mass = 0.0

    per_sample = np.zeros(samples)
    mass_var = 0.0
    order = 0
    while True:
        order += 1
        weight, weight_se = _term_weight(kernel, horizon, order)
        if weight > 0.0:
            bar = tables.bar_cum(order)
            payoff = contract.h(bar[:, None] + tables.extra_cum) @ pmf \
                if with_poisson_layer else contract.h(bar)
            term = mu * weight * tables.weight * payoff
            per_sample += term
            mass_var += (mu * weight_se * float(np.mean(tables.weight * payoff))) ** 2
        if n_terms is not None:
            if order >= n_terms:
                break
        elif _stop_order(kernel, horizon, mu, g_sup, h_sup, order,
                         float(per_sample.mean())):
            break
    value = float(per_sample.mean())
    stderr = math.sqrt(float(per_sample.var(ddof=1)) / samples + mass_var)
    return BoundResult("lower_poisson" if with_poisson_layer else "lower_simple",
                       value, stderr, order,
                       p_max if with_poisson_layer else None, tail_mass, 0.0)


def _lower_discounted(contract, params, model, samples, stream, *, n_terms,
                      with_poisson_layer, p_max):
    """General-discount form: simplex Monte Carlo per order.

    Enforced claims discount at their enforced times, the Poisson-layer
    claims at their own uniform times.
    """
    kernel, horizon, mu = params.kernel, params.horizon, params.mu
    kappa = model.kappa
    g_sup = model.compensation.sup
    h_sup = contract.h_sup
    gen = stream.generator(BOUND_CLAIMS_TAG)
    lam = mu * horizon
    if with_poisson_layer:
        pmf = poisson_pmf(lam, p_max)
        tail_mass = float(max(0.0, 1.0 - pmf.sum()))
    else:
        pmf = np.ones(1)
        tail_mass = 0.0

    per_sample = np.zeros(samples)
    order = 0
    while True:
        order += 1
        u = sample_simplex_batch(order, horizon, samples, gen)  # descending
        links = (np.prod(kernel.eval(u[:, :-1] - u[:, 1:]), axis=1)
                 if order >= 2 else np.ones(samples))
        disc_first = np.exp(-kappa * (horizon - u[:, 0]))
        eta_bar, theta_bar = model.marks.sample(samples * order, gen)
        eta_bar = eta_bar.reshape(samples, order)
        theta_bar = theta_bar.reshape(samples, order)
        g1 = model.compensation.apply(eta_bar[:, 0], theta_bar[:, 0])
        bar_sum = (model.severity.apply(eta_bar)
                   * np.exp(-kappa * (horizon - u))).sum(axis=1)
        if with_poisson_layer:
            times = gen.random((samples, p_max)) * horizon
            eta_x, _ = model.marks.sample(samples * p_max, gen)
            extras = (model.severity.apply(eta_x.reshape(samples, p_max))
                      * np.exp(-kappa * (horizon - times)))
            extra_cum = np.concatenate(
                [np.zeros((samples, 1)), np.cumsum(extras, axis=1)], axis=1)
            payoff = contract.h(bar_sum[:, None] + extra_cum) @ pmf
        else:
            payoff = contract.h(bar_sum)
        scale = mu * horizon ** order / math.factorial(order)
        per_sample += scale * links * disc_first * g1 * payoff
        if n_terms is not None:
            if order >= n_terms:
                break
        elif _stop_order(kernel, horizon, mu, g_sup, h_sup, order,
                         float(per_sample.mean())):
            break
    value = float(per_sample.mean())
    stderr = math.sqrt(float(per_sample.var(ddof=1)) / samples)
    return BoundResult("lower_poisson" if with_poisson_layer else "lower_simple",
                       value, stderr, order,
                       p_max if with_poisson_layer else None, tail_mass, 0.0)


# ---------------------------------------------------------------------------
# upper bound
# ---------------------------------------------------------------------------

def _markov_weights(c_n: float, p_max: int) -> np.ndarray:
    p = np.arange(1, p_max + 1, dtype=float)
    return np.minimum(c_n / p ** 2, 1.0)


def _markov_weight_total(c_n: float) -> float:
    """Upper bound on ``sum_p min(c_n/p^2, 1)`` over all p >= 1."""
    if c_n <= 0.0:
        return 0.0
    k = int(math.floor(math.sqrt(c_n)))
    if k < 1:
        return c_n * math.pi ** 2 / 6.0
    return k + c_n / k


def upper_bound(contract: Contract, params: HawkesParams, model: ClaimModel,
                samples: int, stream: RngStream, *,
                n_terms: int | None = None, p_max: int = P_MAX_DEFAULT,
                volterra_step: float | None = None,
                volterra: VolterraSolution | None = None) -> BoundResult:
    """Dominate every scenario's free jumps with the raised-baseline process.

    Needs a non-decreasing bounded payoff; non-monotone kernels fall back
    to the sup-based baseline raise.  Both truncation tails (claim count
    and series order) are *added* to keep the result a true upper bound.
    """
    _check_bound_inputs(contract, samples)
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    if model.kappa != 0.0:
        return upper_bound_discounted(contract, params, model, samples,
                                      stream, n_terms=n_terms, p_max=p_max,
                                      volterra_step=volterra_step)
    kernel, horizon, mu = params.kernel, params.horizon, params.mu
    g_sup = model.compensation.sup
    h_sup = contract.h_sup
    bump = kernel.eval(0.0) if kernel.non_increasing else kernel.sup_value()
    if volterra is None:
        step = volterra_step if volterra_step is not None else horizon / 2000.0
        volterra = solve_volterra(kernel, horizon, step)

    def c_of(order: int) -> float:
        return volterra.second_moment(mu + order * bump)

    gen = stream.generator(BOUND_CLAIMS_TAG)
    tables = _ClaimTables(model, samples, p_max, gen)

    per_sample = np.zeros(samples)
    tail_added = 0.0
    mass_var = 0.0
    order = 0
    while True:
        order += 1
        weight, weight_se = _term_weight(kernel, horizon, order)
        c_n = c_of(order)
        w_markov = _markov_weights(c_n, p_max)
        zero_prob = math.exp(-horizon * (mu + order * bump))
        if weight > 0.0:
            bar = tables.bar_cum(order)
            beta = (zero_prob * contract.h(bar)
                    + contract.h(bar[:, None] + tables.extra_cum[:, 1:])
                    @ w_markov) * tables.weight
            per_sample += mu * weight * beta
            mass_var += (mu * weight_se * float(np.mean(beta))) ** 2
            # claims beyond p_max, each worth at most sup(g)*sup(h)
            tail_added += mu * weight * c_n * g_sup * h_sup / p_max
        running = float(per_sample.mean()) + tail_added
        if n_terms is not None:
            if order >= n_terms:
                break
        elif _stop_order(kernel, horizon, mu, g_sup, h_sup, order, running):
            break

    # orders beyond the truncation, each bounded through the Markov weights
    order_tail = 0.0
    extra = order
    while True:
        extra += 1
        envelope = (mu * chain_mass_upper_bound(kernel, horizon, extra)
                    * g_sup * h_sup
                    * (math.exp(-horizon * (mu + extra * bump))
                       + _markov_weight_total(c_of(extra))))
        order_tail += envelope
        if envelope < _AUTO_ABS_TOL * max(1.0, float(per_sample.mean())) \
                or extra > order + 400:
            break
    tail_added += order_tail

    value = float(per_sample.mean()) + tail_added
    stderr = math.sqrt(float(per_sample.var(ddof=1)) / samples + mass_var)
    return BoundResult("upper", value, stderr, order, p_max, 0.0, tail_added)


def upper_bound_discounted(contract: Contract, params: HawkesParams,
                           model: ClaimModel, samples: int,
                           stream: RngStream, *,
                           n_terms: int | None = None,
                           p_max: int = P_MAX_DEFAULT,
                           volterra_step: float | None = None) -> BoundResult:
    """General-discount upper bound: simplex MC over enforced times.

    Enforced claims discount at their times; the dominated extra claims
    keep full weight (their times are unknown, and the discount factor is
    at most one).
    """
    _check_bound_inputs(contract, samples)
    kernel, horizon, mu = params.kernel, params.horizon, params.mu
    kappa = model.kappa
    g_sup = model.compensation.sup
    h_sup = contract.h_sup
    bump = kernel.eval(0.0) if kernel.non_increasing else kernel.sup_value()
    step = volterra_step if volterra_step is not None else horizon / 2000.0
    volterra = solve_volterra(kernel, horizon, step)

    def c_of(order: int) -> float:
        return volterra.second_moment(mu + order * bump)

    gen = stream.generator(BOUND_CLAIMS_TAG)
    extra_eta, _ = model.marks.sample(samples * p_max, gen)
    extras = model.severity.apply(extra_eta).reshape(samples, p_max)
    extra_cum = np.cumsum(extras, axis=1)

    per_sample = np.zeros(samples)
    tail_added = 0.0
    order = 0
    while True:
        order += 1
        c_n = c_of(order)
        w_markov = _markov_weights(c_n, p_max)
        zero_prob = math.exp(-horizon * (mu + order * bump))
        u = sample_simplex_batch(order, horizon, samples, gen)
        links = (np.prod(kernel.eval(u[:, :-1] - u[:, 1:]), axis=1)
                 if order >= 2 else np.ones(samples))
        disc_first = np.exp(-kappa * (horizon - u[:, 0]))
        eta_bar, theta_bar = model.marks.sample(samples * order, gen)
        eta_bar = eta_bar.reshape(samples, order)
        theta_bar = theta_bar.reshape(samples, order)
        g1 = model.compensation.apply(eta_bar[:, 0], theta_bar[:, 0])
        bar_sum = (model.severity.apply(eta_bar)
                   * np.exp(-kappa * (horizon - u))).sum(axis=1)
        beta = (zero_prob * contract.h(bar_sum)
                + contract.h(bar_sum[:, None] + extra_cum) @ w_markov) * g1
        scale = mu * horizon ** order / math.factorial(order)
        per_sample += scale * links * disc_first * beta
        tail_added += (mu * chain_mass_upper_bound(kernel, horizon, order)
                       * c_n * g_sup * h_sup / p_max)
        running = float(per_sample.mean()) + tail_added
        if n_terms is not None:
            if order >= n_terms:
                break
        elif _stop_order(kernel, horizon, mu, g_sup, h_sup, order, running):
            break

    order_tail = 0.0
    extra = order
    while True:
        extra += 1
        envelope = (mu * chain_mass_upper_bound(kernel, horizon, extra)
                    * g_sup * h_sup
                    * (math.exp(-horizon * (mu + extra * bump))
                       + _markov_weight_total(c_of(extra))))
        order_tail += envelope
        if envelope < _AUTO_ABS_TOL * max(1.0, float(per_sample.mean())) \
                or extra > order + 400:
            break
    tail_added += order_tail

    value = float(per_sample.mean()) + tail_added
    stderr = math.sqrt(float(per_sample.var(ddof=1)) / samples)
    return BoundResult("upper", value, stderr, order, p_max, 0.0, tail_added)


# ---------------------------------------------------------------------------
# deductible surplus
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeductibleSurplus:
    """Lower bound on the premium surplus over a pure-Poisson model."""

    value: float
    closed_form: float | None
    n_terms: int

    def to_dict(self) -> dict:
        return {"value": self.value, "closed_form": self.closed_form,
                "n_terms": self.n_terms}


def deductible_surplus_lower_bound(mu: float, mean_compensation: float,
                                   attachment: float, min_severity: float,
                                   kernel: Kernel, horizon: float, *,
                                   n_terms: int | None = None) -> DeductibleSurplus:
    """Surplus bound for an attachment contract with a reporting deductible.

    Setting: indicator payoff at the attachment, no discounting, every
    reported claim worth at least ``min_severity``.  Order n contributes
    once ``n`` enforced claims plus ``p`` Poisson claims clear the
    attachment, i.e. ``p + n > floor(attachment / min_severity)``.  For
    non-increasing kernels the looser closed form replaces each chain mass
    by ``Phi(T)^(n-1) T^n / n!``.
    """
    if min_severity <= 0.0:
        raise ValueError("min_severity must be > 0")
    if mu <= 0.0 or horizon <= 0.0:
        raise ValueError("rate and horizon must be > 0")
    threshold_count = math.floor(attachment / min_severity)
    lam = mu * horizon

    total = 0.0
    closed = 0.0 if kernel.non_increasing else None
    phi_horizon = kernel.eval(horizon) if kernel.non_increasing else 0.0
    order = 1
    while True:
        order += 1
        q = poisson_tail_above(lam, threshold_count - order)
        mass = _cached_mass(kernel, horizon, order).value
        total += mass * q
        if closed is not None:
            closed += (phi_horizon ** (order - 1)
                       * horizon ** order / math.factorial(order)) * q
        if n_terms is not None:
            if order >= n_terms:
                break
        elif chain_mass_upper_bound(kernel, horizon, order + 1) < max(
                1e-14 * total, 1e-300) or order >= _AUTO_ORDER_CAP + 20:
            break
    scale = mu * mean_compensation
    return DeductibleSurplus(scale * total,
                             None if closed is None else scale * closed,
                             order)


# ---------------------------------------------------------------------------
# combined report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PremiumBounds:
    lower_simple: BoundResult
    lower_poisson: BoundResult
    upper: BoundResult
    series: SeriesEstimate
    oracle: OracleEstimate
    poisson_part: float
    surplus_part: float

    def to_dict(self, config_echo: dict | None = None) -> dict:
        out = {
            "lower_simple": self.lower_simple.to_dict(),
            "lower_poisson": self.lower_poisson.to_dict(),
            "upper": self.upper.to_dict(),
            "premium_series": self.series.to_dict(),
            "oracle": self.oracle.to_dict(),
            "poisson_part": self.poisson_part,
            "surplus_part": self.surplus_part,
        }
        if config_echo is not None:
            out["config_echo"] = config_echo
        return out
