"""Claim marks, discounted loss processes and stop-loss payoffs.

Each event carries a mark pair ``(eta, theta)``.  The activating loss sums
discounted ``severity(eta)`` over events; the covered loss sums discounted
``compensation(eta, theta)``.  A contract turns the activating loss into a
payoff weight ``h``; the premium is ``E[covered * h(activating)]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .kernels import HawkesParams
from .rng import CLAIMS_TAG, KeyedGenerator, RngStream
from .simulate import EventPath, simulate_standard


class ContractError(ValueError):
    """Contract lacks a property an operation requires (monotone h, bounds)."""


# ---------------------------------------------------------------------------
# severity / compensation maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdentityCapped:
    """``min(x, cap)``."""

    cap: float

    def __post_init__(self):
        if self.cap <= 0.0 or not math.isfinite(self.cap):
            raise ValueError("cap must be finite and > 0")

    def apply(self, x):
        return np.minimum(np.asarray(x, dtype=float), self.cap)

    @property
    def sup(self) -> float:
        return self.cap


@dataclass(frozen=True)
class IndicatorAbove:
    """Unit payout per mark at or above the reporting threshold."""

    threshold: float

    def __post_init__(self):
        if self.threshold < 0.0:
            raise ValueError("threshold must be >= 0")

    def apply(self, x):
        return (np.asarray(x, dtype=float) >= self.threshold).astype(float)

    @property
    def sup(self) -> float:
        return 1.0


@dataclass(frozen=True)
class AffineCapped:
    """``clip(intercept + slope * x, 0, cap)``."""

    intercept: float
    slope: float
    cap: float

    def __post_init__(self):
        if self.cap <= 0.0 or not math.isfinite(self.cap):
            raise ValueError("cap must be finite and > 0")

    def apply(self, x):
        return np.clip(self.intercept + self.slope * np.asarray(x, dtype=float),
                       0.0, self.cap)

    @property
    def sup(self) -> float:
        if self.slope > 0.0:
            return self.cap
        return min(self.cap, max(self.intercept, 0.0))


SeverityMap = Union[IdentityCapped, IndicatorAbove, AffineCapped]


def unit_map() -> AffineCapped:
    """The constant-one map: every claim costs one unit."""
    return AffineCapped(intercept=1.0, slope=0.0, cap=1.0)


@dataclass(frozen=True)
class CompensationMap:
    """A severity-family map applied to one of the two marks."""

    base: SeverityMap
    argument: str = "eta"

    def __post_init__(self):
        if self.argument not in ("eta", "theta"):
            raise ValueError("argument must be 'eta' or 'theta'")

    def apply(self, eta, theta):
        return self.base.apply(eta if self.argument == "eta" else theta)

    @property
    def sup(self) -> float:
        return self.base.sup


# ---------------------------------------------------------------------------
# mark distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeterministicMarks:
    eta: float
    theta: float

    def __post_init__(self):
        if self.eta < 0.0 or self.theta < 0.0:
            raise ValueError("marks must be >= 0")

    def sample(self, count: int, gen) -> tuple[np.ndarray, np.ndarray]:
        return (np.full(count, self.eta), np.full(count, self.theta))

    @property
    def is_deterministic(self) -> bool:
        return True


@dataclass(frozen=True)
class ExponentialMarks:
    """Independent exponentials with the given rates (means are 1/rate)."""

    rate_eta: float
    rate_theta: float

    def __post_init__(self):
        if self.rate_eta <= 0.0 or self.rate_theta <= 0.0:
            raise ValueError("rates must be > 0")

    def sample(self, count: int, gen) -> tuple[np.ndarray, np.ndarray]:
        return (gen.exponential(1.0 / self.rate_eta, count),
                gen.exponential(1.0 / self.rate_theta, count))

    @property
    def is_deterministic(self) -> bool:
        return False


@dataclass(frozen=True)
class LognormalMarks:
    """Jointly lognormal pair with correlated gaussian logs."""

    log_mean_eta: float
    log_sd_eta: float
    log_mean_theta: float
    log_sd_theta: float
    correlation: float = 0.0

    def __post_init__(self):
        if self.log_sd_eta <= 0.0 or self.log_sd_theta <= 0.0:
            raise ValueError("log standard deviations must be > 0")
        if not -1.0 <= self.correlation <= 1.0:
            raise ValueError("correlation must lie in [-1, 1]")

    def sample(self, count: int, gen) -> tuple[np.ndarray, np.ndarray]:
        z1 = gen.standard_normal(count)
        z2 = gen.standard_normal(count)
        rho = self.correlation
        w2 = rho * z1 + math.sqrt(max(0.0, 1.0 - rho * rho)) * z2
        eta = np.exp(self.log_mean_eta + self.log_sd_eta * z1)
        theta = np.exp(self.log_mean_theta + self.log_sd_theta * w2)
        return eta, theta

    @property
    def is_deterministic(self) -> bool:
        return False


MarkDistribution = Union[DeterministicMarks, ExponentialMarks, LognormalMarks]


@dataclass(frozen=True)
class ClaimModel:
    """Mark law, severity map, compensation map and discount rate."""

    marks: MarkDistribution
    severity: SeverityMap
    compensation: CompensationMap
    kappa: float = 0.0

    def __post_init__(self):
        if self.kappa < 0.0:
            raise ValueError("discount rate must be >= 0")

    def discount(self, horizon: float, times) -> np.ndarray:
        return np.exp(-self.kappa * (horizon - np.asarray(times, dtype=float)))


def sample_claims(model: ClaimModel, count: int,
                  rng: Union[RngStream, np.random.Generator]) -> tuple[np.ndarray, np.ndarray]:
    """``count`` iid mark pairs.

    Accepts either a stream (claims then come from its claim tag, disjoint
    from path randomness) or a raw generator for callers managing their own
    sub-streams.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    gen = rng.generator(CLAIMS_TAG) if isinstance(rng, RngStream) else rng
    return model.marks.sample(count, gen)


# ---------------------------------------------------------------------------
# loss processes
# ---------------------------------------------------------------------------

def _loss_sum(path: EventPath, values: np.ndarray, model: ClaimModel,
              horizon: float) -> float:
    n = path.count
    if n == 0:
        return 0.0
    if values.shape[0] < n:
        raise ValueError(f"need {n} claims, got {values.shape[0]}")
    if model.kappa == 0.0:
        return float(np.sum(values[:n]))
    return float(np.sum(model.discount(horizon, path.times) * values[:n]))


def loss_value(path: EventPath, claims, model: ClaimModel,
               horizon: float) -> float:
    """Activating loss: discounted severity summed over the path's events.

    Claims attach by event ordinal, so coupled paths sharing a stream
    consume identical mark sequences.
    """
    eta, _ = claims
    return _loss_sum(path, model.severity.apply(eta), model, horizon)


def generalized_loss_value(path: EventPath, claims, model: ClaimModel,
                           horizon: float) -> float:
    """Covered loss: discounted compensation summed over the path's events."""
    eta, theta = claims
    return _loss_sum(path, model.compensation.apply(eta, theta), model, horizon)


# ---------------------------------------------------------------------------
# contracts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Contract:
    """Payoff weight ``h`` plus retention/cap amounts where they apply.

    ``stoploss_indicator`` pays the covered loss once the activating loss
    reaches the attachment; ``identity`` weighs by the activating loss
    itself (unbounded, so series and bound operations reject it);
    ``cdf_band`` is the indicator of the attachment-cap band, used for
    decomposition terms.
    """

    payoff_kind: str
    attachment: float | None = None
    cap: float | None = None

    def __post_init__(self):
        if self.payoff_kind not in ("stoploss_indicator", "identity", "cdf_band"):
            raise ValueError(f"unknown payoff kind {self.payoff_kind!r}")
        if self.payoff_kind in ("stoploss_indicator", "cdf_band"):
            if self.attachment is None or self.attachment < 0.0:
                raise ValueError("attachment must be >= 0")
        if self.payoff_kind == "cdf_band" and self.cap is None:
            raise ValueError("cdf_band needs a cap")
        if self.attachment is not None and self.cap is not None:
            if not self.attachment < self.cap:
                raise ValueError("need attachment < cap")

    def h(self, x):
        x = np.asarray(x, dtype=float)
        if self.payoff_kind == "stoploss_indicator":
            return (x >= self.attachment).astype(float)
        if self.payoff_kind == "identity":
            return x
        return ((x >= self.attachment) & (x <= self.cap)).astype(float)

    def h_scalar(self, x: float) -> float:
        if self.payoff_kind == "stoploss_indicator":
            return 1.0 if x >= self.attachment else 0.0
        if self.payoff_kind == "identity":
            return float(x)
        return 1.0 if self.attachment <= x <= self.cap else 0.0

    @property
    def h_sup(self) -> float:
        return math.inf if self.payoff_kind == "identity" else 1.0

    @property
    def non_decreasing(self) -> bool:
        return self.payoff_kind in ("stoploss_indicator", "identity")

    def require_non_decreasing(self) -> None:
        if not self.non_decreasing:
            raise ContractError(
                f"operation needs a non-decreasing payoff, got {self.payoff_kind}")

    def require_bounded(self) -> None:
        if not math.isfinite(self.h_sup):
            raise ContractError(
                f"operation needs a bounded payoff, got {self.payoff_kind}")


def stoploss_payoff(covered: float, activating: float, attachment: float,
                    cap: float) -> float:
    """Stop-loss payout: nothing below the attachment, covered loss minus
    attachment inside the band (closed on both ends), capped beyond."""
    if not 0.0 <= attachment < cap:
        raise ValueError("need 0 <= attachment < cap")
    if activating < attachment:
        return 0.0
    if activating <= cap:
        return covered - attachment
    return cap - attachment


# ---------------------------------------------------------------------------
# premium decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecompositionResult:
    """As-written decomposition, its band-restricted variant, and the direct
    payoff estimate, all from the same paths."""

    term1: float
    term2: float
    term3: float
    total: float
    band_total: float
    payoff_mc: float
    payoff_stderr: float
    discrepancy: float
    n_paths: int


def premium_decomposition_mc(contract: Contract, params: HawkesParams,
                             model: ClaimModel, n_paths: int,
                             stream: RngStream) -> DecompositionResult:
    """Monte Carlo of the three decomposition terms of the stop-loss premium.

    ``total = term1 - term2 + term3`` with the first term taken over the
    whole region above the attachment, as written; the band-restricted
    variant replaces it with the band expectation and reproduces the payoff
    expectation exactly on the same paths.  The gap between the two is
    reported as ``discrepancy``.
    """
    if contract.attachment is None or contract.cap is None:
        raise ContractError("decomposition needs both attachment and cap")
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    lower = contract.attachment
    upper = contract.cap
    horizon = params.horizon
    claims_scratch = KeyedGenerator()

    sums = np.zeros(5)  # K*1{L>lo}, 1{lo<=L<=hi}, 1{L>=hi}, K*1{lo<=L<=hi}, payoff
    payoff_sq = 0.0
    for i in range(n_paths):
        sub = stream.child(i)
        path = simulate_standard(params, sub)
        claims = model.marks.sample(path.count, claims_scratch.reset(sub, CLAIMS_TAG))
        activating = loss_value(path, claims, model, horizon)
        covered = generalized_loss_value(path, claims, model, horizon)
        in_band = lower <= activating <= upper
        pay = stoploss_payoff(covered, activating, lower, upper)
        sums += (covered * (activating > lower), in_band,
                 activating >= upper, covered * in_band, pay)
        payoff_sq += pay * pay

    term1 = sums[0] / n_paths
    term2 = lower * sums[1] / n_paths
    term3 = (upper - lower) * sums[2] / n_paths
    band_term1 = sums[3] / n_paths
    payoff_mc = sums[4] / n_paths
    var = max(0.0, payoff_sq / n_paths - payoff_mc ** 2)
    stderr = math.sqrt(var / n_paths)
    total = term1 - term2 + term3
    band_total = band_term1 - term2 + term3
    return DecompositionResult(term1, term2, term3, total, band_total,
                               payoff_mc, stderr, abs(total - payoff_mc),
                               n_paths)
