"""Brute-force Monte Carlo ground truth for premiums and tail probabilities.

Deliberately assumption-free: independent paths, fresh claims per path, no
variance-reduction tricks.  Every series value and every bound in the
package is cross-checked against this estimator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .contracts import ClaimModel, Contract, generalized_loss_value, loss_value
from .kernels import HawkesParams
from .parallel import run_chunks
from .rng import CLAIMS_TAG, KeyedGenerator, RngStream
from .simulate import simulate_standard


@dataclass(frozen=True)
class OracleEstimate:
    mean: float
    stderr: float
    n_paths: int
    seed: int

    def to_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr,
                "n_paths": self.n_paths, "seed": self.seed}


def _unit_costs(model: ClaimModel):
    """(severity, compensation) of the single deterministic mark pair."""
    eta, theta = model.marks.sample(1, None)
    return (float(model.severity.apply(eta[0])),
            float(model.compensation.apply(eta[0], theta[0])))


def _premium_chunk(payload, start: int, stop: int):
    contract, params, model, seed = payload
    horizon = params.horizon
    claims_scratch = KeyedGenerator()
    # deterministic marks without discounting: losses are count * unit cost
    per_event = (model.marks.is_deterministic and model.kappa == 0.0)
    if per_event:
        sev_unit, comp_unit = _unit_costs(model)
    acc = 0.0
    acc_sq = 0.0
    for i in range(start, stop):
        stream = RngStream(seed, i)
        path = simulate_standard(params, stream)
        if per_event:
            activating = path.count * sev_unit
            covered = path.count * comp_unit
        else:
            claims = model.marks.sample(path.count,
                                        claims_scratch.reset(stream, CLAIMS_TAG))
            activating = loss_value(path, claims, model, horizon)
            covered = generalized_loss_value(path, claims, model, horizon)
        value = covered * contract.h_scalar(activating)
        acc += value
        acc_sq += value * value
    return acc, acc_sq


def mc_premium(contract: Contract, params: HawkesParams, model: ClaimModel,
               n_paths: int, seed: int, *,
               threads: int = 1) -> OracleEstimate:
    """Plain-MC premium ``E[covered * h(activating)]`` with its standard error."""
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    payload = (contract, params, model, seed)
    parts = run_chunks(_premium_chunk, payload, n_paths, threads)
    total = sum(p[0] for p in parts)
    total_sq = sum(p[1] for p in parts)
    mean = total / n_paths
    var = max(0.0, total_sq / n_paths - mean * mean)
    return OracleEstimate(mean, math.sqrt(var / n_paths), n_paths, seed)


def _tail_chunk(payload, start: int, stop: int):
    params, model, thresholds, seed, strict = payload
    horizon = params.horizon
    claims_scratch = KeyedGenerator()
    per_event = (model.marks.is_deterministic and model.kappa == 0.0)
    if per_event:
        sev_unit, _ = _unit_costs(model)
    counts = np.zeros(len(thresholds), dtype=np.int64)
    for i in range(start, stop):
        stream = RngStream(seed, i)
        path = simulate_standard(params, stream)
        if per_event:
            activating = path.count * sev_unit
        else:
            claims = model.marks.sample(path.count,
                                        claims_scratch.reset(stream, CLAIMS_TAG))
            activating = loss_value(path, claims, model, horizon)
        for k, x in enumerate(thresholds):
            hit = activating > x if strict else activating >= x
            if hit:
                counts[k] += 1
    return counts


@dataclass(frozen=True)
class TailEstimate:
    threshold: float
    probability: float
    stderr: float


def mc_tail(params: HawkesParams, model: ClaimModel, thresholds, n_paths: int,
            seed: int, *, threads: int = 1,
            strict: bool = False) -> list[TailEstimate]:
    """Empirical tail of the activating loss, with binomial standard errors.

    ``strict=False`` estimates ``P[loss >= x]``; ``strict=True`` estimates
    ``P[loss > x]``, which differs at atoms (notably at zero, where the
    non-strict tail is identically one).
    """
    thresholds = [float(x) for x in thresholds]
    if any(b < a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be sorted ascending")
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    payload = (params, model, thresholds, seed, strict)
    parts = run_chunks(_tail_chunk, payload, n_paths, threads)
    counts = np.sum(parts, axis=0)
    out = []
    for x, c in zip(thresholds, counts):
        p = c / n_paths
        out.append(TailEstimate(x, p, math.sqrt(p * (1.0 - p) / n_paths)))
    return out
