"""Run-configuration files: TOML (or JSON) turned into model objects.

A scenario file has blocks ``[kernel]``, ``[hawkes]``, ``[claims]`` (with
sub-blocks ``severity`` and ``compensation``), ``[contract]`` and
``[numerics]``.  Violations raise :class:`ConfigError` carrying the field
path, which the CLI maps to exit code 2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .contracts import (AffineCapped, ClaimModel, CompensationMap, Contract,
                        DeterministicMarks, ExponentialMarks, IdentityCapped,
                        IndicatorAbove, LognormalMarks, unit_map)
from .kernels import (ConstantKernel, ExponentialKernel, HawkesParams,
                      TableKernel, zero_kernel)


class ConfigError(ValueError):
    """Schema violation; ``path`` locates the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _require(block: dict, path: str, key: str):
    if key not in block:
        raise ConfigError(f"{path}.{key}", "missing required field")
    return block[key]


def _number(block: dict, path: str, key: str, default=None):
    if key not in block:
        if default is not None:
            return default
        raise ConfigError(f"{path}.{key}", "missing required field")
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}", f"expected a number, got {value!r}")
    return float(value)


def _integer(block: dict, path: str, key: str, default=None):
    if key not in block:
        if default is not None:
            return default
        raise ConfigError(f"{path}.{key}", "missing required field")
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}.{key}", f"expected an integer, got {value!r}")
    return value


def _choice(block: dict, path: str, key: str, options, default=None):
    if key not in block and default is not None:
        return default
    value = _require(block, path, key)
    if value not in options:
        raise ConfigError(f"{path}.{key}",
                          f"expected one of {sorted(options)}, got {value!r}")
    return value


def _parse_kernel(block: dict, horizon: float):
    family = _choice(block, "kernel", "family",
                     {"exponential", "constant", "table", "zero"})
    try:
        if family == "exponential":
            return ExponentialKernel(_number(block, "kernel", "amplitude"),
                                     _number(block, "kernel", "decay"))
        if family == "constant":
            return ConstantKernel(_number(block, "kernel", "level"),
                                  _number(block, "kernel", "support", horizon))
        if family == "zero":
            return zero_kernel(horizon)
        times = _require(block, "kernel", "times")
        values = _require(block, "kernel", "values")
        return TableKernel(tuple(times), tuple(values),
                           bool(block.get("non_increasing", False)))
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError("kernel", str(exc)) from exc


def _parse_severity(block: dict, path: str):
    kind = _choice(block, path, "kind",
                   {"identity_capped", "indicator_above", "affine_capped"},
                   default="affine_capped" if not block else None)
    try:
        if kind == "identity_capped":
            return IdentityCapped(_number(block, path, "cap"))
        if kind == "indicator_above":
            return IndicatorAbove(_number(block, path, "threshold"))
        return AffineCapped(_number(block, path, "intercept", 1.0),
                            _number(block, path, "slope", 0.0),
                            _number(block, path, "cap", 1.0))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_claims(block: dict):
    dist = _choice(block, "claims", "distribution",
                   {"deterministic", "exponential", "lognormal"},
                   default="deterministic")
    try:
        if dist == "deterministic":
            marks = DeterministicMarks(_number(block, "claims", "eta", 1.0),
                                       _number(block, "claims", "theta", 1.0))
        elif dist == "exponential":
            marks = ExponentialMarks(_number(block, "claims", "rate_eta"),
                                     _number(block, "claims", "rate_theta"))
        else:
            marks = LognormalMarks(
                _number(block, "claims", "log_mean_eta", 0.0),
                _number(block, "claims", "log_sd_eta"),
                _number(block, "claims", "log_mean_theta", 0.0),
                _number(block, "claims", "log_sd_theta"),
                _number(block, "claims", "correlation", 0.0))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("claims", str(exc)) from exc

    severity = (_parse_severity(block["severity"], "claims.severity")
                if "severity" in block else unit_map())
    comp_block = block.get("compensation", {})
    base = (_parse_severity(comp_block, "claims.compensation")
            if comp_block else unit_map())
    argument = _choice(comp_block, "claims.compensation", "argument",
                       {"eta", "theta"}, default="eta")
    kappa = _number(block, "claims", "kappa", 0.0)
    if kappa < 0.0:
        raise ConfigError("claims.kappa", "discount rate must be >= 0")
    return ClaimModel(marks, severity, CompensationMap(base, argument), kappa)


def _parse_contract(block: dict):
    payoff = _choice(block, "contract", "payoff",
                     {"stoploss_indicator", "identity", "cdf_band"})
    attachment = block.get("attachment")
    cap = block.get("cap")
    try:
        return Contract(payoff,
                        None if attachment is None else float(attachment),
                        None if cap is None else float(cap))
    except ValueError as exc:
        raise ConfigError("contract", str(exc)) from exc


@dataclass(frozen=True)
class Numerics:
    paths: int = 100_000
    samples_per_term: int = 20_000
    truncation_order: int | None = None
    inner_claim_draws: int = 64
    volterra_step: float | None = None
    p_max: int = 200
    n_terms: int | None = None
    bound_samples: int = 4_000
    mphi_orders: int = 6
    mphi_samples: int = 200_000
    sim_paths: int = 100


def _parse_numerics(block: dict) -> Numerics:
    def opt(key):
        v = _integer(block, "numerics", key, 0)
        return None if v == 0 else v

    numerics = Numerics(
        paths=_integer(block, "numerics", "paths", 100_000),
        samples_per_term=_integer(block, "numerics", "samples_per_term", 20_000),
        truncation_order=opt("truncation_order"),
        inner_claim_draws=_integer(block, "numerics", "inner_claim_draws", 64),
        volterra_step=(None if "volterra_step" not in block
                       else _number(block, "numerics", "volterra_step")),
        p_max=_integer(block, "numerics", "p_max", 200),
        n_terms=opt("n_terms"),
        bound_samples=_integer(block, "numerics", "bound_samples", 4_000),
        mphi_orders=_integer(block, "numerics", "mphi_orders", 6),
        mphi_samples=_integer(block, "numerics", "mphi_samples", 200_000),
        sim_paths=_integer(block, "numerics", "sim_paths", 100),
    )
    for name in ("paths", "samples_per_term", "inner_claim_draws", "p_max",
                 "bound_samples", "mphi_orders", "mphi_samples", "sim_paths"):
        if getattr(numerics, name) < 1:
            raise ConfigError(f"numerics.{name}", "must be >= 1")
    if numerics.volterra_step is not None and numerics.volterra_step <= 0.0:
        raise ConfigError("numerics.volterra_step", "must be > 0")
    return numerics


@dataclass(frozen=True)
class RunConfig:
    params: HawkesParams
    model: ClaimModel
    contract: Contract | None
    numerics: Numerics
    raw: dict

    def require_contract(self) -> Contract:
        if self.contract is None:
            raise ConfigError("contract", "block required for this command")
        return self.contract


def parse_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("", "top level must be a table/object")
    if "kernel" not in data:
        raise ConfigError("kernel", "missing required block")
    if "hawkes" not in data:
        raise ConfigError("hawkes", "missing required block")
    hawkes = data["hawkes"]
    mu = _number(hawkes, "hawkes", "mu")
    horizon = _number(hawkes, "hawkes", "horizon")
    kernel = _parse_kernel(data["kernel"], horizon)
    try:
        params = HawkesParams(mu, kernel, horizon)
    except ValueError as exc:
        raise ConfigError("hawkes", str(exc)) from exc
    model = _parse_claims(data.get("claims", {}))
    contract = _parse_contract(data["contract"]) if "contract" in data else None
    numerics = _parse_numerics(data.get("numerics", {}))
    return RunConfig(params, model, contract, numerics, data)


def load_config(path) -> RunConfig:
    path = Path(path)
    text = path.read_bytes()
    if path.suffix.lower() == ".json":
        data = json.loads(text.decode())
    else:
        try:
            data = tomllib.loads(text.decode())
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError("", f"not valid TOML: {exc}") from exc
    return parse_config(data)
