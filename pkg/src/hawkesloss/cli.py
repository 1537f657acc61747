"""Config-driven command line: simulate, mphi, price, bounds, validate.

All subcommands read one scenario file (TOML or JSON) and honor ``--seed``,
``--threads`` and ``--out``.  Exit codes: 0 success, 2 configuration
error (message carries the field path), 3 invariant violation from
``validate``.  Reports are byte-identical for identical config and seed,
up to the ``generated_at`` timestamp field.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .config import ConfigError, RunConfig, load_config
from .expansion import simplex_chain_mass
from .oracle import mc_premium
from .parallel import default_threads
from .pricing import (PremiumBounds, lower_bound_poisson, lower_bound_simple,
                      poisson_surplus, premium_expansion, upper_bound)
from .rng import RngStream
from .simulate import simulate_standard, write_paths_csv
from .validate import run_validation


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hawkesloss",
        description="Self-exciting loss simulation, premium series and bounds")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("simulate", "emit simulated paths as CSV"),
            ("mphi", "table of kernel-chain simplex masses"),
            ("price", "premium series, oracle and self-excitation surplus"),
            ("bounds", "lower/upper premium bounds report"),
            ("validate", "run the invariant suite (exit 3 on violation)")):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("config", help="scenario file (.toml or .json)")
        cmd.add_argument("--seed", type=int, default=0)
        cmd.add_argument("--threads", type=int, default=0,
                         help="worker processes (0: HAWKES_THREADS or cpu count)")
        cmd.add_argument("--out", type=Path, default=None,
                         help="output file (default depends on the command)")
    return parser


def _report_header(command: str, config: RunConfig, seed: int) -> dict:
    return {
        "command": command,
        "generated_at": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
        "seed": seed,
        "config_echo": config.raw,
    }


def _write_json(report: dict, out: Path) -> None:
    out.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")


def _cmd_simulate(config: RunConfig, seed: int, threads: int, out: Path) -> int:
    paths = [simulate_standard(config.params, RngStream(seed, i))
             for i in range(config.numerics.sim_paths)]
    write_paths_csv(paths, out)
    return 0


def _cmd_mphi(config: RunConfig, seed: int, threads: int, out: Path) -> int:
    kernel = config.params.kernel
    horizon = config.params.horizon
    lines = ["n,value,stderr,method"]
    for order in range(1, config.numerics.mphi_orders + 1):
        mass = simplex_chain_mass(kernel, horizon, order,
                                  samples=config.numerics.mphi_samples,
                                  stream=RngStream(seed, order))
        lines.append(f"{order},{mass.value!r},{mass.stderr!r},{mass.method}")
    out.write_text("\n".join(lines) + "\n")
    return 0


def _cmd_price(config: RunConfig, seed: int, threads: int, out: Path) -> int:
    contract = config.require_contract()
    numerics = config.numerics
    series = premium_expansion(contract, config.params, config.model,
                               numerics.samples_per_term, RngStream(seed, 0),
                               truncation_order=numerics.truncation_order,
                               inner_claim_draws=numerics.inner_claim_draws)
    oracle = mc_premium(contract, config.params, config.model, numerics.paths,
                        seed + 1, threads=threads)
    poisson_part, surplus_part = poisson_surplus(series)
    report = _report_header("price", config, seed)
    report.update({
        "premium_series": series.to_dict(),
        "oracle": oracle.to_dict(),
        "poisson_part": poisson_part,
        "surplus_part": surplus_part,
    })
    _write_json(report, out)
    return 0


def _cmd_bounds(config: RunConfig, seed: int, threads: int, out: Path) -> int:
    contract = config.require_contract()
    numerics = config.numerics
    params, model = config.params, config.model
    series = premium_expansion(contract, params, model,
                               numerics.samples_per_term, RngStream(seed, 0),
                               truncation_order=numerics.truncation_order,
                               inner_claim_draws=numerics.inner_claim_draws)
    oracle = mc_premium(contract, params, model, numerics.paths, seed + 1,
                        threads=threads)
    lower1 = lower_bound_simple(contract, params, model,
                                numerics.bound_samples, RngStream(seed, 1),
                                n_terms=numerics.n_terms)
    lower2 = lower_bound_poisson(contract, params, model,
                                 numerics.bound_samples, RngStream(seed, 2),
                                 n_terms=numerics.n_terms,
                                 p_max=numerics.p_max)
    upper = upper_bound(contract, params, model, numerics.bound_samples,
                        RngStream(seed, 3), n_terms=numerics.n_terms,
                        p_max=numerics.p_max,
                        volterra_step=numerics.volterra_step)
    poisson_part, surplus_part = poisson_surplus(series)
    bounds = PremiumBounds(lower1, lower2, upper, series, oracle,
                           poisson_part, surplus_part)
    report = _report_header("bounds", config, seed)
    report.update(bounds.to_dict())
    _write_json(report, out)
    return 0


def _cmd_validate(config: RunConfig, seed: int, threads: int, out: Path) -> int:
    checks, passed = run_validation(config, seed, threads)
    report = _report_header("validate", config, seed)
    report.update({
        "checks": [c.to_dict() for c in checks],
        "passed": passed,
    })
    _write_json(report, out)
    for check in checks:
        status = "pass" if check.passed else "FAIL"
        print(f"[{status}] {check.name}: {check.detail}")
    return 0 if passed else 3


_DEFAULT_OUT = {
    "simulate": "paths.csv",
    "mphi": "mphi.csv",
    "price": "report.json",
    "bounds": "report.json",
    "validate": "report.json",
}

_COMMANDS = {
    "simulate": _cmd_simulate,
    "mphi": _cmd_mphi,
    "price": _cmd_price,
    "bounds": _cmd_bounds,
    "validate": _cmd_validate,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except FileNotFoundError:
        print(f"config error: {args.config}: no such file", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    threads = args.threads if args.threads > 0 else default_threads()
    out = args.out if args.out is not None else Path(_DEFAULT_OUT[args.command])
    try:
        return _COMMANDS[args.command](config, args.seed, threads, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
