import math

import numpy as np
import pytest

from hawkesloss import (ClaimModel, CompensationMap, Contract,
                        ExponentialMarks, IdentityCapped, mc_premium, mc_tail,
                        solve_volterra, unit_map)
from hawkesloss.rng import RngStream


class TestMcPremium:
    def test_poisson_closed_form(self, unit_claims, poisson_params,
                                 attach2_contract):
        # E[count * 1{count >= 2}] = E[count] - P[count = 1] = 1 - e^{-1}
        est = mc_premium(attach2_contract, poisson_params, unit_claims,
                         200_000, seed=601)
        assert est.mean == pytest.approx(1.0 - math.exp(-1.0),
                                         abs=3 * est.stderr)

    def test_zero_payoff(self, unit_claims, poisson_params):
        contract = Contract("stoploss_indicator", attachment=1e12)
        est = mc_premium(contract, poisson_params, unit_claims, 5_000, seed=602)
        assert est.mean == 0.0 and est.stderr == 0.0

    def test_identity_weight_recovers_expected_count(self, unit_claims,
                                                     exp_params):
        # h == 1 via attachment zero: premium reduces to E[count]
        contract = Contract("stoploss_indicator", attachment=0.0)
        est = mc_premium(contract, exp_params, unit_claims, 200_000, seed=603)
        expected = solve_volterra(exp_params.kernel, 1.0, 1e-3).expected_count(1.0)
        assert est.mean == pytest.approx(expected, abs=3 * est.stderr)

    def test_stderr_scales_inverse_sqrt(self, unit_claims, poisson_params,
                                        attach2_contract):
        small = mc_premium(attach2_contract, poisson_params, unit_claims,
                           20_000, seed=604)
        large = mc_premium(attach2_contract, poisson_params, unit_claims,
                           80_000, seed=604)
        assert small.stderr / large.stderr == pytest.approx(2.0, rel=0.15)

    def test_deterministic_given_seed(self, unit_claims, poisson_params,
                                      attach2_contract):
        a = mc_premium(attach2_contract, poisson_params, unit_claims, 5_000,
                       seed=605)
        b = mc_premium(attach2_contract, poisson_params, unit_claims, 5_000,
                       seed=605)
        assert a.mean == b.mean and a.stderr == b.stderr

    def test_worker_count_does_not_change_numbers(self, unit_claims,
                                                  poisson_params,
                                                  attach2_contract):
        serial = mc_premium(attach2_contract, poisson_params, unit_claims,
                            45_000, seed=606, threads=1)
        parallel = mc_premium(attach2_contract, poisson_params, unit_claims,
                              45_000, seed=606, threads=3)
        assert serial.mean == parallel.mean
        assert serial.stderr == parallel.stderr

    def test_random_marks_path(self, exp_params, attach2_contract):
        model = ClaimModel(ExponentialMarks(1.0, 1.0), IdentityCapped(3.0),
                           CompensationMap(IdentityCapped(3.0)), 0.1)
        est = mc_premium(attach2_contract, exp_params, model, 20_000, seed=607)
        assert est.mean > 0.0 and est.stderr > 0.0


class TestMcTail:
    def test_poisson_strict_tail_at_zero(self, unit_claims, poisson_params):
        # unit severities: strictly positive loss means at least one event
        tails = mc_tail(poisson_params, unit_claims, [0.0], 200_000, seed=608,
                        strict=True)
        expected = 1.0 - math.exp(-1.0)
        assert tails[0].probability == pytest.approx(
            expected, abs=3 * tails[0].stderr)

    def test_non_strict_tail_at_zero_is_one(self, unit_claims, poisson_params):
        tails = mc_tail(poisson_params, unit_claims, [0.0], 2_000, seed=609)
        assert tails[0].probability == 1.0

    def test_infinite_threshold(self, unit_claims, poisson_params):
        tails = mc_tail(poisson_params, unit_claims, [math.inf], 2_000, seed=610)
        assert tails[0].probability == 0.0

    def test_monotone_in_threshold(self, unit_claims, exp_params):
        tails = mc_tail(exp_params, unit_claims, [0.5, 1.5, 2.5, 3.5], 50_000,
                        seed=611)
        probs = [t.probability for t in tails]
        assert all(b <= a for a, b in zip(probs, probs[1:]))

    def test_unsorted_thresholds_rejected(self, unit_claims, poisson_params):
        with pytest.raises(ValueError):
            mc_tail(poisson_params, unit_claims, [2.0, 1.0], 100, seed=612)
