import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hawkesloss import (AffineCapped, ClaimModel, CompensationMap, Contract,
                        ContractError, DeterministicMarks, EventPath,
                        ExponentialMarks, HawkesParams, IdentityCapped,
                        IndicatorAbove, LognormalMarks, generalized_loss_value,
                        loss_value, premium_decomposition_mc, sample_claims,
                        solve_volterra, stoploss_payoff, unit_map, zero_kernel)
from hawkesloss.pricing import poisson_pmf
from hawkesloss.rng import RngStream


def path_of(times, params):
    times = np.asarray(times, dtype=float)
    return EventPath(times, np.zeros(times.size, dtype=np.uint8), params)


class TestSampleClaims:
    def test_deterministic(self):
        model = ClaimModel(DeterministicMarks(1.0, 2.0), unit_map(),
                           CompensationMap(unit_map()), 0.0)
        eta, theta = sample_claims(model, 3, RngStream(501, 0))
        assert eta.tolist() == [1.0, 1.0, 1.0]
        assert theta.tolist() == [2.0, 2.0, 2.0]

    def test_exponential_mean(self):
        model = ClaimModel(ExponentialMarks(1.0, 2.0), unit_map(),
                           CompensationMap(unit_map()), 0.0)
        eta, theta = sample_claims(model, 1_000_000, RngStream(502, 0))
        assert eta.mean() == pytest.approx(1.0, abs=3e-3)
        assert theta.mean() == pytest.approx(0.5, abs=2e-3)

    def test_zero_count(self):
        model = ClaimModel(DeterministicMarks(1.0, 1.0), unit_map(),
                           CompensationMap(unit_map()), 0.0)
        eta, theta = sample_claims(model, 0, RngStream(503, 0))
        assert eta.size == 0 and theta.size == 0

    def test_disjoint_tag_from_path_randomness(self):
        stream = RngStream(504, 0)
        model = ClaimModel(ExponentialMarks(1.0, 1.0), unit_map(),
                           CompensationMap(unit_map()), 0.0)
        first = sample_claims(model, 4, stream)
        again = sample_claims(model, 4, stream)
        assert np.array_equal(first[0], again[0])

    def test_lognormal_correlation(self):
        model = ClaimModel(LognormalMarks(0.0, 0.5, 0.0, 0.5, 0.8), unit_map(),
                           CompensationMap(unit_map()), 0.0)
        eta, theta = sample_claims(model, 200_000, RngStream(505, 0))
        rho = np.corrcoef(np.log(eta), np.log(theta))[0, 1]
        assert rho == pytest.approx(0.8, abs=0.01)


class TestLossValues:
    def setup_method(self):
        self.params = HawkesParams(1.0, zero_kernel(1.0), 1.0)

    def test_empty_path(self):
        model = ClaimModel(DeterministicMarks(1.0, 1.0), unit_map(),
                           CompensationMap(unit_map()), 0.0)
        claims = (np.array([]), np.array([]))
        assert loss_value(path_of([], self.params), claims, model, 1.0) == 0.0

    def test_identity_severity(self):
        model = ClaimModel(DeterministicMarks(2.0, 1.0), IdentityCapped(10.0),
                           CompensationMap(unit_map()), 0.0)
        claims = (np.array([2.0]), np.array([1.0]))
        assert loss_value(path_of([0.5], self.params), claims, model, 1.0) == 2.0

    def test_discounting(self):
        model = ClaimModel(DeterministicMarks(1.0, 1.0), unit_map(),
                           CompensationMap(unit_map()), 1.0)
        claims = (np.array([1.0]), np.array([1.0]))
        value = loss_value(path_of([0.5], self.params), claims, model, 1.0)
        assert value == pytest.approx(math.exp(-0.5), rel=1e-12)

    def test_generalized_constant(self):
        model = ClaimModel(DeterministicMarks(1.0, 1.0), unit_map(),
                           CompensationMap(unit_map()), 0.0)
        claims = (np.ones(4), np.ones(4))
        path = path_of([0.1, 0.3, 0.6, 0.9], self.params)
        assert generalized_loss_value(path, claims, model, 1.0) == 4.0

    def test_generalized_theta_argument(self):
        model = ClaimModel(DeterministicMarks(1.0, 3.0), unit_map(),
                           CompensationMap(IdentityCapped(10.0), "theta"), 0.0)
        claims = (np.ones(2), np.full(2, 3.0))
        path = path_of([0.2, 0.8], self.params)
        assert generalized_loss_value(path, claims, model, 1.0) == 6.0

    def test_same_map_means_same_value(self):
        model = ClaimModel(ExponentialMarks(1.0, 1.0), IdentityCapped(2.0),
                           CompensationMap(IdentityCapped(2.0), "eta"), 0.3)
        claims = sample_claims(model, 5, RngStream(506, 0))
        path = path_of([0.1, 0.4, 0.5, 0.7, 0.95], self.params)
        assert generalized_loss_value(path, claims, model, 1.0) == \
            pytest.approx(loss_value(path, claims, model, 1.0), rel=1e-12)

    def test_insufficient_claims_rejected(self):
        model = ClaimModel(DeterministicMarks(1.0, 1.0), unit_map(),
                           CompensationMap(unit_map()), 0.0)
        claims = (np.ones(1), np.ones(1))
        with pytest.raises(ValueError):
            loss_value(path_of([0.2, 0.8], self.params), claims, model, 1.0)

    def test_kappa_zero_ignores_times(self):
        model = ClaimModel(ExponentialMarks(1.0, 1.0), IdentityCapped(5.0),
                           CompensationMap(unit_map()), 0.0)
        claims = sample_claims(model, 3, RngStream(507, 0))
        a = loss_value(path_of([0.1, 0.2, 0.3], self.params), claims, model, 1.0)
        b = loss_value(path_of([0.7, 0.8, 0.9], self.params), claims, model, 1.0)
        assert a == b

    @given(st.integers(0, 6), st.integers(0, 5))
    @settings(max_examples=50, deadline=None)
    def test_appending_events_never_decreases_loss(self, n_events, extra):
        model = ClaimModel(DeterministicMarks(1.0, 1.0), unit_map(),
                           CompensationMap(unit_map()), 0.0)
        times = np.linspace(0.1, 0.9, n_events + extra)
        claims = (np.ones(n_events + extra), np.ones(n_events + extra))
        small = loss_value(path_of(times[:n_events], self.params), claims,
                           model, 1.0)
        large = loss_value(path_of(times, self.params), claims, model, 1.0)
        assert large >= small


class TestSeverityMaps:
    def test_identity_capped(self):
        assert IdentityCapped(2.0).apply(np.array([1.0, 5.0])).tolist() == [1.0, 2.0]

    def test_indicator_above(self):
        out = IndicatorAbove(1.5).apply(np.array([1.0, 1.5, 2.0]))
        assert out.tolist() == [0.0, 1.0, 1.0]

    def test_affine_capped_sup(self):
        assert AffineCapped(0.5, 1.0, 2.0).sup == 2.0
        assert AffineCapped(0.5, 0.0, 2.0).sup == 0.5
        assert AffineCapped(-1.0, -2.0, 2.0).sup == 0.0

    def test_unit_map_is_constant_one(self):
        assert unit_map().apply(np.array([0.0, 7.0])).tolist() == [1.0, 1.0]


class TestStopLossPayoff:
    def test_below_attachment(self):
        assert stoploss_payoff(3.0, 3.0, 4.0, 6.0) == 0.0

    def test_middle_branch(self):
        assert stoploss_payoff(5.0, 5.0, 4.0, 6.0) == 1.0

    def test_capped_branch(self):
        assert stoploss_payoff(10.0, 10.0, 4.0, 6.0) == 2.0

    def test_boundary_pays_middle(self):
        # the band is closed on both ends
        assert stoploss_payoff(4.5, 4.0, 4.0, 6.0) == 0.5
        assert stoploss_payoff(6.5, 6.0, 4.0, 6.0) == 2.5

    def test_invalid_band(self):
        with pytest.raises(ValueError):
            stoploss_payoff(1.0, 1.0, 6.0, 4.0)


class TestContract:
    def test_band_payoff_not_monotone(self):
        contract = Contract("cdf_band", attachment=1.0, cap=2.0)
        with pytest.raises(ContractError):
            contract.require_non_decreasing()

    def test_identity_unbounded(self):
        contract = Contract("identity")
        with pytest.raises(ContractError):
            contract.require_bounded()

    def test_band_ordering_enforced(self):
        with pytest.raises(ValueError):
            Contract("stoploss_indicator", attachment=3.0, cap=2.0)

    def test_scalar_matches_vector(self):
        contract = Contract("stoploss_indicator", attachment=1.5)
        for x in (0.0, 1.5, 2.0):
            assert contract.h_scalar(x) == float(contract.h(np.array([x]))[0])


class TestDecomposition:
    def test_poisson_pmf_oracle(self, unit_claims, poisson_params):
        # unit claims on a Poisson(1) count with band [1.5, 2.5]:
        # every decomposition term has a finite pmf sum
        contract = Contract("stoploss_indicator", attachment=1.5, cap=2.5)
        result = premium_decomposition_mc(contract, poisson_params, unit_claims,
                                          400_000, RngStream(508, 0))
        pmf = poisson_pmf(1.0, 60)
        term1 = sum(k * pmf[k] for k in range(2, 61))
        term2 = 1.5 * pmf[2]
        term3 = 1.0 * (1.0 - pmf[:3].sum())
        n = result.n_paths
        assert result.term1 == pytest.approx(term1, abs=3 * 1.3 / math.sqrt(n))
        assert result.term2 == pytest.approx(term2, abs=3 * 1.5 * 0.5 / math.sqrt(n))
        assert result.term3 == pytest.approx(term3, abs=3 * 0.5 / math.sqrt(n))
        assert result.total == pytest.approx(result.term1 - result.term2
                                             + result.term3, rel=1e-12)
        # the band-restricted variant reproduces the payoff on the same paths
        assert result.band_total == pytest.approx(result.payoff_mc, abs=1e-12)
        payoff_exact = 0.5 * pmf[2] + (1.0 - pmf[:3].sum())
        assert result.payoff_mc == pytest.approx(
            payoff_exact, abs=3 * result.payoff_stderr + 1e-6)

    def test_degenerate_band_recovers_expected_covered_loss(self, unit_claims,
                                                            exp_params):
        # attachment ~ 0 and a huge cap: the total tends to E[covered loss]
        contract = Contract("stoploss_indicator", attachment=1e-9, cap=1e9)
        result = premium_decomposition_mc(contract, exp_params, unit_claims,
                                          200_000, RngStream(509, 0))
        expected = solve_volterra(exp_params.kernel, 1.0, 1e-3).expected_count(1.0)
        assert result.total == pytest.approx(expected, abs=0.02)

    def test_claims_below_reporting_threshold_pay_nothing(self, poisson_params):
        model = ClaimModel(DeterministicMarks(1.0, 1.0), IndicatorAbove(5.0),
                           CompensationMap(unit_map()), 0.0)
        contract = Contract("stoploss_indicator", attachment=1.0, cap=3.0)
        result = premium_decomposition_mc(contract, poisson_params, model,
                                          20_000, RngStream(510, 0))
        assert result.total == 0.0
        assert result.payoff_mc == 0.0

    def test_requires_band(self, unit_claims, poisson_params):
        contract = Contract("stoploss_indicator", attachment=1.0)
        with pytest.raises(ContractError):
            premium_decomposition_mc(contract, poisson_params, unit_claims, 10,
                                     RngStream(511, 0))
