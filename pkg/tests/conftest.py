"""Shared fixtures: canonical scenarios used across the suite."""

import pytest

from hawkesloss import (ClaimModel, CompensationMap, ConstantKernel, Contract,
                        DeterministicMarks, ExponentialKernel, HawkesParams,
                        unit_map, zero_kernel)


@pytest.fixture
def unit_claims():
    """Every claim costs one unit, no discounting."""
    return ClaimModel(DeterministicMarks(1.0, 1.0), unit_map(),
                      CompensationMap(unit_map()), 0.0)


@pytest.fixture
def poisson_params():
    """No excitation, rate one, unit horizon."""
    return HawkesParams(1.0, zero_kernel(1.0), 1.0)


@pytest.fixture
def exp_params():
    """Exponential kernel with mass one half."""
    return HawkesParams(1.0, ExponentialKernel(1.0, 2.0), 1.0)


@pytest.fixture
def const_params():
    """Constant kernel at level one half over the whole horizon."""
    return HawkesParams(1.0, ConstantKernel(0.5, 1.0), 1.0)


@pytest.fixture
def attach2_contract():
    """Stop-loss trigger at two claims' worth of loss."""
    return Contract("stoploss_indicator", attachment=2.0)
