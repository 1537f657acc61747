import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hawkesloss import (ConstantKernel, ExponentialKernel, HawkesParams,
                        StabilityError, TableKernel, mean_intensity_bound,
                        zero_kernel)


class TestEval:
    def test_constant_inside_support(self):
        assert ConstantKernel(0.5, 1.0).eval(0.3) == 0.5

    def test_constant_beyond_support(self):
        assert ConstantKernel(0.5, 1.0).eval(1.5) == 0.0

    def test_exponential_at_zero(self):
        assert ExponentialKernel(1.0, 2.0).eval(0.0) == 1.0

    def test_exponential_formula(self):
        assert ExponentialKernel(1.0, 2.0).eval(0.5) == pytest.approx(
            math.exp(-1.0), rel=1e-12)

    def test_negative_lag_rejected(self):
        with pytest.raises(ValueError):
            ExponentialKernel(1.0, 2.0).eval(-0.1)
        with pytest.raises(ValueError):
            ConstantKernel(0.2, 1.0).eval(np.array([0.5, -0.5]))

    def test_vectorized_matches_scalar(self):
        kernel = ExponentialKernel(0.7, 3.0)
        grid = np.linspace(0.0, 2.0, 11)
        assert np.allclose(kernel.eval(grid), [kernel.eval(float(t)) for t in grid])


class TestL1Norm:
    def test_exponential(self):
        assert ExponentialKernel(1.0, 2.0).l1_norm() == pytest.approx(0.5)

    def test_constant(self):
        assert ConstantKernel(0.5, 1.0).l1_norm() == pytest.approx(0.5)

    def test_table_triangle(self):
        # trapezoid over the exact triangle (0,0.8)-(1,0): area 0.4
        kernel = TableKernel((0.0, 1.0), (0.8, 0.0))
        assert kernel.l1_norm() == pytest.approx(0.4, rel=1e-12)

    def test_table_converges_to_exponential(self):
        # exponential sampled onto 1e4 knots: relative error <= 1e-4
        alpha, beta = 1.0, 2.0
        t_max = 15.0
        knots = np.linspace(0.0, t_max, 10_000)
        table = TableKernel(tuple(knots), tuple(alpha * np.exp(-beta * knots)),
                            declared_non_increasing=True)
        assert table.l1_norm() == pytest.approx(alpha / beta, rel=1e-4)


class TestSupValue:
    def test_exponential(self):
        assert ExponentialKernel(2.0, 4.0).sup_value() == 2.0

    def test_constant(self):
        assert ConstantKernel(0.3, 1.0).sup_value() == 0.3

    def test_table_interior_peak(self):
        kernel = TableKernel((0.0, 0.5, 1.0), (0.1, 0.6, 0.0))
        assert kernel.sup_value() == 0.6


class TestStability:
    def test_exponential_mass_at_one(self):
        with pytest.raises(StabilityError):
            ExponentialKernel(2.0, 2.0)

    def test_constant_mass_above_one(self):
        with pytest.raises(StabilityError):
            ConstantKernel(0.6, 2.0)

    def test_table_mass_above_one(self):
        with pytest.raises(StabilityError):
            TableKernel((0.0, 2.0), (1.0, 1.0))

    def test_strict_check_no_tolerance(self):
        # exactly one is already unstable
        with pytest.raises(StabilityError):
            ConstantKernel(1.0, 1.0)


class TestMonotonicityDeclaration:
    def test_increasing_knots_rejected_when_declared(self):
        with pytest.raises(ValueError):
            TableKernel((0.0, 0.5, 1.0), (0.1, 0.6, 0.0),
                        declared_non_increasing=True)

    def test_undeclared_peak_allowed(self):
        kernel = TableKernel((0.0, 0.5, 1.0), (0.1, 0.6, 0.0))
        assert not kernel.non_increasing

    def test_analytic_families_monotone(self):
        assert ExponentialKernel(1.0, 2.0).non_increasing
        assert ConstantKernel(0.5, 1.0).non_increasing


class TestMeanIntensityBound:
    def test_poisson_case(self):
        params = HawkesParams(1.0, zero_kernel(1.0), 1.0)
        assert mean_intensity_bound(params) == pytest.approx(1.0)

    def test_half_mass(self):
        params = HawkesParams(1.0, ExponentialKernel(1.0, 2.0), 1.0)
        assert mean_intensity_bound(params) == pytest.approx(2.0)

    def test_quarter_mass(self):
        params = HawkesParams(2.0, ConstantKernel(0.25, 1.0), 1.0)
        assert mean_intensity_bound(params) == pytest.approx(2.0 * (1 + 1 / 3),
                                                             rel=1e-9)


class TestHawkesParams:
    def test_rejects_nonpositive_rate(self):
        with pytest.raises(ValueError):
            HawkesParams(0.0, zero_kernel(1.0), 1.0)

    def test_rejects_nonpositive_horizon(self):
        with pytest.raises(ValueError):
            HawkesParams(1.0, zero_kernel(1.0), 0.0)


@st.composite
def kernels(draw):
    family = draw(st.sampled_from(["exponential", "constant", "table"]))
    if family == "exponential":
        amplitude = draw(st.floats(0.0, 3.0))
        decay = draw(st.floats(0.5, 8.0))
        if amplitude / decay >= 1.0:
            amplitude = 0.9 * decay
        return ExponentialKernel(amplitude, decay)
    if family == "constant":
        level = draw(st.floats(0.0, 0.9))
        support = draw(st.floats(0.1, 1.0))
        if level * support >= 1.0:
            level = 0.9 / support
        return ConstantKernel(level, support)
    values = draw(st.lists(st.floats(0.0, 0.8), min_size=2, max_size=6))
    times = np.linspace(0.0, 1.0, len(values))
    kernel = TableKernel(tuple(times), tuple(values))
    return kernel


@given(kernels(), st.floats(0.0, 5.0))
@settings(max_examples=200, deadline=None)
def test_eval_non_negative_everywhere(kernel, t):
    assert kernel.eval(t) >= 0.0


@given(kernels())
@settings(max_examples=100, deadline=None)
def test_sup_dominates_grid(kernel):
    grid = np.linspace(0.0, 3.0, 301)
    assert np.all(kernel.eval(grid) <= kernel.sup_value() + 1e-12)


@given(st.floats(0.1, 2.9), st.floats(3.0, 8.0))
@settings(max_examples=60, deadline=None)
def test_non_increasing_on_grid(amplitude, decay):
    kernel = ExponentialKernel(min(amplitude, 0.9 * decay), decay)
    grid = np.linspace(0.0, 2.0, 2001)
    vals = kernel.eval(grid)
    assert np.all(np.diff(vals) <= 1e-12)
