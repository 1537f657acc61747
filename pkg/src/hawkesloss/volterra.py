"""Linear Volterra equations of the second kind for count moments.

``mean_factor`` solves ``y(t) = 1 + int_0^t Phi(t-s) y(s) ds``: the expected
intensity at ``t`` equals ``mu * mean_factor(t)``, so the expected count on
``[0, T]`` is ``mu`` times its integral.  ``second_factor`` solves the same
equation with forcing ``mean_factor**2``; its integral enters the
second-moment identity

    E[count^2] = rate * lin_coeff + rate^2 * quad_coeff

with ``lin_coeff = int second_factor`` and ``quad_coeff =
(int mean_factor)^2``.

The scheme is trapezoidal product integration on a uniform grid: second
order, unconditionally fine for bounded kernels provided
``step < 2 / Phi(0)`` (checked).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import Kernel


def _solve_second_kind(kernel_grid: np.ndarray, forcing: np.ndarray,
                       step: float) -> np.ndarray:
    """Solve ``y = forcing + step-weighted convolution(kernel, y)`` forward."""
    n = forcing.size
    phi0 = kernel_grid[0]
    denom = 1.0 - 0.5 * step * phi0
    if denom <= 0.0:
        raise ValueError("step too large for this kernel: need step < 2/Phi(0)")
    y = np.empty(n)
    y[0] = forcing[0]
    for j in range(1, n):
        # trapezoid over [0, t_j]: half weights at both endpoints
        acc = 0.5 * kernel_grid[j] * y[0]
        if j > 1:
            acc += kernel_grid[j - 1:0:-1].dot(y[1:j])
        y[j] = (forcing[j] + step * acc) / denom
    return y


def solve_mean_factor(kernel: Kernel, horizon: float, step: float) -> np.ndarray:
    """Grid values of the mean-intensity multiplier on ``[0, horizon]``."""
    if step <= 0.0:
        raise ValueError("step must be > 0")
    grid = time_grid(horizon, step)
    kernel_grid = kernel.eval(grid)
    forcing = np.ones(grid.size)
    return _solve_second_kind(kernel_grid, forcing, grid[1] - grid[0] if grid.size > 1 else step)


def solve_second_factor(kernel: Kernel, mean_factor: np.ndarray,
                        horizon: float, step: float) -> np.ndarray:
    """Companion solve with forcing ``mean_factor**2`` on the same grid."""
    grid = time_grid(horizon, step)
    if mean_factor.shape != grid.shape:
        raise ValueError("mean_factor must live on the same grid")
    kernel_grid = kernel.eval(grid)
    return _solve_second_kind(kernel_grid, mean_factor ** 2,
                              grid[1] - grid[0] if grid.size > 1 else step)


def time_grid(horizon: float, step: float) -> np.ndarray:
    n = max(1, int(round(horizon / step)))
    return np.linspace(0.0, horizon, n + 1)


@dataclass(frozen=True)
class VolterraSolution:
    """Both factors on one grid plus the derived moment coefficients."""

    grid: np.ndarray
    mean_factor: np.ndarray
    second_factor: np.ndarray
    lin_coeff: float      # integral of second_factor
    quad_coeff: float     # squared integral of mean_factor

    @property
    def mean_integral(self) -> float:
        """E[count] equals the baseline rate times this."""
        return float(np.trapezoid(self.mean_factor, self.grid))

    def expected_count(self, rate: float) -> float:
        return rate * self.mean_integral

    def second_moment(self, rate: float) -> float:
        return rate * self.lin_coeff + rate * rate * self.quad_coeff


def solve_volterra(kernel: Kernel, horizon: float, step: float) -> VolterraSolution:
    grid = time_grid(horizon, step)
    mean_factor = solve_mean_factor(kernel, horizon, step)
    second_factor = solve_second_factor(kernel, mean_factor, horizon, step)
    lin = float(np.trapezoid(second_factor, grid))
    quad = float(np.trapezoid(mean_factor, grid)) ** 2
    return VolterraSolution(grid, mean_factor, second_factor, lin, quad)


def moment_constants(kernel: Kernel, horizon: float, step: float,
                     rate: float) -> tuple[float, float, float]:
    """``(lin_coeff, quad_coeff, second moment of the count at rate)``."""
    sol = solve_volterra(kernel, horizon, step)
    return sol.lin_coeff, sol.quad_coeff, sol.second_moment(rate)
