"""Excitation kernels and the core process parameters.

A kernel is the non-negative map feeding past jumps back into the intensity.
All kernels are immutable, enforce the stability condition ``l1_norm < 1``
at construction, and expose the scalar quantities every other module needs:
the L1 mass, the sup, the value at lag zero, and a monotonicity flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

_MONOTONICITY_GRID = 10_000


class StabilityError(ValueError):
    """Kernel mass at or above one: the process would not be well defined."""


def _check_lag(t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("kernel evaluated at negative lag")
    return arr


@dataclass(frozen=True)
class ExponentialKernel:
    """``amplitude * exp(-decay * t)``; mass ``amplitude / decay``."""

    amplitude: float
    decay: float

    def __post_init__(self):
        if self.amplitude < 0.0:
            raise ValueError(f"amplitude must be >= 0, got {self.amplitude}")
        if self.decay <= 0.0:
            raise ValueError(f"decay must be > 0, got {self.decay}")
        if self.l1_norm() >= 1.0:
            raise StabilityError(
                f"kernel mass {self.l1_norm()} >= 1 (amplitude/decay)")

    def eval(self, t):
        arr = _check_lag(t)
        out = self.eval_pos(arr)
        return float(out) if np.isscalar(t) else out

    def eval_pos(self, arr):
        """Unchecked evaluation on non-negative lags (hot paths)."""
        return self.amplitude * np.exp(-self.decay * arr)

    def l1_norm(self) -> float:
        return self.amplitude / self.decay

    def sup_value(self) -> float:
        return self.amplitude

    @property
    def non_increasing(self) -> bool:
        return True

    def constant_level_on(self, horizon: float):
        return 0.0 if self.amplitude == 0.0 else None


@dataclass(frozen=True)
class ConstantKernel:
    """``level`` on ``[0, support]``, zero beyond."""

    level: float
    support: float

    def __post_init__(self):
        if self.level < 0.0:
            raise ValueError(f"level must be >= 0, got {self.level}")
        if self.support <= 0.0:
            raise ValueError(f"support must be > 0, got {self.support}")
        if self.l1_norm() >= 1.0:
            raise StabilityError(
                f"kernel mass {self.l1_norm()} >= 1 (level*support)")

    def eval(self, t):
        arr = _check_lag(t)
        out = self.eval_pos(arr)
        return float(out) if np.isscalar(t) else out

    def eval_pos(self, arr):
        """Unchecked evaluation on non-negative lags (hot paths)."""
        return np.where(arr <= self.support, self.level, 0.0)

    def l1_norm(self) -> float:
        return self.level * self.support

    def sup_value(self) -> float:
        return self.level

    @property
    def non_increasing(self) -> bool:
        return True

    def constant_level_on(self, horizon: float):
        """The constant value of the kernel over ``[0, horizon]``, or None."""
        if self.level == 0.0 or self.support >= horizon:
            return self.level
        return None


@dataclass(frozen=True)
class TableKernel:
    """Linear interpolation through ``(time, rate)`` knots, zero beyond the last.

    Monotonicity is declared by the caller and verified against the knot
    values (exact for linear interpolation).
    """

    times: tuple
    values: tuple
    declared_non_increasing: bool = False

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if len(times) < 2 or len(times) != len(values):
            raise ValueError("need at least two (time, rate) knots")
        if times[0] != 0.0:
            raise ValueError("first knot must be at time 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("knot times must be strictly increasing")
        if any(v < 0.0 for v in values):
            raise ValueError("kernel values must be non-negative")
        if self.declared_non_increasing and any(
                b > a for a, b in zip(values, values[1:])):
            raise ValueError("kernel declared non-increasing but knots increase")
        if self.l1_norm() >= 1.0:
            raise StabilityError(f"kernel mass {self.l1_norm()} >= 1")

    def eval(self, t):
        arr = _check_lag(t)
        out = self.eval_pos(arr)
        return float(out) if np.isscalar(t) else out

    def eval_pos(self, arr):
        """Unchecked evaluation on non-negative lags (hot paths)."""
        out = np.interp(arr, self.times, self.values, right=0.0)
        # beyond the last knot the kernel is exactly zero
        return np.where(arr > self.times[-1], 0.0, out)

    def l1_norm(self) -> float:
        return float(np.trapezoid(self.values, self.times))

    def sup_value(self) -> float:
        return max(self.values)

    @property
    def non_increasing(self) -> bool:
        return self.declared_non_increasing

    def constant_level_on(self, horizon: float):
        if all(v == self.values[0] for v in self.values) and self.times[-1] >= horizon:
            return self.values[0]
        if self.sup_value() == 0.0:
            return 0.0
        return None


Kernel = Union[ExponentialKernel, ConstantKernel, TableKernel]


def zero_kernel(support: float = 1.0) -> ConstantKernel:
    """The no-excitation kernel: the process degenerates to a Poisson process."""
    return ConstantKernel(level=0.0, support=support)


def validate_monotonicity(kernel: Kernel, horizon: float,
                          grid_points: int = _MONOTONICITY_GRID) -> None:
    """Grid scan confirming a declared-non-increasing kernel really decreases.

    Exponential and constant kernels are monotone analytically and skip the
    scan; table kernels are checked on ``grid_points`` lags over
    ``[0, horizon]``.
    """
    if not isinstance(kernel, TableKernel) or not kernel.non_increasing:
        return
    grid = np.linspace(0.0, horizon, grid_points + 1)
    vals = kernel.eval(grid)
    if np.any(np.diff(vals) > 1e-12 * max(1.0, kernel.sup_value())):
        raise ValueError("kernel declared non-increasing but increases on grid")


@dataclass(frozen=True)
class HawkesParams:
    """Baseline rate, excitation kernel and time horizon of one scenario."""

    mu: float
    kernel: Kernel
    horizon: float

    def __post_init__(self):
        if self.mu <= 0.0:
            raise ValueError(f"baseline rate must be > 0, got {self.mu}")
        if self.horizon <= 0.0:
            raise ValueError(f"horizon must be > 0, got {self.horizon}")
        validate_monotonicity(self.kernel, self.horizon)


def mean_intensity_bound(params: HawkesParams) -> float:
    """Uniform-in-time bound on the expected intensity.

    ``mu * (1 + m / (1 - m))`` with ``m`` the kernel mass; finite because
    stability enforces ``m < 1``.
    """
    m = params.kernel.l1_norm()
    return params.mu * (1.0 + m / (1.0 - m))
