"""Paths with deterministic jumps enforced at chosen times.

Enforcing a jump at time ``v`` inserts the event outside the acceptance
loop and lets it feed the excitation kernel exactly like a random jump, so
the intensity right of ``v`` gains a ``Phi(t - v)`` term.  Stacking several
enforced jumps gives the stressed scenarios priced by the expansion series.

Pathwise comparisons under a shared stream (all immediate from the common
sheet construction):

* on ``[0, first shift)`` the path coincides with the plain simulation;
* the baseline-Poisson path plus the enforced jumps is always contained in
  the shifted path;
* the shifted path minus its enforced jumps is contained in the path of the
  "dominating" process whose baseline is raised by ``n * Phi(0)`` (or
  ``n * sup Phi`` for non-monotone kernels).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import HawkesParams
from .rng import PoissonSheet, RngStream
from .simulate import EventPath, _sheet_scratch, _thin


@dataclass(frozen=True)
class ShiftSpec:
    """Strictly increasing enforced-jump times, stored ascending."""

    times: tuple

    def __post_init__(self):
        times = tuple(float(v) for v in self.times)
        object.__setattr__(self, "times", times)
        if not times:
            raise ValueError("need at least one shift time")
        if times[0] <= 0.0:
            raise ValueError("shift times must be > 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("shift times must be strictly increasing")

    @property
    def order(self) -> int:
        return len(self.times)


def _as_shift_times(shifts, horizon: float) -> tuple:
    spec = shifts if isinstance(shifts, ShiftSpec) else ShiftSpec(tuple(shifts))
    if spec.times[-1] >= horizon:
        raise ValueError("shift times must lie strictly inside (0, horizon)")
    return spec.times


def simulate_shifted(params: HawkesParams, shifts,
                     stream: RngStream) -> EventPath:
    """Realization with deterministic jumps enforced at the given times.

    Equivalent to restarting the thinning at each shift with the baseline
    absorbing all prior events: the engine scans each inter-shift segment
    against the same sheet the plain simulation reads.
    """
    times = _as_shift_times(shifts, params.horizon)
    sheet = PoissonSheet(stream, params.horizon, _sheet_scratch())
    ev, tags = _thin(sheet, params.kernel, params.mu, params.mu,
                     params.mu, 0.0, params.horizon, enforced=times)
    return EventPath(np.array(ev), np.array(tags, dtype=np.uint8), params)


def dominating_params(params: HawkesParams, n: int) -> HawkesParams:
    """Parameters of the process that pathwise dominates an ``n``-shift path.

    The baseline rises by ``n * Phi(0)`` for non-increasing kernels, by
    ``n * sup Phi`` otherwise.
    """
    if n < 0:
        raise ValueError("shift count must be >= 0")
    kernel = params.kernel
    bump = kernel.eval(0.0) if kernel.non_increasing else kernel.sup_value()
    return HawkesParams(params.mu + n * bump, kernel, params.horizon)


def history_baseline(params: HawkesParams, history_times, cut: float):
    """Baseline ``mu + sum Phi(t - tau)`` over a frozen history up to ``cut``.

    Returns ``(callable, sup)`` ready for :func:`simulate_generalized`; this
    is how a shifted path is rebuilt segment by segment when composing
    shifts one at a time.
    """
    kernel = params.kernel
    mu = params.mu
    hist = np.asarray(history_times, dtype=float)
    if hist.size and hist.max() > cut:
        raise ValueError("history events must not lie after the cut time")

    if hist.size == 0:
        return mu, mu

    def baseline(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return mu + kernel.eval_pos(t[:, None] - hist[None, :]).sum(axis=1)

    if kernel.non_increasing:
        sup = mu + float(np.sum(kernel.eval_pos(cut - hist)))
    else:
        sup = mu + hist.size * kernel.sup_value()
    return baseline, sup
