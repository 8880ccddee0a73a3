"""Simulation state, result containers and steady-state detection."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .numerics import AgeGrid, AgeProfile, integrate, l1_distance


@dataclass(frozen=True)
class PopulationState:
    """Workforce density at one instant."""

    t: float
    rho: AgeProfile

    @property
    def headcount(self) -> float:
        return integrate(self.rho)

    @property
    def experience(self) -> float:
        """Knowledge proxy: integral of age * density."""
        weighted = self.rho.values * self.rho.grid.nodes
        return float(weighted[:-1].sum() * self.rho.grid.dz)


@dataclass(frozen=True)
class SimulationResult:
    """Trajectory of one simulation run.

    Scalar series (headcount, hiring, ...) are recorded at every step;
    full age profiles only at the snapshot times (always including t=0 and
    the final time).  ``hiring_parts`` carries the budget model's
    attrition / retirement / aging decomposition; entropy and budget are
    None for models that do not define them.
    """

    model: str
    grid: AgeGrid
    times: np.ndarray
    headcount: np.ndarray
    hiring: np.ndarray
    snapshot_times: np.ndarray
    snapshots: tuple[AgeProfile, ...]
    budget: np.ndarray | None = None
    hiring_parts: dict | None = None
    entropy: np.ndarray | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def final(self) -> AgeProfile:
        if not self.snapshots:
            raise ValidationError("result has no snapshots")
        return self.snapshots[-1]

    @property
    def initial(self) -> AgeProfile:
        if not self.snapshots:
            raise ValidationError("result has no snapshots")
        return self.snapshots[0]


def step_count(t_end: float, dt: float) -> int:
    """Number of steps needed to reach t_end (last step may overshoot)."""
    if not (dt > 0):
        raise ValidationError(f"time step must be positive, got {dt}")
    if not (t_end > 0):
        raise ValidationError(f"end time must be positive, got {t_end}")
    return max(math.ceil(t_end / dt - 1e-9), 1)


def snapshot_mask(n_steps: int, dt: float, snapshot_every: float | None) -> np.ndarray:
    """Boolean mask over steps 0..n_steps marking which states to keep.

    ``snapshot_every`` is a time stride; None keeps every step.  Step 0 and
    the final step are always kept.
    """
    keep = np.zeros(n_steps + 1, dtype=bool)
    keep[0] = True
    keep[n_steps] = True
    if snapshot_every is None:
        keep[:] = True
        return keep
    if snapshot_every <= 0:
        raise ValidationError("snapshot_every must be positive")
    stride = max(1, round(snapshot_every / dt))
    keep[::stride] = True
    return keep


def detect_steady_state(
    result: SimulationResult, tol: float = 1e-3, scale: float | None = None
) -> float | None:
    """First snapshot time after which the profile stays near its final value.

    Returns the earliest snapshot time t* such that the L1 distance to the
    final profile, relative to ``scale`` (default: the L1 size of the final
    profile), stays below ``tol`` for every later snapshot; None if the
    trajectory never settles.  A constant trajectory settles at t = 0.
    """
    if tol <= 0:
        raise ValidationError("tolerance must be positive")
    snaps = result.snapshots
    if not snaps:
        return None
    target = snaps[-1]
    denom = scale if scale is not None else float(np.abs(target.values[:-1]).sum() * target.grid.dz)
    dists = np.empty(len(snaps))
    for k, p in enumerate(snaps):
        num = l1_distance(p, target)
        if denom > 0:
            dists[k] = num / denom
        else:
            dists[k] = 0.0 if num == 0.0 else np.inf
    ok = dists <= tol
    # first index from which every later snapshot stays within tol
    settled = np.logical_and.accumulate(ok[::-1])[::-1]
    idx = np.nonzero(settled)[0]
    # the final snapshot matches itself trivially; settling only at the
    # horizon is indistinguishable from not settling at all
    if idx.size == 0 or idx[0] == len(snaps) - 1:
        return None
    return float(result.snapshot_times[idx[0]])
