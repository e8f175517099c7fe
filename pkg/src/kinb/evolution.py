"""Time integration of the spectral collision dynamics.

The state is advanced with classical RK4 on the Fourier lattice.  After
each step the array is re-symmetrized so that it stays the transform of
a real density: full-1d pairs eta with -eta, full-2d pairs lattice
points on the sub-block that has a mirror partner, radial data is kept
real.  The update is then revalidated through the state constructor, so
a blown-up run fails fast with NumericalFailure instead of producing
garbage monitor rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericalFailure
from .spectral import (GridSpec, InitialDatum, SpectralState, init_state,
                       moments, state_with_values, to_physical)
from .collision import (AngularQuadrature, CrossSection, rhs_bilinear,
                        stability_limit, total_weight)

__all__ = [
    "RunConfig", "MonitorRow", "Trajectory", "entropy", "step", "run",
    "simulate",
]

# fraction of eta_max beyond which nodes count as the spectral tail
_TAIL_FRACTION = 0.875


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one simulation."""

    grid: GridSpec
    cross_section: CrossSection
    quadrature: AngularQuadrature
    datum: InitialDatum
    dt: float
    t_end: float
    snapshots: int = 0

    def __post_init__(self):
        if self.dt <= 0 or self.t_end <= 0:
            raise ConfigError("dt and t_end must be positive")
        if self.snapshots < 0:
            raise ConfigError("snapshots must be >= 0")
        if self.grid.dimension != self.datum.dimension:
            raise ConfigError("grid and datum dimensions disagree")

    def snapshot_times(self) -> tuple:
        """snapshots = k asks for k evenly spaced times ending at t_end."""
        k = self.snapshots
        return tuple(self.t_end * (j + 1) / k for j in range(k))


@dataclass(frozen=True)
class MonitorRow:
    t: float
    mass: float
    energy: float
    entropy: float | None
    sup_ratio: float
    tail: float


@dataclass
class Trajectory:
    grid: GridSpec
    dt: float
    rows: list
    snapshots: list
    final: SpectralState
    w_total: float
    dt_limit: float

    @property
    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.rows])

    def column(self, name: str) -> np.ndarray:
        vals = [getattr(r, name) for r in self.rows]
        if name == "entropy" and vals and vals[0] is None:
            raise ValueError("entropy is not tracked for radial runs")
        return np.array(vals, dtype=float)


def entropy(state: SpectralState) -> float:
    """int f log f dv from the physical-space reconstruction.

    Cells where the density vanishes contribute zero (f log f -> 0).
    Radial grids have no physical-space reconstruction here.
    """
    v, dens, dv = to_physical(state)
    cell = dv ** state.grid.dimension
    pos = dens > 0.0
    return float(np.sum(dens[pos] * np.log(dens[pos])) * cell)


def _hermitize(grid: GridSpec, values: np.ndarray) -> np.ndarray:
    if grid.mode == "full-1d":
        return 0.5 * (values + np.conj(values[::-1]))
    if grid.mode == "radial":
        return values.real.astype(complex)
    # full-2d: index 0 along each axis is the unpaired -n/2 row/column.
    # Those modes have no conjugate partner on the even lattice, so any
    # value parked there makes the reconstruction complex; zero them.
    out = values.copy()
    out[0, :] = 0.0
    out[:, 0] = 0.0
    block = values[1:, 1:]
    out[1:, 1:] = 0.5 * (block + np.conj(block[::-1, ::-1]))
    return out


def _rk4_step(grid, cs, quad, values, dt):
    k1 = rhs_bilinear(grid, cs, quad, values, values)
    v = values + (0.5 * dt) * k1
    k2 = rhs_bilinear(grid, cs, quad, v, v)
    v = values + (0.5 * dt) * k2
    k3 = rhs_bilinear(grid, cs, quad, v, v)
    v = values + dt * k3
    k4 = rhs_bilinear(grid, cs, quad, v, v)
    out = values + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return _hermitize(grid, out)


def step(state: SpectralState, cs: CrossSection, quad: AngularQuadrature,
         dt: float) -> SpectralState:
    """One validated RK4 step."""
    vals = _rk4_step(state.grid, cs, quad, state.values, dt)
    return state_with_values(state, vals, t=state.t + dt)


def _monitor(state: SpectralState, t: float, tail_mask: np.ndarray,
             track_entropy: bool) -> MonitorRow:
    m = moments(state, order=2)
    mass = state.mass
    mag = np.abs(state.values)
    ent = entropy(state) if track_entropy else None
    return MonitorRow(
        t=t,
        mass=mass,
        energy=float(np.real(m[2])) if state.grid.dimension > 1 else float(m[2]),
        entropy=ent,
        sup_ratio=float(mag.max() / mass),
        tail=float(mag[tail_mask].max()) if tail_mask.any() else 0.0,
    )


def run(state: SpectralState, cs: CrossSection, quad: AngularQuadrature,
        dt: float, t_end: float, snapshot_times=(), monitor_every: int = 1,
        stability_guard: bool = True) -> Trajectory:
    """Advance to t_end, recording monitor rows and snapshot states.

    Snapshot times are rounded to the nearest step boundary.  The guard
    rejects dt above 0.5 / (mass * total cross-section weight); mass and
    the truncated cross-section are both constant along the flow, so one
    check at the start covers the whole run.
    """
    if dt <= 0 or t_end <= 0:
        raise ConfigError("dt and t_end must be positive")
    if monitor_every < 1:
        raise ConfigError("monitor_every must be >= 1")
    grid = state.grid
    limit = stability_limit(state, cs, quad)
    if stability_guard and dt > limit:
        raise NumericalFailure(
            f"dt {dt:g} exceeds the stability limit {limit:g}")

    n_full = int(math.floor(t_end / dt + 1e-12))
    remainder = t_end - n_full * dt
    if remainder < 1e-12 * max(1.0, t_end):
        remainder = 0.0
    n_total = n_full + (1 if remainder > 0.0 else 0)

    want: dict[int, float] = {}
    for ts in snapshot_times:
        if ts < -1e-12 or ts > t_end * (1 + 1e-12):
            raise ConfigError(f"snapshot time {ts:g} outside [0, t_end]")
        k = min(int(round(ts / dt)), n_total)
        want[k] = k * dt if k < n_total else t_end

    tail_mask = grid.abs_nodes() >= _TAIL_FRACTION * grid.eta_max
    track_entropy = grid.mode != "radial"

    rows = [_monitor(state, 0.0, tail_mask, track_entropy)]
    snaps = []
    if 0 in want:
        snaps.append((0.0, state))

    vals = state.values
    t = 0.0
    for k in range(1, n_total + 1):
        h = dt if k <= n_full else remainder
        vals = _rk4_step(grid, cs, quad, vals, h)
        t = k * dt if k <= n_full else t_end
        cur = state_with_values(state, vals, t=t)
        if k % monitor_every == 0 or k == n_total:
            rows.append(_monitor(cur, t, tail_mask, track_entropy))
        if k in want:
            snaps.append((want[k], cur))

    final = state_with_values(state, vals, t=t_end if n_total else 0.0)
    return Trajectory(grid=grid, dt=dt, rows=rows, snapshots=snaps,
                      final=final, w_total=total_weight(grid, cs, quad),
                      dt_limit=limit)


def simulate(config: RunConfig, monitor_every: int = 1) -> Trajectory:
    state = init_state(config.grid, config.datum)
    return run(state, config.cross_section, config.quadrature,
               config.dt, config.t_end,
               snapshot_times=config.snapshot_times(),
               monitor_every=monitor_every)
