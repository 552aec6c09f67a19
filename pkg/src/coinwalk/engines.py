"""Single-step evolution for every walk family, plus a classical baseline.

Quantum engines mutate the (d, N) amplitude grid of a WalkState in place
through the kernel backend.  Split-step evolution applies S+ C2 S- C1
right to left; the modified walk additionally applies the inverse dt = 0
coins on the left, which forces the step to the identity in the joint
continuum limit dt -> 0, a -> 0.

Time convention: schedules receive the physical time t = step_index * dt,
with step_index starting at 1 for the first applied step.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np

from .backend import kernels
from .coins import CoinAngles, CoinSchedule, NonabelianCoinSpec, coin_field, fg_pair, u2_from_angles
from .shifts import ShiftKind, apply_shift
from .state import Lattice, TwoParticleState, WalkState

NORM_DRIFT_TOL = 1e-10
BOUNDARY_PROB_WARN = 1e-8


@dataclass(frozen=True)
class CRW:
    """Classical random walk baseline; evolves probability vectors exactly."""

    p_head: float

    def __post_init__(self):
        if not 0.0 <= self.p_head <= 1.0:
            raise ValueError(f"p_head must lie in [0, 1], got {self.p_head}")


@dataclass(frozen=True)
class DQW:
    """Coined walk: one coin followed by one full conditional shift."""

    angles: CoinAngles

    def apply_step(self, grid, lattice: Lattice, step_index: int) -> None:
        u = u2_from_angles(self.angles)
        kernels.coin2_const(grid[0], grid[1], u[0, 0], u[0, 1], u[1, 0], u[1, 1])
        apply_shift(ShiftKind.FULL, grid)


@dataclass(frozen=True)
class SSDQW:
    """Split-step walk S+ C2 S- C1 with scheduled, possibly inhomogeneous coins."""

    schedule: CoinSchedule

    def apply_step(self, grid, lattice: Lattice, step_index: int) -> None:
        dt = lattice.dt
        t = step_index * dt
        x = lattice.positions
        coin_field(self.schedule, 1, x, t, dt).apply(grid)
        apply_shift(ShiftKind.HALF_MINUS, grid)
        coin_field(self.schedule, 2, x, t, dt).apply(grid)
        apply_shift(ShiftKind.HALF_PLUS, grid)


@dataclass(frozen=True)
class DCA:
    """Translation-invariant local unitary with hopping eta1 and mass eta2."""

    eta1: complex
    eta2: complex

    def __post_init__(self):
        if abs(abs(self.eta1) ** 2 + abs(self.eta2) ** 2 - 1.0) > 1e-12:
            raise ValueError("|eta1|^2 + |eta2|^2 must equal 1")

    def apply_step(self, grid, lattice: Lattice, step_index: int) -> None:
        up = self.eta1 * np.roll(grid[0], 1) - 1j * self.eta2 * grid[1]
        down = self.eta1 * np.roll(grid[1], -1) - 1j * self.eta2 * grid[0]
        grid[0] = up
        grid[1] = down


@dataclass(frozen=True)
class ModifiedSSDQW:
    """Split-step walk left-multiplied by the inverse dt = 0 coins."""

    schedule: CoinSchedule

    def apply_step(self, grid, lattice: Lattice, step_index: int) -> None:
        dt = lattice.dt
        t = step_index * dt
        x = lattice.positions
        coin_field(self.schedule, 1, x, t, dt).apply(grid)
        apply_shift(ShiftKind.HALF_MINUS, grid)
        coin_field(self.schedule, 2, x, t, dt).apply(grid)
        apply_shift(ShiftKind.HALF_PLUS, grid)
        for j in (2, 1):
            c = coin_field(self.schedule, j, x, t, 0.0)
            kernels.coin2(grid[0], grid[1],
                          np.conj(c.u00), np.conj(c.u10),
                          np.conj(c.u01), np.conj(c.u11))


@dataclass(frozen=True)
class NeutrinoU6:
    """Three independent split-step sectors on a six-dimensional coin."""

    thetas: tuple  # x-rotation angle of the second coin, one per sector

    def apply_step(self, grid, lattice: Lattice, step_index: int) -> None:
        apply_shift(ShiftKind.SECTORED_MINUS, grid)
        for j, theta in enumerate(self.thetas):
            c, s = np.cos(theta), -1j * np.sin(theta)
            kernels.coin2_const(grid[2 * j], grid[2 * j + 1], c, s, s, c)
        apply_shift(ShiftKind.SECTORED_PLUS, grid)


@dataclass(frozen=True)
class NonabelianModified:
    """Modified split-step walk with a 2N-dimensional gauge-extended coin."""

    schedule: CoinSchedule
    spec: NonabelianCoinSpec

    def apply_step(self, grid, lattice: Lattice, step_index: int) -> None:
        from .coins import nonabelian_coin

        n = self.spec.gauge_dim
        dt = lattice.dt
        t = step_index * dt
        xs = lattice.positions

        def apply_coin(j, dt_eval, dagger=False):
            for i, xi in enumerate(xs):
                u = nonabelian_coin(self.schedule, self.spec, j, float(xi), t, dt_eval)
                if dagger:
                    u = u.conj().T
                grid[:, i] = u @ grid[:, i]

        apply_coin(1, dt)
        for row in range(n, 2 * n):  # spin-down block moves -a
            kernels.roll(grid[row], -1)
        apply_coin(2, dt)
        for row in range(n):         # spin-up block moves +a
            kernels.roll(grid[row], 1)
        apply_coin(2, 0.0, dagger=True)
        apply_coin(1, 0.0, dagger=True)


def step_dqw(state: WalkState, angles: CoinAngles) -> WalkState:
    """One coined-walk step S (C ⊗ I); returns a new state."""
    out = state.copy()
    DQW(angles).apply_step(out.grid, state.lattice, 1)
    return out


def step_ssdqw(state: WalkState, schedule: CoinSchedule, step_index: int = 1,
               dt: Optional[float] = None) -> WalkState:
    """One split-step S+ C2(t, dt) S- C1(t, dt); returns a new state."""
    out = state.copy()
    lattice = state.lattice if dt is None else Lattice(state.lattice.sites, dt)
    SSDQW(schedule).apply_step(out.grid, lattice, step_index)
    return out


def step_dca(state: WalkState, eta1: complex, eta2: complex) -> WalkState:
    """One automaton step eta1 [conditional translations] - i eta2 sigma1 ⊗ I."""
    out = state.copy()
    DCA(eta1, eta2).apply_step(out.grid, state.lattice, 1)
    return out


def step_modified(state: WalkState, schedule: CoinSchedule, step_index: int = 1,
                  dt: Optional[float] = None) -> WalkState:
    """One modified step C1(t,0)^† C2(t,0)^† S+ C2(t,dt) S- C1(t,dt)."""
    out = state.copy()
    lattice = state.lattice if dt is None else Lattice(state.lattice.sites, dt)
    ModifiedSSDQW(schedule).apply_step(out.grid, lattice, step_index)
    return out


def step_neutrino(state: WalkState, thetas) -> WalkState:
    """One sectored six-dimensional split step."""
    if state.coin_dim != 6:
        raise ValueError("neutrino step needs a 6-dimensional coin")
    out = state.copy()
    NeutrinoU6(tuple(thetas)).apply_step(out.grid, state.lattice, 1)
    return out


@dataclass
class Trajectory:
    """Per-step observable series plus the final state of an evolution."""

    series: Dict[str, np.ndarray]
    final_state: object
    n_steps: int


def _entropy_record(grid):
    from .observables import entanglement_entropy_grid

    return entanglement_entropy_grid(grid)


_RECORDERS: Dict[str, Callable] = {
    "norm": lambda grid: float(np.linalg.norm(grid)),
    "position_prob": lambda grid: np.sum(np.abs(grid) ** 2, axis=0),
    "entropy": _entropy_record,
}


def evolve(state: WalkState, engine, n_steps: int, record=(),
           check_boundary: bool = True) -> Trajectory:
    """Apply the engine step n_steps times, recording named observables.

    The trajectory includes the initial state, so each series has
    n_steps + 1 entries.  Warns once if probability reaches the edge of the
    signed coordinate window (wraparound would follow); disable the check
    for intentionally delocalized states.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    out = state.copy()
    grid = out.grid
    names = list(record)
    for name in names:
        if name not in _RECORDERS:
            raise ValueError(f"unknown observable {name!r}; "
                             f"known: {sorted(_RECORDERS)}")
    series = {name: [_RECORDERS[name](grid)] for name in names}
    edge = state.lattice.site_index(-(state.lattice.sites // 2))
    warned = not check_boundary
    for step_index in range(1, n_steps + 1):
        engine.apply_step(grid, out.lattice, step_index)
        for name in names:
            series[name].append(_RECORDERS[name](grid))
        if not warned:
            edge_prob = float(np.sum(np.abs(grid[:, edge]) ** 2))
            if edge_prob > BOUNDARY_PROB_WARN:
                warnings.warn(
                    f"boundary probability {edge_prob:.2e} at step {step_index}; "
                    "the wavefront is wrapping around the periodic lattice",
                    RuntimeWarning, stacklevel=2)
                warned = True
    drift = abs(np.linalg.norm(grid) - 1.0)
    if drift > NORM_DRIFT_TOL:
        raise RuntimeError(f"norm drifted by {drift:.2e} during evolution")
    return Trajectory({k: np.array(v) for k, v in series.items()}, out, n_steps)


def crw_distribution(p_head: float, n_steps: int, initial_site: int,
                     lattice: Lattice) -> np.ndarray:
    """Exact classical-walk distribution by probability recursion (no sampling)."""
    CRW(p_head)  # validates p_head
    if not 0 <= initial_site < lattice.sites:
        raise ValueError(f"site index {initial_site} outside [0, {lattice.sites})")
    prob = np.zeros(lattice.sites)
    prob[initial_site] = 1.0
    for _ in range(n_steps):
        prob = p_head * np.roll(prob, 1) + (1.0 - p_head) * np.roll(prob, -1)
    return prob


def dense_step_matrix(engine, lattice: Lattice, coin_dim: int,
                      step_index: int = 1) -> np.ndarray:
    """Dense (d N) x (d N) matrix of one engine step; oracle for small N."""
    dim = coin_dim * lattice.sites
    mat = np.empty((dim, dim), dtype=np.complex128)
    for col in range(dim):
        grid = np.zeros((coin_dim, lattice.sites), dtype=np.complex128)
        grid[col // lattice.sites, col % lattice.sites] = 1.0
        engine.apply_step(grid, lattice, step_index)
        mat[:, col] = grid.reshape(-1)
    return mat


def dense_two_particle_matrix(engine, lattice: Lattice,
                              step_index: int = 1) -> np.ndarray:
    """Dense matrix of one two-walker engine step in the (c, x1, x2) layout."""
    n = lattice.sites
    dim = 4 * n * n
    mat = np.empty((dim, dim), dtype=np.complex128)
    for col in range(dim):
        grid = np.zeros((4, n, n), dtype=np.complex128)
        grid[col // (n * n), (col // n) % n, col % n] = 1.0
        engine.apply_step(grid, lattice, step_index)
        mat[:, col] = grid.reshape(-1)
    return mat
