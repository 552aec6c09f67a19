"""Coin unitaries: homogeneous U(2), position-time-dependent U(2) fields,
block direct-sum coins, and gauge-extended 2N-dimensional coins.

A U(2) coin is parameterized by four real angles through

    U = exp(-i sum_q theta^q sigma_q) = e^{-i theta0} [[F, G], [-G*, F*]],

    F = cos|v| - i (theta3/|v|) sin|v|,
    G = -i (theta1/|v|) sin|v| - (theta2/|v|) sin|v|,

with |v| = sqrt(theta1^2 + theta2^2 + theta3^2) and |F|^2 + |G|^2 = 1.
Position-time-dependent coins evaluate angle fields theta(x, t, dt) =
theta(x, t, 0) + dt * vartheta(x, t); the truncation at first order in dt
is exact by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Tuple

import numpy as np
from scipy.linalg import expm

from .backend import kernels

UNITARITY_TOL = 1e-12


@dataclass(frozen=True)
class CoinAngles:
    """Angles (theta0, theta1, theta2, theta3) of a U(2) coin, in radians."""

    theta0: float = 0.0
    theta1: float = 0.0
    theta2: float = 0.0
    theta3: float = 0.0

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.theta0, self.theta1, self.theta2, self.theta3)


def fg_pair(theta1, theta2, theta3):
    """Return (F, G) for given rotation angles; safe in the |v| -> 0 limit.

    Accepts scalars or arrays.  The singular directions theta_i/|v| are
    resolved through sin|v|/|v|, which tends to 1 smoothly.
    """
    t1 = np.asarray(theta1, dtype=float)
    t2 = np.asarray(theta2, dtype=float)
    t3 = np.asarray(theta3, dtype=float)
    mag = np.sqrt(t1 * t1 + t2 * t2 + t3 * t3)
    s = np.sinc(mag / np.pi)  # sin|v| / |v|, equal to 1 at |v| = 0
    f = np.cos(mag) - 1j * t3 * s
    g = -1j * t1 * s - t2 * s
    return f, g


def u2_from_angles(angles) -> np.ndarray:
    """2x2 unitary e^{-i theta0} [[F, G], [-G*, F*]] from CoinAngles or a 4-tuple."""
    if isinstance(angles, CoinAngles):
        t0, t1, t2, t3 = angles.as_tuple()
    else:
        t0, t1, t2, t3 = angles
    f, g = fg_pair(t1, t2, t3)
    phase = np.exp(-1j * t0)
    return phase * np.array([[f, g], [-np.conj(g), np.conj(f)]], dtype=np.complex128)


ZERO_FIELD = lambda x, t: np.zeros_like(np.asarray(x, dtype=float))  # noqa: E731


@dataclass
class CoinSchedule:
    """Space-time-dependent coin angles for the two sub-steps of a split walk.

    ``theta[(j, q)]`` holds the dt = 0 value of theta^q_j(x, t, dt) and
    ``vartheta[(j, q)]`` its first-order-in-dt coefficient, as callables
    f(x, t) accepting an array of positions and a scalar time.  Missing
    entries are zero.  Evaluation rule:

        theta^q_j(x, t, dt) = theta[(j, q)](x, t) + dt * vartheta[(j, q)](x, t)
    """

    theta: Dict[Tuple[int, int], Callable] = field(default_factory=dict)
    vartheta: Dict[Tuple[int, int], Callable] = field(default_factory=dict)

    def __post_init__(self):
        for key in list(self.theta) + list(self.vartheta):
            j, q = key
            if j not in (1, 2) or q not in (0, 1, 2, 3):
                raise ValueError(f"schedule key {key} outside (j in 1..2, q in 0..3)")

    @classmethod
    def constant(cls, theta1=(0, 0, 0, 0), theta2=(0, 0, 0, 0),
                 vartheta1=(0, 0, 0, 0), vartheta2=(0, 0, 0, 0)) -> "CoinSchedule":
        """Position- and time-independent schedule from constant 4-tuples."""
        def const(v):
            return lambda x, t, _v=float(v): np.full_like(np.asarray(x, dtype=float), _v)

        theta = {}
        vartheta = {}
        for j, (ths, vts) in ((1, (theta1, vartheta1)), (2, (theta2, vartheta2))):
            for q in range(4):
                if ths[q]:
                    theta[(j, q)] = const(ths[q])
                if vts[q]:
                    vartheta[(j, q)] = const(vts[q])
        return cls(theta, vartheta)

    def uses_only_phase_and_x_rotation(self) -> bool:
        """True if only theta^0 and theta^1 components are declared."""
        return all(q in (0, 1) for (_, q) in list(self.theta) + list(self.vartheta))

    def angles_at(self, sub_step: int, x, t: float, dt: float):
        """Angle arrays (theta0..theta3) at positions x, time t, time step dt."""
        x = np.asarray(x, dtype=float)
        out = []
        for q in range(4):
            th = self.theta.get((sub_step, q))
            vt = self.vartheta.get((sub_step, q))
            val = th(x, t) if th is not None else np.zeros_like(x)
            if vt is not None and dt:
                val = val + dt * vt(x, t)
            out.append(np.broadcast_to(np.asarray(val, dtype=float), x.shape).copy()
                       if np.ndim(val) == 0 else np.asarray(val, dtype=float))
        return tuple(out)


@dataclass
class PositionDiagonalCoin:
    """Per-site 2x2 coin entries; acts as identity on position."""

    u00: np.ndarray
    u01: np.ndarray
    u10: np.ndarray
    u11: np.ndarray

    def apply(self, grid: np.ndarray) -> None:
        kernels.coin2(grid[0], grid[1], self.u00, self.u01, self.u10, self.u11)


def coin_field(schedule: CoinSchedule, sub_step: int, positions, t: float,
               dt: float) -> PositionDiagonalCoin:
    """Block-diagonal coin: at each site the U(2) of the scheduled angles."""
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    t0, t1, t2, t3 = schedule.angles_at(sub_step, positions, t, dt)
    f, g = fg_pair(t1, t2, t3)
    phase = np.exp(-1j * t0)
    return PositionDiagonalCoin(phase * f, phase * g,
                                phase * (-np.conj(g)), phase * np.conj(f))


def block_direct_sum(blocks) -> np.ndarray:
    """Direct sum of 2x2 unitaries over the coin space only.

    Sector j occupies rows/columns (2j, 2j+1) of the 2M x 2M result.
    """
    blocks = [np.asarray(b, dtype=np.complex128) for b in blocks]
    for b in blocks:
        if b.shape != (2, 2):
            raise ValueError("each block must be 2x2")
        if np.max(np.abs(b.conj().T @ b - np.eye(2))) > UNITARITY_TOL:
            raise ValueError("non-unitary block passed to block_direct_sum")
    m = len(blocks)
    out = np.zeros((2 * m, 2 * m), dtype=np.complex128)
    for j, b in enumerate(blocks):
        out[2 * j:2 * j + 2, 2 * j:2 * j + 2] = b
    return out


PAULI = (
    np.eye(2, dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


def gell_mann() -> tuple:
    """Identity plus the eight Gell-Mann matrices (U(3) generator set)."""
    lam = [np.eye(3, dtype=np.complex128)]
    idx = [(0, 1), (0, 2), (1, 2)]
    for a, b in idx:
        m = np.zeros((3, 3), dtype=np.complex128)
        m[a, b] = m[b, a] = 1
        lam.append(m)
        m = np.zeros((3, 3), dtype=np.complex128)
        m[a, b] = -1j
        m[b, a] = 1j
        lam.append(m)
    lam.append(np.diag([1.0, -1.0, 0.0]).astype(np.complex128))
    lam.append(np.diag([1.0, 1.0, -2.0]).astype(np.complex128) / np.sqrt(3))
    return tuple(lam)


def default_generators(n: int) -> tuple:
    """Hermitian generator set with Lambda_0 = identity for gauge dimension n."""
    if n == 1:
        return (np.eye(1, dtype=np.complex128),)
    if n == 2:
        return PAULI
    if n == 3:
        return gell_mann()
    raise ValueError(f"no default generator set for gauge dimension {n}")


@dataclass
class NonabelianCoinSpec:
    """Gauge sector of a 2N-dimensional coin.

    ``omega[(j, q)]`` / ``capital_omega[(j, q)]`` are coefficient fields
    f(x, t) multiplying generator Lambda_q in the up/down spin sectors.
    """

    gauge_dim: int
    generators: tuple = None
    omega: Dict[Tuple[int, int], Callable] = field(default_factory=dict)
    capital_omega: Dict[Tuple[int, int], Callable] = field(default_factory=dict)

    def __post_init__(self):
        if self.generators is None:
            self.generators = default_generators(self.gauge_dim)
        gens = tuple(np.asarray(g, dtype=np.complex128) for g in self.generators)
        if len(gens) != self.gauge_dim ** 2:
            raise ValueError(
                f"expected {self.gauge_dim ** 2} generators, got {len(gens)}")
        if np.max(np.abs(gens[0] - np.eye(self.gauge_dim))) > 0:
            raise ValueError("Lambda_0 must be the identity")
        for g in gens:
            if np.max(np.abs(g - g.conj().T)) > UNITARITY_TOL:
                raise ValueError("generators must be Hermitian")
        self.generators = gens

    def sector_generator(self, sub_step: int, x: float, t: float, which: str) -> np.ndarray:
        """Hermitian sum_q coeff^q(x, t) Lambda_q for spin sector 'up' or 'down'."""
        table = self.omega if which == "up" else self.capital_omega
        acc = np.zeros((self.gauge_dim, self.gauge_dim), dtype=np.complex128)
        for (j, q), fn in table.items():
            if j == sub_step:
                acc += float(fn(x, t)) * self.generators[q]
        return acc


def nonabelian_coin(schedule: CoinSchedule, spec: NonabelianCoinSpec,
                    sub_step: int, x: float, t: float, dt: float) -> np.ndarray:
    """2N x 2N coin [U(2) ⊗ I_N] · [|u⟩⟨u| ⊗ e^{-i dt C_up} + |d⟩⟨d| ⊗ e^{-i dt C_down}].

    The gauge factor reduces exactly to the identity at dt = 0.
    """
    n = spec.gauge_dim
    xarr = np.asarray([x], dtype=float)
    t0, t1, t2, t3 = (v[0] for v in schedule.angles_at(sub_step, xarr, t, dt))
    u2 = u2_from_angles((t0, t1, t2, t3))
    c_up = spec.sector_generator(sub_step, x, t, "up")
    c_down = spec.sector_generator(sub_step, x, t, "down")
    scale = max(np.linalg.norm(c_up, 2), np.linalg.norm(c_down, 2))
    if dt * scale >= 0.1:
        raise ValueError(
            f"dt * max generator norm = {dt * scale:.3g} >= 0.1; "
            "first-order gauge expansion not meaningful")
    gauge = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    gauge[:n, :n] = expm(-1j * dt * c_up)
    gauge[n:, n:] = expm(-1j * dt * c_down)
    return np.kron(u2, np.eye(n)) @ gauge
