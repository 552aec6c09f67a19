"""Momentum-space effective Hamiltonians, quasienergies, and oracles.

For translation-invariant coins the step operator is diagonal in momentum
and each mode reduces to a small unitary block of the canonical form

    U_k = e^{-i phi} [[A, B], [-B*, A*]],   |A|^2 + |B|^2 = 1,

whose generator is

    H_k = -(1/dt) * arccos(Re A)/sqrt(1 - (Re A)^2)
          * [Im(A) s3 + Re(B) s2 + Im(B) s1] + (phi/dt) s0.

The quasienergy E(k) = arccos(Re A)/dt is always reported on the principal
branch [0, pi/dt] and excludes the s0 shift.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Tuple

import numpy as np
from scipy.linalg import schur

from .coins import PAULI, CoinAngles, fg_pair, u2_from_angles
from .state import Lattice

DEGENERATE_SIN = 1e-10


def momentum_grid(lattice: Lattice) -> np.ndarray:
    """Momenta k_n = 2 pi n / (N a) for n in {-floor(N/2), ..., ceil(N/2)-1}."""
    n = lattice.sites
    lower = -(n // 2)
    return 2.0 * np.pi * np.arange(lower, lower + n) / (n * lattice.spacing)


def dqw_block(angles: CoinAngles, kappa: float) -> np.ndarray:
    """Per-momentum 2x2 block of the coined-walk step; kappa = k a."""
    u = u2_from_angles(angles)
    shift = np.diag([np.exp(-1j * kappa), np.exp(1j * kappa)])
    return shift @ u


def ssdqw_block(angles1: CoinAngles, angles2: CoinAngles, kappa: float) -> np.ndarray:
    """Per-momentum block S+(k) C2 S-(k) C1 of the split-step walk."""
    c1 = u2_from_angles(angles1)
    c2 = u2_from_angles(angles2)
    s_minus = np.diag([1.0, np.exp(1j * kappa)])
    s_plus = np.diag([np.exp(-1j * kappa), 1.0])
    return s_plus @ c2 @ s_minus @ c1


def dca_block(eta1: float, eta2: float, kappa: float) -> np.ndarray:
    """Per-momentum block of the automaton step."""
    return np.array(
        [[eta1 * np.exp(-1j * kappa), -1j * eta2],
         [-1j * eta2, eta1 * np.exp(1j * kappa)]], dtype=np.complex128)


def _canonical_ab(kind: str, params, kappa: float) -> Tuple[complex, complex, float]:
    """(A, B, phase) of the canonical block form for each walk family."""
    if kind == "dqw":
        angles = params
        f, g = fg_pair(angles.theta1, angles.theta2, angles.theta3)
        return f * np.exp(-1j * kappa), g * np.exp(-1j * kappa), angles.theta0
    if kind == "ssdqw":
        a1, a2 = params
        f1, g1 = fg_pair(a1.theta1, a1.theta2, a1.theta3)
        f2, g2 = fg_pair(a2.theta1, a2.theta2, a2.theta3)
        a = f2 * f1 * np.exp(-1j * kappa) - g2 * np.conj(g1)
        b = f2 * g1 * np.exp(-1j * kappa) + g2 * np.conj(f1)
        return a, b, a1.theta0 + a2.theta0
    if kind == "dca":
        eta1, eta2 = params
        return eta1 * np.exp(-1j * kappa), -1j * eta2, 0.0
    raise ValueError(f"unknown walk family {kind!r}")


@dataclass
class MomentumModeSystem:
    """Hermitian mode Hamiltonian with quasienergy and band eigenvectors."""

    k: float
    hamiltonian: np.ndarray
    energy: float
    phi_plus: np.ndarray
    phi_minus: np.ndarray


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(vec) > 1e-12)
    phase = vec[idx] / abs(vec[idx])
    return vec / phase


def hk_closed_form(kind: str, params, k: float, dt: float = 1.0,
                   a: float = 1.0) -> MomentumModeSystem:
    """Closed-form mode system for 'dqw', 'ssdqw' or 'dca'.

    Near band degeneracies (|sin E dt| below 1e-10) the closed-form
    eigenvectors are replaced by a direct Hermitian eigensolve with the
    first nonzero component rotated real positive.
    """
    kappa = k * a
    av, bv, phi = _canonical_ab(kind, params, kappa)
    re_a = float(np.clip(np.real(av), -1.0, 1.0))
    ebar = np.arccos(re_a)
    sin_ebar = np.sqrt(max(1.0 - re_a * re_a, 0.0))
    nvec = np.array([np.imag(bv), np.real(bv), np.imag(av)])  # s1, s2, s3
    if sin_ebar > DEGENERATE_SIN:
        direction = nvec / sin_ebar
    else:
        direction = np.zeros(3)
    h = -(ebar / dt) * (direction[0] * PAULI[1] + direction[1] * PAULI[2]
                        + direction[2] * PAULI[3]) + (phi / dt) * PAULI[0]
    phi_plus = np.array([1j * bv, np.imag(av) + sin_ebar])
    phi_minus = np.array([1j * bv, np.imag(av) - sin_ebar])
    norm_plus = np.linalg.norm(phi_plus)
    norm_minus = np.linalg.norm(phi_minus)
    if sin_ebar > DEGENERATE_SIN and min(norm_plus, norm_minus) > DEGENERATE_SIN:
        # the closed-form denominators sqrt(2 s (s +- Im A)) equal these norms
        # analytically; dividing by the computed norm removes cancellation
        # error when s is small
        phi_plus = phi_plus / norm_plus
        phi_minus = phi_minus / norm_minus
    else:
        # band edge, or B -> 0 where one closed-form numerator vanishes
        vals, vecs = np.linalg.eigh(h - (phi / dt) * PAULI[0])
        phi_minus = _fix_phase(vecs[:, 0])
        phi_plus = _fix_phase(vecs[:, 1])
    return MomentumModeSystem(k, h, ebar / dt, phi_plus, phi_minus)


def hamiltonian_from_unitary(u: np.ndarray, dt: float) -> np.ndarray:
    """H = (i/dt) log U on the principal branch, via Schur diagonalization.

    Raises if any eigenphase of U sits within 1e-9 of the +-pi branch cut.
    """
    u = np.asarray(u, dtype=np.complex128)
    t, q = schur(u, output="complex")
    phases = np.angle(np.diag(t))
    if np.any(np.abs(np.abs(phases) - np.pi) < 1e-9):
        raise ValueError("eigenphase at the +-pi branch cut; generator ambiguous")
    return q @ np.diag(-phases / dt) @ q.conj().T


def quasienergy(kind: str, params, k: float, dt: float = 1.0, a: float = 1.0) -> float:
    """Principal-branch quasienergy in [0, pi/dt]."""
    kappa = k * a
    av, _, _ = _canonical_ab(kind, params, kappa)
    return float(np.arccos(np.clip(np.real(av), -1.0, 1.0))) / dt


def zbw_frequency(theta12: float, k: float, dt: float = 1.0, a: float = 1.0) -> float:
    """Interference frequency of band-mixing observables at momentum k."""
    return np.arccos(np.clip(np.cos(theta12) * np.cos(k * a), -1.0, 1.0)) / (np.pi * dt)


@dataclass
class ContinuumReport:
    """Deviation from the target Dirac form at a sequence of scales."""

    scales: List[float]
    deviations: List[float]
    fitted_order: float


def continuum_deviation(kind: str, mass: float, scales: Iterable[float],
                        k_window: float, n_k: int = 41) -> ContinuumReport:
    """Max over |k| <= k_window of ||H_k - (k s3 + m s1)|| for a = dt = 1/L.

    The mass enters through the scaling rule theta = m dt (or eta2 = sin(m dt)
    for the automaton family).  The measured convergence order is fitted from
    successive scales, not assumed.
    """
    ks = np.linspace(-k_window, k_window, n_k)
    devs = []
    scales = list(scales)
    for scale in scales:
        dt = 1.0 / scale
        theta = mass * dt
        if kind == "dqw":
            params = CoinAngles(0.0, theta, 0.0, 0.0)
        elif kind == "ssdqw":
            params = (CoinAngles(), CoinAngles(0.0, theta, 0.0, 0.0))
        elif kind == "dca":
            params = (np.cos(theta), np.sin(theta))
        else:
            raise ValueError(f"unknown walk family {kind!r}")
        target = lambda k: k * PAULI[3] + mass * PAULI[1]  # noqa: E731
        dev = max(np.linalg.norm(hk_closed_form(kind, params, k, dt, dt).hamiltonian
                                 - target(k), 2) for k in ks)
        devs.append(float(dev))
    orders = [np.log(devs[i] / devs[i + 1]) / np.log(scales[i + 1] / scales[i])
              for i in range(len(scales) - 1)]
    fitted = float(np.mean(orders)) if orders else float("nan")
    return ContinuumReport(scales, devs, fitted)
