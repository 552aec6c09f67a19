"""Probability distributions, reduced states, entanglement measures, series."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .state import TwoParticleState, WalkState

EIG_CLAMP = 1e-12
DENSE_PT_LIMIT = 2 ** 14


def position_probability(state) -> np.ndarray:
    """P(x) = sum_c |psi(c, x)|^2 in storage order (joint (N, N) for two walkers)."""
    grid = state.grid
    return np.sum(np.abs(grid) ** 2, axis=0)


def marginal_position_probability(state: TwoParticleState, particle: int) -> np.ndarray:
    """Single-particle marginal of a two-walker distribution."""
    joint = position_probability(state)
    return joint.sum(axis=1 if particle == 1 else 0)


def reduced_coin_state(state) -> np.ndarray:
    """rho_c = Tr_x |psi><psi|: a coin_dim x coin_dim Hermitian trace-1 matrix."""
    grid = state.grid
    flat = grid.reshape(grid.shape[0], -1)
    rho = flat @ flat.conj().T
    return 0.5 * (rho + rho.conj().T)


def _entropy_of_probs(p: np.ndarray) -> float:
    p = np.where((p > -EIG_CLAMP) & (p < 0.0), 0.0, p)
    if np.any(p < 0):
        raise ValueError(f"density matrix has eigenvalue {p.min():.2e} < 0")
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz)))


def entanglement_entropy_grid(grid: np.ndarray) -> float:
    flat = grid.reshape(grid.shape[0], -1)
    rho = flat @ flat.conj().T
    return _entropy_of_probs(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)))


def entanglement_entropy(state) -> float:
    """Von Neumann entropy (natural log) of the reduced coin state, in [0, ln d]."""
    return entanglement_entropy_grid(state.grid)


def entropy_of_density(rho: np.ndarray) -> float:
    """Entropy of an explicit density matrix, with tiny-negative clamping."""
    return _entropy_of_probs(np.linalg.eigvalsh(rho))


def negativity(state_or_rho, coin_dim: Optional[int] = None) -> float:
    """(||rho^{T_coin}||_1 - 1) / 2 for the coin | position bipartition."""
    if isinstance(state_or_rho, (WalkState, TwoParticleState)):
        grid = state_or_rho.grid
        d = grid.shape[0]
        flat = grid.reshape(d, -1)
        total = flat.size
        if total > DENSE_PT_LIMIT:
            raise ValueError(
                f"total dimension {total} exceeds dense partial-transpose "
                f"limit {DENSE_PT_LIMIT}")
        vec = flat.reshape(-1)
        rho = np.outer(vec, vec.conj())
        n = flat.shape[1]
    else:
        rho = np.asarray(state_or_rho, dtype=np.complex128)
        if coin_dim is None:
            raise ValueError("coin_dim required for an explicit density matrix")
        d = coin_dim
        total = rho.shape[0]
        if total > DENSE_PT_LIMIT:
            raise ValueError(
                f"total dimension {total} exceeds dense partial-transpose "
                f"limit {DENSE_PT_LIMIT}")
        n = total // d
    rt = rho.reshape(d, n, d, n).transpose(2, 1, 0, 3).reshape(d * n, d * n)
    eigs = np.linalg.eigvalsh(0.5 * (rt + rt.conj().T))
    return float((np.sum(np.abs(eigs)) - 1.0) / 2.0)


def expectation_series(coin_state: np.ndarray, observable: np.ndarray,
                       step_block: np.ndarray, n_steps: int) -> np.ndarray:
    """<A>_t for a fixed-momentum coin state evolved by one mode block per step."""
    obs = np.asarray(observable, dtype=np.complex128)
    if np.max(np.abs(obs - obs.conj().T)) > 1e-12:
        raise ValueError("observable must be Hermitian")
    psi = np.asarray(coin_state, dtype=np.complex128).copy()
    psi /= np.linalg.norm(psi)
    out = np.empty(n_steps + 1)
    for step in range(n_steps + 1):
        out[step] = np.real(psi.conj() @ obs @ psi)
        psi = step_block @ psi
    return out


def dominant_frequency(series: np.ndarray) -> float:
    """Frequency (cycles per step) of the largest nonzero FFT bin."""
    centered = series - np.mean(series)
    spectrum = np.abs(np.fft.rfft(centered))
    if len(spectrum) < 2:
        return 0.0
    return float(np.argmax(spectrum[1:]) + 1) / len(series)


def average_late_entropy(series: np.ndarray, window: int = 10) -> float:
    """Mean of the last ``window`` entries of an entropy series."""
    series = np.asarray(series, dtype=float)
    if window > len(series):
        raise ValueError(f"window {window} exceeds series length {len(series)}")
    return float(np.mean(series[-window:]))


def bloch_state(omega_a: float, omega_p: float) -> np.ndarray:
    """Coin state (cos(p/2), e^{i a} sin(p/2)) for Bloch angles (azimuth a, polar p)."""
    return np.array([np.cos(omega_p / 2.0),
                     np.exp(1j * omega_a) * np.sin(omega_p / 2.0)],
                    dtype=np.complex128)


def late_entropy_sweep(engine, lattice, n_steps: int = 100, window: int = 10,
                       n_azimuth: int = 32, n_polar: int = 17) -> np.ndarray:
    """Late-time entropy over a Bloch-sphere grid of localized initial coins.

    Returns an (n_azimuth, n_polar) surface; the spread of this surface
    measures how sensitive the walk's asymptotic coin-position entanglement
    is to the initial coin state.
    """
    from .engines import evolve
    from .state import WalkState

    azimuths = np.linspace(0.0, 2.0 * np.pi, n_azimuth, endpoint=False)
    polars = np.linspace(0.0, np.pi, n_polar)
    origin = lattice.site_index(0)
    out = np.empty((n_azimuth, n_polar))
    for i, om_a in enumerate(azimuths):
        for j, om_p in enumerate(polars):
            amps = np.zeros((2, lattice.sites), dtype=np.complex128)
            amps[:, origin] = bloch_state(om_a, om_p)
            traj = evolve(WalkState(2, lattice, amps), engine, n_steps, ("entropy",))
            out[i, j] = average_late_entropy(traj.series["entropy"], window)
    return out
