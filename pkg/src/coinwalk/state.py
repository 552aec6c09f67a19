"""Hilbert-space bookkeeping: lattice, walker states, indexing, norms.

The composite space is coin ⊗ position (or coin⊗coin ⊗ position⊗position
for two walkers).  Amplitudes are stored as flat contiguous complex vectors;
index = coin * N + site for a single walker.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

NORM_TOL = 1e-12


@dataclass(frozen=True)
class Lattice:
    """One-dimensional periodic lattice of ``sites`` points with spacing ``spacing``.

    Site coordinates are x_n = n * spacing for n in {0, ..., N-1}, addressed
    modulo N (so negative offsets name sites near the wrap seam).  Natural
    units: hbar = c = 1 and the time step equals the spacing.
    """

    sites: int
    spacing: float = 1.0

    def __post_init__(self):
        if self.sites < 2:
            raise ValueError(f"lattice needs at least 2 sites, got {self.sites}")
        if not self.spacing > 0:
            raise ValueError(f"lattice spacing must be positive, got {self.spacing}")

    @classmethod
    def from_scale(cls, sites: int, scale: float) -> "Lattice":
        """Lattice with spacing = time step = 1/scale."""
        return cls(sites, 1.0 / scale)

    @property
    def dt(self) -> float:
        """Time step; equal to the spacing in natural units."""
        return self.spacing

    def site_index(self, n: int) -> int:
        """Storage index of the site with (possibly negative) offset n."""
        return n % self.sites

    @property
    def positions(self) -> np.ndarray:
        """Coordinates n * spacing in storage order."""
        return np.arange(self.sites) * self.spacing

    @property
    def signed_offsets(self) -> np.ndarray:
        """Site offsets wrapped to the symmetric window around the origin."""
        n = self.sites
        offsets = np.arange(n)
        offsets[offsets >= n - n // 2] -= n
        return offsets

    def cyclic_site_distance(self) -> np.ndarray:
        """Distance from the origin site, in sites, the short way around."""
        return np.abs(self.signed_offsets)


@dataclass
class WalkState:
    """Normalized pure state on a coin ⊗ position Hilbert space."""

    coin_dim: int
    lattice: Lattice
    amplitudes: np.ndarray = field(repr=False)

    def __init__(self, coin_dim: int, lattice: Lattice, amplitudes):
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1).copy()
        if amps.size != coin_dim * lattice.sites:
            raise ValueError(
                f"amplitude vector has length {amps.size}, "
                f"expected coin_dim*N = {coin_dim * lattice.sites}"
            )
        nrm = np.linalg.norm(amps)
        if nrm < 1e-14:
            raise ValueError("cannot normalize a zero state vector")
        if abs(nrm - 1.0) > NORM_TOL:
            amps /= nrm
        self.coin_dim = coin_dim
        self.lattice = lattice
        self.amplitudes = amps

    @property
    def grid(self) -> np.ndarray:
        """(coin_dim, N) view of the amplitude vector."""
        return self.amplitudes.reshape(self.coin_dim, self.lattice.sites)

    def copy(self) -> "WalkState":
        return WalkState(self.coin_dim, self.lattice, self.amplitudes)


@dataclass
class TwoParticleState:
    """Normalized pure state of two walkers sharing one lattice.

    Index layout: ((c1 * d2 + c2) * N + x1) * N + x2.
    """

    coin_dims: tuple
    lattice: Lattice
    amplitudes: np.ndarray = field(repr=False)

    def __init__(self, coin_dims, lattice: Lattice, amplitudes):
        d1, d2 = coin_dims
        n = lattice.sites
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1).copy()
        if amps.size != d1 * d2 * n * n:
            raise ValueError(
                f"amplitude vector has length {amps.size}, expected {d1 * d2 * n * n}"
            )
        nrm = np.linalg.norm(amps)
        if nrm < 1e-14:
            raise ValueError("cannot normalize a zero state vector")
        if abs(nrm - 1.0) > NORM_TOL:
            amps /= nrm
        self.coin_dims = (d1, d2)
        self.lattice = lattice
        self.amplitudes = amps

    @property
    def grid(self) -> np.ndarray:
        """(d1*d2, N, N) view of the amplitude vector."""
        d1, d2 = self.coin_dims
        n = self.lattice.sites
        return self.amplitudes.reshape(d1 * d2, n, n)

    def copy(self) -> "TwoParticleState":
        return TwoParticleState(self.coin_dims, self.lattice, self.amplitudes)


def make_basis_state(coin_index: int, site: int, coin_dim: int, lattice: Lattice) -> WalkState:
    """Product basis state |coin_index⟩ ⊗ |site⟩."""
    if not 0 <= coin_index < coin_dim:
        raise ValueError(f"coin index {coin_index} outside [0, {coin_dim})")
    if not 0 <= site < lattice.sites:
        raise ValueError(f"site index {site} outside [0, {lattice.sites})")
    amps = np.zeros(coin_dim * lattice.sites, dtype=np.complex128)
    amps[coin_index * lattice.sites + site] = 1.0
    return WalkState(coin_dim, lattice, amps)


def superpose(terms) -> WalkState:
    """Normalized linear combination of (weight, WalkState) terms."""
    terms = list(terms)
    if not terms:
        raise ValueError("superpose needs at least one term")
    _, first = terms[0]
    acc = np.zeros_like(first.amplitudes)
    for weight, state in terms:
        if state.coin_dim != first.coin_dim or state.lattice != first.lattice:
            raise ValueError("superpose terms must share coin dimension and lattice")
        acc += complex(weight) * state.amplitudes
    if np.linalg.norm(acc) < 1e-14:
        raise ValueError("superposition is the zero vector")
    return WalkState(first.coin_dim, first.lattice, acc)


def norm(state) -> float:
    """ℓ2 norm of the amplitude vector."""
    return float(np.linalg.norm(np.asarray(state.amplitudes)))
