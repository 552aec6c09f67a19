"""Three-flavor oscillation on a six-dimensional coin.

Each mass eigenstate occupies its own two-dimensional sector of the coin and
evolves under an independent split-step walk whose second-coin angle sets
the mass.  Flavor states are PMNS combinations of the positive-band sector
eigenvectors at a common momentum.  Natural units; momenta are quoted as the
dimensionless k a (radians).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import ceil

import numpy as np

from .coins import CoinAngles
from .spectral import hk_closed_form
from .state import Lattice, WalkState

FLAVORS = {"e": 0, "mu": 1, "tau": 2}

# phase (E_j - E_l) t / hbar in radians for dm2 [eV^2], L [km], E [GeV]
PHASE_PER_EV2_KM_OVER_GEV = 1.0e3 / (2.0e9 * 1.9732698044e-7)

HBAR_EV_S = 6.582119569e-16
HBAR_C_EV_M = 1.9732698044e-7

SMALL_ANGLE_LIMIT = 0.3
FEASIBLE_STEP_LIMIT = 1e9


@dataclass(frozen=True)
class PmnsParams:
    """Mixing angles and CP phases of the 3x3 flavor-mass mixing matrix."""

    theta12: float
    theta13: float
    theta23: float
    delta: float = 0.0
    alpha1: float = 0.0
    alpha2: float = 0.0


# representative global-fit values (normal ordering); the thesis prints only
# the squared-mass splittings, so the angles are configurable
DEFAULT_PMNS = PmnsParams(theta12=0.5843, theta13=0.1483, theta23=0.7382)


@dataclass(frozen=True)
class MassSpectrum:
    """Squared-mass splittings (eV^2) and beam energy (GeV), normal ordering."""

    dm2_21: float
    dm2_31: float
    dm2_32: float
    energy_gev: float

    def __post_init__(self):
        expected = self.dm2_31 - self.dm2_21
        if abs(self.dm2_32 - expected) > 1e-6 * abs(expected):
            raise ValueError(
                f"dm2_32 = {self.dm2_32} inconsistent with dm2_31 - dm2_21 = {expected}")


# splittings used for all oscillation profiles in this package
REFERENCE_SPECTRUM = MassSpectrum(dm2_21=7.50e-5, dm2_31=2.457e-3,
                                  dm2_32=2.382e-3, energy_gev=1.0)


@dataclass(frozen=True)
class WalkCalibration:
    """Sector angles, common momentum, and profile lengths of a neutrino walk."""

    thetas: tuple
    ktilde: float
    steps_short: int
    steps_long: int

    def __post_init__(self):
        if self.ktilde < 10.0 * max(self.thetas):
            warnings.warn(
                f"ktilde = {self.ktilde} is not >> max sector angle "
                f"{max(self.thetas)}; the ultra-relativistic reduction is "
                "only qualitative here", RuntimeWarning, stacklevel=2)


with warnings.catch_warnings():
    warnings.simplefilter("ignore", RuntimeWarning)
    # angle triple used for the simulated oscillation profiles
    CALIBRATED = WalkCalibration(thetas=(0.001, 0.00615654, 0.0664688),
                                 ktilde=0.01, steps_short=450, steps_long=4500)


def pmns_matrix(params: PmnsParams) -> np.ndarray:
    """Four-factor product R23 * D13(delta) * R12 * diag(Majorana phases)."""
    c12, s12 = np.cos(params.theta12), np.sin(params.theta12)
    c13, s13 = np.cos(params.theta13), np.sin(params.theta13)
    c23, s23 = np.cos(params.theta23), np.sin(params.theta23)
    r23 = np.array([[1, 0, 0], [0, c23, s23], [0, -s23, c23]], dtype=np.complex128)
    d13 = np.array([[c13, 0, s13 * np.exp(-1j * params.delta)],
                    [0, 1, 0],
                    [-s13 * np.exp(1j * params.delta), 0, c13]], dtype=np.complex128)
    r12 = np.array([[c12, s12, 0], [-s12, c12, 0], [0, 0, 1]], dtype=np.complex128)
    maj = np.diag([np.exp(1j * params.alpha1 / 2.0),
                   np.exp(1j * params.alpha2 / 2.0), 1.0])
    return r23 @ d13 @ r12 @ maj


def sector_block(theta: float, ktilde: float) -> np.ndarray:
    """2x2 momentum block of one mass sector's split-step walk."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c * np.exp(-1j * ktilde), -1j * s],
                     [-1j * s, c * np.exp(1j * ktilde)]], dtype=np.complex128)


def neutrino_block(calibration: WalkCalibration) -> np.ndarray:
    """6x6 momentum block: direct sum of the three sector blocks."""
    out = np.zeros((6, 6), dtype=np.complex128)
    for j, theta in enumerate(calibration.thetas):
        out[2 * j:2 * j + 2, 2 * j:2 * j + 2] = sector_block(theta, calibration.ktilde)
    return out


def sector_quasienergy(theta: float, ktilde: float) -> float:
    """Dimensionless quasienergy arccos(cos theta cos ktilde) of one sector."""
    return float(np.arccos(np.clip(np.cos(theta) * np.cos(ktilde), -1.0, 1.0)))


def band_amplitudes(theta: float, ktilde: float):
    """(f, g) coin components of the positive-band eigenvector at this momentum."""
    mode = hk_closed_form("ssdqw", (CoinAngles(), CoinAngles(0.0, theta, 0.0, 0.0)),
                          ktilde, dt=1.0, a=1.0)
    return complex(mode.phi_plus[0]), complex(mode.phi_plus[1])


def mass_eigenstate(j: int, ktilde: float, calibration: WalkCalibration) -> np.ndarray:
    """Six-component coin amplitudes of mass eigenstate j in {1, 2, 3}."""
    if j not in (1, 2, 3):
        raise ValueError(f"mass index {j} outside {{1, 2, 3}}")
    f, g = band_amplitudes(calibration.thetas[j - 1], ktilde)
    vec = np.zeros(6, dtype=np.complex128)
    vec[2 * (j - 1)] = f
    vec[2 * (j - 1) + 1] = g
    return vec


def _flavor_index(alpha) -> int:
    return FLAVORS[alpha] if isinstance(alpha, str) else int(alpha)


def flavor_state(alpha, ktilde: float, calibration: WalkCalibration,
                 pmns: np.ndarray) -> np.ndarray:
    """|nu_alpha(k)> = sum_j conj(U[alpha, j]) |nu_mj(k)> on the six-dim coin."""
    a = _flavor_index(alpha)
    vec = np.zeros(6, dtype=np.complex128)
    for j in (1, 2, 3):
        vec += np.conj(pmns[a, j - 1]) * mass_eigenstate(j, ktilde, calibration)
    return vec


def walk_oscillation_series(alpha, calibration: WalkCalibration, pmns: np.ndarray,
                            n_steps: int) -> np.ndarray:
    """(n_steps + 1, 3) flavor probabilities from repeated 6x6 block application."""
    block = neutrino_block(calibration)
    flavors = np.stack([flavor_state(beta, calibration.ktilde, calibration, pmns)
                        for beta in range(3)])
    psi = flavor_state(alpha, calibration.ktilde, calibration, pmns)
    out = np.empty((n_steps + 1, 3))
    for step in range(n_steps + 1):
        out[step] = np.abs(flavors.conj() @ psi) ** 2
        psi = block @ psi
    return out


def walk_transition_probability(alpha, beta, n_steps: int,
                                calibration: WalkCalibration,
                                pmns: np.ndarray) -> float:
    """|<nu_beta| U^n |nu_alpha>|^2 at the calibration momentum."""
    series = walk_oscillation_series(alpha, calibration, pmns, n_steps)
    return float(series[n_steps, _flavor_index(beta)])


def analytic_transition_probability(alpha, beta, pmns: np.ndarray, *,
                                    phases=None, energies=None, t: float = None,
                                    dm2=None, l_over_e_km_gev: float = None) -> float:
    """P(alpha -> beta) = |sum_j conj(U[a,j]) e^{-i phi_j} U[b,j]|^2.

    Phases can be given directly, as energies with a common time, or through
    the ultra-relativistic reduction phi_j = const * dm2_j1 * L/E.
    """
    a, b = _flavor_index(alpha), _flavor_index(beta)
    if phases is None:
        if energies is not None:
            phases = np.asarray(energies, dtype=float) * float(t)
        elif dm2 is not None:
            phases = PHASE_PER_EV2_KM_OVER_GEV * np.asarray(dm2, dtype=float) \
                * float(l_over_e_km_gev)
        else:
            raise ValueError("need phases, energies + t, or dm2 + l_over_e_km_gev")
    amp = np.sum(np.conj(pmns[a]) * np.exp(-1j * np.asarray(phases)) * pmns[b])
    return float(abs(amp) ** 2)


def analytic_oscillation_series(alpha, calibration: WalkCalibration,
                                pmns: np.ndarray, n_steps: int) -> np.ndarray:
    """Oscillation series from the exact sector quasienergies (phase formula)."""
    energies = np.array([sector_quasienergy(th, calibration.ktilde)
                         for th in calibration.thetas])
    out = np.empty((n_steps + 1, 3))
    for step in range(n_steps + 1):
        for beta in range(3):
            out[step, beta] = analytic_transition_probability(
                alpha, beta, pmns, phases=energies * step)
    return out


def map_experiment_to_walk(spectrum: MassSpectrum, target_steps: int,
                           baseline_km: float = None, ktilde: float = 0.01,
                           theta1: float = 1e-3) -> WalkCalibration:
    """Zoomed walk calibration whose pairwise phases match an experiment.

    The first-order phase of pair (j, l) after n steps,
    n (theta_j^2 - theta_l^2) / (2 ktilde), is matched to the physical
    dm2_jl L / (2 E) phase at ``baseline_km`` (default: one full period of
    the slow 2-1 oscillation).  All pairs share one zoom factor, so the
    ratio identity (theta3^2 - theta2^2)/(theta2^2 - theta1^2) = dm2_32/dm2_21
    holds by construction.

    Raises if the angles leave the small-angle validity window, reporting
    the minimal feasible step count.
    """
    if target_steps < 1:
        raise ValueError("target_steps must be >= 1")
    if baseline_km is None:
        baseline_km = 2.0 * np.pi * spectrum.energy_gev / (
            PHASE_PER_EV2_KM_OVER_GEV * spectrum.dm2_21)
    zoom = (2.0 * ktilde * PHASE_PER_EV2_KM_OVER_GEV * baseline_km
            / (spectrum.energy_gev * target_steps))
    theta2 = np.sqrt(theta1 ** 2 + zoom * spectrum.dm2_21)
    theta3 = np.sqrt(theta1 ** 2 + zoom * spectrum.dm2_31)
    if theta3 >= SMALL_ANGLE_LIMIT:
        zoom_max = (SMALL_ANGLE_LIMIT ** 2 - theta1 ** 2) / spectrum.dm2_31
        n_min = ceil(2.0 * ktilde * PHASE_PER_EV2_KM_OVER_GEV * baseline_km
                     / (spectrum.energy_gev * zoom_max))
        raise ValueError(
            f"sector angle {theta3:.3g} exceeds the small-angle limit "
            f"{SMALL_ANGLE_LIMIT}; needs at least {n_min} steps")
    return WalkCalibration(thetas=(theta1, float(theta2), float(theta3)),
                           ktilde=ktilde, steps_short=target_steps,
                           steps_long=10 * target_steps)


@dataclass(frozen=True)
class StepBudget:
    """Walk-step requirements for physical lattice scales."""

    ktilde: float
    thetas: tuple
    steps_short: float
    steps_long: float
    feasible: bool


def required_steps(spectrum: MassSpectrum, delta_t_s: float,
                   spacing_m: float = None) -> StepBudget:
    """Step counts to reproduce the oscillation profiles at a physical scale.

    Uses theta_j = m_j c^2 dt / hbar with m_1 = 0 and ktilde = E a / (hbar c);
    the reported counts cover the same total pair phases as the 450- and
    4500-step zoomed profiles.  Counts above 1e9 are flagged infeasible.
    """
    if spacing_m is None:
        spacing_m = delta_t_s * 2.99792458e8
    energy_ev = spectrum.energy_gev * 1e9
    ktilde = energy_ev * spacing_m / HBAR_C_EV_M
    scale = delta_t_s / HBAR_EV_S  # rad per eV of mass energy
    thetas = (0.0,
              np.sqrt(spectrum.dm2_21) * scale,
              np.sqrt(spectrum.dm2_31) * scale)
    per_step_32 = (thetas[2] ** 2 - thetas[1] ** 2) / (2.0 * ktilde)
    per_step_21 = (thetas[1] ** 2 - thetas[0] ** 2) / (2.0 * ktilde)
    ref = CALIBRATED
    target_32 = ref.steps_short * (
        sector_quasienergy(ref.thetas[2], ref.ktilde)
        - sector_quasienergy(ref.thetas[1], ref.ktilde))
    target_21 = ref.steps_long * (
        sector_quasienergy(ref.thetas[1], ref.ktilde)
        - sector_quasienergy(ref.thetas[0], ref.ktilde))
    steps_short = target_32 / per_step_32
    steps_long = target_21 / per_step_21
    return StepBudget(ktilde=float(ktilde), thetas=tuple(float(t) for t in thetas),
                      steps_short=float(steps_short), steps_long=float(steps_long),
                      feasible=max(steps_short, steps_long) <= FEASIBLE_STEP_LIMIT)


def lattice_for_mode_spacing(spacing_rad: float) -> Lattice:
    """Unit-spacing lattice whose momentum grid has the requested step."""
    return Lattice(int(round(2.0 * np.pi / spacing_rad)), 1.0)


def gaussian_flavor_state(alpha, k0_tilde: float, delta: float, eps: float,
                          pmns: np.ndarray, calibration: WalkCalibration,
                          lattice: Lattice) -> WalkState:
    """Flavor wavepacket sum_k p(k) |nu_alpha(k)> ⊗ |k> on the lattice.

    p(k) is a truncated Gaussian over grid momenta within eps (radians) of
    the central k0; ``delta`` controls its width.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    from .spectral import momentum_grid

    ktildes = momentum_grid(lattice) * lattice.spacing
    sel = np.abs(ktildes - k0_tilde) <= eps
    if not np.any(sel):
        raise ValueError(
            f"no grid momenta within {eps} rad of k0 = {k0_tilde} rad")
    ksel = ktildes[sel]
    exponents = -0.5 * delta * (ksel - k0_tilde) ** 2
    weights = np.exp(exponents - exponents.max())  # stable for any width
    weights = weights / np.linalg.norm(weights)
    coins = np.stack([flavor_state(alpha, kt, calibration, pmns) for kt in ksel])
    phases = np.exp(1j * np.outer(ksel / lattice.spacing, lattice.positions))
    amps = (weights[:, None] * coins).T @ phases / np.sqrt(lattice.sites)
    return WalkState(6, lattice, amps)


def oscillation_entropy_series(state: WalkState, calibration: WalkCalibration,
                               n_steps: int) -> np.ndarray:
    """Coin-position entanglement entropy per step of the six-sector walk."""
    from .engines import NeutrinoU6, evolve

    traj = evolve(state, NeutrinoU6(calibration.thetas), n_steps,
                  record=("entropy",), check_boundary=False)
    return traj.series["entropy"]
