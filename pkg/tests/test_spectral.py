import numpy as np
import pytest

from coinwalk.coins import PAULI, CoinAngles
from coinwalk.spectral import (continuum_deviation, dca_block, dqw_block,
                               hamiltonian_from_unitary, hk_closed_form,
                               momentum_grid, quasienergy, ssdqw_block,
                               zbw_frequency)
from coinwalk.state import Lattice


def test_momentum_grid_small():
    ks = momentum_grid(Lattice(4, 1.0))
    assert np.allclose(sorted(ks), [-np.pi, -np.pi / 2, 0.0, np.pi / 2])


def test_momentum_grid_contains_zero():
    for n in (3, 4, 5, 64):
        assert 0.0 in momentum_grid(Lattice(n, 1.0))


def test_grid_diagonalizes_translation():
    lat = Lattice(64, 1.0)
    n = lat.sites
    ks = momentum_grid(lat)
    xs = lat.positions
    fourier = np.exp(-1j * np.outer(ks, xs)) / np.sqrt(n)
    translation = np.roll(np.eye(n), 1, axis=0)
    diag = fourier @ translation @ fourier.conj().T
    off = diag - np.diag(np.diag(diag))
    assert np.max(np.abs(off)) < 1e-12
    assert np.max(np.abs(np.diag(diag) - np.exp(-1j * ks * lat.spacing))) < 1e-12


def test_dqw_massless_linear_dispersion():
    for k in (0.01, 0.2, -0.4):
        mode = hk_closed_form("dqw", CoinAngles(), k)
        assert abs(mode.energy - abs(k)) < 1e-12
        assert np.max(np.abs(mode.hamiltonian - k * PAULI[3])) < 1e-12


def test_dca_quasienergy_closed_form():
    eta1, eta2 = np.cos(0.4), np.sin(0.4)
    for k in (0.0, 0.3, 1.2):
        expected = np.arccos(eta1 * np.cos(k))
        assert abs(quasienergy("dca", (eta1, eta2), k) - expected) < 1e-14


def test_ssdqw_equals_dca_mode_hamiltonians():
    rng = np.random.default_rng(4)
    for _ in range(20):
        theta = rng.uniform(0, 1.5)
        k = rng.uniform(-np.pi, np.pi)
        h1 = hk_closed_form("ssdqw", (CoinAngles(), CoinAngles(0, theta, 0, 0)),
                            k).hamiltonian
        h2 = hk_closed_form("dca", (np.cos(theta), np.sin(theta)), k).hamiltonian
        assert np.max(np.abs(h1 - h2)) < 1e-12


def test_generator_of_single_axis_rotation():
    theta = 0.7
    u = np.cos(theta) * np.eye(2) - 1j * np.sin(theta) * PAULI[1]
    h = hamiltonian_from_unitary(u, 0.1)
    assert np.max(np.abs(h - (theta / 0.1) * PAULI[1])) < 1e-12


def test_generator_of_identity_is_zero():
    assert np.max(np.abs(hamiltonian_from_unitary(np.eye(3), 1.0))) == 0.0


def test_generator_branch_guard():
    with pytest.raises(ValueError, match="branch"):
        hamiltonian_from_unitary(-np.eye(2), 1.0)


def test_log_oracle_matches_closed_forms_on_grid():
    lat = Lattice(64, 1.0)
    rng = np.random.default_rng(9)
    for _ in range(3):
        theta = rng.uniform(0.1, 1.4)
        a1 = CoinAngles(0, rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1))
        a2 = CoinAngles(0, rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1))
        for k in momentum_grid(lat):
            pairs = (
                (dca_block(np.cos(theta), np.sin(theta), k),
                 hk_closed_form("dca", (np.cos(theta), np.sin(theta)), k)),
                (ssdqw_block(a1, a2, k), hk_closed_form("ssdqw", (a1, a2), k)),
                (dqw_block(a1, k), hk_closed_form("dqw", a1, k)),
            )
            for block, mode in pairs:
                h = hamiltonian_from_unitary(block, 1.0)
                assert np.max(np.abs(h - mode.hamiltonian)) < 1e-10


def test_mode_system_invariants():
    rng = np.random.default_rng(12)
    for _ in range(20):
        theta = rng.uniform(0.05, 1.5)
        k = rng.uniform(-np.pi + 0.1, np.pi - 0.1)
        mode = hk_closed_form("ssdqw", (CoinAngles(), CoinAngles(0, theta, 0, 0)), k)
        h = mode.hamiltonian
        assert np.max(np.abs(h - h.conj().T)) < 1e-12
        vals = np.linalg.eigvalsh(h)
        assert abs(vals[0] + mode.energy) < 1e-10
        assert abs(vals[1] - mode.energy) < 1e-10
        # orthonormal band vectors, and eigenvector property under h
        assert abs(np.vdot(mode.phi_plus, mode.phi_plus) - 1) < 1e-12
        assert abs(np.vdot(mode.phi_minus, mode.phi_minus) - 1) < 1e-12
        assert abs(np.vdot(mode.phi_plus, mode.phi_minus)) < 1e-12
        assert np.max(np.abs(h @ mode.phi_plus - mode.energy * mode.phi_plus)) < 1e-10


def test_step_block_reconstruction():
    rng = np.random.default_rng(13)
    for _ in range(10):
        theta = rng.uniform(0.05, 1.5)
        k = rng.uniform(-np.pi + 0.1, np.pi - 0.1)
        mode = hk_closed_form("dca", (np.cos(theta), np.sin(theta)), k)
        block = dca_block(np.cos(theta), np.sin(theta), k)
        vals, vecs = np.linalg.eigh(mode.hamiltonian)
        rebuilt = vecs @ np.diag(np.exp(-1j * vals)) @ vecs.conj().T
        assert np.max(np.abs(rebuilt - block)) < 1e-10


def test_dqw_sigma0_shift_term():
    mode = hk_closed_form("dqw", CoinAngles(0.3, 0.2, 0, 0), 0.5)
    trace_shift = np.trace(mode.hamiltonian).real / 2.0
    assert abs(trace_shift - 0.3) < 1e-12


def test_quasienergy_monotone_on_half_zone():
    ks = np.linspace(0, np.pi, 100)
    es = [quasienergy("dqw", CoinAngles(0, 0.3, 0, 0), k) for k in ks]
    assert np.all(np.diff(es) > 0)


def test_quasienergy_zero_at_origin_massless():
    assert quasienergy("dqw", CoinAngles(), 0.0) == 0.0


def test_zbw_values():
    assert abs(zbw_frequency(np.pi / 2, 0.0) - 0.5) < 1e-15
    assert zbw_frequency(0.0, 0.0) == 0.0


def test_continuum_massless_deviation_vanishes():
    # exact up to the conditioning of arccos near its upper endpoint, which
    # floors the branch-unwrap error around 1e-10 in double precision
    report = continuum_deviation("dqw", 0.0, [100.0], 0.1)
    assert report.deviations[0] < 1e-9


def test_continuum_two_point_ratio():
    for kind in ("ssdqw", "dca", "dqw"):
        report = continuum_deviation(kind, 0.04, [100.0, 1000.0], 0.1)
        assert report.deviations[0] / report.deviations[1] >= 9.0
        assert report.fitted_order > 0.9


def test_continuum_dca_matches_ssdqw_limit():
    r1 = continuum_deviation("ssdqw", 0.04, [100.0], 0.1)
    r2 = continuum_deviation("dca", 0.04, [100.0], 0.1)
    assert abs(r1.deviations[0] - r2.deviations[0]) < 1e-12
