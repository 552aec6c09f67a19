import numpy as np
import pytest

from coinwalk.state import Lattice, TwoParticleState, WalkState, make_basis_state, norm, superpose


def test_basis_state_spin_up_origin():
    lat = Lattice(8)
    st = make_basis_state(0, 0, 2, lat)
    assert st.grid[0, 0] == 1.0
    assert np.count_nonzero(st.amplitudes) == 1
    assert norm(st) == 1.0


def test_basis_state_spin_down_site7():
    lat = Lattice(8)
    st = make_basis_state(1, 7, 2, lat)
    assert st.amplitudes[1 * 8 + 7] == 1.0


def test_basis_state_six_dim_coin():
    lat = Lattice(16)
    st = make_basis_state(5, 3, 6, lat)
    assert st.grid[5, 3] == 1.0
    assert st.coin_dim == 6


def test_basis_state_rejects_out_of_range():
    lat = Lattice(8)
    with pytest.raises(ValueError, match=r"\[0, 2\)"):
        make_basis_state(2, 0, 2, lat)
    with pytest.raises(ValueError, match=r"\[0, 8\)"):
        make_basis_state(0, 8, 2, lat)


def test_superpose_equal_weights():
    lat = Lattice(8)
    up = make_basis_state(0, 0, 2, lat)
    down = make_basis_state(1, 0, 2, lat)
    st = superpose([(1, up), (1, down)])
    assert np.allclose(st.grid[:, 0], [1 / np.sqrt(2), 1 / np.sqrt(2)])


def test_superpose_complex_weight():
    lat = Lattice(8)
    up = make_basis_state(0, 0, 2, lat)
    down = make_basis_state(1, 0, 2, lat)
    st = superpose([(1, up), (1j, down)])
    assert np.allclose(st.grid[:, 0], [1 / np.sqrt(2), 1j / np.sqrt(2)])


def test_superpose_delocalized_pair():
    lat = Lattice(32)
    terms = []
    for site in (lat.site_index(-9), lat.site_index(9)):
        terms.append((1, make_basis_state(0, site, 2, lat)))
        terms.append((1j, make_basis_state(1, site, 2, lat)))
    st = superpose(terms)
    assert abs(st.grid[0, 9] - 0.5) < 1e-15
    assert abs(st.grid[1, 23] - 0.5j) < 1e-15


def test_superpose_rejects_zero_and_mismatch():
    lat = Lattice(8)
    up = make_basis_state(0, 0, 2, lat)
    with pytest.raises(ValueError, match="zero"):
        superpose([(1, up), (-1, up)])
    other = make_basis_state(0, 0, 2, Lattice(16))
    with pytest.raises(ValueError, match="share"):
        superpose([(1, up), (1, other)])


def test_norm_zero_vector_rejected():
    lat = Lattice(4)
    with pytest.raises(ValueError):
        WalkState(2, lat, np.zeros(8))


def test_index_round_trip():
    lat = Lattice(11)
    for coin in range(3):
        for site in range(11):
            flat = coin * 11 + site
            assert (flat // 11, flat % 11) == (coin, site)


def test_site_index_wraps():
    lat = Lattice(10)
    assert lat.site_index(-1) == 9
    assert lat.site_index(10) == 0


def test_positions_and_signed_offsets():
    lat = Lattice(4, 0.5)
    assert np.allclose(lat.positions, [0.0, 0.5, 1.0, 1.5])
    assert list(lat.signed_offsets) == [0, 1, -2, -1]


def test_lattice_validation():
    with pytest.raises(ValueError):
        Lattice(1)
    with pytest.raises(ValueError):
        Lattice(4, -1.0)


def test_two_particle_layout():
    lat = Lattice(3)
    amps = np.zeros(4 * 9)
    amps[((1 * 2 + 0) * 3 + 2) * 3 + 1] = 1.0  # |down up> at (x1=2, x2=1)
    st = TwoParticleState((2, 2), lat, amps)
    assert st.grid[2, 2, 1] == 1.0


def test_walkstate_renormalizes_drift():
    lat = Lattice(4)
    amps = np.zeros(8, complex)
    amps[0] = 1.0 + 1e-6
    st = WalkState(2, lat, amps)
    assert abs(norm(st) - 1.0) < 1e-15
