import numpy as np
import pytest

from coinwalk.shifts import ShiftKind, apply_shift, shift
from coinwalk.state import Lattice, make_basis_state


def test_full_shift_moves_up_forward():
    lat = Lattice(4)
    st = make_basis_state(0, 0, 2, lat)
    shift(ShiftKind.FULL, 2, lat).apply(st)
    assert st.grid[0, 1] == 1.0


def test_half_minus_leaves_up_moves_down():
    lat = Lattice(6)
    up = make_basis_state(0, 3, 2, lat)
    apply_shift(ShiftKind.HALF_MINUS, up.grid)
    assert up.grid[0, 3] == 1.0
    down = make_basis_state(1, 3, 2, lat)
    apply_shift(ShiftKind.HALF_MINUS, down.grid)
    assert down.grid[1, 2] == 1.0


def test_two_particle_plus_on_up_down():
    lat = Lattice(5)
    grid = np.zeros((4, 5, 5), dtype=np.complex128)
    grid[1, 2, 3] = 1.0  # |up down> at (x1=2, x2=3)
    apply_shift(ShiftKind.TWO_PLUS, grid)
    assert grid[1, 3, 3] == 1.0


def test_half_shifts_compose_to_full_on_each_sector():
    lat = Lattice(8)
    for coin, displacement in ((0, 1), (1, -1)):
        st = make_basis_state(coin, 4, 2, lat)
        apply_shift(ShiftKind.HALF_MINUS, st.grid)
        apply_shift(ShiftKind.HALF_PLUS, st.grid)
        assert st.grid[coin, 4 + displacement] == 1.0


def test_sectored_shifts():
    lat = Lattice(4)
    grid = np.zeros((6, 4), dtype=np.complex128)
    grid[0, 1] = 1.0  # odd zeta sector moves under plus
    grid[3, 1] = 1.0  # even zeta sector moves under minus
    apply_shift(ShiftKind.SECTORED_PLUS, grid)
    assert grid[0, 2] == 1.0 and grid[3, 1] == 1.0
    apply_shift(ShiftKind.SECTORED_MINUS, grid)
    assert grid[0, 2] == 1.0 and grid[3, 0] == 1.0


def test_permutation_exact_unitarity():
    # every output index hit exactly once, amplitudes moved bitwise
    lat = Lattice(6)
    for kind in (ShiftKind.FULL, ShiftKind.HALF_PLUS, ShiftKind.HALF_MINUS):
        hits = np.zeros((2, 6), dtype=int)
        for coin in range(2):
            for site in range(6):
                grid = np.zeros((2, 6), dtype=np.complex128)
                grid[coin, site] = 1.0
                apply_shift(kind, grid)
                assert np.count_nonzero(grid) == 1
                assert np.unique(np.abs(grid[grid != 0])) == 1.0
                hits += (grid != 0)
        assert np.all(hits == 1)


def test_inverse_round_trip():
    lat = Lattice(7)
    rng = np.random.default_rng(0)
    for kind in (ShiftKind.FULL, ShiftKind.HALF_PLUS, ShiftKind.HALF_MINUS):
        grid = rng.normal(size=(2, 7)) + 1j * rng.normal(size=(2, 7))
        ref = grid.copy()
        apply_shift(kind, grid)
        apply_shift(kind, grid, inverse=True)
        assert np.array_equal(grid, ref)


def test_two_particle_factorizes():
    # TWO_PLUS acts as the one-particle half-plus on each factor
    grid = np.zeros((4, 3, 3), dtype=np.complex128)
    grid[0, 0, 0] = 1.0  # |up up>
    apply_shift(ShiftKind.TWO_PLUS, grid)
    assert grid[0, 1, 1] == 1.0
    apply_shift(ShiftKind.TWO_MINUS, grid)
    assert grid[0, 1, 1] == 1.0  # up-up is static under minus


def test_dimension_mismatch_rejected():
    lat = Lattice(4)
    with pytest.raises(ValueError, match="coin dimension"):
        shift(ShiftKind.FULL, 6, lat)
    with pytest.raises(ValueError, match="coin dimension"):
        shift(ShiftKind.SECTORED_PLUS, 2, lat)
