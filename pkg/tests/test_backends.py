"""Compiled and pure-NumPy kernels must agree exactly."""

import numpy as np
import pytest

from coinwalk import _kernels_py
from coinwalk.backend import kernels

compiled_only = pytest.mark.skipif(
    kernels.BACKEND_NAME != "compiled",
    reason="compiled extension not available; fallback already in use")


def random_grid(rng, shape):
    return (rng.normal(size=shape) + 1j * rng.normal(size=shape)).astype(np.complex128)


@compiled_only
def test_coin2_matches_python():
    rng = np.random.default_rng(41)
    a = random_grid(rng, (2, 257))
    b = a.copy()
    u = [random_grid(rng, 257) for _ in range(4)]
    kernels.coin2(a[0], a[1], *u)
    _kernels_py.coin2(b[0], b[1], *u)
    # compiled code may contract multiply-adds; agreement to strict float tol
    assert np.allclose(a, b, rtol=1e-15, atol=1e-15)


@compiled_only
def test_coin2_const_matches_python():
    rng = np.random.default_rng(42)
    a = random_grid(rng, (2, 64))
    b = a.copy()
    u = rng.normal(size=4) + 1j * rng.normal(size=4)
    kernels.coin2_const(a[0], a[1], *u)
    _kernels_py.coin2_const(b[0], b[1], *u)
    assert np.allclose(a, b, atol=1e-15)


@compiled_only
def test_roll_matches_python():
    rng = np.random.default_rng(43)
    for shift in (-3, -1, 0, 1, 5):
        a = random_grid(rng, 31)
        b = a.copy()
        kernels.roll(a, shift)
        _kernels_py.roll(b, shift)
        assert np.array_equal(a, b)


@compiled_only
def test_roll2d_matches_python():
    rng = np.random.default_rng(44)
    for shift in (-1, 0, 1, 2):
        for axis in (0, 1):
            a = random_grid(rng, (9, 7))
            b = a.copy()
            kernels.roll2d(a, shift, axis)
            _kernels_py.roll2d(b, shift, axis)
            assert np.array_equal(a, b)


@compiled_only
def test_two_coin_matches_python():
    rng = np.random.default_rng(45)
    a = random_grid(rng, (4, 6, 5))
    b = a.copy()
    lam = np.ascontiguousarray(rng.normal(size=(4, 6, 5)))
    kernels.two_coin(a, lam)
    _kernels_py.two_coin(b, lam)
    assert np.allclose(a, b, atol=1e-14)


@compiled_only
def test_full_walk_agrees_across_backends():
    from coinwalk.coins import CoinSchedule
    from coinwalk.engines import SSDQW
    from coinwalk.state import Lattice

    lat = Lattice(64, 0.1)
    sched = CoinSchedule(theta={(1, 1): lambda x, t: 0.2 * np.sin(x),
                                (2, 1): lambda x, t: 0.4 + 0.1 * x})
    rng = np.random.default_rng(46)
    grid_c = random_grid(rng, (2, 64))
    grid_c /= np.linalg.norm(grid_c)
    grid_p = grid_c.copy()
    engine = SSDQW(sched)
    import coinwalk.coins
    import coinwalk.engines
    import coinwalk.shifts
    import coinwalk.twoparticle

    consumers = (coinwalk.coins, coinwalk.engines, coinwalk.shifts,
                 coinwalk.twoparticle)
    for _ in range(25):
        engine.apply_step(grid_c, lat, 1)
    saved = [mod.kernels for mod in consumers]
    for mod in consumers:
        mod.kernels = _kernels_py
    try:
        for _ in range(25):
            engine.apply_step(grid_p, lat, 1)
    finally:
        for mod, kern in zip(consumers, saved):
            mod.kernels = kern
    assert np.allclose(grid_c, grid_p, atol=1e-13)
