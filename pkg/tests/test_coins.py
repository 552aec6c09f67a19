import numpy as np
import pytest
from scipy.linalg import expm

from coinwalk.coins import (PAULI, CoinAngles, CoinSchedule, NonabelianCoinSpec,
                            block_direct_sum, coin_field, fg_pair, nonabelian_coin,
                            u2_from_angles)
from coinwalk.scenarios import static_schedule


def test_identity_angles():
    assert np.allclose(u2_from_angles(CoinAngles()), np.eye(2))


def test_quarter_rotation_components():
    u = u2_from_angles(CoinAngles(0, np.pi / 4, 0, 0))
    assert abs(u[0, 0] - np.cos(np.pi / 4)) < 1e-15
    assert abs(u[0, 1] - (-1j * np.sin(np.pi / 4))) < 1e-15


def test_half_pi_is_minus_i_sigma1():
    u = u2_from_angles(CoinAngles(0, np.pi / 2, 0, 0))
    assert np.allclose(u, -1j * PAULI[1], atol=1e-15)


def test_matches_matrix_exponential():
    rng = np.random.default_rng(2)
    for _ in range(20):
        t = rng.uniform(-2, 2, 4)
        u = u2_from_angles(CoinAngles(*t))
        gen = sum(t[q] * PAULI[q] for q in range(4))
        assert np.max(np.abs(u - expm(-1j * gen))) < 1e-13


def test_unitarity_and_fg_identity_sweep():
    rng = np.random.default_rng(3)
    for _ in range(50):
        t = rng.uniform(-4, 4, 3)
        f, g = fg_pair(*t)
        assert abs(abs(f) ** 2 + abs(g) ** 2 - 1.0) < 1e-14
        u = u2_from_angles(CoinAngles(rng.uniform(-4, 4), *t))
        assert np.max(np.abs(u.conj().T @ u - np.eye(2))) < 1e-12


def test_small_angle_limit_is_smooth():
    f, g = fg_pair(0.0, 0.0, 0.0)
    assert f == 1.0 and g == 0.0
    f, g = fg_pair(1e-10, 0.0, 0.0)
    assert abs(g + 1e-10j) < 1e-20


def test_homogeneous_field_same_block_everywhere():
    sched = CoinSchedule.constant(theta2=(0, np.pi / 4, 0, 0))
    x = np.linspace(0, 3, 7)
    cf = coin_field(sched, 2, x, 0.0, 0.0)
    assert np.ptp(np.abs(cf.u00)) < 1e-15
    assert np.allclose(cf.u00, np.cos(np.pi / 4))


def test_static_metric_field_values():
    # first-substep angle of the static background, including its dt rate
    sched = static_schedule(False, offset_sites=5, spacing=0.004)
    x = np.array([0.1])
    dt = 0.004
    t0, t1, _, _ = sched.angles_at(1, x, 0.0, dt)
    u = x[0] + 5 * 0.004
    expected = 0.5 * np.arccos(u) + (dt / 2) / np.sqrt(1 - u ** 2)
    assert abs(t1[0] - expected) < 1e-15


def test_zero_schedule_gives_identity_field():
    sched = CoinSchedule()
    cf = coin_field(sched, 1, np.arange(5.0), 1.0, 0.0)
    assert np.allclose(cf.u00, 1.0) and np.allclose(cf.u01, 0.0)


def test_field_requires_nonnegative_dt():
    with pytest.raises(ValueError):
        coin_field(CoinSchedule(), 1, np.arange(3.0), 0.0, -0.1)


def test_block_direct_sum_identity():
    assert np.allclose(block_direct_sum([np.eye(2)] * 3), np.eye(6))


def test_block_direct_sum_sector_structure():
    thetas = (0.001, 0.00615654, 0.0664688)
    blocks = [u2_from_angles(CoinAngles(0, th, 0, 0)) for th in thetas]
    c2 = block_direct_sum(blocks)
    for j, th in enumerate(thetas):
        sub = c2[2 * j:2 * j + 2, 2 * j:2 * j + 2]
        assert abs(sub[0, 0] - np.cos(th)) < 1e-15
        assert abs(sub[0, 1] + 1j * np.sin(th)) < 1e-15
    off = c2.copy()
    for j in range(3):
        off[2 * j:2 * j + 2, 2 * j:2 * j + 2] = 0
    assert np.max(np.abs(off)) == 0.0


def test_block_direct_sum_rejects_nonunitary():
    with pytest.raises(ValueError, match="unitary"):
        block_direct_sum([np.eye(2), 2 * np.eye(2)])


def test_homogeneous_field_commutes_with_translation():
    sched = CoinSchedule.constant(theta1=(0.2, 0.5, 0.1, -0.3))
    n = 16
    x = np.arange(n, dtype=float)
    cf = coin_field(sched, 1, x, 0.0, 0.0)
    coin = np.zeros((2 * n, 2 * n), complex)
    idx = np.arange(n)
    coin[idx, idx] = cf.u00
    coin[idx, n + idx] = cf.u01
    coin[n + idx, idx] = cf.u10
    coin[n + idx, n + idx] = cf.u11
    shift = np.kron(np.eye(2), np.roll(np.eye(n), 1, axis=0))
    assert np.max(np.abs(shift @ coin - coin @ shift)) < 1e-14


def test_nonabelian_reduces_at_dt_zero():
    sched = CoinSchedule.constant(theta1=(0.1, 0.4, 0, 0))
    spec = NonabelianCoinSpec(gauge_dim=2,
                              omega={(1, 1): lambda x, t: 0.5},
                              capital_omega={(1, 2): lambda x, t: -0.2})
    u = nonabelian_coin(sched, spec, 1, 0.0, 0.0, 0.0)
    expected = np.kron(u2_from_angles(CoinAngles(0.1, 0.4, 0, 0)), np.eye(2))
    assert np.max(np.abs(u - expected)) < 1e-15


def test_nonabelian_abelian_limit_phase():
    spec = NonabelianCoinSpec(gauge_dim=1, omega={(1, 0): lambda x, t: 0.3},
                              capital_omega={(1, 0): lambda x, t: 0.3})
    u = nonabelian_coin(CoinSchedule(), spec, 1, 0.0, 0.0, 0.01)
    assert np.allclose(u, np.exp(-1j * 0.01 * 0.3) * np.eye(2))


def test_nonabelian_equal_sectors_rotate_identically():
    fn = lambda x, t: 0.4  # noqa: E731
    spec = NonabelianCoinSpec(gauge_dim=2, omega={(2, 1): fn},
                              capital_omega={(2, 1): fn})
    u = nonabelian_coin(CoinSchedule(), spec, 2, 0.0, 0.0, 0.05)
    gauge = expm(-1j * 0.05 * 0.4 * PAULI[1])
    assert np.max(np.abs(u - np.kron(np.eye(2), gauge))) < 1e-13
    assert np.max(np.abs(u.conj().T @ u - np.eye(4))) < 1e-12


def test_nonabelian_rejects_large_probe():
    spec = NonabelianCoinSpec(gauge_dim=2, omega={(1, 1): lambda x, t: 5.0})
    with pytest.raises(ValueError, match="0.1"):
        nonabelian_coin(CoinSchedule(), spec, 1, 0.0, 0.0, 0.05)


def test_generator_validation():
    with pytest.raises(ValueError, match="identity"):
        NonabelianCoinSpec(gauge_dim=2,
                           generators=(PAULI[1], PAULI[1], PAULI[2], PAULI[3]))
    with pytest.raises(ValueError, match="Hermitian"):
        NonabelianCoinSpec(gauge_dim=2,
                           generators=(PAULI[0], PAULI[1] + 1j * np.eye(2),
                                       PAULI[2], PAULI[3]))


def test_schedule_rejects_bad_keys():
    with pytest.raises(ValueError):
        CoinSchedule(theta={(3, 1): lambda x, t: x})
    with pytest.raises(ValueError):
        CoinSchedule(theta={(1, 4): lambda x, t: x})
