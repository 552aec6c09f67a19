import numpy as np
import pytest

from coinwalk.coins import CoinAngles, CoinSchedule
from coinwalk.engines import (DCA, DQW, SSDQW, ModifiedSSDQW, NeutrinoU6,
                              crw_distribution, dense_step_matrix, evolve,
                              step_dca, step_dqw, step_modified, step_neutrino,
                              step_ssdqw)
from coinwalk.observables import position_probability
from coinwalk.state import Lattice, WalkState, make_basis_state, norm, superpose


def plus_state(lattice, phase=1.0):
    up = make_basis_state(0, 0, 2, lattice)
    down = make_basis_state(1, 0, 2, lattice)
    return superpose([(1.0, up), (phase, down)])


def test_single_dqw_step_splits():
    lat = Lattice(8)
    out = step_dqw(make_basis_state(0, 0, 2, lat), CoinAngles(0, np.pi / 4, 0, 0))
    assert abs(out.grid[0, 1] - 1 / np.sqrt(2)) < 1e-15
    assert abs(out.grid[1, 7] + 1j / np.sqrt(2)) < 1e-15


def test_identity_coin_translates():
    lat = Lattice(8)
    out = step_dqw(make_basis_state(0, 3, 2, lat), CoinAngles())
    assert out.grid[0, 4] == 1.0


def test_dqw_parity_support_and_bimodality():
    lat = Lattice(256)
    traj = evolve(plus_state(lat), DQW(CoinAngles(0, np.pi / 4, 0, 0)), 100,
                  ("position_prob",))
    prob = traj.series["position_prob"][-1]
    odd = np.abs(lat.signed_offsets) % 2 == 1
    assert np.max(prob[odd]) == 0.0
    # ballistic humps near +-100/sqrt(2), depleted center (inverted bell)
    dist = np.abs(lat.signed_offsets)
    peak_zone = (dist > 55) & (dist < 85)
    assert prob[peak_zone].sum() > 0.5
    assert prob[dist < 10].sum() < 0.08


def test_ssdqw_matches_dca_distribution_and_operator():
    lat = Lattice(64)
    theta = np.pi / 4
    sched = CoinSchedule.constant(theta2=(0, theta, 0, 0))
    dist_ss = evolve(plus_state(lat), SSDQW(sched), 30,
                     ("position_prob",)).series["position_prob"][-1]
    dist_dca = evolve(plus_state(lat), DCA(np.cos(theta), np.sin(theta)), 30,
                      ("position_prob",)).series["position_prob"][-1]
    assert np.max(np.abs(dist_ss - dist_dca)) < 1e-14
    a = dense_step_matrix(SSDQW(sched), lat, 2)
    b = dense_step_matrix(DCA(np.cos(theta), np.sin(theta)), lat, 2)
    assert np.max(np.abs(a - b)) < 1e-13


def test_ssdqw_zero_angles_is_pure_shift_composition():
    lat = Lattice(6)
    st = make_basis_state(0, 2, 2, lat)
    out = step_ssdqw(st, CoinSchedule())
    assert out.grid[0, 3] == 1.0
    st = make_basis_state(1, 2, 2, lat)
    out = step_ssdqw(st, CoinSchedule())
    assert out.grid[1, 1] == 1.0


def test_ssdqw_dense_oracle_inhomogeneous():
    # kernel path equals the dense product of the four factor matrices
    lat = Lattice(16, 0.25)
    sched = CoinSchedule(
        theta={(1, 1): lambda x, t: 0.2 + 0.1 * np.sin(x),
               (2, 1): lambda x, t: 0.3 - 0.2 * x,
               (1, 0): lambda x, t: 0.05 * x},
        vartheta={(2, 1): lambda x, t: np.full_like(np.asarray(x, float), 0.4)})
    from coinwalk.coins import coin_field

    n = lat.sites
    x = lat.positions
    dt = lat.dt

    def dense_coin(j, dteval):
        cf = coin_field(sched, j, x, dt, dteval)
        mat = np.zeros((2 * n, 2 * n), complex)
        idx = np.arange(n)
        mat[idx, idx] = cf.u00
        mat[idx, n + idx] = cf.u01
        mat[n + idx, idx] = cf.u10
        mat[n + idx, n + idx] = cf.u11
        return mat

    fwd = np.roll(np.eye(n), 1, axis=0)
    s_plus = np.block([[fwd, np.zeros((n, n))], [np.zeros((n, n)), np.eye(n)]])
    s_minus = np.block([[np.eye(n), np.zeros((n, n))], [np.zeros((n, n)), fwd.T]])
    expected = s_plus @ dense_coin(2, dt) @ s_minus @ dense_coin(1, dt)
    actual = dense_step_matrix(SSDQW(sched), lat, 2, step_index=1)
    assert np.max(np.abs(actual - expected)) < 1e-13


def test_dca_massless_is_translation():
    lat = Lattice(8)
    out = step_dca(make_basis_state(1, 3, 2, lat), 1.0, 0.0)
    assert out.grid[1, 2] == 1.0


def test_dca_rejects_unnormalized():
    with pytest.raises(ValueError, match="eta"):
        DCA(1.0, 0.5)


def test_dca_fine_oscillation_interior_support():
    lat = Lattice(256)
    prob_dqw = evolve(plus_state(lat), DQW(CoinAngles(0, np.pi / 4, 0, 0)), 100,
                      ("position_prob",)).series["position_prob"][-1]
    prob_dca = evolve(plus_state(lat), DCA(*np.sqrt([0.5, 0.5])), 100,
                      ("position_prob",)).series["position_prob"][-1]
    dist = np.abs(lat.signed_offsets)
    interior = dist < 50
    # interior sites visible to both walks differ by more than a factor 2
    both_visible = interior & (prob_dca > 1e-4) & (prob_dqw > 1e-4)
    ratios = prob_dca[both_visible] / prob_dqw[both_visible]
    assert np.any((ratios > 2) | (ratios < 0.5))
    # the automaton populates odd interior sites the coined walk misses
    odd_interior = interior & (dist % 2 == 1)
    assert prob_dca[odd_interior].sum() > 0.01
    assert prob_dqw[odd_interior].max() == 0.0


def test_modified_reduces_to_ssdqw_for_vanishing_static_part():
    lat = Lattice(16, 0.1)
    sched = CoinSchedule(vartheta={(2, 1): lambda x, t: np.full_like(x, 0.3)})
    st = plus_state(lat, 1j)
    a = step_modified(st, sched)
    b = step_ssdqw(st, sched)
    assert np.max(np.abs(a.amplitudes - b.amplitudes)) < 1e-15


def test_modified_step_linear_in_dt():
    from coinwalk.scenarios import static_schedule

    def deviation(dt):
        n = int(round(0.8 / dt))
        lat = Lattice(n, dt)
        x = lat.positions
        prof = np.exp(-(x - 0.4) ** 2 / (2 * 0.1 ** 2)).astype(complex)
        st = WalkState(2, lat, np.stack([prof, 1j * prof]))
        grid = st.grid.copy()
        ModifiedSSDQW(static_schedule(False)).apply_step(grid, lat, 0.01 / dt)
        return np.linalg.norm(grid - st.grid)

    ratio = deviation(1e-2) / deviation(1e-3)
    assert 9 < ratio < 11


def test_flat_scenario_light_cone():
    from coinwalk.scenarios import builtin_scenario

    sc = builtin_scenario("flat")
    traj = evolve(sc.initial, sc.engine, 150, ("position_prob",))
    prob = traj.series["position_prob"][-1]
    offs = sc.lattice.signed_offsets
    # nearly massless on this scale: two ballistic rays at +-t
    assert prob[offs == 150].sum() > 0.49
    assert prob[offs == -150].sum() > 0.49
    assert prob[np.abs(offs) > 150].sum() < 1e-20


def test_neutrino_block_diagonal_sector_evolution():
    lat = Lattice(32)
    thetas = (0.3, 0.7, 1.1)
    for j in range(3):
        st6 = make_basis_state(2 * j, 5, 6, lat)
        out6 = step_neutrino(st6, thetas)
        sched = CoinSchedule.constant(theta2=(0, thetas[j], 0, 0))
        st2 = make_basis_state(0, 5, 2, lat)
        out2 = step_ssdqw(st2, sched)
        assert np.max(np.abs(out6.grid[2 * j:2 * j + 2] - out2.grid)) < 1e-15
        assert np.max(np.abs(np.delete(out6.grid, [2 * j, 2 * j + 1], axis=0))) == 0


def test_neutrino_requires_six_dim():
    lat = Lattice(8)
    with pytest.raises(ValueError, match="6"):
        step_neutrino(make_basis_state(0, 0, 2, lat), (0.1, 0.2, 0.3))


def test_evolve_zero_steps():
    lat = Lattice(8)
    traj = evolve(make_basis_state(0, 0, 2, lat), DQW(CoinAngles()), 0,
                  ("position_prob",))
    assert len(traj.series["position_prob"]) == 1


def test_evolve_rejects_unknown_observable():
    lat = Lattice(8)
    with pytest.raises(ValueError, match="unknown observable"):
        evolve(make_basis_state(0, 0, 2, lat), DQW(CoinAngles()), 1, ("bogus",))


def test_evolve_warns_on_wraparound():
    lat = Lattice(16)
    with pytest.warns(RuntimeWarning, match="boundary"):
        evolve(plus_state(lat), DQW(CoinAngles(0, np.pi / 4, 0, 0)), 12)


def test_norm_preserved_over_thousand_steps():
    lat = Lattice(64)
    sched = CoinSchedule(theta={(1, 1): lambda x, t: 0.2 * np.sin(x),
                                (2, 1): lambda x, t: 0.4 + 0.1 * np.cos(x)})
    traj = evolve(plus_state(lat, 1j), SSDQW(sched), 1000, ("norm",),
                  check_boundary=False)
    assert np.max(np.abs(traj.series["norm"] - 1.0)) < 1e-10


def test_crw_two_steps_binomial():
    lat = Lattice(8)
    p = crw_distribution(0.5, 2, 0, lat)
    assert abs(p[0] - 0.5) < 1e-15
    assert abs(p[2] - 0.25) < 1e-15
    assert abs(p[6] - 0.25) < 1e-15  # two steps left, wrapped


def test_crw_deterministic_drift():
    lat = Lattice(16)
    p = crw_distribution(1.0, 5, 0, lat)
    assert p[5] == 1.0


def test_crw_validation():
    lat = Lattice(8)
    with pytest.raises(ValueError):
        crw_distribution(1.5, 1, 0, lat)
    with pytest.raises(ValueError):
        crw_distribution(0.5, 1, 9, lat)


def test_crw_variance_and_ballistic_ratio():
    lat = Lattice(512)
    p = crw_distribution(0.5, 100, 0, lat)
    offs = lat.signed_offsets.astype(float)
    var = np.sum(p * offs ** 2)
    assert abs(var - 100.0) < 1e-9
    # stddev ratio quantum/classical grows like sqrt(t)
    engine = DQW(CoinAngles(0, np.pi / 4, 0, 0))
    traj = evolve(plus_state(lat, 1j), engine,
                  200, ("position_prob",), check_boundary=False)
    ts = np.arange(20, 201, 20)
    ratios = []
    for t in ts:
        q = traj.series["position_prob"][t]
        qvar = np.sum(q * offs ** 2)
        cvar = float(t)  # exact classical variance at p=1/2
        ratios.append(np.sqrt(qvar / cvar))
    slope = np.polyfit(np.log(ts), np.log(ratios), 1)[0]
    assert abs(slope - 0.5) < 0.05
