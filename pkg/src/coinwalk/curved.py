"""Metric/potential <-> coin-schedule maps and effective-Hamiltonian coefficients.

The modified split-step walk with angle fields restricted to the phase and
x-rotation components generates, at first order in the time step, a
Hamiltonian of the form

    H = sum_r sigma_r Xi_r(x, t) + c sum_r sigma_r Theta_r(x, t) p .

Closed forms for Theta_r and Xi_r are implemented for that angle family,
together with a numeric extraction from the step operator on a local patch
(the module's ground truth), the vielbein/gauge identifications in 1+1
dimensions, a 2+1 reduction at fixed transverse momentum, and the
gauge-sector coefficient fields of the 2N-dimensional extension.
Natural units with explicit c; the extraction ties a = c dt.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from .coins import PAULI, CoinSchedule, NonabelianCoinSpec, coin_field, fg_pair
from .state import Lattice

DERIV_STEP = 1e-5
RICHARDSON_TOL = 5e-2


def central_difference(fn: Callable, x, t: float, h: float = DERIV_STEP):
    """d fn / dx by the symmetric two-point rule."""
    x = np.asarray(x, dtype=float)
    return (fn(x + h, t) - fn(x - h, t)) / (2.0 * h)


def _antiderivative_from_zero(fn: Callable, x, t: float, nodes: int = 64):
    """integral_0^x fn(u, t) du by Gauss-Legendre, vectorized over x."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    pts, wts = np.polynomial.legendre.leggauss(nodes)
    half = 0.5 * x
    u = half[:, None] * (pts[None, :] + 1.0)  # maps [-1, 1] -> [0, x]
    vals = fn(u.reshape(-1), t).reshape(u.shape)
    out = half * (vals @ wts)
    return out if out.size > 1 else float(out[0])


@dataclass(frozen=True)
class VielbeinField1p1:
    """Diagonal frame field and abelian potentials of a 1+1 background.

    Callables of (x, t); the off-diagonal frame component vanishes by
    construction, and the mass is constant (fundamental-particle mode).
    """

    e00: Callable
    e11: Callable
    a0: Callable = None
    a1: Callable = None
    mass: float = 0.0


def schedule_from_metric_1p1(field: VielbeinField1p1, c: float = 1.0,
                             h_deriv: float = DERIV_STEP) -> CoinSchedule:
    """Coin schedule realizing a 1+1 frame field with abelian potentials.

    Identifications (hbar = 1):

        theta^1_1(x,t,0) = arccos(e11/e00) / 2,     theta^1_2 = -2 theta^1_1,
        vartheta^1_1 = -c d_x theta^1_1,            vartheta^1_2 = m / e00,
        vartheta^0_1 = -A_0,                         theta^0_2 = 0,
        d_x theta^0_1 = A_1 cos(2 theta^1_1) / c    (integrated from x = 0).

    Rejects wherever |e11/e00| > 1; callers must rescale such metrics.
    """

    def ratio(x, t):
        e0 = np.asarray(field.e00(x, t), dtype=float)
        e1 = np.asarray(field.e11(x, t), dtype=float)
        r = e1 / e0
        if np.any(np.abs(r) > 1.0 + 1e-12):
            raise ValueError(
                "|e11/e00| exceeds 1; rescale the frame field before mapping")
        return np.clip(r, -1.0, 1.0)

    def theta11(x, t):
        return 0.5 * np.arccos(ratio(x, t))

    def vartheta11(x, t):
        return -c * central_difference(theta11, x, t, h_deriv)

    def vartheta12(x, t):
        return field.mass / np.asarray(field.e00(x, t), dtype=float)

    theta = {(1, 1): theta11,
             (2, 1): lambda x, t: -2.0 * theta11(x, t)}
    vartheta = {(1, 1): vartheta11, (2, 1): vartheta12}
    if field.a0 is not None:
        vartheta[(1, 0)] = lambda x, t: -np.asarray(field.a0(x, t), dtype=float)
    if field.a1 is not None:
        def theta01(x, t):
            integrand = lambda u, s: (np.asarray(field.a1(u, s), dtype=float)
                                      * np.cos(2.0 * theta11(u, s)) / c)
            return _antiderivative_from_zero(integrand, x, t)

        theta[(1, 0)] = theta01
    return CoinSchedule(theta, vartheta)


@dataclass
class HamiltonianCoefficients:
    """Momentum-coupled (Theta) and potential-like (Xi) coefficient values.

    Xi entries are complex as derived; the anti-Hermitian parts pair with
    d_x Theta to make the assembled operator Hermitian.
    """

    theta1: float
    theta2: float
    theta3: float
    xi0: complex
    xi1: complex
    xi2: complex
    xi3: complex
    theta0: float = 0.0

    @property
    def theta_vector(self) -> np.ndarray:
        return np.array([self.theta1, self.theta2, self.theta3])

    @property
    def xi_vector(self) -> np.ndarray:
        return np.array([self.xi0, self.xi1, self.xi2, self.xi3])

    def max_difference(self, other: "HamiltonianCoefficients") -> float:
        return float(max(np.max(np.abs(self.theta_vector - other.theta_vector)),
                         np.max(np.abs(self.xi_vector - other.xi_vector)),
                         abs(self.theta0 - other.theta0)))


def _angle_evaluators(schedule: CoinSchedule):
    def angle(j, q):
        fn = schedule.theta.get((j, q))
        return (lambda x, t: np.asarray(fn(np.asarray(x, dtype=float), t),
                                        dtype=float)) if fn is not None \
            else (lambda x, t: np.zeros_like(np.asarray(x, dtype=float)))

    def rate(j, q):
        fn = schedule.vartheta.get((j, q))
        return (lambda x, t: float(np.asarray(fn(np.asarray([x], dtype=float), t))
                                   .reshape(-1)[0])) if fn is not None \
            else (lambda x, t: 0.0)

    return angle, rate


def closed_form_coefficients(schedule: CoinSchedule, x: float, t: float,
                             c: float = 1.0,
                             h_deriv: float = DERIV_STEP) -> HamiltonianCoefficients:
    """Printed closed forms for the phase + x-rotation angle family.

    Spatial derivatives of the angle fields are taken by central differences
    with spacing ``h_deriv``; angle components theta^2, theta^3 are rejected.
    """
    if not schedule.uses_only_phase_and_x_rotation():
        raise ValueError("closed forms cover only the theta^0, theta^1 family; "
                         "use numeric_coefficients for general coins")
    angle, rate = _angle_evaluators(schedule)
    th11 = float(angle(1, 1)(np.array([x]), t)[0])
    th12 = float(angle(2, 1)(np.array([x]), t)[0])
    d11 = float(central_difference(angle(1, 1), np.array([x]), t, h_deriv)[0])
    d12 = float(central_difference(angle(2, 1), np.array([x]), t, h_deriv)[0])
    d01 = float(central_difference(angle(1, 0), np.array([x]), t, h_deriv)[0])
    d02 = float(central_difference(angle(2, 0), np.array([x]), t, h_deriv)[0])
    vt11, vt12 = rate(1, 1)(x, t), rate(2, 1)(x, t)
    vt01, vt02 = rate(1, 0)(x, t), rate(2, 0)(x, t)

    two11 = 2.0 * th11
    mixed = 2.0 * th11 + th12
    full = 2.0 * th11 + 2.0 * th12
    theta2 = np.cos(th12) * np.sin(mixed)
    theta3 = 0.5 * np.cos(two11) + 0.5 * np.cos(full)
    xi0 = (vt01 + vt02) - 0.5 * c * d02
    xi1 = (vt11 + vt12) - 0.5 * c * d12
    xi2 = (-1j * c * np.cos(th12) * np.cos(mixed) * d11
           - 0.5j * c * np.cos(full) * d12
           - c * d01 * np.cos(th12) * np.sin(mixed)
           - 0.5 * c * d02 * np.sin(full))
    xi3 = (0.5j * c * np.sin(full) * d12
           + 1j * c * np.cos(th12) * np.sin(mixed) * d11
           - 0.5 * c * d01 * (np.cos(two11) + np.cos(full))
           - 0.5 * c * d02 * np.cos(full))
    return HamiltonianCoefficients(0.0, float(theta2), float(theta3),
                                   complex(xi0), complex(xi1),
                                   complex(xi2), complex(xi3))


def modified_step_dense(schedule: CoinSchedule, positions: np.ndarray, t: float,
                        dt: float) -> np.ndarray:
    """Dense modified step C1(0)^† C2(0)^† S+ C2(dt) S- C1(dt) on given sites.

    Positions are used literally (no wrapping of coordinates); the operator
    itself is periodic over the patch.
    """
    m = len(positions)

    def coin(j, dteval):
        cf = coin_field(schedule, j, positions, t, dteval)
        mat = np.zeros((2 * m, 2 * m), dtype=np.complex128)
        idx = np.arange(m)
        mat[idx, idx] = cf.u00
        mat[idx, m + idx] = cf.u01
        mat[m + idx, idx] = cf.u10
        mat[m + idx, m + idx] = cf.u11
        return mat

    fwd = np.roll(np.eye(m), 1, axis=0)  # |x> -> |x + a>
    s_minus = np.block([[np.eye(m), np.zeros((m, m))],
                        [np.zeros((m, m)), fwd.T]])
    s_plus = np.block([[fwd, np.zeros((m, m))],
                       [np.zeros((m, m)), np.eye(m)]])
    c1_0 = coin(1, 0.0)
    c2_0 = coin(2, 0.0)
    return (c1_0.conj().T @ c2_0.conj().T @ s_plus @ coin(2, dt)
            @ s_minus @ coin(1, dt))


def _block_estimates(schedule: CoinSchedule, x: float, t: float, h: float):
    """(Theta block, Xi block) from a 7-site patch at spacing and step h."""
    positions = x + h * np.arange(-3, 4, dtype=float)
    u = modified_step_dense(schedule, positions, t, h).reshape(2, 7, 2, 7)
    center = 3
    diag = u[:, center, :, center]
    from_left = u[:, center, :, center - 1]
    from_right = u[:, center, :, center + 1]
    xi_block = (1j / h) * (diag + from_left + from_right - np.eye(2))
    theta_block = from_left - from_right
    return theta_block, xi_block


def _pauli_components(block: np.ndarray) -> np.ndarray:
    return np.array([0.5 * np.trace(PAULI[r] @ block) for r in range(4)])


def numeric_coefficients(schedule: CoinSchedule, x: float, t: float,
                         h: float = 1e-3, dt_probe: Optional[float] = None,
                         tol: float = RICHARDSON_TOL) -> HamiltonianCoefficients:
    """Coefficients extracted from the step operator on a local patch.

    Builds the modified step at coupled probes (a = dt = d and d/2, with
    d = ``dt_probe`` or ``h``) and removes the first-order probe error by
    Richardson extrapolation, leaving an O(h^2) estimate.  Raises with a
    diagnostic when the two probe levels disagree beyond ``tol`` (schedule
    too rough for the stencil).
    """
    d = h if dt_probe is None else dt_probe
    tb1, xb1 = _block_estimates(schedule, x, t, d)
    tb2, xb2 = _block_estimates(schedule, x, t, d / 2.0)
    residual = float(max(np.max(np.abs(tb1 - tb2)), np.max(np.abs(xb1 - xb2))))
    if residual > tol:
        raise RuntimeError(
            f"probe levels d = {d} and d/2 disagree by {residual:.3g} "
            f"(tolerance {tol}); schedule varies too rapidly for this stencil")
    theta_block = 2.0 * tb2 - tb1
    xi_block = 2.0 * xb2 - xb1
    tcomp = _pauli_components(theta_block)
    xcomp = _pauli_components(xi_block)
    return HamiltonianCoefficients(
        float(np.real(tcomp[1])), float(np.real(tcomp[2])), float(np.real(tcomp[3])),
        complex(xcomp[0]), complex(xcomp[1]), complex(xcomp[2]), complex(xcomp[3]),
        theta0=float(np.real(tcomp[0])))


def hermiticity_defect(schedule: CoinSchedule, x: float, t: float,
                       h: float = 1e-3, h_deriv: float = 1e-4) -> float:
    """Max-norm violation of (Xi - Xi^†) + i c d_x(Theta) = 0 (c = 1 probes).

    This is the operator-Hermiticity condition of Xi + c Theta p once the
    anti-Hermitian part of Xi is paired with the momentum-coefficient
    gradient.
    """
    def theta_matrix(xx):
        co = numeric_coefficients(schedule, xx, t, h)
        return (co.theta1 * PAULI[1] + co.theta2 * PAULI[2] + co.theta3 * PAULI[3]
                + co.theta0 * PAULI[0])

    co = numeric_coefficients(schedule, x, t, h)
    xi = sum(co.xi_vector[r] * PAULI[r] for r in range(4))
    dtheta = (theta_matrix(x + h_deriv) - theta_matrix(x - h_deriv)) / (2 * h_deriv)
    defect = (xi - xi.conj().T) + 1j * dtheta
    return float(np.max(np.abs(defect)))


def metric_from_schedule(schedule: CoinSchedule, x, t: float,
                         mass: Optional[float] = None, c: float = 1.0,
                         h_deriv: float = DERIV_STEP) -> Dict[str, np.ndarray]:
    """Recover the 1+1 frame field and metric from a metric-family schedule.

    Requires theta^1_2 = -2 theta^1_1.  With ``mass`` given the
    fundamental-particle convention solves for e00; otherwise e00 = 1 and a
    position-dependent mass field is reported.
    """
    angle, rate = _angle_evaluators(schedule)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    th11 = angle(1, 1)(x, t)
    th12 = angle(2, 1)(x, t)
    if np.max(np.abs(th12 + 2.0 * th11)) > 1e-10:
        raise ValueError("metric recovery requires theta^1_2 = -2 theta^1_1")
    d11 = central_difference(angle(1, 1), x, t, h_deriv)
    mass_term = np.array([rate(1, 1)(xi, t) + rate(2, 1)(xi, t) for xi in x]) \
        + c * d11
    if mass is not None:
        e00 = mass / mass_term
        mass_field = np.full_like(e00, mass)
    else:
        e00 = np.ones_like(th11)
        mass_field = mass_term
    hopping = np.cos(2.0 * th11)
    d01 = central_difference(angle(1, 0), x, t, h_deriv)
    with np.errstate(divide="ignore"):
        a1 = c * d01 / hopping
    a0 = -np.array([rate(1, 0)(xi, t) + rate(2, 0)(xi, t) for xi in x])
    return {
        "e00": e00,
        "e11": e00 * hopping,
        "g00": e00 ** 2,
        "g11": -(e00 * hopping) ** 2,
        "g01": np.zeros_like(e00),
        "a0": a0,
        "a1": a1,
        "mass": mass_field,
    }


def reduce_2plus1(schedule: CoinSchedule, k_y: float, x: float, t: float,
                  mass: Optional[float] = None, c: float = 1.0,
                  h_deriv: float = DERIV_STEP) -> Dict[str, object]:
    """One solution of the 2+1 identification at fixed transverse momentum.

    The transverse momentum is absorbed into the potential A_2.  Note the
    potential identifications here carry the signs that actually solve the
    coefficient-matching equations (see ``reduction_residuals``):
    A_1 = +c d_x theta^0_1 and A_2 = +c d_x theta^0_2 + k_y c.
    """
    if not schedule.uses_only_phase_and_x_rotation():
        raise ValueError("2+1 reduction covers only the theta^0, theta^1 family")
    angle, rate = _angle_evaluators(schedule)
    xa = np.array([x], dtype=float)
    th11 = float(angle(1, 1)(xa, t)[0])
    th12 = float(angle(2, 1)(xa, t)[0])
    d01 = float(central_difference(angle(1, 0), xa, t, h_deriv)[0])
    d02 = float(central_difference(angle(2, 0), xa, t, h_deriv)[0])
    d12 = float(central_difference(angle(2, 1), xa, t, h_deriv)[0])
    two11 = 2.0 * th11
    full = 2.0 * th11 + 2.0 * th12
    q20 = 0.5
    q12 = 0.5 * np.sin(two11) + 0.5 * np.sin(full)
    q11 = 0.5 * np.cos(two11) + 0.5 * np.cos(full)
    q21 = 0.5 * np.cos(full)
    q22 = 0.5 * np.sin(full)
    mass_over_e00 = rate(1, 1)(x, t) + rate(2, 1)(x, t) - 0.5 * c * d12
    e00 = 1.0 if mass is None else mass / mass_over_e00
    a0 = -(rate(1, 0)(x, t) + rate(2, 0)(x, t))
    a1 = c * d01
    a2 = c * d02 + k_y * c
    e = {"e00": e00, "e10": 0.0, "e20": q20 * e00,
         "e01": 0.0, "e11": q11 * e00, "e21": q21 * e00,
         "e02": 0.0, "e12": q12 * e00, "e22": q22 * e00}
    metric = np.empty((3, 3))
    frame = np.array([[e["e00"], e["e01"], e["e02"]],
                      [e["e10"], e["e11"], e["e12"]],
                      [e["e20"], e["e21"], e["e22"]]])
    for mu in range(3):
        for nu in range(3):
            metric[mu, nu] = (frame[mu, 0] * frame[nu, 0]
                              - frame[mu, 1] * frame[nu, 1]
                              - frame[mu, 2] * frame[nu, 2])
    return {"a0": a0, "a1": a1, "a2": a2, "q20": q20, "q12": q12, "q11": q11,
            "q21": q21, "q22": q22, "mass_over_e00": mass_over_e00,
            "vielbeins": e, "metric": metric}


def reduction_residuals(schedule: CoinSchedule, k_y: float, x: float, t: float,
                        c: float = 1.0, h_deriv: float = DERIV_STEP) -> np.ndarray:
    """|LHS - RHS| of the six 2+1 matching equations under the chosen solution."""
    sol = reduce_2plus1(schedule, k_y, x, t, c=c, h_deriv=h_deriv)
    co = closed_form_coefficients(schedule, x, t, c=c, h_deriv=h_deriv)
    angle, _ = _angle_evaluators(schedule)
    xa = np.array([x], dtype=float)
    th11 = float(angle(1, 1)(xa, t)[0])
    th12 = float(angle(2, 1)(xa, t)[0])
    d01 = float(central_difference(angle(1, 0), xa, t, h_deriv)[0])
    d02 = float(central_difference(angle(2, 0), xa, t, h_deriv)[0])
    full = 2.0 * th11 + 2.0 * th12
    ky_minus_a2 = k_y * c - sol["a2"]
    res = np.empty(6)
    res[0] = abs(sol["q12"] - co.theta2)
    res[1] = abs(sol["q11"] - co.theta3)
    res[2] = abs(-sol["a0"] + sol["q20"] * ky_minus_a2 - np.real(co.xi0))
    res[3] = abs(sol["mass_over_e00"] - np.real(co.xi1))
    res[4] = abs(sol["q21"] * ky_minus_a2 - sol["q11"] * sol["a1"]
                 - (-c * d01 * co.theta3 - 0.5 * c * d02 * np.cos(full)))
    res[5] = abs(sol["q22"] * ky_minus_a2 - sol["q12"] * sol["a1"]
                 - (-c * d01 * co.theta2 - 0.5 * c * d02 * np.sin(full)))
    return res


def chi_coefficients(spec: NonabelianCoinSpec, schedule: CoinSchedule,
                     x: float, t: float) -> np.ndarray:
    """Gauge-sector coefficient fields chi^q_r, shape (4, n_generators).

    Row r multiplies sigma_r (x) Lambda_q in the extended Hamiltonian:

        chi^q_0 = (w1 + W1 + w2 + W2) / 2
        chi^q_3 = (w1 - W1 + (w2 - W2)(|F1|^2 - |G1|^2)) / 2
        chi^q_1 = +Re[G1 F1*] (w2 - W2)
        chi^q_2 = -Im[G1 F1*] (w2 - W2)

    with w = up-sector and W = down-sector coefficients and F1, G1 the first
    coin's entries at dt = 0.
    """
    xa = np.array([x], dtype=float)
    t0, t1, t2, t3 = (v[0] for v in schedule.angles_at(1, xa, t, 0.0))
    f1, g1 = fg_pair(t1, t2, t3)
    cross = g1 * np.conj(f1)
    weight3 = abs(f1) ** 2 - abs(g1) ** 2
    n_gen = len(spec.generators)
    chi = np.zeros((4, n_gen))
    for q in range(n_gen):
        w1 = spec.omega.get((1, q), None)
        w2 = spec.omega.get((2, q), None)
        cw1 = spec.capital_omega.get((1, q), None)
        cw2 = spec.capital_omega.get((2, q), None)
        w1v = float(w1(x, t)) if w1 else 0.0
        w2v = float(w2(x, t)) if w2 else 0.0
        cw1v = float(cw1(x, t)) if cw1 else 0.0
        cw2v = float(cw2(x, t)) if cw2 else 0.0
        diff2 = w2v - cw2v
        chi[0, q] = 0.5 * (w1v + cw1v + w2v + cw2v)
        chi[3, q] = 0.5 * (w1v - cw1v + diff2 * weight3)
        chi[1, q] = float(np.real(cross)) * diff2
        chi[2, q] = -float(np.imag(cross)) * diff2
    return chi


def nonabelian_step_dense(schedule: CoinSchedule, spec: NonabelianCoinSpec,
                          positions: np.ndarray, t: float, dt: float) -> np.ndarray:
    """Dense gauge-extended modified step on given sites (oracle helper)."""
    from .coins import nonabelian_coin

    n = spec.gauge_dim
    m = len(positions)
    dim = 2 * n * m

    def coin(j, dteval, dagger=False):
        mat = np.zeros((dim, dim), dtype=np.complex128)
        for i, xi in enumerate(positions):
            u = nonabelian_coin(schedule, spec, j, float(xi), t, dteval)
            if dagger:
                u = u.conj().T
            rows = np.arange(2 * n) * m + i
            mat[np.ix_(rows, rows)] = u
        return mat

    fwd = np.roll(np.eye(m), 1, axis=0)
    s_plus = np.kron(np.diag([1.0, 0.0]), np.kron(np.eye(n), fwd)) \
        + np.kron(np.diag([0.0, 1.0]), np.eye(n * m))
    s_minus = np.kron(np.diag([1.0, 0.0]), np.eye(n * m)) \
        + np.kron(np.diag([0.0, 1.0]), np.kron(np.eye(n), fwd.T))
    return (coin(1, 0.0, dagger=True) @ coin(2, 0.0, dagger=True)
            @ s_plus @ coin(2, dt) @ s_minus @ coin(1, dt))


def chi_numeric(spec: NonabelianCoinSpec, schedule: CoinSchedule, x: float,
                t: float, h: float = 1e-3) -> np.ndarray:
    """Numeric extraction of chi^q_r from the gauge-extended step (oracle).

    Projects the potential-like block of (i/dt)(U - 1) onto the
    sigma_r (x) Lambda_q basis via the generator Gram matrix and removes the
    purely abelian part carried by Lambda_0.
    """
    n = spec.gauge_dim

    def xi_block(probe):
        positions = x + probe * np.arange(-3, 4, dtype=float)
        u = nonabelian_step_dense(schedule, spec, positions, t, probe)
        u = u.reshape(2 * n, 7, 2 * n, 7)
        center = 3
        total = (u[:, center, :, center] + u[:, center, :, center - 1]
                 + u[:, center, :, center + 1])
        return (1j / probe) * (total - np.eye(2 * n))

    block = 2.0 * xi_block(h / 2.0) - xi_block(h)
    gens = spec.generators
    gram = np.array([[np.trace(a.conj().T @ b).real for b in gens] for a in gens])
    chi = np.zeros((4, len(gens)))
    abelian = closed_form_coefficients(schedule, x, t)
    for r in range(4):
        # 2x2 trace over the spin factor leaves the gauge-sector content
        reduced = np.zeros((n, n), dtype=np.complex128)
        for s1 in range(2):
            for s2 in range(2):
                reduced += 0.5 * PAULI[r][s2, s1] * block[s1 * n:(s1 + 1) * n,
                                                          s2 * n:(s2 + 1) * n]
        overlaps = np.array([np.trace(g.conj().T @ reduced) for g in gens])
        coeffs = np.linalg.solve(gram, np.real(overlaps))
        coeffs[0] -= np.real(abelian.xi_vector[r])
        chi[r] = coeffs
    return chi
