"""Pure-NumPy implementations of the per-step kernels.

Same call signatures as the compiled module ``_kernels_c``; every function
mutates its first argument in place.
"""

import numpy as np

BACKEND_NAME = "python"


def coin2(a0, a1, u00, u01, u10, u11):
    # per-site 2x2 unitary applied to the two coin rows
    b0 = u00 * a0 + u01 * a1
    b1 = u10 * a0 + u11 * a1
    a0[:] = b0
    a1[:] = b1


def coin2_const(a0, a1, u00, u01, u10, u11):
    b0 = u00 * a0 + u01 * a1
    b1 = u10 * a0 + u11 * a1
    a0[:] = b0
    a1[:] = b1


def roll(a, shift):
    if shift:
        a[:] = np.roll(a, shift)


def roll2d(a, shift, axis):
    if shift:
        a[:] = np.roll(a, shift, axis=axis)


# columns are the four Bell-like eigenvectors of the sigma_q (x) sigma_r
# (q, r in {0,1}) coin generator, in the (uu, ud, du, dd) basis
_W = 0.5 * np.array(
    [
        [1.0, -1.0, -1.0, 1.0],
        [1.0, -1.0, 1.0, -1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, 1.0, 1.0, 1.0],
    ]
)


def two_coin(psi, lam):
    """Apply exp(-i sum theta^{qr} sigma_q x sigma_r) site-pair-wise.

    psi: (4, N, N) coin-major amplitudes; lam: (4, N, N) eigenphase fields.
    """
    phi = np.tensordot(_W.T, psi, axes=(1, 0))
    phi *= np.exp(-1j * lam)
    psi[:] = np.tensordot(_W, phi, axes=(1, 0))
