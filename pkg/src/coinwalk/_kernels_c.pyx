# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled per-step kernels; mirrors _kernels_py, mutating in place."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

BACKEND_NAME = "compiled"

ctypedef cnp.complex128_t cplx


def coin2(cplx[::1] a0, cplx[::1] a1,
          cplx[::1] u00, cplx[::1] u01, cplx[::1] u10, cplx[::1] u11):
    cdef Py_ssize_t i, n = a0.shape[0]
    cdef cplx x, y
    for i in range(n):
        x = a0[i]
        y = a1[i]
        a0[i] = u00[i] * x + u01[i] * y
        a1[i] = u10[i] * x + u11[i] * y


def coin2_const(cplx[::1] a0, cplx[::1] a1,
                double complex u00, double complex u01,
                double complex u10, double complex u11):
    cdef Py_ssize_t i, n = a0.shape[0]
    cdef cplx x, y
    for i in range(n):
        x = a0[i]
        y = a1[i]
        a0[i] = u00 * x + u01 * y
        a1[i] = u10 * x + u11 * y


def roll(cplx[::1] a, int shift):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i
    cdef cplx last, first
    if shift == 0:
        return
    if shift == 1:
        last = a[n - 1]
        for i in range(n - 1, 0, -1):
            a[i] = a[i - 1]
        a[0] = last
    elif shift == -1:
        first = a[0]
        for i in range(n - 1):
            a[i] = a[i + 1]
        a[n - 1] = first
    else:
        buf = np.roll(np.asarray(a), shift)
        for i in range(n):
            a[i] = buf[i]


def roll2d(cplx[:, ::1] a, int shift, int axis):
    cdef Py_ssize_t i, j, n0 = a.shape[0], n1 = a.shape[1]
    cdef cplx tmp
    if shift == 0:
        return
    if axis == 1:
        for i in range(n0):
            roll(a[i], shift)
    elif shift == 1:
        for j in range(n1):
            tmp = a[n0 - 1, j]
            for i in range(n0 - 1, 0, -1):
                a[i, j] = a[i - 1, j]
            a[0, j] = tmp
    elif shift == -1:
        for j in range(n1):
            tmp = a[0, j]
            for i in range(n0 - 1):
                a[i, j] = a[i + 1, j]
            a[n0 - 1, j] = tmp
    else:
        buf = np.roll(np.asarray(a), shift, axis=0)
        for i in range(n0):
            for j in range(n1):
                a[i, j] = buf[i, j]


def two_coin(cplx[:, :, ::1] psi, double[:, :, ::1] lam):
    """Apply the entangling 4x4 coin via its Bell-like eigenbasis."""
    cdef Py_ssize_t i, j, q, n1 = psi.shape[1], n2 = psi.shape[2]
    cdef cplx p0, p1, p2, p3, f0, f1, f2, f3
    cdef double complex e0, e1, e2, e3
    for i in range(n1):
        for j in range(n2):
            p0 = psi[0, i, j]
            p1 = psi[1, i, j]
            p2 = psi[2, i, j]
            p3 = psi[3, i, j]
            # project on the eigenvectors (columns of W)
            f0 = 0.5 * (p0 + p1 + p2 + p3)
            f1 = 0.5 * (-p0 - p1 + p2 + p3)
            f2 = 0.5 * (-p0 + p1 - p2 + p3)
            f3 = 0.5 * (p0 - p1 - p2 + p3)
            e0 = cos(lam[0, i, j]) - 1j * sin(lam[0, i, j])
            e1 = cos(lam[1, i, j]) - 1j * sin(lam[1, i, j])
            e2 = cos(lam[2, i, j]) - 1j * sin(lam[2, i, j])
            e3 = cos(lam[3, i, j]) - 1j * sin(lam[3, i, j])
            f0 = f0 * e0
            f1 = f1 * e1
            f2 = f2 * e2
            f3 = f3 * e3
            psi[0, i, j] = 0.5 * (f0 - f1 - f2 + f3)
            psi[1, i, j] = 0.5 * (f0 - f1 + f2 - f3)
            psi[2, i, j] = 0.5 * (f0 + f1 - f2 - f3)
            psi[3, i, j] = 0.5 * (f0 + f1 + f2 + f3)
