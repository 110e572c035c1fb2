# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels.

Same contracts as ``_pyref``; see that module for parameter docs. The
recursion avoids per-step Python dispatch and the least-squares fit calls
LAPACK's pivoted-QR solver directly, which is what makes large bootstrap and
Monte Carlo loops cheap.
"""

import numpy as np

cimport numpy as cnp
from scipy.linalg.cython_lapack cimport dgelsy

BACKEND_NAME = "compiled"


def var_recursion(phi, intercept, shocks, y_init):
    """Propagate a VAR(p) recursion forward through `shocks`."""
    cdef double[:, ::1] phi_v = np.ascontiguousarray(phi, dtype=np.float64)
    cdef double[::1] c_v = np.ascontiguousarray(intercept, dtype=np.float64)
    cdef double[:, ::1] e_v = np.ascontiguousarray(shocks, dtype=np.float64)
    cdef double[:, ::1] y0_v = np.ascontiguousarray(y_init, dtype=np.float64)
    cdef Py_ssize_t steps = e_v.shape[0]
    cdef Py_ssize_t n = e_v.shape[1]
    cdef Py_ssize_t p = y0_v.shape[0]
    buf_arr = np.empty((p + steps, n))
    cdef double[:, ::1] buf = buf_arr
    cdef Py_ssize_t t, i, j, l
    cdef double acc
    for i in range(p):
        for j in range(n):
            buf[i, j] = y0_v[i, j]
    for t in range(steps):
        for j in range(n):
            acc = c_v[j] + e_v[t, j]
            for i in range(p):
                for l in range(n):
                    acc = acc + phi_v[j, i * n + l] * buf[p + t - 1 - i, l]
            buf[p + t, j] = acc
    return buf_arr[p:]


def fit_var_ls(y, int p, bint intercept):
    """Least-squares VAR(p) fit via LAPACK dgelsy; returns (coeffs, resid, rank)."""
    ya = np.ascontiguousarray(y, dtype=np.float64)
    cdef int tt = ya.shape[0]
    cdef int n = ya.shape[1]
    cdef int m = tt - p
    cdef int k = n * p + (1 if intercept else 0)
    if m <= 0:
        raise ValueError("need more observations than lags")

    xa = np.empty((m, k), order="F")
    cdef double[::1, :] xv = xa
    cdef double[:, ::1] yv = ya
    cdef Py_ssize_t i, j, t, col
    col = 0
    if intercept:
        for t in range(m):
            xv[t, 0] = 1.0
        col = 1
    for i in range(1, p + 1):
        for j in range(n):
            for t in range(m):
                xv[t, col + j] = yv[p - i + t, j]
        col += n

    if m <= k:
        raise ValueError("underdetermined system: need more rows than columns")
    target = np.ascontiguousarray(ya[p:])
    # dgelsy overwrites both the design matrix and the RHS; bw must be a
    # genuine copy (an (m,1) C array is also F-contiguous, so
    # asfortranarray alone would alias the input)
    xw = xa.copy(order="F")
    bw = np.array(target, order="F", copy=True)
    cdef double[::1, :] xwv = xw
    cdef double[::1, :] bwv = bw
    jpvt = np.zeros(k, dtype=np.intc)
    cdef int[::1] jp = jpvt
    cdef int nrhs = n
    cdef int rank = 0
    cdef int info = 0
    cdef int lwork = -1
    cdef double rcond = np.finfo(np.float64).eps * max(m, k)
    cdef double wkopt = 0.0

    dgelsy(&m, &k, &nrhs, &xwv[0, 0], &m, &bwv[0, 0], &m, &jp[0],
           &rcond, &rank, &wkopt, &lwork, &info)
    lwork = <int>wkopt
    work = np.empty(lwork, dtype=np.float64)
    cdef double[::1] wv = work
    dgelsy(&m, &k, &nrhs, &xwv[0, 0], &m, &bwv[0, 0], &m, &jp[0],
           &rcond, &rank, &wv[0], &lwork, &info)
    if info != 0:
        raise RuntimeError(f"dgelsy failed with info={info}")

    sol = np.array(bw[:k, :])
    resid = target - xa @ sol
    return np.ascontiguousarray(sol.T), resid, int(rank)
