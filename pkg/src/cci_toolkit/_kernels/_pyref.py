"""Pure-NumPy reference implementations of the hot kernels.

Kept behaviourally identical to the compiled backend in ``_fast.pyx``; the
test suite cross-checks the two whenever the extension is available.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def var_recursion(
    phi: np.ndarray,
    intercept: np.ndarray,
    shocks: np.ndarray,
    y_init: np.ndarray,
) -> np.ndarray:
    """Propagate a VAR(p) recursion forward through `shocks`.

    Parameters
    ----------
    phi : (n, n*p) array
        Lag coefficient blocks [Phi_1 | ... | Phi_p].
    intercept : (n,) array
        Constant term, zeros when the model has none.
    shocks : (steps, n) array
        Innovation sequence added at each step.
    y_init : (p, n) array
        Pre-sample values in ascending time order (last row is the most
        recent observation before the first step).

    Returns
    -------
    (steps, n) array of generated observations.
    """
    phi = np.ascontiguousarray(phi, dtype=np.float64)
    intercept = np.ascontiguousarray(intercept, dtype=np.float64)
    shocks = np.ascontiguousarray(shocks, dtype=np.float64)
    y_init = np.ascontiguousarray(y_init, dtype=np.float64)
    steps, n = shocks.shape
    p = y_init.shape[0]
    buf = np.empty((p + steps, n))
    buf[:p] = y_init
    for t in range(steps):
        acc = intercept + shocks[t]
        for i in range(p):
            block = phi[:, i * n : (i + 1) * n]
            acc = acc + block @ buf[p + t - 1 - i]
        buf[p + t] = acc
    return buf[p:]


def fit_var_ls(
    y: np.ndarray, p: int, intercept: bool
) -> tuple[np.ndarray, np.ndarray, int]:
    """Least-squares fit of a VAR(p) by stacked lag regression.

    Returns
    -------
    coeffs : (n, k) array
        Row per equation; column 0 is the constant when `intercept`,
        followed by [Phi_1 | ... | Phi_p].
    resid : (T-p, n) array
    rank : int
        Numerical rank of the regressor matrix (k columns when full rank).
    """
    y = np.ascontiguousarray(y, dtype=np.float64)
    tt, n = y.shape
    m = tt - p
    k = n * p + (1 if intercept else 0)
    x = np.empty((m, k))
    col = 0
    if intercept:
        x[:, 0] = 1.0
        col = 1
    for i in range(1, p + 1):
        x[:, col : col + n] = y[p - i : tt - i]
        col += n
    target = y[p:]
    sol, _, rank, _ = np.linalg.lstsq(x, target, rcond=None)
    resid = target - x @ sol
    return np.ascontiguousarray(sol.T), resid, int(rank)
