"""Tridiagonal and banded solvers with low-rank corner corrections.

The fast paths wrap scipy.linalg.solve_banded; cyclic systems and other
out-of-band entries are folded in with a Woodbury correction, keeping the
whole solve O(n * r^2) for r correction rows.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded

from .errors import InputSizeError, SingularSystemError


def _check_solution(x):
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("banded solve produced non-finite values")
    return x


def _banded_solve(l_and_u, ab, b):
    try:
        x = solve_banded(l_and_u, ab, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from exc
    return _check_solution(x)


def tridiagonal_ab(lower, diag, upper):
    """Pack the three diagonals into solve_banded's (3, n) layout.

    lower[i] = A[i+1, i], diag[i] = A[i, i], upper[i] = A[i, i+1].
    """
    n = len(diag)
    ab = np.zeros((3, n))
    ab[1] = diag
    ab[0, 1:] = upper
    ab[2, :-1] = lower
    return ab


def solve_tridiagonal(lower, diag, upper, rhs):
    """Solve the tridiagonal system in O(n); rhs may hold several columns."""
    lower = np.asarray(lower, float)
    diag = np.asarray(diag, float)
    upper = np.asarray(upper, float)
    rhs = np.asarray(rhs, float)
    n = len(diag)
    if n == 0:
        raise InputSizeError("empty tridiagonal system")
    if len(lower) != n - 1 or len(upper) != n - 1:
        raise ValueError("off-diagonals must have length n-1")
    if n == 1:
        if diag[0] == 0.0:
            raise SingularSystemError("zero pivot in 1x1 system")
        return rhs / diag[0]
    return _banded_solve((1, 1), tridiagonal_ab(lower, diag, upper), rhs)


def solve_banded_corrected(l_and_u, ab, rhs, corrections):
    """Solve (B + sum_r e_r w_r^T) x = rhs, B banded, via Woodbury.

    corrections is an iterable of (row, col, value) entries lying outside
    the band of B.  Entries are grouped per row, so the correction rank is
    the number of distinct rows.
    """
    rhs = np.asarray(rhs, float)
    corrections = list(corrections)
    if not corrections:
        return _banded_solve(l_and_u, ab, rhs)

    n = ab.shape[1]
    rows = sorted({r for r, _, _ in corrections})
    ridx = {r: i for i, r in enumerate(rows)}
    m = len(rows)
    U = np.zeros((n, m))
    V = np.zeros((m, n))
    for r, c, v in corrections:
        U[r, ridx[r]] = 1.0
        V[ridx[r], c] += v

    b2 = rhs.reshape(n, -1)
    k = b2.shape[1]
    sol = _banded_solve(l_and_u, ab, np.hstack([b2, U]))
    z, w = sol[:, :k], sol[:, k:]
    cap = np.eye(m) + V @ w
    try:
        y = np.linalg.solve(cap, V @ z)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from exc
    x = z - w @ y
    return _check_solution(x.reshape(rhs.shape))


def solve_cyclic_tridiagonal(lower, diag, upper, rhs, corner_top_right, corner_bottom_left):
    """Solve a cyclic tridiagonal system (wrap entries A[0,n-1], A[n-1,0]) in O(n)."""
    diag = np.asarray(diag, float)
    n = len(diag)
    if n < 3:
        raise InputSizeError("cyclic tridiagonal system needs n >= 3")
    ab = tridiagonal_ab(np.asarray(lower, float), diag, np.asarray(upper, float))
    corrections = [(0, n - 1, corner_top_right), (n - 1, 0, corner_bottom_left)]
    return solve_banded_corrected((1, 1), ab, rhs, corrections)
