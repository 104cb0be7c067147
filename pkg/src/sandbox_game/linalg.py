"""Gaussian elimination with partial pivoting over a batch of small systems."""
from __future__ import annotations

import numpy as np

PIVOT_TOL = 1e-12


def solve_batch(A, b, pivot_tol: float = PIVOT_TOL):
    """Solve ``A[k] @ x[k] = b[k]`` for every ``k``.

    Returns ``(x, ok)``; ``ok[k]`` is False when some pivot of system ``k``
    fell below ``pivot_tol`` in absolute value, and ``x[k]`` is then garbage.
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    if A.ndim == 2:
        x, ok = solve_batch(A[None], b[None], pivot_tol)
        return x[0], bool(ok[0])
    K, n, _ = A.shape
    ok = np.ones(K, dtype=bool)
    rows = np.arange(K)
    for k in range(n):
        col = np.abs(A[:, k:, k])
        p = np.argmax(col, axis=1) + k
        ok &= col[rows, p - k] >= pivot_tol
        swap = p != k
        if swap.any():
            r = rows[swap]
            A[r, k], A[r, p[swap]] = A[r, p[swap]].copy(), A[r, k].copy()
            b[r, k], b[r, p[swap]] = b[r, p[swap]], b[r, k]
        piv = np.where(ok, A[:, k, k], 1.0)
        factor = A[:, k + 1:, k] / piv[:, None]
        A[:, k + 1:, k:] -= factor[:, :, None] * A[:, None, k, k:]
        b[:, k + 1:] -= factor * b[:, None, k]
    x = np.zeros_like(b)
    diag = np.where(ok[:, None], np.diagonal(A, axis1=1, axis2=2), 1.0)
    for k in range(n - 1, -1, -1):
        acc = b[:, k] - np.einsum("ij,ij->i", A[:, k, k + 1:], x[:, k + 1:])
        x[:, k] = acc / diag[:, k]
    return x, ok


def solve(A, b, pivot_tol: float = PIVOT_TOL):
    """Solve one system; return ``None`` if it is singular."""
    x, ok = solve_batch(A, b, pivot_tol)
    return x if ok else None
