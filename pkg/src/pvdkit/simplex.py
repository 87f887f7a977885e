"""A small dense tableau simplex for the cut-maximization linear programs.

Solves  max c^T x  subject to  A x <= b,  x >= 0,  with b >= 0, so the slack
basis is feasible and no phase-one is needed.  The problems built by
``pvdkit.cutnorm`` are arranged to have this shape.

Pivoting uses Dantzig's rule (largest reduced cost) for speed and switches to
Bland's rule after a streak of degenerate pivots, which restores the
anti-cycling guarantee without paying Bland's price on every instance.
"""
from __future__ import annotations

import numpy as np

#: consecutive degenerate pivots tolerated before switching to Bland's rule
DEGENERATE_STREAK = 24


class SimplexError(RuntimeError):
    pass


def simplex_solve(A_ub, b_ub, c, tol: float = 1e-9, max_iter: int | None = None):
    """Maximize ``c @ x`` over ``A_ub @ x <= b_ub, x >= 0`` (``b_ub >= 0``).

    Parameters
    ----------
    A_ub : (m, n) array_like
    b_ub : (m,) array_like, nonnegative
    c : (n,) array_like
    tol : float
        Pivot / optimality tolerance.
    max_iter : int, optional
        Pivot budget; defaults to ``2000 + 50 * (m + n)``.

    Returns
    -------
    x : (n,) ndarray
        An optimal basic feasible solution.
    value : float
        The optimal objective value.
    """
    A = np.asarray(A_ub, dtype=float)
    b = np.asarray(b_ub, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    assert b.shape == (m,) and c.shape == (n,)
    if np.any(b < -tol):
        raise SimplexError("negative right-hand side; slack basis infeasible")
    b = np.maximum(b, 0.0)
    if max_iter is None:
        max_iter = 2000 + 50 * (m + n)

    # tableau rows: constraints; columns: structural vars, slacks, rhs
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = c  # reduced costs of the slack basis
    basis = np.arange(n, n + m)

    degenerate = 0
    for _ in range(max_iter):
        costs = T[-1, :-1]
        if degenerate < DEGENERATE_STREAK:
            j = int(np.argmax(costs))
            if costs[j] <= tol:
                break
        else:
            pos = np.nonzero(costs > tol)[0]
            if pos.size == 0:
                break
            j = int(pos[0])  # Bland: smallest index

        col = T[:m, j]
        rows = np.nonzero(col > tol)[0]
        if rows.size == 0:
            raise SimplexError("objective unbounded above")
        ratios = T[rows, -1] / col[rows]
        best = np.min(ratios)
        ties = rows[ratios <= best + tol]
        i = int(ties[np.argmin(basis[ties])])  # smallest basic index on ties

        if T[i, -1] <= tol:
            degenerate += 1
        else:
            degenerate = 0

        piv = T[i, j]
        T[i] /= piv
        factors = T[:, j].copy()
        factors[i] = 0.0
        T -= np.outer(factors, T[i])
        T[:, j] = 0.0  # keep the pivot column exactly unit
        T[i, j] = 1.0
        basis[i] = j
    else:
        raise SimplexError(f"no optimum within {max_iter} pivots")

    x = np.zeros(n + m)
    x[basis] = T[:m, -1]
    value = float(-T[-1, -1])
    return x[:n], value
