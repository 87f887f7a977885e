"""Restricted rank-one atom domains for the greedy projection engine.

A domain supplies, in whitened coordinates, the unit rank-one matrices the
engine may project onto ("atoms"), plus an exact maximizer of
``|<residual, atom>|`` over the whole domain.  The engine itself never looks
at weights: whitening happens here.

Tie-breaking is uniform across domains: among candidates within the absolute
tolerance of the best value, the lexicographically smallest canonical key
wins (subset masks for cut pairs, (column, row) for column-row pairs, the
index for explicit lists).
"""
from __future__ import annotations

import numpy as np
import numpy.linalg as la

from .cutnorm import (
    BRUTE_FORCE_CAP,
    _mask_set,
    cut_lp_approx,
    cut_lp_exact,
    normalized_cut_bruteforce,
)
from .linalg import DEFAULT_TOL, Tolerance, as_matrix, as_weights, ip_norm


class UnsupportedDomain(ValueError):
    """Raised when an operation needs more from a domain than it can give
    (enumeration of an infinite domain, LP maximization without integer
    weights, sizes past the configured caps)."""


class CutDomain:
    """All pairs of normalized indicator vectors (one per nonempty subset).

    Parameters
    ----------
    d_left, d_right : array_like
        Strictly positive weight vectors; ``d_right`` defaults to ``d_left``.
    maximizer : {"auto", "enumerate", "lp", "lp-approx"}
        Greedy-step strategy.  "auto" enumerates within ``bf_cap`` and falls
        back to the LP route (integer weights only) beyond it.
    approx_eps : float, optional
        Grid parameter for the "lp-approx" strategy.
    """

    kind = "cut"

    def __init__(self, d_left, d_right=None, maximizer: str = "auto",
                 bf_cap: int = BRUTE_FORCE_CAP, approx_eps=None):
        d = np.asarray(d_left, dtype=float)
        e = d if d_right is None else np.asarray(d_right, dtype=float)
        m, n = d.shape[0], e.shape[0]
        self.weights = (as_weights(d, m, "left weights"), as_weights(e, n, "right weights"))
        self.shape = (m, n)
        if maximizer not in ("auto", "enumerate", "lp", "lp-approx"):
            raise ValueError(f"unknown maximizer {maximizer!r}")
        self.maximizer = maximizer
        self.bf_cap = bf_cap
        self.approx_eps = approx_eps
        self.whitener = np.sqrt(np.outer(*self.weights))

    def size(self):
        m, n = self.shape
        return (2**m - 1) * (2**n - 1)

    def atom(self, key) -> np.ndarray:
        smask, tmask = key
        d, e = self.weights
        S = np.array(_mask_set(smask), dtype=int)
        T = np.array(_mask_set(tmask), dtype=int)
        u = np.zeros(self.shape[0])
        z = np.zeros(self.shape[1])
        u[S] = np.sqrt(d[S])
        z[T] = np.sqrt(e[T])
        # single combined division: exact when the weight masses multiply to
        # a perfect square (e.g. unit weights on a square support)
        return np.outer(u, z) / np.sqrt(d[S].sum() * e[T].sum())

    def atoms(self):
        m, n = self.shape
        if max(m, n) > self.bf_cap:
            raise UnsupportedDomain(f"cut domain on {self.shape} too large to enumerate")
        for smask in range(1, 2**m):
            for tmask in range(1, 2**n):
                yield (smask, tmask), self.atom((smask, tmask))

    def describe(self, key) -> dict:
        return {"kind": "cut", "S": list(_mask_set(key[0])), "T": list(_mask_set(key[1]))}

    def max_step(self, resid_white, tol: Tolerance = DEFAULT_TOL):
        d, e = self.weights
        R = resid_white * self.whitener
        m, n = self.shape
        strategy = self.maximizer
        if strategy == "auto":
            strategy = "enumerate" if max(m, n) <= self.bf_cap else "lp"
        if strategy == "enumerate":
            if max(m, n) > self.bf_cap:
                raise UnsupportedDomain(f"cut domain on {self.shape} exceeds cap {self.bf_cap}")
            pair = normalized_cut_bruteforce(R, d, e, cap=self.bf_cap, tol=tol)
        elif strategy == "lp":
            if not (np.all(d == np.round(d)) and np.all(e == np.round(e))):
                raise UnsupportedDomain("LP maximizer needs positive integer weights")
            pair = cut_lp_exact(R, d, e, tol=tol)
        else:
            eps = 0.5 if self.approx_eps is None else float(self.approx_eps)
            pair = cut_lp_approx(R, eps, d, e, tol=tol)
        return pair.masks(), pair.value


class ColumnRowDomain:
    """Normalized (column, row) pairs of a source matrix, Euclidean geometry.

    Zero columns/rows are skipped; pairs whose normalized vectors coincide
    (after orienting the first nonzero entry positive) within 1e-12 are
    deduplicated, keeping the first in (column index, row index) order.
    """

    kind = "column-row"

    def __init__(self, source):
        A = as_matrix(source, "source")
        m, n = A.shape
        self.shape = (m, n)
        self.weights = (np.ones(m), np.ones(n))
        self.whitener = np.ones((m, n))
        entries = []
        for j in range(n):
            c = A[:, j]
            nc = la.norm(c)
            if nc == 0.0:
                continue
            u = _orient(c / nc)
            for i in range(m):
                r = A[i, :]
                nr = la.norm(r)
                if nr == 0.0:
                    continue
                z = _orient(r / nr)
                if any(np.max(np.abs(u - u2)) <= 1e-12 and np.max(np.abs(z - z2)) <= 1e-12
                       for _, u2, z2 in entries):
                    continue
                entries.append(((j, i), u, z))
        if not entries:
            raise ValueError("source matrix has no nonzero column/row pair")
        self._entries = entries
        self._gram = np.stack([np.outer(u, z).ravel() for _, u, z in entries])

    def size(self):
        return len(self._entries)

    def atom(self, key) -> np.ndarray:
        for k, u, z in self._entries:
            if k == key:
                return np.outer(u, z)
        raise KeyError(key)

    def atoms(self):
        for k, u, z in self._entries:
            yield k, np.outer(u, z)

    def describe(self, key) -> dict:
        return {"kind": "column-row", "column": key[0], "row": key[1]}

    def max_step(self, resid_white, tol: Tolerance = DEFAULT_TOL):
        vals = self._gram @ resid_white.ravel()
        best = float(np.max(np.abs(vals)))
        idx = int(np.nonzero(np.abs(vals) >= best - tol.atol)[0][0])
        return self._entries[idx][0], float(vals[idx])


class ExplicitDomain:
    """A caller-supplied list of (v, w) pairs, normalized on construction.

    Duplicates are kept as given: they are harmless (never selected while an
    independent direction remains) and exercising them is part of the
    engine's contract.
    """

    kind = "explicit"

    def __init__(self, pairs, d_left=None, d_right=None):
        pairs = list(pairs)
        if not pairs:
            raise ValueError("explicit domain needs at least one pair")
        v0, w0 = pairs[0]
        m, n = np.asarray(v0).shape[0], np.asarray(w0).shape[0]
        d = as_weights(d_left, m, "left weights")
        e = as_weights(d_right, n, "right weights")
        self.weights = (d, e)
        self.shape = (m, n)
        self.whitener = np.sqrt(np.outer(d, e))
        self._pairs = []
        for idx, (v, w) in enumerate(pairs):
            v = np.asarray(v, dtype=float)
            w = np.asarray(w, dtype=float)
            nv, nw = ip_norm(v, d), ip_norm(w, e)
            if nv == 0.0 or nw == 0.0:
                raise ValueError(f"pair {idx} has a zero vector")
            self._pairs.append((v / nv, w / nw))
        self._gram = np.stack(
            [np.outer(np.sqrt(d) * v, np.sqrt(e) * w).ravel() for v, w in self._pairs]
        )

    def size(self):
        return len(self._pairs)

    def atom(self, key) -> np.ndarray:
        return self._gram[key].reshape(self.shape).copy()

    def atoms(self):
        for idx in range(len(self._pairs)):
            yield idx, self.atom(idx)

    def describe(self, key) -> dict:
        v, w = self._pairs[key]
        return {"kind": "explicit", "index": key, "v": v.tolist(), "w": w.tolist()}

    def max_step(self, resid_white, tol: Tolerance = DEFAULT_TOL):
        vals = self._gram @ resid_white.ravel()
        best = float(np.max(np.abs(vals)))
        idx = int(np.nonzero(np.abs(vals) >= best - tol.atol)[0][0])
        return idx, float(vals[idx])


class FullSphereDomain:
    """Every unit pair: the greedy maximizer is the top singular pair of the
    whitened residual, so the decomposition reproduces the singular values.
    Not enumerable; certificate routines that need the full atom list reject
    this domain."""

    kind = "full-sphere"

    def __init__(self, d_left, d_right=None):
        d = np.asarray(d_left, dtype=float)
        e = d if d_right is None else np.asarray(d_right, dtype=float)
        m, n = d.shape[0], e.shape[0]
        self.weights = (as_weights(d, m), as_weights(e, n))
        self.shape = (m, n)
        self.whitener = np.sqrt(np.outer(*self.weights))

    def size(self):
        return None

    def atom(self, key) -> np.ndarray:
        u = np.asarray(key[0], dtype=float)
        z = np.asarray(key[1], dtype=float)
        return np.outer(u, z)

    def atoms(self):
        raise UnsupportedDomain("the full unit sphere cannot be enumerated")

    def describe(self, key) -> dict:
        d, e = self.weights
        u = np.asarray(key[0]) / np.sqrt(d)
        z = np.asarray(key[1]) / np.sqrt(e)
        return {"kind": "unit-pair", "v": u.tolist(), "w": z.tolist()}

    def max_step(self, resid_white, tol: Tolerance = DEFAULT_TOL):
        U, s, Vt = la.svd(resid_white)
        u = U[:, 0]
        z = Vt[0]
        k = int(np.argmax(np.abs(u)))
        if u[k] < 0:  # deterministic orientation; the atom is unchanged
            u = -u
            z = -z
        return (tuple(float(x) for x in u), tuple(float(x) for x in z)), float(s[0])


def _orient(x: np.ndarray) -> np.ndarray:
    nz = np.nonzero(x)[0]
    if nz.size and x[nz[0]] < 0:
        return -x
    return x
