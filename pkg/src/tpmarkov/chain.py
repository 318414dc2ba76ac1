"""Finite-state Markov chain algebra.

States are labelled ``0..K``; state 0 is the reference state used by the
renewal constructions elsewhere in the package.
"""
from collections import deque
from dataclasses import dataclass
from math import gcd

import numpy as np

from .errors import NegativeEntry, NonStochasticRow, Reducible, ValidationError, ZeroStationaryMass

# rows within REPAIR_TOL of 1 are rescaled; beyond it they are rejected
REPAIR_TOL = 1e-9
ROW_TOL = 1e-12


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Row-stochastic matrix; construct through :func:`validate`."""

    entries: np.ndarray

    @property
    def size(self):
        return self.entries.shape[0]

    @property
    def K(self):
        return self.size - 1

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __getitem__(self, idx):
        return self.entries[idx]

    def positive_edges(self):
        """Yield ``(k, j)`` for every strictly positive entry."""
        ks, js = np.nonzero(self.entries > 0)
        return list(zip(ks.tolist(), js.tolist()))


def validate(matrix) -> TransitionMatrix:
    if isinstance(matrix, TransitionMatrix):
        return matrix
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValidationError(f"transition matrix must be square and non-empty, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("transition matrix has non-finite entries")
    neg = np.argwhere(a < 0)
    if len(neg):
        k, j = neg[0]
        raise NegativeEntry(f"entry ({k}, {j}) is negative: {a[k, j]!r}")
    sums = a.sum(axis=1)
    for k, s in enumerate(sums):
        if abs(s - 1.0) > REPAIR_TOL:
            raise NonStochasticRow(k, float(s))
    a = a / sums[:, None]
    return TransitionMatrix(_frozen(a))


def as_prob_vector(weights, size=None) -> np.ndarray:
    """Validate a probability vector (nonnegative, sums to 1)."""
    v = np.array(weights, dtype=float).ravel()
    if size is not None and v.shape[0] != size:
        raise ValidationError(f"probability vector has length {v.shape[0]}, expected {size}")
    if np.any(v < 0) or not np.all(np.isfinite(v)):
        raise ValidationError("probability vector has negative or non-finite entries")
    s = v.sum()
    if abs(s - 1.0) > REPAIR_TOL:
        raise ValidationError(f"probability vector sums to {s!r}, not 1")
    return _frozen(v / s)


def point_mass(size, state) -> np.ndarray:
    if not 0 <= state < size:
        raise ValidationError(f"state {state} out of range 0..{size - 1}")
    v = np.zeros(size)
    v[state] = 1.0
    return _frozen(v)


def _reachable(adj, start):
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def _adjacency(P):
    positive = P.entries > 0
    return [np.flatnonzero(row).tolist() for row in positive]


def is_irreducible(P) -> bool:
    P = validate(P)
    adj = _adjacency(P)
    radj = _adjacency(TransitionMatrix(P.entries.T))
    n = P.size
    return len(_reachable(adj, 0)) == n and len(_reachable(radj, 0)) == n


def _require_irreducible(P):
    if not is_irreducible(P):
        raise Reducible("transition matrix is not irreducible")


def period(P) -> int:
    """Period of an irreducible chain (1 means aperiodic).

    BFS levels from state 0; the period is the gcd of ``level[u] + 1 - level[v]``
    over all positive edges ``u -> v``.
    """
    P = validate(P)
    _require_irreducible(P)
    adj = _adjacency(P)
    level = {0: 0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in level:
                level[v] = level[u] + 1
                queue.append(v)
    g = 0
    for u, v in P.positive_edges():
        g = gcd(g, abs(level[u] + 1 - level[v]))
    return g


def stationary(P) -> np.ndarray:
    """Unique stationary distribution of an irreducible chain, by a direct solve."""
    P = validate(P)
    _require_irreducible(P)
    n = P.size
    A = P.entries.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    pi = np.linalg.solve(A, b)
    # one step of iterative refinement keeps the residual at rounding level
    r = b - A @ pi
    pi = pi + np.linalg.solve(A, r)
    pi = np.clip(pi, 0.0, None)
    return _frozen(pi / pi.sum())


def reverse(P, pi=None) -> TransitionMatrix:
    """Time reversal ``pbar[k, j] = pi[j] P[j, k] / pi[k]``."""
    P = validate(P)
    pi = stationary(P) if pi is None else as_prob_vector(pi, P.size)
    if np.any(pi <= 0):
        raise ZeroStationaryMass("time reversal needs strictly positive stationary mass")
    rev = (P.entries.T * pi[None, :]) / pi[:, None]
    return validate(rev)


def n_step(P, lam, n: int) -> np.ndarray:
    """Marginal law ``lam P^n`` of the chain after ``n`` steps."""
    P = validate(P)
    lam = as_prob_vector(lam, P.size)
    if n < 0:
        raise ValidationError("n must be nonnegative")
    out = lam @ np.linalg.matrix_power(P.entries, n)
    return _frozen(out)
