"""Return-time constructs at the reference state 0.

Covers the law ``Q`` of the Y-sum over one excursion from 0, its (strong)
aperiodicity, the state-splitting transform, the product chain of two
independent copies, coincidence returns of that product chain, length-biased
interval moments and the stationary-start bound that combines them.
"""
from dataclasses import dataclass, field
from math import exp, gcd, isinf, log

import numpy as np

from .chain import period, reverse, stationary, validate
from .emissions import EmissionModel
from .errors import DegenerateAtZero, Periodic, TailNotResolved, ValidationError
from .lattice import DEFAULT_LATTICE_CAP, LatticePmf, beta_n

DEFAULT_TAIL = 1e-10
HORIZON_CAP = 10**5


@dataclass(frozen=True, eq=False)
class ExcursionSumDist:
    """Law of ``sum_{i=1}^{S_1} Y_i`` given ``X_0 = 0``.

    ``by_length`` holds ``(t, offset, masses)`` with the sub-probability of
    returning at step ``t`` jointly with each sum value.
    """

    pmf: LatticePmf
    deficit: float
    by_length: tuple = field(repr=False, default=())

    def support(self):
        return self.pmf.support()


def excursion_sum_dist(P, m: EmissionModel, eps_tail: float = DEFAULT_TAIL,
                       horizon_cap: int = HORIZON_CAP, cap: int = DEFAULT_LATTICE_CAP) -> ExcursionSumDist:
    """DP on (state, accumulated sum) absorbed at the first return to state 0."""
    P = validate(P)
    if m.n_states != P.size:
        raise ValidationError("emission model and chain sizes differ")
    if not 0 < eps_tail <= 1e-8:
        raise ValidationError("eps_tail must lie in (0, 1e-8]")
    lo, table = m.dense()
    width = table.shape[1]
    PT = P.entries.T
    live = np.zeros((P.size, 1))
    live[0, 0] = 1.0
    offset = 0
    pieces = []
    t = 0
    while True:
        t += 1
        if t > horizon_cap:
            raise TailNotResolved(f"excursion mass {live.sum():.3e} unresolved after {horizon_cap} steps")
        A = PT @ live
        out = np.empty((P.size, A.shape[1] + width - 1))
        for j in range(P.size):
            out[j] = np.convolve(A[j], table[j])
        offset += lo
        absorbed = out[0].copy()
        out[0] = 0.0
        if absorbed.any():
            nz = np.flatnonzero(absorbed)
            pieces.append((t, offset + int(nz[0]), absorbed[nz[0] : nz[-1] + 1]))
        cols = np.flatnonzero(out.any(axis=0))
        if len(cols) == 0:
            deficit = 0.0
            break
        live = out[:, cols[0] : cols[-1] + 1]
        offset += int(cols[0])
        if live.size > cap:
            raise TailNotResolved("excursion lattice exceeded the cell cap")
        deficit = float(live.sum())
        if deficit < eps_tail:
            break

    lo_w = min(p[1] for p in pieces)
    hi_w = max(p[1] + len(p[2]) - 1 for p in pieces)
    total = np.zeros(hi_w - lo_w + 1)
    for _, off, arr in pieces:
        total[off - lo_w : off - lo_w + len(arr)] += arr
    return ExcursionSumDist(LatticePmf.from_array(lo_w, total), deficit, tuple(pieces))


def _support_or_raise(q):
    support = q.support() if hasattr(q, "support") else list(q)
    if not support or set(support) == {0}:
        raise DegenerateAtZero("excursion sum is concentrated at 0")
    return support


def q_period(q) -> int:
    """Largest ``d`` with all support in ``dZ`` (the gcd of the support)."""
    g = 0
    for v in _support_or_raise(q):
        g = gcd(g, abs(int(v)))
    return g


def is_strongly_aperiodic(q) -> bool:
    """True iff the gcd of pairwise support differences is 1."""
    support = _support_or_raise(q)
    g = 0
    for v in support[1:]:
        g = gcd(g, abs(int(v) - int(support[0])))
    return g == 1


def renewal_lattice_span(q: ExcursionSumDist) -> int:
    """Index of the lattice generated by the (return time, excursion sum) pairs.

    Returns the gcd of all 2x2 minors ``t_a w_b - t_b w_a`` over support
    points.  When it exceeds 1, ``W_n`` on ``{X_n = 0}`` is confined to a single
    coset of ``span * Z`` fixed by ``n``, so ``beta(n) >= 2 P(X_n = 0)`` for every
    ``n``.  A value of 0 means the points are collinear.
    """
    # incremental Hermite form [[a, b], [0, c]] of the generated lattice
    a = b = c = 0
    for t, off, arr in q.by_length:
        for w in (off + np.flatnonzero(arr > 0)).tolist():
            x, y = int(t), int(w)
            if a == 0:
                a, b = x, y
                continue
            g, u, v = _ext_gcd(a, x)
            rem = (x // g) * b - (a // g) * y
            a, b = g, u * b + v * y
            c = gcd(c, abs(rem))
            if c:
                b %= c
    return abs(a * c)


def _ext_gcd(a, b):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def split_state_zero(P, m: EmissionModel):
    """Split state 0 into two clones routed by independent fair coins.

    Returns ``(P_hat, m_hat, relabel)``; new states are ``0`` and ``1`` (the two
    clones of old 0) followed by old states ``1..K``, and ``relabel[new] = old``.
    """
    P = validate(P)
    relabel = [0, 0] + list(range(1, P.size))
    old = np.array(relabel)
    weight = np.where(old == 0, 0.5, 1.0)
    Ph = P.entries[np.ix_(old, old)] * weight[None, :]
    mh = EmissionModel(tuple(m.values[k] for k in relabel), tuple(m.probs[k] for k in relabel))
    return validate(Ph), mh, relabel


def product_chain(P):
    """Chain of two independent copies; state ``(k, l)`` has index ``k * (K+1) + l``."""
    P = validate(P)
    if period(P) != 1:
        raise Periodic("product chain of a periodic chain is reducible")
    return validate(np.kron(P.entries, P.entries))


@dataclass(frozen=True, eq=False)
class CoincidenceDist:
    """Law of the product-chain return time to ``(0, 0)``; ``pmf[m - 1] = P(Z = m)``."""

    pmf: np.ndarray
    deficit: float

    def moments(self):
        k = np.arange(1, len(self.pmf) + 1, dtype=float)
        return tuple(float(self.pmf @ k**p) for p in (1, 2, 3))


def first_return_dist(P, target=0, eps_tail=DEFAULT_TAIL, horizon_cap=HORIZON_CAP):
    P = validate(P)
    live = P.entries[target].copy()
    pmf = []
    for _ in range(horizon_cap):
        pmf.append(live[target])
        live[target] = 0.0
        rest = live.sum()
        if rest < eps_tail:
            return CoincidenceDist(np.array(pmf), float(rest))
        live = live @ P.entries
    raise TailNotResolved(f"return-time mass {rest:.3e} unresolved after {horizon_cap} steps")


def coincidence_return_dist(P, eps_tail: float = DEFAULT_TAIL, horizon_cap=HORIZON_CAP) -> CoincidenceDist:
    return first_return_dist(product_chain(P), 0, eps_tail, horizon_cap)


def tau_moments(z: CoincidenceDist, tol: float = 1e-8):
    """``(E tau, E tau^2)`` of the length-biased interval covering a fixed time."""
    if z.deficit > tol:
        raise TailNotResolved(f"return-time deficit {z.deficit:.3e} exceeds {tol:.1e}")
    ez, ez2, ez3 = z.moments()
    return ez2 / ez, ez3 / ez


@dataclass(frozen=True)
class GeometricTerm:
    """Tail model ``C rho^{-m}`` for hitting times; contributes ``C n rho^{-n/4}``."""

    C: float
    rho: float
    policy: str

    def value(self, n):
        if self.C == 0 or isinf(self.rho):
            return 0.0
        return exp(log(self.C) + log(n) - (n / 4) * log(self.rho))

    def describe(self):
        return f"{self.policy} (C={self.C:.6g}, rho={self.rho:.6g})"


ZERO_GEOMETRIC_TERM = GeometricTerm(0.0, float("inf"), "zero")


def _hitting_survival(Q, eps_tail, horizon_cap):
    # u_t(s) = P(D >= t | s): no visit to state 0 at times 0..t-1
    M = Q.entries.copy()
    M[0, :] = 0.0
    u = np.ones(Q.size)
    u[0] = 0.0
    out = [1.0]
    for _ in range(horizon_cap):
        top = float(u.max())
        out.append(top)
        if top < eps_tail:
            return np.array(out)
        u = M @ u
    raise TailNotResolved("hitting-time survival unresolved within the horizon cap")


def estimate_geometric_term(P, eps_tail: float = DEFAULT_TAIL, horizon_cap=HORIZON_CAP) -> GeometricTerm:
    """Fit ``max_s P(D >= m | s) <= C rho^{-m}`` for the product chains of ``P``
    and of its time reversal, returning the worse of the two."""
    P = validate(P)
    fits = []
    for chain in (P, reverse(P)):
        surv = _hitting_survival(product_chain(chain), eps_tail, horizon_cap)
        t = np.arange(len(surv))
        pos = surv > 0
        tail = t[pos][len(t[pos]) // 2 :]
        if len(tail) < 2 or not np.all(pos):
            fits.append((0.0, float("inf")))
            continue
        slope = np.polyfit(tail, np.log(surv[tail]), 1)[0]
        if slope >= 0:
            raise TailNotResolved("hitting-time tail does not decay")
        rho = float(np.exp(-slope))
        C = float(np.max(surv[pos] * rho ** t[pos]))
        fits.append((C, rho))
    C = max(f[0] for f in fits)
    rho = min(f[1] for f in fits)
    if C == 0:
        return GeometricTerm(0.0, float("inf"), "estimate")
    return GeometricTerm(C, rho, "estimate")


def beta_tilde(P, m: EmissionModel, n: int, cap: int = DEFAULT_LATTICE_CAP) -> float:
    """``max(beta(n), beta_bar(n))`` over the chain and its time reversal."""
    P = validate(P)
    return max(beta_n(P, m, n, cap), beta_n(reverse(P, stationary(P)), m, n, cap))


def theorem1_bound(n: int, var_w: float, e_tau2: float, ez3: float, beta_tilde_quarter: float,
                   geometric_term: float = 0.0) -> float:
    """``4 (1 + 14 n phi(n) E tau^2 E Z^3) / Var W`` with
    ``phi(n) = beta_tilde(n/4) + geometric_term``."""
    for name, v in (("var_w", var_w), ("e_tau2", e_tau2), ("ez3", ez3),
                    ("beta_tilde_quarter", beta_tilde_quarter), ("geometric_term", geometric_term)):
        if v < 0:
            raise ValidationError(f"{name} must be nonnegative")
    if var_w == 0:
        return float("inf")
    phi = beta_tilde_quarter + geometric_term
    return 4.0 * (1.0 + 14.0 * n * phi * e_tau2 * ez3) / var_w
