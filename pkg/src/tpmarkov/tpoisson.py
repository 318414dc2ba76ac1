"""Translated Poisson laws, the Stein operator and its solution, and the
total-variation bound evaluators built on them.

``TP(mu, s2)`` is ``Po(lam')`` shifted by ``gamma = floor(mu - s2)`` with
``delta = mu - s2 - gamma`` and ``lam' = s2 + delta``, so its mean is exactly
``mu`` and its variance ``lam'`` lies in ``[s2, s2 + 1)``.
"""
from dataclasses import dataclass
from math import floor, sqrt

import numpy as np
from scipy import stats
from scipy.special import gammaln

from .errors import NonPositiveVariance, NonZeroTotalMass, ValidationError
from .lattice import LatticePmf

DEFAULT_TP_TAIL = 1e-12


@dataclass(frozen=True)
class TPParams:
    mu: float
    sigma2: float
    gamma: int
    delta: float
    lam: float


def tp_params(mu: float, sigma2: float) -> TPParams:
    if not sigma2 > 0:
        raise NonPositiveVariance(f"variance must be positive, got {sigma2!r}")
    gamma = floor(mu - sigma2)
    # lam from mu directly so that lam + gamma reproduces mu to rounding
    lam = mu - gamma
    delta = max(0.0, lam - sigma2)
    return TPParams(float(mu), float(sigma2), int(gamma), float(delta), float(lam))


def poisson_log_pmf(k, lam):
    k = np.asarray(k, dtype=float)
    return k * np.log(lam) - lam - gammaln(k + 1.0)


def poisson_pmf(lam: float, eps: float = DEFAULT_TP_TAIL) -> LatticePmf:
    """``Po(lam)`` truncated to omit less than ``eps`` of the mass, renormalised."""
    if not lam > 0:
        raise ValidationError(f"Poisson mean must be positive, got {lam!r}")
    if not 0 < eps <= 1e-6:
        raise ValidationError("tail tolerance must lie in (0, 1e-6]")
    kmin = max(0, int(stats.poisson.ppf(eps / 2, lam)) - 1)
    kmax = int(stats.poisson.isf(eps / 2, lam)) + 1
    k = np.arange(kmin, kmax + 1)
    logp = poisson_log_pmf(k, lam)
    p = np.exp(logp - logp.max())
    return LatticePmf.from_array(kmin, p / p.sum())


def tp_pmf(t: TPParams, eps: float = DEFAULT_TP_TAIL) -> LatticePmf:
    return poisson_pmf(t.lam, eps).shift(t.gamma)


def tp_residue_mass(t: TPParams, d: int, r: int, eps: float = DEFAULT_TP_TAIL) -> float:
    """TP mass of the residue class ``d Z + r``."""
    if d < 2:
        raise ValidationError("modulus d must be at least 2")
    return float(tp_pmf(t, eps).residue_masses(d)[r % d])


def tp_pair_bound(t1: TPParams, t2: TPParams) -> float:
    """Upper bound on ``||TP(mu1, s1^2) - TP(mu2, s2^2)||``.

    The bound is stated for ``gamma1 <= gamma2``; the arguments are swapped
    when needed, total variation being symmetric.
    """
    if t1.gamma > t2.gamma:
        t1, t2 = t2, t1
    s1 = sqrt(t1.sigma2)
    return 2.0 * (abs(t1.mu - t2.mu) / s1 + (abs(t1.sigma2 - t2.sigma2) + 1.0) / t1.sigma2)


@dataclass(frozen=True, eq=False)
class SteinSolution:
    """Solution ``f`` of ``lam f(k+1) - k f(k) = 1_C(k) - Po(lam){C}`` on ``[0, kmax]``."""

    lam: float
    C: frozenset
    values: np.ndarray

    @property
    def sup_norm(self):
        return float(np.abs(self.values).max())

    @property
    def sup_delta(self):
        return float(np.abs(np.diff(self.values)).max()) if len(self.values) > 1 else 0.0

    def residuals(self):
        """``lam f(k+1) - k f(k) - (1_C(k) - Po(lam){C})`` for ``k = 0..kmax-1``."""
        f = self.values
        k = np.arange(len(f) - 1)
        ind = np.isin(k, list(self.C)).astype(float)
        pc = _po_mass(self.lam, self.C)
        return self.lam * f[1:] - k * f[:-1] - (ind - pc)


def _po_mass(lam, C):
    if not C:
        return 0.0
    return float(np.exp(poisson_log_pmf(sorted(C), lam)).sum())


def stein_solve(lam: float, C, kmax: int) -> SteinSolution:
    """Solve the Poisson Stein equation with ``f(0) = 0``.

    The naive forward recursion amplifies rounding by ``k / lam``, so ``f`` is
    evaluated from the closed form
    ``lam f(k+1) = sum_{j<=k} (1_C(j) - Po{C}) pi_j / pi_k``
    using ratios to ``pi_k``: accumulated upwards below the mode and, through
    the complementary tail form, downwards above it.
    """
    if not lam > 0:
        raise ValidationError("lam must be positive")
    C = frozenset(int(c) for c in C)
    if any(c < 0 for c in C):
        raise ValidationError("target set must be nonnegative")
    if C and kmax < max(C) + 2:
        raise ValidationError("kmax must be at least max(C) + 2")
    pc = _po_mass(lam, C)
    top = int(max(kmax, lam) + 40 + 10 * sqrt(lam))
    ind = np.zeros(top + 2)
    for c in C:
        ind[c] = 1.0

    f = np.zeros(kmax + 1)
    split = min(int(floor(lam)), kmax - 1)

    # lower region: F(k) = sum_{j<=k} pi_j / pi_k, F(k) = 1 + F(k-1) k / lam
    F = FC = 0.0
    for k in range(0, split + 1):
        F = 1.0 + F * k / lam
        FC = ind[k] + FC * k / lam
        f[k + 1] = (FC - pc * F) / lam

    # upper region: G(k) = sum_{j>k} pi_j / pi_k, G(k) = lam/(k+1) (1 + G(k+1))
    G = GC = 0.0
    for k in range(top, split, -1):
        G = lam / (k + 1) * (1.0 + G)
        GC = lam / (k + 1) * (ind[k + 1] + GC)
        if k + 1 <= kmax:
            f[k + 1] = (pc * G - GC) / lam
    f.setflags(write=False)
    return SteinSolution(float(lam), C, f)


class TableFunction:
    """Finite-table test function; evaluating outside the table is an error."""

    def __init__(self, offset, values):
        self.offset = int(offset)
        self.values = np.asarray(values, dtype=float)

    def __call__(self, w):
        idx = np.asarray(w) - self.offset
        if np.any(idx < 0) or np.any(idx >= len(self.values)):
            raise ValidationError("test function evaluated outside its table")
        return self.values[idx]


def stein_residual(p: LatticePmf, t: TPParams, f) -> float:
    """``E[lam' f(W+1) - (W - gamma) f(W)]`` for ``W ~ p``."""
    w = p.points()
    return float(p.masses @ (t.lam * f(w + 1) - (w - t.gamma) * f(w)))


def stein_tv_bound(delta: float, sum_b: float, lam: float, tail: float) -> float:
    """``2 (delta + sum b_i) / lam' + 2 P[W < EW - sigma^2]``."""
    return 2.0 * (delta + sum_b) / lam + 2.0 * tail


def _signed(c, offset):
    if isinstance(c, dict):
        keys = sorted(int(k) for k in c)
        arr = np.zeros(keys[-1] - keys[0] + 1)
        for k, v in c.items():
            arr[int(k) - keys[0]] += float(v)
        return keys[0], arr
    return int(offset), np.asarray(c, dtype=float)


def _tail_sums(c, offset):
    offset, c = _signed(c, offset)
    scale = max(1.0, float(np.abs(c).sum()))
    total = float(c.sum())
    if abs(total) > 1e-12 * scale:
        raise NonZeroTotalMass(f"measure has total mass {total!r}")
    # C(t) = sum_{w >= t} c(w) for t = offset+1 .. offset+len-1
    tails = np.cumsum(c[::-1])[::-1][1:]
    return offset, tails


def minimal_b(c, offset: int = 0) -> float:
    """``sup_{||Delta f|| <= 1} |sum_w c(w) f(w)|`` for a mass-zero measure ``c``.

    Summation by parts gives ``sum_w c(w) f(w) = sum_t C(t) Delta f(t - 1)``
    with ``C(t) = sum_{w >= t} c(w)``, so the supremum is ``sum_t |C(t)|``.
    """
    _, tails = _tail_sums(c, offset)
    return float(np.abs(tails).sum())


def minimal_b_extremal(c, offset: int = 0) -> TableFunction:
    """The staircase ``f`` with ``Delta f(t-1) = sign C(t)`` attaining :func:`minimal_b`."""
    off, tails = _tail_sums(c, offset)
    f = np.concatenate([[0.0], np.cumsum(np.sign(tails))])
    return TableFunction(off, f)
