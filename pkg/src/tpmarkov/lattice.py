"""Exact laws on the integer lattice and the forward DP for ``(X_n, W_n)``.

``W_n = Y_1 + ... + Y_n``; the initial state ``X_0`` emits nothing.  All
distances use the doubled total-variation convention
``||p - q|| = sum_w |p(w) - q(w)|``, which lies in ``[0, 2]``.
"""
from dataclasses import dataclass

import numpy as np

from .chain import as_prob_vector, point_mass, validate
from .emissions import EmissionModel
from .errors import LatticeOverflow, MassDrift, ValidationError

DEFAULT_LATTICE_CAP = 10**7
DRIFT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class LatticePmf:
    """Probability mass on ``offset, offset + 1, ...``; ends are nonzero."""

    offset: int
    masses: np.ndarray

    @classmethod
    def from_array(cls, offset, masses):
        m = np.asarray(masses, dtype=float)
        nz = np.flatnonzero(m)
        if len(nz) == 0:
            raise ValidationError("lattice pmf has no mass")
        m = np.array(m[nz[0] : nz[-1] + 1])
        m.setflags(write=False)
        return cls(int(offset) + int(nz[0]), m)

    @classmethod
    def from_dict(cls, pmf):
        keys = sorted(int(k) for k in pmf)
        arr = np.zeros(keys[-1] - keys[0] + 1)
        for k, v in pmf.items():
            arr[int(k) - keys[0]] += float(v)
        return cls.from_array(keys[0], arr)

    @property
    def support_min(self):
        return self.offset

    @property
    def support_max(self):
        return self.offset + len(self.masses) - 1

    def points(self):
        return np.arange(self.offset, self.offset + len(self.masses))

    def total(self):
        return float(self.masses.sum())

    def prob(self, w):
        i = int(w) - self.offset
        return float(self.masses[i]) if 0 <= i < len(self.masses) else 0.0

    def support(self):
        return (self.offset + np.flatnonzero(self.masses > 0)).tolist()

    def to_dict(self):
        return {int(w): float(p) for w, p in zip(self.points(), self.masses) if p > 0}

    def shift(self, c):
        return LatticePmf(self.offset + int(c), self.masses)

    def residue_masses(self, d):
        """Mass of each residue class ``w = r (mod d)``, ``r = 0..d-1``."""
        r = np.mod(self.points(), d)
        return np.bincount(r, weights=self.masses, minlength=d)


@dataclass(frozen=True, eq=False)
class JointLatticePmf:
    """``masses[k, j] = P(X_n = k, W_n = offset + j)``."""

    offset: int
    masses: np.ndarray

    def state_marginal(self):
        return self.masses.sum(axis=1)

    def total(self):
        return float(self.masses.sum())


def forward_joint(P, m: EmissionModel, lam, n: int, cap: int = DEFAULT_LATTICE_CAP) -> JointLatticePmf:
    """Exact joint law of ``(X_n, W_n)`` with ``X_0 ~ lam``, by forward DP."""
    P = validate(P)
    if m.n_states != P.size:
        raise ValidationError(f"emission model has {m.n_states} states, chain has {P.size}")
    lam = as_prob_vector(lam, P.size)
    if n < 0:
        raise ValidationError("n must be nonnegative")
    lo, table = m.dense()
    width = table.shape[1]
    cells = P.size * (1 + n * (width - 1))
    if cells > cap:
        raise LatticeOverflow(f"joint lattice needs {cells} cells, cap is {cap}")

    J = np.array(lam, dtype=float)[:, None]
    offset = 0
    PT = P.entries.T
    start_mass = J.sum()
    for step in range(1, n + 1):
        A = PT @ J
        out = np.empty((P.size, A.shape[1] + width - 1))
        for j in range(P.size):
            out[j] = np.convolve(A[j], table[j])
        J = out
        offset += lo
        drift = abs(J.sum() - start_mass)
        if drift > DRIFT_TOL * step:
            raise MassDrift(f"mass drifted by {drift:.3e} after {step} steps")

    cols = np.flatnonzero(J.any(axis=0))
    J = np.ascontiguousarray(J[:, cols[0] : cols[-1] + 1])
    J.setflags(write=False)
    return JointLatticePmf(offset + int(cols[0]), J)


def marginal_w(j: JointLatticePmf) -> LatticePmf:
    return LatticePmf.from_array(j.offset, j.masses.sum(axis=0))


def mean_var(p: LatticePmf):
    w = p.points().astype(float)
    total = p.masses.sum()
    mean = float(p.masses @ w / total)
    var = float(p.masses @ (w - mean) ** 2 / total)
    return mean, var


def _aligned(p, q):
    lo = min(p.offset, q.offset)
    hi = max(p.support_max, q.support_max)
    a = np.zeros(hi - lo + 1)
    b = np.zeros(hi - lo + 1)
    a[p.offset - lo : p.offset - lo + len(p.masses)] = p.masses
    b[q.offset - lo : q.offset - lo + len(q.masses)] = q.masses
    return a, b


def tv(p: LatticePmf, q: LatticePmf) -> float:
    """``sum_w |p(w) - q(w)|``, clipped to ``[0, 2]`` to absorb rounding."""
    a, b = _aligned(p, q)
    return float(min(2.0, np.abs(a - b).sum()))


def shift_tv(p: LatticePmf) -> float:
    """``||L(W + 1) - L(W)||``."""
    return tv(p.shift(1), p)


def beta_n(P, m: EmissionModel, n: int, cap: int = DEFAULT_LATTICE_CAP) -> float:
    """Smoothness ``||L(X_n, 1 + W_n) - L(X_n, W_n)||`` started from ``X_0 = 0``."""
    P = validate(P)
    J = forward_joint(P, m, point_mass(P.size, 0), n, cap=cap)
    padded = np.pad(J.masses, ((0, 0), (1, 1)))
    return float(min(2.0, np.abs(padded[:, 1:] - padded[:, :-1]).sum()))
