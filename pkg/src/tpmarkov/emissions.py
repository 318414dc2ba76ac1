"""Per-state integer emission laws and the dominating envelope Z."""
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

REPAIR_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class EmissionModel:
    """Finite pmfs ``L(Y | X = k)`` on the integers, one per state.

    ``values[k]`` is a sorted int array and ``probs[k]`` the matching
    strictly positive probabilities.
    """

    values: tuple
    probs: tuple

    @classmethod
    def from_pmfs(cls, pmfs):
        """Build from a sequence of ``{value: probability}`` mappings."""
        values, probs = [], []
        for k, pmf in enumerate(pmfs):
            if not pmf:
                raise ValidationError(f"state {k}: empty emission pmf")
            acc = {}
            for v, p in dict(pmf).items():
                iv = int(v)
                if iv != float(v):
                    raise ValidationError(f"state {k}: emission value {v!r} is not an integer")
                p = float(p)
                if p < 0 or not np.isfinite(p):
                    raise ValidationError(f"state {k}: probability {p!r} for value {iv} is invalid")
                acc[iv] = acc.get(iv, 0.0) + p
            total = sum(acc.values())
            if abs(total - 1.0) > REPAIR_TOL:
                raise ValidationError(f"state {k}: emission pmf sums to {total!r}, not 1")
            keys = sorted(v for v, p in acc.items() if p > 0)
            va = np.array(keys, dtype=np.int64)
            pa = np.array([acc[v] for v in keys]) / total
            va.setflags(write=False)
            pa.setflags(write=False)
            values.append(va)
            probs.append(pa)
        return cls(tuple(values), tuple(probs))

    @property
    def n_states(self):
        return len(self.values)

    @property
    def min_value(self):
        return int(min(v[0] for v in self.values))

    @property
    def max_value(self):
        return int(max(v[-1] for v in self.values))

    def pmf(self, k):
        return dict(zip(self.values[k].tolist(), self.probs[k].tolist()))

    def pmfs(self):
        return [self.pmf(k) for k in range(self.n_states)]

    def dense(self):
        """Return ``(offset, table)`` with ``table[k, v - offset] = P(Y = v | k)``."""
        lo, hi = self.min_value, self.max_value
        table = np.zeros((self.n_states, hi - lo + 1))
        for k in range(self.n_states):
            table[k, self.values[k] - lo] = self.probs[k]
        return lo, table

    def means(self):
        return np.array([float(v @ p) for v, p in zip(self.values, self.probs)])


def score_emissions(h) -> EmissionModel:
    """Degenerate emissions ``Y = h(k)`` on ``{X = k}``."""
    return EmissionModel.from_pmfs([{int(v): 1.0} for v in h])


def conditional_moments(m: EmissionModel, k: int):
    """``(mean, variance, E|Y|^3)`` of the emission law at state ``k``."""
    v = m.values[k].astype(float)
    p = m.probs[k]
    mean = float(p @ v)
    var = float(p @ (v - mean) ** 2)
    abs3 = float(p @ np.abs(v) ** 3)
    return mean, var, abs3


def shift_emissions(m: EmissionModel, c: int) -> EmissionModel:
    """Replace every ``Y`` by ``Y - c``."""
    c = int(c)
    return EmissionModel.from_pmfs([{v - c: p for v, p in m.pmf(k).items()} for k in range(m.n_states)])


@dataclass(frozen=True, eq=False)
class EnvelopeZ:
    """Survival sequence ``survival[r - 1] = P(Z >= r)`` for ``r = 1..len``."""

    survival: np.ndarray

    def pmf(self):
        s = np.append(self.survival, 0.0)
        return dict(zip(range(1, len(s)), (s[:-1] - s[1:]).tolist()))


def dominating_envelope(m: EmissionModel) -> EnvelopeZ:
    """Smallest positive integer variable Z dominating every two-sided tail.

    ``P(Z >= r) = max_l max{P(Y >= r | l), P(Y <= -r | l)}`` for ``r >= 2`` and
    ``P(Z >= 1) = 1``.
    """
    rmax = max(1, max(int(np.abs(v).max()) for v in m.values))
    s = np.zeros(rmax)
    s[0] = 1.0
    for v, p in zip(m.values, m.probs):
        for r in range(2, rmax + 1):
            upper = p[v >= r].sum()
            lower = p[v <= -r].sum()
            s[r - 1] = max(s[r - 1], upper, lower)
    # rounding in the tail sums can push s_r a hair above s_1 = 1
    s = np.minimum.accumulate(np.minimum(s, 1.0))
    # trim trailing zeros, keeping s_1
    nz = np.flatnonzero(s > 0)
    s = s[: nz[-1] + 1]
    s.setflags(write=False)
    return EnvelopeZ(s)


def envelope_moments(z: EnvelopeZ):
    """``(EZ, EZ^2, EZ^3)`` via ``EZ^p = sum_r (r^p - (r-1)^p) P(Z >= r)``."""
    r = np.arange(1, len(z.survival) + 1, dtype=float)
    s = z.survival
    return tuple(float(((r**p - (r - 1) ** p) * s).sum()) for p in (1, 2, 3))
