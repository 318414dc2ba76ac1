"""Residue structure of ``W`` when the excursion-sum law has period ``d >= 2``.

Every emission law at state ``k`` sits on ``dZ + rho_k``, and the partial sum
``Y_1 + ... + Y_i`` on ``{X_0 = 0, X_i = k}`` is ``r_k`` mod ``d``.  Along any path
``W_n = r(X_n) - r(X_0) (mod d)``, which drives every formula below.
"""
from collections import deque
from dataclasses import dataclass

import numpy as np

from .chain import as_prob_vector, stationary, validate
from .emissions import EmissionModel
from .errors import EmissionNotLatticeConcentrated, InconsistentResidues, ValidationError
from .tpoisson import DEFAULT_TP_TAIL, TPParams, tp_pmf

VANISH_TOL = 1e-10
EQUI_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PeriodStructure:
    d: int
    rho: tuple
    r: tuple
    classes: tuple
    pi_mass: np.ndarray

    def class_mass(self, lam):
        lam = np.asarray(lam, dtype=float)
        return np.array([lam[list(E)].sum() if E else 0.0 for E in self.classes])


def derive_period_structure(P, m: EmissionModel, d: int) -> PeriodStructure:
    P = validate(P)
    if d < 2:
        raise ValidationError("d must be at least 2")
    if m.n_states != P.size:
        raise ValidationError("emission model and chain sizes differ")
    rho = []
    for k, vals in enumerate(m.values):
        res = set(np.mod(vals, d).tolist())
        if len(res) != 1:
            raise EmissionNotLatticeConcentrated(f"state {k} emits values in residues {sorted(res)} mod {d}")
        rho.append(res.pop())

    r = {0: 0}
    queue = deque([0])
    while queue:
        k = queue.popleft()
        for j in np.flatnonzero(P.entries[k] > 0).tolist():
            if j not in r:
                r[j] = (r[k] + rho[j]) % d
                queue.append(j)
    if len(r) != P.size:
        missing = sorted(set(range(P.size)) - set(r))
        raise InconsistentResidues(f"states {missing} are unreachable from state 0")
    for k, j in P.positive_edges():
        if (r[k] + rho[j]) % d != r[j]:
            raise InconsistentResidues(
                f"edge {k}->{j}: r_{k} + rho_{j} = {r[k] + rho[j]} is not r_{j} = {r[j]} mod {d}")

    rs = tuple(r[k] for k in range(P.size))
    classes = tuple(frozenset(k for k in range(P.size) if rs[k] == c) for c in range(d))
    pi = stationary(P)
    pi_mass = np.array([pi[list(E)].sum() if E else 0.0 for E in classes])
    pi_mass.setflags(write=False)
    return PeriodStructure(d, tuple(rho), rs, classes, pi_mass)


def limit_residue_probs(s: PeriodStructure, lam) -> np.ndarray:
    """``lim_n P^lam(W_n = r mod d) = sum_s lam(E_s) pi(E_{r+s})``."""
    lam = as_prob_vector(lam, len(s.r))
    lm = s.class_mass(lam)
    d = s.d
    return np.array([sum(lm[c] * s.pi_mass[(r + c) % d] for c in range(d)) for r in range(d)])


@dataclass(frozen=True)
class EquidistributionReport:
    pi_class_mass: tuple
    pi_uniform: bool
    lam_class_mass: tuple
    lam_limit: tuple
    lam_uniform_limit: bool
    roots: tuple
    vanishing: tuple
    admits_nonuniform_lambda: bool


def equidistribution_tests(s: PeriodStructure, lam) -> EquidistributionReport:
    """Residue-level tests for whether TP approximation can succeed.

    ``pi(t_j) = sum_s pi(E_s) t_j^s`` is evaluated at the ``d``-th roots of unity;
    if none vanish for ``j >= 1`` the only initial laws with an equidistributed
    limit are those giving mass ``1/d`` to every class.
    """
    d = s.d
    limit = limit_residue_probs(s, lam)
    t = np.exp(2j * np.pi * np.arange(d) / d)
    roots = tuple(complex(np.polyval(s.pi_mass[::-1], tj)) for tj in t)
    vanishing = tuple(abs(z) < VANISH_TOL for z in roots)
    return EquidistributionReport(
        pi_class_mass=tuple(s.pi_mass.tolist()),
        pi_uniform=bool(np.all(np.abs(s.pi_mass - 1.0 / d) <= EQUI_TOL)),
        lam_class_mass=tuple(s.class_mass(as_prob_vector(lam, len(s.r))).tolist()),
        lam_limit=tuple(limit.tolist()),
        lam_uniform_limit=bool(np.all(np.abs(limit - 1.0 / d) <= EQUI_TOL)),
        roots=roots,
        vanishing=vanishing,
        admits_nonuniform_lambda=any(vanishing[1:]),
    )


def asymptotic_tv_gap(s: PeriodStructure, lam, t: TPParams, d: int = None,
                      eps: float = DEFAULT_TP_TAIL) -> float:
    """Residue-partition lower bound on the limiting ``||L(W) - TP||``."""
    d = s.d if d is None else d
    if d != s.d:
        raise ValidationError(f"d={d} does not match the structure's period {s.d}")
    tp_res = tp_pmf(t, eps).residue_masses(d)
    return float(np.abs(limit_residue_probs(s, lam) - tp_res).sum())
