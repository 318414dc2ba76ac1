"""Monte Carlo realisation of the two-chain coupling.

Every replicate owns a private stream spawned from the root seed with
:class:`numpy.random.SeedSequence`, and consumes it in an order that depends
only on its own trajectory.  Batching and thread parallelism therefore never
change the per-replicate outcomes.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .chain import reverse, stationary, validate
from .emissions import EmissionModel
from .errors import NotStronglyAperiodic, ValidationError
from .returns import excursion_sum_dist, is_strongly_aperiodic


@dataclass(frozen=True)
class McConfig:
    replicates: int
    seed: int
    n: int = 0
    chunk_size: int = 2000
    workers: int = 1

    def __post_init__(self):
        if self.replicates < 1:
            raise ValidationError("replicates must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True, eq=False)
class McEstimate:
    value: float
    se: float
    replicates: int
    samples: np.ndarray = field(default=None, repr=False)


def _estimate(samples, scale=1.0):
    r = len(samples)
    mean = math.fsum(samples) / r
    if r > 1:
        var = math.fsum((s - mean) ** 2 for s in samples) / (r - 1)
    else:
        var = 0.0
    return McEstimate(scale * mean, scale * math.sqrt(var / r), r, np.asarray(samples))


class _Sampler:
    """Vectorised inverse-CDF draws for transitions and emissions."""

    def __init__(self, P, m):
        self.cum = np.cumsum(P.entries, axis=1)
        self.K = P.size - 1
        width = max(len(v) for v in m.values)
        self.vals = np.zeros((m.n_states, width), dtype=np.int64)
        self.ecum = np.ones((m.n_states, width))
        for k, (v, p) in enumerate(zip(m.values, m.probs)):
            self.vals[k, : len(v)] = v
            self.vals[k, len(v) :] = v[-1]
            self.ecum[k, : len(v)] = np.cumsum(p)
        self.width = width

    def step(self, x, u):
        nxt = (u[:, None] >= self.cum[x]).sum(axis=1)
        return np.minimum(nxt, self.K)

    def emit(self, x, u):
        idx = np.minimum((u[:, None] >= self.ecum[x]).sum(axis=1), self.width - 1)
        return self.vals[x, idx]

    def initial(self, pi, u):
        return np.minimum((u[:, None] >= np.cumsum(pi)[None, :]).sum(axis=1), self.K)


def simulate_pair(P, m: EmissionModel, n: int, seed: int):
    """Two independent stationary trajectories ``((X, Y), (X', Y'))`` of length ``n + 1``."""
    P = validate(P)
    pi = stationary(P)
    sampler = _Sampler(P, m)
    out = []
    for ss in np.random.SeedSequence(seed).spawn(2):
        u = np.random.default_rng(ss).random((n + 1, 2))
        x = np.empty(n + 1, dtype=np.int64)
        x[0] = sampler.initial(pi, u[:1, 0])[0]
        for t in range(1, n + 1):
            x[t] = sampler.step(x[t - 1 : t], u[t : t + 1, 0])[0]
        y = sampler.emit(x, u[:, 1])
        out.append((x, y))
    return tuple(out)


def _chunks(cfg):
    seqs = np.random.SeedSequence(cfg.seed).spawn(cfg.replicates)
    return [seqs[i : i + cfg.chunk_size] for i in range(0, cfg.replicates, cfg.chunk_size)]


def _run_chunks(fn, cfg):
    chunks = _chunks(cfg)
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as ex:
            parts = list(ex.map(fn, chunks))
    else:
        parts = [fn(c) for c in chunks]
    return np.concatenate(parts)


def estimate_beta(P, m: EmissionModel, n: int, cfg: McConfig) -> McEstimate:
    """Monte Carlo estimate of the coupling bound ``2 P^0(S_tau > n)`` on ``beta(n)``.

    Both chains start at 0.  A replicate couples at the first joint visit to 0
    at which ``1 + W_t = W'_t``; the estimate is twice the fraction of replicates
    that have not coupled by time ``n``.
    """
    P = validate(P)
    if not is_strongly_aperiodic(excursion_sum_dist(P, m)):
        raise NotStronglyAperiodic("excursion-sum law is not strongly aperiodic; split state 0 first")
    sampler = _Sampler(P, m)

    def run(seqs):
        U = np.stack([np.random.default_rng(s).random((n, 4)) for s in seqs])
        c = len(seqs)
        x = np.zeros(c, dtype=np.int64)
        xp = np.zeros(c, dtype=np.int64)
        w = np.zeros(c, dtype=np.int64)
        wp = np.zeros(c, dtype=np.int64)
        coupled = np.zeros(c, dtype=bool)
        for t in range(n):
            x = sampler.step(x, U[:, t, 0])
            xp = sampler.step(xp, U[:, t, 1])
            w += sampler.emit(x, U[:, t, 2])
            wp += sampler.emit(xp, U[:, t, 3])
            coupled |= (x == 0) & (xp == 0) & (1 + w == wp)
        return (~coupled).astype(float)

    return _estimate(_run_chunks(run, cfg).tolist(), scale=2.0)


def estimate_tau_moments(P, cfg: McConfig, block: int = 64):
    """Monte Carlo ``(E tau, E tau^2)`` for the coincidence interval covering time 0.

    The pair is drawn from ``pi x pi`` at time 0, run forwards with ``P`` to the
    first joint visit to 0 after time 0, and backwards with the time reversal to
    the last joint visit at or before time 0.
    """
    P = validate(P)
    pi = stationary(P)
    fwd = _Sampler(P, EmissionModel.from_pmfs([{0: 1.0}] * P.size))
    bwd = _Sampler(reverse(P, pi), EmissionModel.from_pmfs([{0: 1.0}] * P.size))

    def run(seqs):
        rngs = [np.random.default_rng(s) for s in seqs]
        c = len(rngs)
        init = np.stack([g.random(2) for g in rngs])
        x0 = fwd.initial(pi, init[:, 0])
        x0p = fwd.initial(pi, init[:, 1])
        buf = [g.random((block, 4)) for g in rngs]
        x, xp, bx, bxp = x0.copy(), x0p.copy(), x0.copy(), x0p.copy()
        t_plus = np.zeros(c, dtype=np.int64)
        t_minus = np.where((x0 == 0) & (x0p == 0), 0, -1)
        t = 0
        while True:
            active = np.flatnonzero((t_plus == 0) | (t_minus < 0))
            if len(active) == 0:
                break
            if t % block == 0 and t > 0:
                for i in active:
                    buf[i] = np.vstack([buf[i], rngs[i].random((block, 4))])
            u = np.zeros((c, 4))
            u[active] = np.stack([buf[i][t] for i in active])
            f_act = t_plus == 0
            x = np.where(f_act, fwd.step(x, u[:, 0]), x)
            xp = np.where(f_act, fwd.step(xp, u[:, 1]), xp)
            hit = f_act & (x == 0) & (xp == 0)
            t_plus[hit] = t + 1
            b_act = t_minus < 0
            bx = np.where(b_act, bwd.step(bx, u[:, 2]), bx)
            bxp = np.where(b_act, bwd.step(bxp, u[:, 3]), bxp)
            bhit = b_act & (bx == 0) & (bxp == 0)
            t_minus[bhit] = t + 1
            t += 1
        return (t_plus + t_minus).astype(float)

    tau = _run_chunks(run, cfg).tolist()
    return _estimate(tau), _estimate([v * v for v in tau])
