"""Independent oracles shared by the tests."""
import itertools

import numpy as np

ACCEPTANCE = []


def report(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} | {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return ok


def enumerate_joint(P, m, lam, n):
    """``{(state, w): prob}`` for ``(X_n, W_n)`` by summing over every path and emission."""
    P = np.asarray(P)
    K1 = P.shape[0]
    pmfs = m.pmfs()
    out = {}
    for path in itertools.product(range(K1), repeat=n + 1):
        pp = lam[path[0]]
        for a, b in zip(path, path[1:]):
            pp *= P[a, b]
        if pp == 0:
            continue
        for ys in itertools.product(*(pmfs[k].items() for k in path[1:])):
            pr = pp
            for _, q in ys:
                pr *= q
            key = (path[-1], sum(v for v, _ in ys))
            out[key] = out.get(key, 0.0) + pr
    return out


def convolve_bernoulli(ps):
    """Exact law of a sum of independent Bernoulli variables, as an array on 0..n."""
    dist = np.array([1.0])
    for p in ps:
        dist = np.convolve(dist, [1 - p, p])
    return dist


def excursions(P, m, max_len):
    """``{sum: prob}`` for excursions from 0 of length up to ``max_len``, by path enumeration."""
    P = np.asarray(P)
    K1 = P.shape[0]
    out = {}
    for L in range(1, max_len + 1):
        for inner in itertools.product(range(1, K1), repeat=L - 1):
            path = (0,) + inner + (0,)
            pp = 1.0
            for a, b in zip(path, path[1:]):
                pp *= P[a, b]
            if pp == 0:
                continue
            for ys in itertools.product(*(m.pmf(k).items() for k in path[1:])):
                pr = pp
                for _, q in ys:
                    pr *= q
                s = sum(v for v, _ in ys)
                out[s] = out.get(s, 0.0) + pr
    return out
