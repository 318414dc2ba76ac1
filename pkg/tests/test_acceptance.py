"""Acceptance criteria, one test and one printed PASS/FAIL line each.

Tolerances and windows are fixed by the acceptance contract and are not
tuned to the results.
"""
import json
import math
import time

import numpy as np

from helpers import convolve_bernoulli, enumerate_joint, report
from tpmarkov.chain import point_mass, stationary
from tpmarkov.coupling import McConfig, estimate_beta
from tpmarkov.experiments import ols_slope, parse_config, run_decay, run_period_report, run_smoothness
from tpmarkov.fixtures import fixture_a, fixture_b, fixture_c
from tpmarkov.lattice import LatticePmf, beta_n, forward_joint, marginal_w, mean_var, tv
from tpmarkov.periodic import asymptotic_tv_gap, derive_period_structure, equidistribution_tests
from tpmarkov.returns import excursion_sum_dist, is_strongly_aperiodic, split_state_zero
from tpmarkov.tpoisson import (TableFunction, minimal_b, minimal_b_extremal, poisson_pmf, stein_residual,
                               stein_solve, tp_pair_bound, tp_params, tp_pmf)

GRID = [2**k for k in range(6, 13)]
SLOPE_WINDOW = (-0.65, -0.35)


def in_window(s):
    return SLOPE_WINDOW[0] <= s <= SLOPE_WINDOW[1]


def fixture_a_config(**extra):
    doc = {"fixture": "A", "n_grid": GRID}
    doc.update(extra)
    return parse_config(json.dumps(doc))


def test_criterion_01_stein_characterization():
    t0 = time.perf_counter()
    t = tp_params(10.5, 4.0)
    p = tp_pmf(t)
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(100):
        f = TableFunction(p.offset, rng.uniform(-1.0, 1.0, len(p.masses) + 1))
        worst = max(worst, abs(stein_residual(p, t, f)))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-8 and dt < 1.0
    assert report(1, ok, f"max |residual| = {worst:.3e} (<= 1e-8), {dt:.3f} s (< 1 s)")


def test_criterion_02_stein_solver_bounds():
    t0 = time.perf_counter()
    violations = 0
    worst = 0.0
    for lam in (0.5, 1.0, 5.0, 20.0):
        for c in range(201):
            s = stein_solve(lam, {c}, 202)
            violations += s.sup_norm > lam**-0.5
            violations += s.sup_delta > 1.0 / lam
            worst = max(worst, s.sup_norm * lam**0.5, s.sup_delta * lam)
    dt = time.perf_counter() - t0
    ok = violations == 0 and dt < 1.0
    assert report(2, ok, f"{violations} violations over 804 singletons, "
                         f"max normalised norm {worst:.4f}, {dt:.3f} s (< 1 s)")


def test_criterion_03_le_cam():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    violations = 0
    for _ in range(20):
        ps = rng.uniform(0.0, 1.0, int(rng.integers(1, 13)))
        lam = ps.sum()
        w = LatticePmf.from_array(0, convolve_bernoulli(ps))
        violations += tv(w, poisson_pmf(lam)) > 2.0 / lam * (ps**2).sum()
    dt = time.perf_counter() - t0
    ok = violations == 0 and dt < 1.0
    assert report(3, ok, f"{violations} violations over 20 Bernoulli vectors, {dt:.3f} s (< 1 s)")


def test_criterion_04_pair_bound():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    violations = 0
    for _ in range(50):
        s1, s2 = rng.uniform(4.0, 100.0, 2)
        mu1 = rng.uniform(0.0, 300.0)
        mu2 = mu1 + rng.uniform(-20.0, 20.0)
        a, b = tp_params(mu1, s1), tp_params(mu2, s2)
        violations += tv(tp_pmf(a), tp_pmf(b)) > tp_pair_bound(a, b)
    dt = time.perf_counter() - t0
    ok = violations == 0 and dt < 10.0
    assert report(4, ok, f"{violations} violations over 50 TP pairs, {dt:.3f} s (< 10 s)")


def test_criterion_05_oracle_equivalence():
    worst = 0.0
    for fixture in (fixture_a, fixture_b, fixture_c):
        P, m = fixture()
        for lam in (point_mass(P.size, 0), stationary(P)):
            for n in range(0, 7):
                J = forward_joint(P, m, lam, n)
                brute = enumerate_joint(P.entries, m, lam, n)
                dp = {(k, J.offset + j): p for k in range(P.size) for j, p in enumerate(J.masses[k]) if p > 0}
                for key in set(dp) | set(brute):
                    worst = max(worst, abs(dp.get(key, 0.0) - brute.get(key, 0.0)))
    q = excursion_sum_dist(*fixture_a()).pmf.to_dict()
    q_err = max(abs(q.get(3, 0) - 0.9), abs(q.get(5, 0) - 0.1), sum(v for k, v in q.items() if k not in (3, 5)))
    ok = worst <= 1e-12 and q_err <= 1e-12
    assert report(5, ok, f"DP vs enumeration max diff {worst:.2e}, excursion law error {q_err:.2e} (<= 1e-12)")


def test_criterion_06_rate_verification():
    t0 = time.perf_counter()
    stat = run_decay(fixture_a_config())
    s1 = stat.summary["slope_d_TV"]
    root_n = [math.sqrt(r[0]) * r[3] for r in stat.rows]
    bounded = max(root_n) <= 2 * root_n[0]
    point = run_decay(fixture_a_config(initial={"state": 1}))
    s2 = point.summary["slope_d_TV"]
    split_noted = any("split" in c for c in stat.comments)
    dt = time.perf_counter() - t0
    ok = in_window(s1) and bounded and in_window(s2) and split_noted and dt < 300
    d_tv = ", ".join(f"{r[3]:.4f}" for r in stat.rows)
    assert report(6, ok, f"stationary slope {s1:.4f}, sqrt(n) d_TV max/first "
                         f"{max(root_n) / root_n[0]:.2f} (<= 2), state-1 slope {s2:.4f}, "
                         f"window {SLOPE_WINDOW}, auto-split noted {split_noted}, d_TV = [{d_tv}], {dt:.1f} s")


def test_criterion_07_smoothness_rate():
    t0 = time.perf_counter()
    Ps, ms, _ = split_state_zero(*fixture_a())
    betas = [beta_n(Ps, ms, n) for n in GRID]
    slope = ols_slope(GRID, betas)
    mc_ok = True
    parts = []
    for n in (64, 256, 1024):
        est = estimate_beta(Ps, ms, n, McConfig(10_000, 700 + n, n))
        exact = beta_n(Ps, ms, n)
        mc_ok &= exact <= est.value + 3 * est.se
        parts.append(f"n={n}: {exact:.4f} <= {est.value:.4f} + 3*{est.se:.4f}")
    dt = time.perf_counter() - t0
    ok = in_window(slope) and mc_ok and dt < 300
    assert report(7, ok, f"beta slope {slope:.4f} (window {SLOPE_WINDOW}), MC domination {mc_ok} "
                         f"[{'; '.join(parts)}], {dt:.1f} s")


def test_criterion_08_state_splitting():
    P, m = fixture_a()
    Ps, ms, _ = split_state_zero(P, m)
    worst = 0.0
    for n in (1, 8, 64):
        a = marginal_w(forward_joint(P, m, stationary(P), n))
        b = marginal_w(forward_joint(Ps, ms, stationary(Ps), n))
        lo = min(a.offset, b.offset)
        hi = max(a.support_max, b.support_max)
        worst = max(worst, max(abs(a.prob(w) - b.prob(w)) for w in range(lo, hi + 1)))
    strong = is_strongly_aperiodic(excursion_sum_dist(Ps, ms))
    ok = worst <= 1e-12 and strong
    assert report(8, ok, f"split vs unsplit max diff {worst:.2e} (<= 1e-12), Q-hat strongly aperiodic {strong}")


def test_criterion_09_periodic_obstruction():
    t0 = time.perf_counter()
    P, m = fixture_b()
    pi = stationary(P)
    W = marginal_w(forward_joint(P, m, pi, 2**12))
    res = W.residue_masses(3)
    target = np.array([121, 22, 1]) / 144
    a_ok = np.abs(res - target).max() <= 1e-3
    mass01 = res[0] + res[1]
    b_ok = mass01 >= 0.99
    s = derive_period_structure(P, m, 3)
    dtv = {}
    for n in (2**10, 2**11, 2**12):
        Wn = marginal_w(forward_joint(P, m, pi, n))
        dtv[n] = tv(Wn, tp_pmf(tp_params(*mean_var(Wn))))
    c_ok = all(v >= 0.6 for v in dtv.values())
    gap = asymptotic_tv_gap(s, pi, tp_params(*mean_var(W)))
    vals = list(dtv.values())
    nondecreasing = all(b >= a for a, b in zip(vals, vals[1:]))
    converging = abs(vals[-1] - gap) < abs(vals[0] - gap)
    d_ok = nondecreasing and converging and abs(gap - 1.01) <= 0.005
    dt = time.perf_counter() - t0
    ok = a_ok and b_ok and c_ok and d_ok and dt < 120
    assert report(9, ok, f"residues x144 = {np.round(res * 144, 3).tolist()} vs [121, 22, 1] ({a_ok}); "
                         f"P(3Z u 3Z+1) = {mass01:.4f} >= 0.99 ({b_ok}); "
                         f"d_TV at 2^10..2^12 = {[f'{v:.7f}' for v in vals]} >= 0.6 ({c_ok}); "
                         f"gap {gap:.7f} vs 1.01 +- 0.005, non-decreasing {nondecreasing}, "
                         f"converging to gap {converging} ({d_ok}); {dt:.1f} s")


def test_criterion_10_fixture_c_dichotomy():
    P, m = fixture_c(0.5, 0.5)
    eq = equidistribution_tests(derive_period_structure(P, m, 2), stationary(P))
    even = eq.pi_uniform and eq.pi_class_mass == (0.5, 0.5)
    P, m = fixture_c(0.25, 0.75)
    s = derive_period_structure(P, m, 2)
    eq2 = equidistribution_tests(s, stationary(P))
    rep = run_period_report(parse_config(json.dumps(
        {"fixture": "C", "fixture_params": {"alpha": "1/4", "beta": "3/4"}, "n_grid": [1024]})))
    uneven = (not eq2.pi_uniform) and not eq2.vanishing[1] and rep["d_TV"] > 0.1
    ok = even and uneven
    assert report(10, ok, f"alpha=beta=1/2: pi(E) = {eq.pi_class_mass} ({even}); alpha=1/4, beta=3/4: "
                          f"pi(E) = {tuple(round(x, 4) for x in eq2.pi_class_mass)}, "
                          f"|pi(-1)| = {abs(eq2.roots[1]):.4f}, d_TV(2^10) = {rep['d_TV']:.4f} > 0.1 ({uneven})")


def test_criterion_11_bound_sanity():
    table = run_decay(fixture_a_config())
    slope = table.summary["slope_theorem1_bound"]
    dominated = all(r[5] >= r[3] for r in table.rows if r[0] >= 256)
    flagged = any("WARNING: bound below" in c for c in table.comments)
    soft = dominated or flagged
    policy = next(c for c in table.comments if c.startswith("geom_term:"))
    ok = in_window(slope) and soft
    assert report(11, ok, f"bound slope {slope:.4f} (window {SLOPE_WINDOW}), dominates d_TV for n >= 256 "
                          f"{dominated}, {policy}")


def test_criterion_12_minimal_b_oracle():
    rng = np.random.default_rng(12)
    exceeded = 0
    worst_gap = 0.0
    for _ in range(30):
        L = int(rng.integers(2, 25))
        c = rng.normal(size=L)
        c -= c.mean()
        off = int(rng.integers(-20, 20))
        b = minimal_b(c, off)
        steps = rng.uniform(-1.0, 1.0, (10_000, L - 1))
        fs = np.concatenate([np.zeros((10_000, 1)), np.cumsum(steps, axis=1)], axis=1)
        exceeded += int(np.max(np.abs(fs @ c)) > b)
        f = minimal_b_extremal(c, off)
        worst_gap = max(worst_gap, abs(abs(c @ f(off + np.arange(L))) - b))
    ok = exceeded == 0 and worst_gap <= 1e-10
    assert report(12, ok, f"sampled sup exceeded closed form {exceeded} times (0 allowed), "
                          f"extremal gap {worst_gap:.2e} (<= 1e-10)")


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
