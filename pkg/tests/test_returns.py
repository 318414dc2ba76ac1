from math import gcd

import numpy as np
import pytest

from helpers import excursions
from tpmarkov.chain import is_irreducible, period, stationary, validate
from tpmarkov.emissions import EmissionModel, score_emissions
from tpmarkov.errors import DegenerateAtZero, Periodic, TailNotResolved, ValidationError
from tpmarkov.fixtures import fixture_a, fixture_b, fixture_c, smooth_fixture, split_needed_fixture
from tpmarkov.lattice import beta_n, forward_joint, marginal_w
from tpmarkov.returns import (ZERO_GEOMETRIC_TERM, CoincidenceDist, GeometricTerm, beta_tilde,
                              coincidence_return_dist, estimate_geometric_term, excursion_sum_dist,
                              is_strongly_aperiodic, product_chain, q_period, renewal_lattice_span,
                              split_state_zero, tau_moments, theorem1_bound)


def test_excursion_sum_fixtures():
    q = excursion_sum_dist(*fixture_a())
    assert q.pmf.to_dict() == pytest.approx({3: 0.9, 5: 0.1}, abs=1e-12)
    assert q.deficit == 0
    q = excursion_sum_dist(*fixture_b())
    assert q.pmf.to_dict() == pytest.approx({3: 0.9, 6: 0.1}, abs=1e-12)
    q = excursion_sum_dist(validate([[1.0]]), score_emissions([1]))
    assert q.pmf.to_dict() == {1: 1.0}


@pytest.mark.parametrize("fixture", [smooth_fixture, lambda: fixture_c(0.5, 0.5), split_needed_fixture])
def test_excursion_sum_matches_path_enumeration(fixture):
    P, m = fixture()
    q = excursion_sum_dist(P, m)
    assert q.deficit <= 1e-10
    assert q.pmf.total() + q.deficit == pytest.approx(1.0, abs=1e-12)
    # the enumeration stops at length 9; compare only the masses it fully resolves
    brute = excursions(P.entries, m, 9)
    short = {}
    for t, off, arr in q.by_length:
        if t <= 9:
            for j, p in enumerate(arr):
                short[off + j] = short.get(off + j, 0.0) + p
    for w in set(brute) | set(short):
        assert abs(brute.get(w, 0.0) - short.get(w, 0.0)) <= 1e-12


def test_excursion_deficit_decays_geometrically():
    P, m = fixture_c(0.5, 0.5)
    deficits = [excursion_sum_dist(P, m, eps_tail=e).deficit for e in (1e-8, 1e-9, 1e-10)]
    assert deficits[0] > deficits[1] > deficits[2] > 0
    with pytest.raises(ValidationError):
        excursion_sum_dist(P, m, eps_tail=1e-3)


def test_excursion_horizon_cap():
    P = validate([[0.999, 0.001], [0.001, 0.999]])
    with pytest.raises(TailNotResolved):
        excursion_sum_dist(P, score_emissions([1, 1]), horizon_cap=50)


def test_q_period():
    assert q_period(excursion_sum_dist(*fixture_a())) == 1
    assert q_period(excursion_sum_dist(*fixture_b())) == 3
    assert q_period([4, 6]) == 2
    assert q_period([0, 6, 9]) == 3
    with pytest.raises(DegenerateAtZero):
        q_period([0])


def direct_strong_aperiodicity(support):
    # g.c.d.{k + i} = 1 for every integer shift k over a window covering all residues
    span = max(abs(v) for v in support) + 1
    for k in range(-2 * span, 2 * span + 1):
        g = 0
        for i in support:
            g = gcd(g, abs(k + i))
        if g != 1:
            return False
    return True


def test_strong_aperiodicity():
    assert not is_strongly_aperiodic(excursion_sum_dist(*fixture_a()))
    assert is_strongly_aperiodic([3, 4])
    assert not is_strongly_aperiodic([5])
    for support in ([3, 5], [3, 4], [3, 6], [2, 5, 9], [4, 10, 13], [1, 7]):
        assert is_strongly_aperiodic(support) == direct_strong_aperiodicity(support)


def test_split_preserves_w_law():
    P, m = fixture_a()
    Ps, ms, relabel = split_state_zero(P, m)
    assert relabel == [0, 0, 1, 2]
    assert is_irreducible(Ps) and period(Ps) == 1
    pi = stationary(P)
    pis = stationary(Ps)
    assert pis[0] == pytest.approx(pis[1], abs=1e-15)
    assert np.allclose([pis[0] + pis[1], pis[2], pis[3]], pi, atol=1e-14)
    for n in (1, 8, 64):
        a = marginal_w(forward_joint(P, m, pi, n))
        b = marginal_w(forward_joint(Ps, ms, pis, n))
        assert a.offset == b.offset
        assert np.abs(a.masses - b.masses).max() <= 1e-12


def test_split_excursion_is_geometric_compound():
    P, m = fixture_a()
    q = excursion_sum_dist(P, m)
    qs = excursion_sum_dist(*split_state_zero(P, m)[:2])
    assert is_strongly_aperiodic(qs)
    base = np.zeros(q.pmf.support_max + 1)
    base[q.pmf.offset :] = q.pmf.masses
    comp = np.zeros(1)
    conv = np.array([1.0])
    for k in range(1, 40):
        conv = np.convolve(conv, base)
        if len(comp) < len(conv):
            comp = np.pad(comp, (0, len(conv) - len(comp)))
        comp[: len(conv)] += 0.5**k * conv
    for w in range(qs.pmf.support_min, qs.pmf.support_max + 1):
        if w < 60:
            assert abs(qs.pmf.prob(w) - comp[w]) <= 1e-9


def test_product_chain():
    assert product_chain(validate([[1.0]])).entries.tolist() == [[1.0]]
    P, _ = fixture_a()
    Q = product_chain(P)
    assert Q.size == 9
    pi = stationary(P)
    assert np.allclose(stationary(Q), np.kron(pi, pi), atol=1e-14)
    for k, l, k2, l2 in [(0, 0, 1, 0), (0, 2, 1, 0), (2, 1, 0, 2)]:
        assert Q[k * 3 + l, k2 * 3 + l2] == P[k, k2] * P[l, l2]
    with pytest.raises(Periodic):
        product_chain(validate([[0, 1], [1, 0]]))


def test_coincidence_return_dist():
    z = coincidence_return_dist(validate([[1.0]]))
    assert z.pmf.tolist() == [1.0]
    z = coincidence_return_dist(validate([[0.5, 0.5], [0.5, 0.5]]))
    m = np.arange(1, len(z.pmf) + 1)
    assert np.allclose(z.pmf, 0.25 * 0.75 ** (m - 1), atol=1e-15)
    assert z.pmf.sum() + z.deficit == pytest.approx(1.0, abs=1e-12)


def test_tau_moments():
    z = CoincidenceDist(np.array([0, 0, 1.0]), 0.0)
    assert tau_moments(z) == (3.0, 9.0)
    z = coincidence_return_dist(validate([[0.5, 0.5], [0.5, 0.5]]), eps_tail=1e-12 / 1e3)
    e_tau, e_tau2 = tau_moments(z)
    # geometric(1/4): EZ = 4, EZ^2 = 28, EZ^3 = 292
    assert e_tau == pytest.approx(7.0, rel=1e-9)
    assert e_tau2 == pytest.approx(73.0, rel=1e-9)
    for fixture in (fixture_a, smooth_fixture, split_needed_fixture):
        z = coincidence_return_dist(fixture()[0])
        assert tau_moments(z)[0] >= z.moments()[0]
    with pytest.raises(TailNotResolved):
        tau_moments(CoincidenceDist(np.array([0.5]), 0.5))


def test_renewal_lattice_span():
    assert renewal_lattice_span(excursion_sum_dist(*fixture_a())) == 4
    Ps, ms, _ = split_state_zero(*fixture_a())
    assert renewal_lattice_span(excursion_sum_dist(Ps, ms)) == 4
    assert renewal_lattice_span(excursion_sum_dist(*smooth_fixture())) == 1
    assert renewal_lattice_span(excursion_sum_dist(*split_needed_fixture())) == 1


def test_lattice_span_predicts_beta_floor():
    # on {X_n = 0} the sum is pinned to one coset, so beta(n) >= 2 P(X_n = 0)
    Ps, ms, _ = split_state_zero(*fixture_a())
    for n in (64, 256):
        assert beta_n(Ps, ms, n) >= 2 * (stationary(Ps)[0] + stationary(Ps)[1]) - 1e-6


def test_split_needed_fixture_becomes_smooth():
    P, m = split_needed_fixture()
    q = excursion_sum_dist(P, m)
    assert q_period(q) == 1 and not is_strongly_aperiodic(q)
    Ps, ms, _ = split_state_zero(P, m)
    assert is_strongly_aperiodic(excursion_sum_dist(Ps, ms))
    ns = [64, 128, 256, 512, 1024]
    vals = [beta_n(Ps, ms, n) for n in ns]
    slope = np.polyfit(np.log2(ns), np.log2(vals), 1)[0]
    assert -0.65 <= slope <= -0.35


def test_theorem1_bound():
    assert theorem1_bound(100, 50.0, 3.0, 27.0, 0.0, 0.0) == pytest.approx(4 / 50)
    a = theorem1_bound(1000, 500.0, 3.0, 27.0, 1000**-0.5, 0.0)
    b = theorem1_bound(4000, 2000.0, 3.0, 27.0, 4000**-0.5, 0.0)
    assert np.log2(b / a) / 2 == pytest.approx(-0.5, abs=0.01)
    with pytest.raises(ValidationError):
        theorem1_bound(10, -1.0, 1, 1, 0)


def test_geometric_term():
    Ps, _, _ = split_state_zero(*smooth_fixture())
    g = estimate_geometric_term(Ps)
    assert g.C > 0 and g.rho > 1 and g.policy == "estimate"
    assert g.value(4096) < g.value(1024) < g.value(256)
    assert ZERO_GEOMETRIC_TERM.value(100) == 0
    assert GeometricTerm(2.0, 2.0, "fixed").value(8) == pytest.approx(2 * 8 * 2.0**-2)


def test_beta_tilde_covers_reversal():
    P, m = smooth_fixture()
    for n in (4, 32):
        assert beta_tilde(P, m, n) >= beta_n(P, m, n)
