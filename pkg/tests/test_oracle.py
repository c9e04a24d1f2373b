import math
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from daisyforge.daisy import DaisyPattern, daisy_free, find_consecutive_q6
from daisyforge.errors import OracleScaleExceeded, ScaleExceeded
from daisyforge.families import LayeredFamily, SetFamily, density_sum
from daisyforge.hitting import verify_hitting
from daisyforge.oracle import (OracleRanges, _BranchAndBound, daisy_constraints, exact_ex, exact_g, exact_l,
                               exhaustive_min_hitting, monotonicity_suite, paper_patterns, q6_constraints,
                               subcube_constraints)

P = DaisyPattern


def test_exact_ex_examples():
    assert exact_ex(4, 3, [P(3, 2, 4)]).value == 4
    res = exact_ex(5, 3, [P(3, 2, 4)])
    assert res.value == 8 and res.verified
    assert daisy_free(res.witness, P(3, 2, 4))[0]


@pytest.mark.parametrize("n,r", [(n, r) for n in range(1, 7) for r in range(0, n + 1) if math.comb(n, r) <= 30])
def test_exact_ex_without_patterns(n, r):
    assert exact_ex(n, r, []).value == math.comb(n, r)


def test_exact_g_examples():
    assert exact_g(2, 2).value == 1
    assert exact_g(3, 2).value == 2
    assert exact_g(3, 1).value == 4
    for d in range(0, 6):
        assert exact_g(d, d).value == 1


# frozen from the branch-and-bound; n <= 4 also matches exhaustive enumeration and n = 5 an ILP below
G_TABLE = {(4, 2): 5, (5, 2): 10, (5, 3): 6, (4, 3): 2, (5, 4): 2, (5, 1): 16, (4, 1): 8}


@pytest.mark.parametrize("nd,value", sorted(G_TABLE.items()))
def test_exact_g_table(nd, value):
    res = exact_g(*nd)
    assert res.value == value and res.verified
    assert verify_hitting(res.witness, nd[1]).ok


def test_exact_g_scale():
    with pytest.raises(ScaleExceeded):
        exact_g(6, 2)


def test_exact_l_examples():
    assert exact_l(5, 2).value == 2
    res = exact_l(6, 2)
    assert res.value == Fraction(29, 15) and res.value < 2 and res.verified
    full = LayeredFamily(SetFamily.full_layer(6, 2), SetFamily.full_layer(6, 1))
    assert find_consecutive_q6(full, 2) is not None
    for n in range(1, 7):
        assert exact_l(n, 1).value == 2


def test_exact_l_larger_points():
    res = exact_l(7, 2, max_members=60)
    assert res.value == Fraction(40, 21)
    assert density_sum(res.witness) == res.value
    assert all(find_consecutive_q6(res.witness, i) is None for i in (2,))
    assert exact_l(6, 3, max_members=60).value == Fraction(39, 20)


def test_oracle_scale_errors():
    with pytest.raises(OracleScaleExceeded):
        exact_ex(8, 4, [P(4, 2, 4)])
    with pytest.raises(OracleScaleExceeded):
        exact_l(8, 3)


def test_paper_patterns():
    assert paper_patterns(3, 4) == [P(3, 2, 4)]
    assert paper_patterns(3, 5) == [P(3, 2, 5), P(3, 3, 5)]
    assert paper_patterns(2, 6) == [P(2, 2, 6)]


@pytest.mark.parametrize("n,r,t", [(5, 3, 4), (6, 2, 4), (6, 3, 5), (5, 2, 5), (6, 2, 5)])
def test_ex_bnb_matches_exhaustive(n, r, t):
    pats = paper_patterns(r, t)
    cons = daisy_constraints(n, r, pats)
    m = math.comb(n, r)
    assert exact_ex(n, r, pats).value == m - exhaustive_min_hitting([1] * m, cons)


@pytest.mark.parametrize("n,d", [(n, d) for n in range(0, 5) for d in range(0, n + 1)])
def test_g_bnb_matches_exhaustive(n, d):
    cons = subcube_constraints(n, d)
    assert exact_g(n, d).value == exhaustive_min_hitting([1] * 2**n, cons)


def test_l_bnb_matches_exhaustive():
    up, lo, cons = q6_constraints(6, 2)
    scale = math.lcm(15, 6)
    w = [scale // 15] * len(up) + [scale // 6] * len(lo)
    assert exact_l(6, 2).value == 2 - Fraction(exhaustive_min_hitting(w, cons), scale)


@settings(max_examples=40)
@given(st.integers(2, 12), st.data())
def test_bnb_random_instances(n_el, data):
    weights = data.draw(st.lists(st.integers(1, 4), min_size=n_el, max_size=n_el))
    cons = data.draw(st.lists(st.integers(1, 2**n_el - 1), min_size=1, max_size=12))
    bb = _BranchAndBound(weights, cons, 10**7)
    sol = bb.lex_optimum(prefer_in=data.draw(st.booleans()))
    assert sol.value == exhaustive_min_hitting(weights, cons)
    assert all(c & sol.chosen for c in cons)
    assert sum(w for i, w in enumerate(weights) if sol.chosen >> i & 1) == sol.value


def test_witnesses_are_lex_least():
    res = exact_ex(5, 3, [P(3, 2, 4)])
    layer = list(combinations(range(1, 6), 3))
    cons = daisy_constraints(5, 3, [P(3, 2, 4)])
    best = None
    for removed in combinations(range(len(layer)), 2):
        mask = sum(1 << i for i in removed)
        if all(c & mask for c in cons):
            kept = [m for i, m in enumerate(layer) if i not in removed]
            best = kept if best is None or kept < best else best
    assert res.witness.sorted_members() == best


def test_monotonicity_suite():
    rep = monotonicity_suite()
    assert rep.ok and not rep.violations
    names = {c["check"] for c in rep.checks}
    assert len(names) == 4
    ex = {(r.params["n"], r.params["r"]): r.value for r in rep.results
          if r.quantity == "ex" and r.params["patterns"] == [[3, 2, 4]]}
    assert Fraction(ex[(5, 3)], 10) >= Fraction(ex[(6, 3)], 20)


def test_monotonicity_suite_custom_ranges():
    rep = monotonicity_suite(OracleRanges(ex_ts=(4,), ex_rs=(2,), ex_max_members=15, g_max_n=3,
                                          l_rs=(2,), l_max_n=7, l_max_members=40))
    assert rep.ok and len(rep.checks) > 5


@pytest.mark.parametrize("d", range(1, 5))
def test_g5_matches_integer_program(d):
    scipy_opt = pytest.importorskip("scipy.optimize")
    import numpy as np

    cons = subcube_constraints(5, d)
    A = np.array([[c >> v & 1 for v in range(32)] for c in cons], dtype=float)
    res = scipy_opt.milp(c=np.ones(32), integrality=np.ones(32),
                         bounds=scipy_opt.Bounds(0, 1),
                         constraints=scipy_opt.LinearConstraint(A, lb=1, ub=np.inf))
    assert res.success and round(res.fun) == exact_g(5, d).value


@pytest.mark.parametrize("n,r", [(7, 2), (6, 3), (8, 2)])
def test_l_matches_integer_program(n, r):
    scipy_opt = pytest.importorskip("scipy.optimize")
    import numpy as np

    up, lo, cons = q6_constraints(n, r)
    cu, cl = math.comb(n, r), math.comb(n, r - 1)
    w = np.array([1 / cu] * len(up) + [1 / cl] * len(lo))
    A = np.array([[c >> k & 1 for k in range(len(w))] for c in cons], dtype=float)
    res = scipy_opt.milp(c=w, integrality=np.ones(len(w)), bounds=scipy_opt.Bounds(0, 1),
                         constraints=scipy_opt.LinearConstraint(A, lb=1, ub=np.inf))
    assert res.success
    assert abs((2 - res.fun) - float(exact_l(n, r, max_members=60).value)) < 1e-9
