from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from daisyforge.daisy import (DaisyPattern, DaisyWitness, contains_daisy, daisy_contains, daisy_free,
                              find_consecutive_q6, q6_layer_indices, search_daisy, shrink_witness)
from daisyforge.errors import BadLayerIndex, BudgetExceeded, PatternMismatch
from daisyforge.families import LayeredFamily, SetFamily, complement_in_layer


def naive_daisy(f: SetFamily, pat: DaisyPattern):
    ground = range(1, f.n + 1)
    for stem in combinations(ground, pat.r - pat.s):
        rest = [x for x in ground if x not in stem]
        for petals in combinations(rest, pat.t):
            if all(tuple(sorted(stem + x)) in f for x in combinations(petals, pat.s)):
                return DaisyWitness(stem, petals)
    return None


@st.composite
def family_and_pattern(draw, max_members=20):
    while True:
        n = draw(st.integers(2, 7))
        r = draw(st.integers(1, n))
        if len(list(combinations(range(n), r))) <= max_members:
            break
    layer = list(combinations(range(1, n + 1), r))
    members = draw(st.lists(st.sampled_from(layer), unique=True, min_size=len(layer) // 2))
    s = draw(st.integers(1, r))
    t = draw(st.integers(s, max(s, n - (r - s))))
    return SetFamily(n, r, members), DaisyPattern(r, s, t)


def test_full_layer_witness():
    w = contains_daisy(SetFamily.full_layer(5, 3), DaisyPattern(3, 2, 4))
    assert w == DaisyWitness((1,), (2, 3, 4, 5))


def test_basis_2_3_free(basis_2_3):
    assert contains_daisy(basis_2_3, DaisyPattern(3, 2, 4)) is None


def test_empty_family_free():
    assert contains_daisy(SetFamily(6, 3), DaisyPattern(3, 2, 4)) is None


def test_daisy_free_certificates(basis_3_3):
    for s in (2, 3):
        free, cert = daisy_free(basis_3_3, DaisyPattern(3, s, 5))
        assert free and cert["result"] is True and cert["witness"] is None
        assert cert["pattern"] == [3, s, 5] and cert["family_sha256"] == basis_3_3.sha256()
        assert list(cert) == ["kind", "pattern", "family_sha256", "result", "witness", "nodes", "mode",
                              "runtime_ms"]
    free, cert = daisy_free(SetFamily.full_layer(6, 3), DaisyPattern(3, 2, 5))
    assert not free and cert["witness"] == {"stem": [1], "petals": [2, 3, 4, 5, 6]}


def test_pattern_mismatch():
    with pytest.raises(PatternMismatch):
        contains_daisy(SetFamily(5, 3), DaisyPattern(2, 2, 4))


def test_node_budget():
    with pytest.raises(BudgetExceeded):
        search_daisy(SetFamily.full_layer(12, 3), DaisyPattern(3, 2, 11), node_budget=5)


def test_pattern_not_fitting_is_vacuous():
    assert contains_daisy(SetFamily.full_layer(4, 3), DaisyPattern(3, 2, 4)) is None


@settings(max_examples=150)
@given(family_and_pattern())
def test_agrees_with_naive(fp):
    f, pat = fp
    assert contains_daisy(f, pat) == naive_daisy(f, pat)


@settings(max_examples=60)
@given(family_and_pattern())
def test_complement_duality(fp):
    f, pat = fp
    comp = complement_in_layer(f)
    ground = range(1, f.n + 1)
    every_instance_hit = True
    for stem in combinations(ground, pat.r - pat.s):
        rest = [x for x in ground if x not in stem]
        for petals in combinations(rest, pat.t):
            if not any(tuple(sorted(stem + x)) in comp for x in combinations(petals, pat.s)):
                every_instance_hit = False
    assert every_instance_hit == daisy_free(f, pat)[0]


def test_parallel_modes_agree(basis_3_3):
    full = SetFamily.full_layer(9, 3)
    pat = DaisyPattern(3, 2, 5)
    seq = search_daisy(full, pat)
    par = search_daisy(full, pat, workers=3, mode="deterministic")
    assert par.witness == seq.witness
    fast = search_daisy(full, pat, workers=3, mode="fast")
    assert fast.witness is not None and naive_daisy(full, pat) is not None
    assert search_daisy(basis_3_3, DaisyPattern(3, 3, 5), workers=2).witness is None


def test_daisy_contains_examples():
    r = 8
    assert daisy_contains(DaisyPattern(r, 3, 7), DaisyPattern(r, 2, 6))
    assert daisy_contains(DaisyPattern(r, 4, 7), DaisyPattern(r, 4, 6))
    assert not daisy_contains(DaisyPattern(r, 2, 6), DaisyPattern(r, 3, 6))
    with pytest.raises(PatternMismatch):
        daisy_contains(DaisyPattern(4, 2, 6), DaisyPattern(5, 2, 6))


@settings(max_examples=60)
@given(st.integers(2, 4), st.integers(1, 3), st.data())
def test_containment_is_constructive(r, s_outer, data):
    s_outer = min(s_outer, r)
    t_outer = data.draw(st.integers(s_outer, s_outer + 3))
    outer = DaisyPattern(r, s_outer, t_outer)
    n = outer.stem_size + t_outer
    f = SetFamily.full_layer(n, r)
    w = contains_daisy(f, outer)
    members = set(w.members(outer.s))
    s_in = data.draw(st.integers(0, s_outer))
    t_in = data.draw(st.integers(s_in, t_outer))
    inner = DaisyPattern(r, s_in, t_in)
    if not daisy_contains(outer, inner):
        with pytest.raises(PatternMismatch):
            shrink_witness(w, outer, inner)
        return
    sub = shrink_witness(w, outer, inner)
    assert len(sub.stem) == inner.stem_size and len(sub.petals) == inner.t
    assert set(sub.members(inner.s)) <= members


def test_q6_examples(two_layer_2):
    assert find_consecutive_q6(two_layer_2, 2) is None
    full = LayeredFamily(SetFamily.full_layer(7, 2), SetFamily.full_layer(7, 1))
    w = find_consecutive_q6(full, 2)
    assert w.Y == () and w.X == (1, 2, 3, 4, 5, 6)
    assert find_consecutive_q6(full, 3) is None
    assert q6_layer_indices(2) == [2]
    with pytest.raises(BadLayerIndex):
        find_consecutive_q6(full, 6)


def test_q6_witness_members():
    full = LayeredFamily(SetFamily.full_layer(8, 4), SetFamily.full_layer(8, 3))
    w = find_consecutive_q6(full, 3)
    assert len(w.Y) == 1 and len(w.lower_members()) == 15 and len(w.upper_members()) == 20
