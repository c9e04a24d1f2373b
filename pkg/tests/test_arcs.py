from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from daisyforge.arcs import (frame, frame_search, is_arc, max_arc, normalize_to_frame, q_plus_two_any_q,
                             q_plus_two_pairwise)
from daisyforge.errors import NotPrimePower, ScaleExceeded
from daisyforge.gf import field_make


def _all_bases(F, vectors, j):
    return all(F.rank(s) == j for s in combinations(vectors, j))


@pytest.mark.parametrize("q,dim,j,cap,expected", [
    (5, 2, 2, 8, 6),
    (5, 3, 3, 7, 6),
    (3, 3, 3, 5, 4),
    (4, 3, 3, 7, 6),
    (3, 3, 2, 14, 13),
    (2, 3, 3, 6, 4),
])
def test_max_arc_values(q, dim, j, cap, expected):
    res = max_arc(q, dim, j, cap)
    assert res.max_size == expected and res.exhaustive
    F = field_make(q)
    assert _all_bases(F, res.witness, j)


def test_max_arc_dim4_with_basis_normalization():
    res = max_arc(5, 4, 4, 7)
    assert res.max_size == 6 and res.normalization == "basis"
    assert _all_bases(field_make(5), res.witness, 4)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7])
def test_projective_line_size(q):
    assert max_arc(q, 2, 2, q + 3).max_size == q + 1


def test_unnormalized_matches_normalized_in_pg2():
    for q in (3, 4, 5):
        a = max_arc(q, 3, 3, q + 3, normalize="none").max_size
        b = max_arc(q, 3, 3, q + 3, normalize="basis").max_size
        assert a == b


def test_frame_search_dim3():
    res = frame_search(5, 3)
    assert res.extends is False
    assert res.witness[:4] == frame(3)


def test_frame_search_dim4_terminal_candidates():
    res = frame_search(5, 4)
    assert res.extends is False
    cands = sorted({tuple(t["candidate"]) for t in res.terminal})
    assert cands == [(1, 3, 4, 2), (1, 4, 2, 3)]
    for t in res.terminal:
        assert t["failed"]


def test_frame_search_dim5():
    assert frame_search(5, 5).extends is False


@pytest.mark.parametrize("q,dim,target", [(3, 3, 5), (4, 3, 6), (5, 3, 7), (3, 3, 4), (5, 2, 7)])
def test_frame_agrees_with_max_arc(q, dim, target):
    fr = frame_search(q, dim, target)
    ma = max_arc(q, dim, dim, target)
    assert fr.extends == (ma.max_size >= target)
    if fr.extends:
        assert _all_bases(field_make(q), fr.witness, dim)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 11, 13, 16])
def test_pairwise(q):
    assert q_plus_two_pairwise(q)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_any_q(q):
    assert q_plus_two_any_q(q)


def test_errors():
    with pytest.raises(NotPrimePower):
        q_plus_two_pairwise(6)
    with pytest.raises(ScaleExceeded):
        max_arc(8, 3, 3, 9)
    with pytest.raises(ScaleExceeded):
        max_arc(3, 6, 3, 9)
    with pytest.raises(ScaleExceeded):
        q_plus_two_any_q(5)


def test_normalize_to_frame_on_six_arc():
    F = field_make(5)
    arc = max_arc(5, 3, 3, 6).witness
    norm = normalize_to_frame(F, arc)
    assert norm[:4] == frame(3)
    assert is_arc(F, norm, 3)


@settings(max_examples=40)
@given(st.data())
def test_scaling_preserves_arcs(data):
    F = field_make(5)
    arc = [list(v) for v in max_arc(5, 3, 3, 6).witness]
    i = data.draw(st.integers(0, len(arc) - 1))
    c = data.draw(st.integers(1, 4))
    arc[i] = list(F.vscale(c, arc[i]))
    assert is_arc(F, arc, 3)
    k = data.draw(st.integers(0, len(arc) - 1))
    broken = arc + [list(F.vscale(2, arc[k]))]
    assert not is_arc(F, broken, 3)


def test_certificate_shape():
    cert = max_arc(5, 2, 2, 8).to_certificate()
    assert list(cert)[:9] == ["kind", "q", "dim", "j", "cap", "max_size", "witness", "exhaustive",
                              "normalization"]
    assert cert["kind"] == "arc_search" and len(cert["witness"]) == 6
