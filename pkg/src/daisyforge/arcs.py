"""Exhaustive searches for vector configurations in which every j of them are independent.

Two independent routes answer the same question:

* :func:`max_arc` backtracks over projective points in increasing order.
  It keeps a bitmask of points already forbidden (those in the span of at
  most j-1 chosen points), so extension is a mask lookup.  When j = dim the
  search may fix the standard basis first ("basis" normalisation), which
  is valid because GL(dim, q) is transitive on ordered bases.
* :func:`frame_search` fixes the standard basis plus the all-ones vector
  (GL is sharply transitive on frames) and tests every candidate with
  explicit rank computations, staged the way a hand proof would do it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from typing import Sequence

from .config import DEFAULT_NODE_BUDGET
from .errors import BudgetExceeded, NotPrimePower, ScaleExceeded
from .gf import FiniteField, Vector, field_make, prime_power

MAX_Q = 7
MAX_DIM = 5
AUTO_NORMALIZE_POINTS = 64


@dataclass
class ArcSearchResult:
    q: int
    dim: int
    j: int
    cap: int
    max_size: int
    witness: list[Vector]
    exhaustive: bool
    normalization: str
    nodes: int = 0
    runtime_ms: float = 0.0
    extends: bool | None = None
    terminal: list[dict] = field(default_factory=list)

    def to_certificate(self) -> dict:
        return {"kind": "arc_search", "q": self.q, "dim": self.dim, "j": self.j, "cap": self.cap,
                "max_size": self.max_size, "witness": [list(v) for v in self.witness],
                "exhaustive": self.exhaustive, "normalization": self.normalization,
                "nodes": self.nodes, "runtime_ms": round(self.runtime_ms, 3)}


def is_arc(F: FiniteField, vectors: Sequence[Sequence[int]], j: int) -> bool:
    """Every subset of at most j vectors is linearly independent (rank checks)."""
    for size in range(1, min(j, len(vectors)) + 1):
        for sub in combinations(vectors, size):
            if F.rank(sub) != size:
                return False
    return True


def _check_scale(q: int, dim: int, j: int) -> FiniteField:
    if prime_power(q) is None:
        raise NotPrimePower(f"{q} is not a prime power")
    if q > MAX_Q or dim > MAX_DIM:
        raise ScaleExceeded(f"arc searches are limited to q <= {MAX_Q}, dim <= {MAX_DIM}")
    if not 1 <= j <= dim:
        raise ScaleExceeded("need 1 <= j <= dim")
    return field_make(q)


class _PointSpace:
    def __init__(self, F: FiniteField, dim: int):
        self.F = F
        self.dim = dim
        self.points = F.projective_points(dim)
        self.index = {p: i for i, p in enumerate(self.points)}
        self.span_mask = lru_cache(maxsize=None)(self._span_mask)

    def _span_mask(self, idxs: frozenset) -> int:
        vecs = [self.points[i] for i in sorted(idxs)]
        m = 0
        for v in self.F.span(vecs, self.dim):
            if any(v):
                m |= 1 << self.index[self.F.projective_rep(v)]
        return m

    def add(self, chosen: list[int], forbidden: int, x: int, j: int) -> int:
        for size in range(0, j - 1):
            for z in combinations(chosen, size):
                forbidden |= self.span_mask(frozenset(z + (x,)))
        return forbidden


def max_arc(q: int, dim: int, j: int, cap: int, *, normalize: str = "auto",
            node_budget: int = DEFAULT_NODE_BUDGET) -> ArcSearchResult:
    """Largest set of projective points (up to ``cap``) with every j of them independent."""
    F = _check_scale(q, dim, j)
    start = time.perf_counter()
    space = _PointSpace(F, dim)
    npts = len(space.points)
    if normalize == "auto":
        normalize = "basis" if j == dim and npts > AUTO_NORMALIZE_POINTS and cap > dim else "none"
    if normalize == "basis" and (j != dim or cap < dim):
        raise ValueError("basis normalisation needs j == dim and cap >= dim")
    if normalize not in ("none", "basis"):
        raise ValueError(f"unknown normalisation {normalize!r}")

    best: list[list[int]] = [[]]
    nodes = [0]
    all_pts = (1 << npts) - 1

    def rec(chosen: list[int], forbidden: int, last: int) -> bool:
        nodes[0] += 1
        if nodes[0] > node_budget:
            raise BudgetExceeded(f"arc search exceeded {node_budget} nodes")
        if len(chosen) > len(best[0]):
            best[0] = list(chosen)
            if len(chosen) >= cap:
                return True
        cands = all_pts & ~forbidden & ~((1 << (last + 1)) - 1)
        if len(chosen) + bin(cands).count("1") <= len(best[0]):
            return False
        while cands:
            low = cands & -cands
            x = low.bit_length() - 1
            cands ^= low
            if len(chosen) + 1 + bin(cands).count("1") <= len(best[0]):
                break
            if rec(chosen + [x], space.add(chosen, forbidden, x, j), x):
                return True
        return False

    if normalize == "basis":
        chosen, forbidden = [], 0
        for i in range(dim):
            e = tuple(1 if k == i else 0 for k in range(dim))
            x = space.index[e]
            forbidden = space.add(chosen, forbidden, x, j)
            chosen.append(x)
        rec(chosen, forbidden | sum(1 << c for c in chosen), -1)
    else:
        rec([], 0, -1)

    witness = [space.points[i] for i in best[0]]
    if not is_arc(F, witness, j):
        raise AssertionError("arc witness failed rank re-verification")
    return ArcSearchResult(q, dim, j, cap, len(witness), witness, True, normalize, nodes[0],
                           (time.perf_counter() - start) * 1000)


def frame(dim: int) -> list[Vector]:
    """Standard basis followed by the all-ones vector."""
    return [tuple(1 if k == i else 0 for k in range(dim)) for i in range(dim)] + [(1,) * dim]


def _canonical_under_tail_perms(F: FiniteField, v: Vector) -> bool:
    """v is the least of its images under permutations of coordinates 2..dim.

    Those permutations fix e_1, permute e_2..e_dim and fix the all-ones vector,
    so they preserve the frame.
    """
    head, tail = v[:1], v[1:]
    code = F.encode(v)
    return all(F.encode(F.projective_rep(head + p)) >= code for p in permutations(tail))


def frame_search(q: int, dim: int, target: int = 7, *,
                 node_budget: int = DEFAULT_NODE_BUDGET) -> ArcSearchResult:
    """Can the frame of GF(q)^dim be extended to ``target`` vectors, every dim independent?

    Vectors are labelled v1..v_target in the order placed.  For each new
    vector the dim-subsets containing it are checked in three stages:

    1. subsets drawn otherwise from the frame;
    2. subsets containing an earlier extra vector whose frame part uses only
       e_2..e_dim (these compare coordinates position by position);
    3. everything else.

    Candidates for the final slot that survive stages 1-2 are recorded in
    ``terminal`` with the stage-3 subsets that fail.  The first extra vector
    is restricted to representatives under coordinate permutations of
    positions 2..dim; later extras are placed in increasing order.
    """
    F = _check_scale(q, dim, dim)
    start = time.perf_counter()
    base = frame(dim)
    ones_label = dim + 1
    if target <= len(base):
        w = base[:target]
        return ArcSearchResult(q, dim, dim, target, target, w, True, "frame", 0,
                               (time.perf_counter() - start) * 1000, extends=True)
    points = [p for p in F.projective_points(dim) if p not in base]
    nodes = [0]
    terminal: list[dict] = []
    best: list[list[Vector]] = [list(base)]
    found: list[list[Vector]] = []

    def stage_of(labels: tuple[int, ...], new_label: int) -> int:
        others = [l for l in labels if l != new_label]
        if all(l <= ones_label for l in others):
            return 1
        framed = [l for l in others if l <= ones_label]
        if all(2 <= l <= dim for l in framed):
            return 2
        return 3

    def failures(config: list[Vector], v: Vector) -> dict[int, list[tuple[int, ...]]]:
        new_label = len(config) + 1
        out: dict[int, list[tuple[int, ...]]] = {1: [], 2: [], 3: []}
        for sub in combinations(range(1, len(config) + 1), dim - 1):
            vecs = [config[l - 1] for l in sub] + [v]
            if F.rank(vecs) != dim:
                labels = sub + (new_label,)
                out[stage_of(labels, new_label)].append(labels)
        return out

    def rec(config: list[Vector], last_idx: int, first_extra: Vector | None) -> bool:
        nodes[0] += 1
        if nodes[0] > node_budget:
            raise BudgetExceeded(f"frame search exceeded {node_budget} nodes")
        if len(config) > len(best[0]):
            best[0] = list(config)
        if len(config) == target:
            found.append(list(config))
            return True
        final_slot = len(config) + 1 == target
        for idx, v in enumerate(points):
            if first_extra is None:
                if not _canonical_under_tail_perms(F, v):
                    continue
            elif idx <= last_idx or v == first_extra:
                continue
            fails = failures(config, v)
            if fails[1] or fails[2]:
                continue
            if final_slot:
                terminal.append({"prefix": [list(x) for x in config[len(base):]], "candidate": list(v),
                                 "failed": [[f"v{l}" for l in s] for s in fails[3]]})
            if fails[3]:
                continue
            nxt_last = last_idx if first_extra is None else idx
            if rec(config + [v], nxt_last, v if first_extra is None else first_extra):
                return True
        return False

    extends = rec(list(base), -1, None)
    witness = found[0] if found else best[0]
    if not is_arc(F, witness, dim):
        raise AssertionError("frame witness failed rank re-verification")
    return ArcSearchResult(q, dim, dim, target, len(witness), witness, True, "frame", nodes[0],
                           (time.perf_counter() - start) * 1000, extends=extends, terminal=terminal)


def normalize_to_frame(F: FiniteField, vectors: Sequence[Sequence[int]]) -> list[Vector]:
    """Image of a configuration under the linear map sending it onto a frame.

    The first dim vectors go to the standard basis (up to scaling) and the
    next one to the all-ones vector; remaining vectors are reported as
    projective representatives.  Raises ValueError if the first dim vectors
    are not a basis or the (dim+1)-th has a zero coordinate in that basis.
    """
    vectors = [tuple(v) for v in vectors]
    dim = len(vectors[0])
    if len(vectors) < dim + 1:
        raise ValueError("need at least dim + 1 vectors")
    basis = vectors[:dim]
    coords = [F.coordinates(basis, v) for v in vectors]
    scale = coords[dim]
    if not all(scale):
        raise ValueError("the (dim+1)-th vector has a zero coordinate in the chosen basis")
    inv = [F.inv(a) for a in scale]
    out = []
    for c in coords:
        out.append(F.projective_rep(tuple(F.mul(a, s) for a, s in zip(c, inv))))
    return out


def projective_classes(F: FiniteField, dim: int) -> dict[Vector, list[Vector]]:
    classes: dict[Vector, list[Vector]] = {}
    for v in F.nonzero_vectors(dim):
        classes.setdefault(F.projective_rep(v), []).append(v)
    return classes


def q_plus_two_pairwise(q: int) -> bool:
    """No q + 2 vectors of GF(q)^2 are pairwise independent.

    Nonzero vectors split into projective classes; within a class every pair
    is dependent and across classes every pair is independent (both checked
    by rank), so the largest pairwise-independent set has one vector per
    class.
    """
    if prime_power(q) is None:
        raise NotPrimePower(f"{q} is not a prime power")
    if q > 16:
        raise ScaleExceeded("q_plus_two_pairwise is limited to q <= 16")
    F = field_make(q)
    classes = projective_classes(F, 2)
    reps = list(classes)
    for rep, members in classes.items():
        for a, b in combinations(members, 2):
            assert F.rank([a, b]) == 1
    for a, b in combinations(reps, 2):
        for u in classes[a]:
            for v in classes[b]:
                assert F.rank([u, v]) == 2
    return len(classes) < q + 2


def q_plus_two_any_q(q: int) -> bool:
    """No q + 2 vectors of GF(q)^q have every q of them independent (q <= 4)."""
    if prime_power(q) is None:
        raise NotPrimePower(f"{q} is not a prime power")
    if q > 4:
        raise ScaleExceeded("q_plus_two_any_q is limited to q <= 4")
    fr = frame_search(q, q, target=q + 2)
    ma = max_arc(q, q, q, cap=q + 2)
    if fr.extends != (ma.max_size >= q + 2):
        raise AssertionError("frame search and arc search disagree")
    return not fr.extends
