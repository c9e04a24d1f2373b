"""Daisy patterns and exhaustive daisy / consecutive-layer searches.

Both searches share one primitive: given a fixed base set B (the stem, or
Y for cube layers) and a list of ``(k, family)`` layer requirements, find
the lexicographically least ``target``-set T, disjoint from B, such that
``B | A`` lies in ``family`` for every k-subset A of T.  T is grown in
increasing order and the candidate list is filtered after each step so it
only holds points compatible with everything chosen so far.  When a
``k = 2`` layer exists the candidates form a compatibility graph and a
greedy colouring bound cuts branches that cannot reach ``target``.
"""

from __future__ import annotations

import time
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .config import DEFAULT_NODE_BUDGET
from .errors import BadLayerIndex, BudgetExceeded, PatternMismatch
from .families import LayeredFamily, SetFamily, mask_of

MODES = ("deterministic", "fast")


@dataclass(frozen=True, order=True)
class DaisyPattern:
    """``D_r(s, t)``: stem of size r - s, petal-set of size t, petals of size s.

    ``s = 0`` and ``s = t`` are allowed; such patterns are degenerate (a
    single set, or a single set containing the whole petal-set).
    """

    r: int
    s: int
    t: int

    def __post_init__(self):
        if not (0 <= self.s <= self.t and self.s <= self.r):
            raise PatternMismatch(f"invalid daisy pattern (r={self.r}, s={self.s}, t={self.t})")

    @property
    def stem_size(self) -> int:
        return self.r - self.s

    @property
    def degenerate(self) -> bool:
        return self.s == 0 or self.s == self.t

    def fits(self, n: int) -> bool:
        """Whether an instance fits inside [n]."""
        return self.stem_size + self.t <= n

    def as_list(self) -> list[int]:
        return [self.r, self.s, self.t]


@dataclass(frozen=True)
class DaisyWitness:
    stem: tuple[int, ...]
    petals: tuple[int, ...]

    def members(self, s: int) -> list[tuple[int, ...]]:
        return [tuple(sorted(self.stem + x)) for x in combinations(self.petals, s)]

    def to_json(self) -> dict:
        return {"stem": list(self.stem), "petals": list(self.petals)}


@dataclass(frozen=True)
class ConsecutiveQ6Witness:
    i: int
    Y: tuple[int, ...]
    X: tuple[int, ...]

    def lower_members(self) -> list[tuple[int, ...]]:
        return [tuple(sorted(self.Y + a)) for a in combinations(self.X, self.i - 1)]

    def upper_members(self) -> list[tuple[int, ...]]:
        return [tuple(sorted(self.Y + a)) for a in combinations(self.X, self.i)]

    def to_json(self) -> dict:
        return {"i": self.i, "Y": list(self.Y), "X": list(self.X)}


@dataclass
class SearchStats:
    nodes: int = 0
    budget: int = DEFAULT_NODE_BUDGET

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(f"search exceeded {self.budget} nodes")


Layers = Sequence[tuple[int, frozenset]]


def _colour_bound(base: int, cands: list[int], fam: frozenset, need: int) -> bool:
    """True if a greedy colouring shows no ``need``-clique among ``cands``."""
    classes: list[list[int]] = []
    for v in cands:
        bv = base | (1 << v)
        for cls in classes:
            if all((bv | (1 << u)) not in fam for u in cls):
                cls.append(v)
                break
        else:
            classes.append([v])
            if len(classes) >= need:
                return False
    return True


def grow_set(base: int, universe: Iterable[int], layers: Layers, target: int,
             stats: SearchStats) -> tuple[int, ...] | None:
    """Least ``target``-set T (as a sorted tuple) meeting every layer requirement."""
    for k, fam in layers:
        if k == 0 and base not in fam:
            return None
    cands = [y for y in universe if not base >> y & 1]
    for k, fam in layers:
        if k == 1:
            cands = [y for y in cands if base | (1 << y) in fam]
    graph = next((fam for k, fam in layers if k == 2), None)
    wide = [(k, fam) for k, fam in layers if k >= 2]

    def rec(chosen: list[int], chosen_mask: int, cands: list[int]):
        stats.tick()
        need = target - len(chosen)
        if need == 0:
            return tuple(chosen)
        if len(cands) < need:
            return None
        if graph is not None and need > 1 and _colour_bound(base, cands, graph, need):
            return None
        for idx, x in enumerate(cands):
            if len(cands) - idx < need:
                break
            bx = base | (1 << x)
            checks = []
            for k, fam in wide:
                for z in combinations(chosen, k - 2):
                    checks.append((bx | mask_of(z), fam))
            rest = [y for y in cands[idx + 1:] if all((m | (1 << y)) in fam for m, fam in checks)]
            found = rec(chosen + [x], chosen_mask | (1 << x), rest)
            if found is not None:
                return found
        return None

    return rec([], 0, cands)


# daisy search ---------------------------------------------------------------

def _daisy_stem_scan(masks: frozenset, n: int, pat: DaisyPattern, stems: Sequence[tuple[int, ...]],
                     budget: int) -> tuple[DaisyWitness | None, int]:
    stats = SearchStats(budget=budget)
    layers = [(pat.s, masks)]
    universe = range(1, n + 1)
    for stem in stems:
        petals = grow_set(mask_of(stem), universe, layers, pat.t, stats)
        if petals is not None:
            return DaisyWitness(stem, petals), stats.nodes
    return None, stats.nodes


_WORKER_STATE: dict = {}


def _init_worker(masks, n):
    _WORKER_STATE["masks"] = masks
    _WORKER_STATE["n"] = n


def _worker_scan(pat, stems, budget):
    return _daisy_stem_scan(_WORKER_STATE["masks"], _WORKER_STATE["n"], pat, stems, budget)


def _chunks(items: list, count: int) -> list[list]:
    size = max(1, -(-len(items) // count))
    return [items[i:i + size] for i in range(0, len(items), size)]


@dataclass(frozen=True)
class DaisySearch:
    pattern: DaisyPattern
    witness: DaisyWitness | None
    nodes: int
    mode: str
    runtime_ms: float


def search_daisy(f: SetFamily, pat: DaisyPattern, *, mode: str = "deterministic", workers: int = 1,
                 node_budget: int = DEFAULT_NODE_BUDGET) -> DaisySearch:
    """Exhaustive search for an instance of ``pat`` inside ``f``.

    Stems are scanned in lexicographic order, so in deterministic mode the
    witness has the least stem and, for that stem, the least petal-set.
    Patterns that do not fit in [n] are vacuously absent.
    """
    if pat.r != f.r:
        raise PatternMismatch(f"pattern uniformity {pat.r} != family uniformity {f.r}")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    start = time.perf_counter()
    if not pat.fits(f.n):
        return DaisySearch(pat, None, 0, mode, 0.0)
    stems = list(combinations(range(1, f.n + 1), pat.stem_size))
    if workers <= 1 or len(stems) < 2 * workers:
        witness, nodes = _daisy_stem_scan(f.masks, f.n, pat, stems, node_budget)
    else:
        witness, nodes = _parallel_scan(f, pat, stems, mode, workers, node_budget)
    return DaisySearch(pat, witness, nodes, mode, (time.perf_counter() - start) * 1000)


def _parallel_scan(f, pat, stems, mode, workers, node_budget):
    chunks = _chunks(stems, workers * 4)
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                             initargs=(f.masks, f.n)) as pool:
        futures = [pool.submit(_worker_scan, pat, c, node_budget) for c in chunks]
        if mode == "deterministic":
            results = [fu.result() for fu in futures]
            nodes = sum(r[1] for r in results)
            return next((r[0] for r in results if r[0] is not None), None), nodes
        pending, nodes = set(futures), 0
        while pending:
            done, pending = wait(pending, return_when=FIRST_COMPLETED)
            for fu in done:
                w, k = fu.result()
                nodes += k
                if w is not None:
                    for other in pending:
                        other.cancel()
                    return w, nodes
        return None, nodes


def contains_daisy(f: SetFamily, pat: DaisyPattern, **kw) -> DaisyWitness | None:
    return search_daisy(f, pat, **kw).witness


def daisy_free(f: SetFamily, pat: DaisyPattern, **kw) -> tuple[bool, dict]:
    """Return ``(is_free, certificate)``."""
    res = search_daisy(f, pat, **kw)
    cert = {
        "kind": "daisy_free",
        "pattern": pat.as_list(),
        "family_sha256": f.sha256(),
        "result": res.witness is None,
        "witness": res.witness.to_json() if res.witness else None,
        "nodes": res.nodes,
        "mode": res.mode,
        "runtime_ms": round(res.runtime_ms, 3),
    }
    return res.witness is None, cert


def daisy_contains(outer: DaisyPattern, inner: DaisyPattern) -> bool:
    """Whether every copy of ``outer`` contains a copy of ``inner``.

    Decided by closure under petal-shrink ``(s,t) -> (s,t-1)`` and
    stem-absorb ``(s,t) -> (s-1,t-1)``.
    """
    if outer.r != inner.r:
        raise PatternMismatch("daisy containment needs equal uniformity")
    ds, dt = outer.s - inner.s, outer.t - inner.t
    return ds >= 0 and dt >= 0 and ds <= dt


def shrink_witness(w: DaisyWitness, outer: DaisyPattern, inner: DaisyPattern) -> DaisyWitness:
    """Turn an ``outer`` instance into an ``inner`` instance using only its own sets."""
    if not daisy_contains(outer, inner):
        raise PatternMismatch(f"{outer} does not contain {inner}")
    absorb = outer.s - inner.s
    drop = (outer.t - inner.t) - absorb
    petals = list(w.petals)
    moved, petals = petals[:absorb], petals[absorb:]
    if drop:
        petals = petals[:-drop]
    return DaisyWitness(tuple(sorted(w.stem + tuple(moved))), tuple(petals))


# consecutive cube layers ------------------------------------------------------

Q6_DIM = 6


def q6_layer_indices(r: int) -> list[int]:
    """Layer indices i in 2..5 with a non-negative Y size ``r - i``."""
    return [i for i in range(2, 6) if r - i >= 0]


def find_consecutive_q6(lf: LayeredFamily, i: int, *, node_budget: int = DEFAULT_NODE_BUDGET,
                        stats: SearchStats | None = None) -> ConsecutiveQ6Witness | None:
    """Least (Y, X) with Y u A in ``lower`` for A in X^(i-1) and in ``upper`` for A in X^(i)."""
    if not 2 <= i <= 5:
        raise BadLayerIndex(f"layer index {i} outside 2..5")
    ysize = lf.r - i
    if ysize < 0 or ysize + Q6_DIM > lf.n:
        return None
    stats = stats or SearchStats(budget=node_budget)
    layers = [(i - 1, lf.lower.masks), (i, lf.upper.masks)]
    universe = range(1, lf.n + 1)
    for Y in combinations(universe, ysize):
        X = grow_set(mask_of(Y), universe, layers, Q6_DIM, stats)
        if X is not None:
            return ConsecutiveQ6Witness(i, Y, X)
    return None
