"""Exact extremal values at tiny scale: ex(n, r, t), g(n, d) and l(n, 6, r).

All three reduce to a minimum-weight hitting set problem.  Elements are
layer members (or cube vertices) and each constraint is the element set of
one forbidden configuration.  The optimum of a family is what survives
after deleting a minimum-weight hitting set of all forbidden copies.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT_NODE_BUDGET
from .daisy import DaisyPattern, daisy_free, find_consecutive_q6, q6_layer_indices
from .errors import BudgetExceeded, OracleScaleExceeded, PatternMismatch
from .families import LayeredFamily, SetFamily, binomial
from .hitting import HittingFamily, enumerate_subcubes, verify_hitting

ORACLE_MAX_MEMBERS = 30
ORACLE_MAX_G_N = 5
EXHAUSTIVE_MAX_ELEMENTS = 24


@dataclass
class HittingSolution:
    value: int
    chosen: int
    nodes: int


class _BranchAndBound:
    """Minimum-weight hitting set by branching on the most constrained uncovered set.

    The lower bound packs pairwise disjoint uncovered constraints greedily
    and charges each its cheapest allowed element.
    """

    def __init__(self, weights: Sequence[int], constraints: Sequence[int], node_budget: int):
        self.w = list(weights)
        self.cons = sorted(set(constraints), key=lambda c: (bin(c).count("1"), c))
        self.node_budget = node_budget
        self.nodes = 0

    def _min_weight(self, allowed: int) -> int:
        best = None
        while allowed:
            low = allowed & -allowed
            wt = self.w[low.bit_length() - 1]
            best = wt if best is None or wt < best else best
            allowed ^= low
        return best

    def solve(self, forced_in: int = 0, forced_out: int = 0, upper: float = math.inf
              ) -> HittingSolution | None:
        """Optimal solution with cost < ``upper`` respecting the forced decisions, else None."""
        if forced_in & forced_out:
            return None
        best = [upper, None]
        base_cost = sum(self.w[i] for i in range(len(self.w)) if forced_in >> i & 1)

        def rec(chosen: int, excluded: int, cost: int) -> None:
            self.nodes += 1
            if self.nodes > self.node_budget:
                raise BudgetExceeded(f"branch and bound exceeded {self.node_budget} nodes")
            uncovered = [c & ~excluded for c in self.cons if not c & chosen]
            if not uncovered:
                if cost < best[0]:
                    best[0], best[1] = cost, chosen
                return
            lb, used = 0, 0
            for a in uncovered:
                if not a:
                    return
                if not a & used:
                    used |= a
                    lb += self._min_weight(a)
            if cost + lb >= best[0]:
                return
            branch = min(uncovered, key=lambda a: bin(a).count("1"))
            while branch:
                low = branch & -branch
                branch ^= low
                rec(chosen | low, excluded, cost + self.w[low.bit_length() - 1])
                excluded |= low

        rec(forced_in, forced_out, base_cost)
        if best[1] is None:
            return None
        return HittingSolution(best[0], best[1], self.nodes)

    def lex_optimum(self, prefer_in: bool) -> HittingSolution:
        """An optimum fixed greedily element by element in index order.

        ``prefer_in`` tries to put each element in the hitting set before
        trying to leave it out; the opposite preference favours keeping
        early elements out of it.
        """
        opt = self.solve()
        if opt is None:
            raise AssertionError("hitting set problem is infeasible")
        target = opt.value
        fin, fout = 0, 0
        for i in range(len(self.w)):
            bit = 1 << i
            first, second = ((fin | bit, fout), (fin, fout | bit)) if prefer_in else ((fin, fout | bit), (fin | bit, fout))
            if self.solve(*first, upper=target + 1) is not None:
                fin, fout = first
            else:
                fin, fout = second
        sol = self.solve(fin, fout, upper=target + 1)
        assert sol is not None and sol.value == target and sol.chosen == fin
        return HittingSolution(target, fin, self.nodes)


def exhaustive_min_hitting(weights: Sequence[int], constraints: Sequence[int]) -> int:
    """Minimum hitting-set weight by enumerating every subset (numpy, <= 24 elements)."""
    n = len(weights)
    if n > EXHAUSTIVE_MAX_ELEMENTS:
        raise OracleScaleExceeded(f"exhaustive enumeration limited to {EXHAUSTIVE_MAX_ELEMENTS} elements")
    masks = np.arange(1 << n, dtype=np.int64)
    ok = np.ones(1 << n, dtype=bool)
    for c in set(constraints):
        ok &= (masks & c) != 0
    cost = np.zeros(1 << n, dtype=np.int64)
    for i, w in enumerate(weights):
        cost += ((masks >> i) & 1) * w
    return int(cost[ok].min())


@dataclass
class ExactResult:
    quantity: str
    params: dict
    value: int | Fraction
    witness: object
    nodes: int
    runtime_ms: float
    verified: bool = False
    constraints: int = 0
    extra: dict = field(default_factory=dict)

    def params_text(self) -> str:
        return ";".join(f"{k}={v}" for k, v in self.params.items())

    def value_text(self) -> str:
        v = self.value
        return f"{v.numerator}/{v.denominator}" if isinstance(v, Fraction) else str(v)


def paper_patterns(r: int, t: int) -> list[DaisyPattern]:
    """``D_r(2,t)`` and ``D_r(t-2,t)``, keeping those with petal size <= r."""
    out = []
    for s in sorted({2, t - 2}):
        if 0 <= s <= r and s <= t:
            out.append(DaisyPattern(r, s, t))
    return out


def _members_index(n: int, r: int):
    members = list(combinations(range(1, n + 1), r))
    return members, {m: i for i, m in enumerate(members)}


def daisy_constraints(n: int, r: int, patterns: Iterable[DaisyPattern]) -> list[int]:
    """Each fitting daisy instance as a bitmask over the lex-ordered r-sets of [n]."""
    _, index = _members_index(n, r)
    out = set()
    ground = range(1, n + 1)
    for p in patterns:
        if p.r != r:
            raise PatternMismatch(f"pattern {p} does not have uniformity {r}")
        if not p.fits(n):
            continue
        for stem in combinations(ground, p.stem_size):
            rest = [x for x in ground if x not in stem]
            for petals in combinations(rest, p.t):
                m = 0
                for x in combinations(petals, p.s):
                    m |= 1 << index[tuple(sorted(stem + x))]
                out.add(m)
    return sorted(out)


def exact_ex(n: int, r: int, patterns: Sequence[DaisyPattern], *, max_members: int = ORACLE_MAX_MEMBERS,
             node_budget: int = DEFAULT_NODE_BUDGET) -> ExactResult:
    """Largest r-uniform family on [n] containing no instance of any pattern."""
    if binomial(n, r) > max_members:
        raise OracleScaleExceeded(f"C({n},{r}) exceeds {max_members} members")
    start = time.perf_counter()
    members, _ = _members_index(n, r)
    cons = daisy_constraints(n, r, patterns)
    bb = _BranchAndBound([1] * len(members), cons, node_budget)
    sol = bb.lex_optimum(prefer_in=False) if cons else HittingSolution(0, 0, 0)
    kept = [m for i, m in enumerate(members) if not sol.chosen >> i & 1]
    fam = SetFamily(n, r, kept, validate=False)
    verified = all(daisy_free(fam, p)[0] for p in patterns)
    return ExactResult("ex", {"n": n, "r": r, "patterns": [p.as_list() for p in patterns]},
                       len(kept), fam, bb.nodes, (time.perf_counter() - start) * 1000, verified, len(cons))


def subcube_constraints(n: int, d: int) -> list[int]:
    """Each d-subcube as a bitmask over the 2^n vertices."""
    out = []
    for c in enumerate_subcubes(n, d):
        m = 0
        for v in c.vertices():
            m |= 1 << v
        out.append(m)
    return out


def exact_g(n: int, d: int, *, node_budget: int = DEFAULT_NODE_BUDGET) -> ExactResult:
    """Smallest vertex set of Q_n meeting every d-dimensional subcube."""
    if n > ORACLE_MAX_G_N:
        raise OracleScaleExceeded(f"exact g is limited to n <= {ORACLE_MAX_G_N}")
    start = time.perf_counter()
    cons = subcube_constraints(n, d)
    bb = _BranchAndBound([1] * (1 << n), cons, node_budget)
    sol = bb.lex_optimum(prefer_in=True)
    verts = [v for v in range(1 << n) if sol.chosen >> v & 1]
    h = HittingFamily.from_vertices(n, verts)
    verified = bool(verify_hitting(h, d))
    return ExactResult("g", {"n": n, "d": d}, len(verts), h, bb.nodes,
                       (time.perf_counter() - start) * 1000, verified, len(cons))


def q6_constraints(n: int, r: int) -> tuple[list, list, list[int]]:
    """Forbidden consecutive-layer copies as bitmasks over upper members then lower members."""
    upper, uidx = _members_index(n, r)
    lower, lidx = _members_index(n, r - 1)
    off = len(upper)
    out = set()
    ground = range(1, n + 1)
    for i in q6_layer_indices(r):
        for Y in combinations(ground, r - i):
            rest = [x for x in ground if x not in Y]
            for X in combinations(rest, 6):
                m = 0
                for a in combinations(X, i):
                    m |= 1 << uidx[tuple(sorted(Y + a))]
                for a in combinations(X, i - 1):
                    m |= 1 << (off + lidx[tuple(sorted(Y + a))])
                out.add(m)
    return upper, lower, sorted(out)


def exact_l(n: int, r: int, *, max_members: int = ORACLE_MAX_MEMBERS,
            node_budget: int = DEFAULT_NODE_BUDGET) -> ExactResult:
    """Largest density-sum of a two-layer family on [n] with no consecutive Q6 layer copy."""
    if r < 1 or r > n:
        raise OracleScaleExceeded("exact l needs 1 <= r <= n")
    if binomial(n, r) + binomial(n, r - 1) > max_members:
        raise OracleScaleExceeded(f"C({n},{r}) + C({n},{r - 1}) exceeds {max_members} members")
    start = time.perf_counter()
    upper, lower, cons = q6_constraints(n, r)
    cu, cl = binomial(n, r), binomial(n, r - 1)
    scale = math.lcm(cu, cl)
    weights = [scale // cu] * len(upper) + [scale // cl] * len(lower)
    bb = _BranchAndBound(weights, cons, node_budget)
    sol = bb.lex_optimum(prefer_in=False) if cons else HittingSolution(0, 0, 0)
    off = len(upper)
    up = SetFamily(n, r, [m for i, m in enumerate(upper) if not sol.chosen >> i & 1], validate=False)
    lo = SetFamily(n, r - 1, [m for i, m in enumerate(lower) if not sol.chosen >> (off + i) & 1],
                   validate=False)
    lf = LayeredFamily(up, lo)
    value = 2 - Fraction(sol.value, scale)
    verified = all(find_consecutive_q6(lf, i) is None for i in q6_layer_indices(r))
    return ExactResult("l", {"n": n, "r": r}, value, lf, bb.nodes, (time.perf_counter() - start) * 1000,
                       verified, len(cons), {"weights": (scale // cu, scale // cl), "scale": scale})


# monotonicity --------------------------------------------------------------------

@dataclass(frozen=True)
class OracleRanges:
    ex_ts: tuple[int, ...] = (4, 5)
    ex_rs: tuple[int, ...] = (2, 3, 4)
    ex_max_members: int = 35
    g_max_n: int = 5
    l_rs: tuple[int, ...] = (1, 2, 3)
    l_max_n: int = 8
    l_max_members: int = 60


@dataclass
class MonotonicityReport:
    checks: list[dict] = field(default_factory=list)
    results: list[ExactResult] = field(default_factory=list)

    @property
    def violations(self) -> list[dict]:
        return [c for c in self.checks if not c["holds"]]

    @property
    def ok(self) -> bool:
        return not self.violations and all(r.verified for r in self.results)


def monotonicity_suite(ranges: OracleRanges | None = None) -> MonotonicityReport:
    """Check the averaging inequalities on every in-range parameter point."""
    ranges = ranges or OracleRanges()
    rep = MonotonicityReport()
    ex: dict[tuple[int, int, int], int] = {}

    def record(res: ExactResult) -> ExactResult:
        rep.results.append(res)
        return res

    def check(name: str, params: dict, lhs, op: str, rhs) -> None:
        holds = lhs >= rhs if op == ">=" else lhs <= rhs
        rep.checks.append({"check": name, "params": params, "lhs": str(lhs), "op": op,
                           "rhs": str(rhs), "holds": holds})

    for t in ranges.ex_ts:
        for r in ranges.ex_rs:
            n = r
            while binomial(n, r) <= ranges.ex_max_members:
                res = record(exact_ex(n, r, paper_patterns(r, t), max_members=ranges.ex_max_members))
                ex[(n, r, t)] = res.value
                n += 1
    for (n, r, t), v in sorted(ex.items()):
        if (n + 1, r, t) in ex:
            check("ex density decreasing in n", {"n": n, "r": r, "t": t},
                  Fraction(v, binomial(n, r)), ">=", Fraction(ex[(n + 1, r, t)], binomial(n + 1, r)))
        if (n + 1, r + 1, t) in ex:
            check("(r+1) ex(n+1,r+1,t) <= (n+1) ex(n,r,t)", {"n": n, "r": r, "t": t},
                  (r + 1) * ex[(n + 1, r + 1, t)], "<=", (n + 1) * v)

    g: dict[tuple[int, int], int] = {}
    for n in range(0, ranges.g_max_n + 1):
        for d in range(0, n + 1):
            g[(n, d)] = record(exact_g(n, d)).value
    for (n, d), v in sorted(g.items()):
        if (n + 1, d) in g:
            check("g(n+1,d) >= 2 g(n,d)", {"n": n, "d": d}, g[(n + 1, d)], ">=", 2 * v)

    lv: dict[tuple[int, int], Fraction] = {}
    for r in ranges.l_rs:
        for n in range(max(r, 1), ranges.l_max_n + 1):
            if binomial(n, r) + binomial(n, r - 1) <= ranges.l_max_members:
                lv[(n, r)] = record(exact_l(n, r, max_members=ranges.l_max_members)).value
    for (n, r), v in sorted(lv.items()):
        if (n + 1, r) in lv:
            check("l(n,6,r) decreasing in n", {"n": n, "r": r}, v, ">=", lv[(n + 1, r)])
    return rep
