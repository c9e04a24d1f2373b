"""Constructions: basis families, blow-ups, two-layer families, level-residue hitting sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .config import DEFAULT_MEMBER_BUDGET, Budget
from .daisy import DaisyPattern, q6_layer_indices
from .density import finite_product, fmt, gamma6_report, gamma7_report, product_bound
from .errors import BadResidue, BudgetExceeded, OutOfRange, ZeroVector
from .families import (LayeredFamily, SetFamily, binomial, complement_in_layer, density,
                       density_sum, greedy_slice, greedy_slice_layered)
from .gf import FiniteField, FqVector, field_make
from .hitting import HittingFamily, set_to_bits

TWO_LAYER_Q = 5


def _independent_extensions(F: FiniteField, dim: int, k: int, start: Sequence[Sequence[int]] = ()
                            ) -> list[tuple[int, ...]]:
    """Sorted k-tuples of ground indices whose vectors, together with ``start``, are independent.

    Ground index i is the nonzero vector of GF(q)^dim with encoding i.
    """
    n = F.q**dim - 1
    vecs = [F.decode(i, dim) for i in range(n + 1)]
    scalars = range(1, F.q)
    out: list[tuple[int, ...]] = []

    def extend(span_vecs: list, v) -> list:
        grown = list(span_vecs)
        for c in scalars:
            m = F.vscale(c, v)
            grown += [F.vadd(s, m) for s in span_vecs]
        return grown

    base = [(0,) * dim]
    for v in start:
        base = extend(base, tuple(v))
    if len(base) != F.q**len(start):
        return []

    def rec(chosen: list[int], last: int, span_vecs: list) -> None:
        span = {F.encode(s) for s in span_vecs}
        if len(chosen) == k - 1:
            out.extend(tuple(chosen) + (j,) for j in range(last + 1, n + 1) if j not in span)
            return
        for j in range(last + 1, n + 1):
            if j not in span:
                rec(chosen + [j], j, extend(span_vecs, vecs[j]))

    if k == 0:
        return [()]
    rec([], 0, base)
    return out


def basis_family(q: int, r: int, budget: int = DEFAULT_MEMBER_BUDGET) -> SetFamily:
    """All bases of GF(q)^r, as r-subsets of [q^r - 1] under the ground map."""
    F = field_make(q)
    if r < 1:
        raise OutOfRange("r must be >= 1")
    n = q**r - 1
    if binomial(n, r) > budget:
        raise BudgetExceeded(f"C({n},{r}) exceeds the member budget {budget}")
    fam = SetFamily(n, r, _independent_extensions(F, r, r), validate=False)
    if not density(fam) > finite_product(q, r):
        raise AssertionError("basis density does not exceed the finite product")
    return fam


def basis_count(q: int, r: int) -> int:
    """Unordered bases of GF(q)^r: prod_{i<r} (q^r - q^i) / r!."""
    num = 1
    for i in range(r):
        num *= q**r - q**i
    fact = 1
    for i in range(2, r + 1):
        fact *= i
    return num // fact


@dataclass(frozen=True)
class BlowupSpec:
    base_n: int
    m: int

    def __post_init__(self):
        if self.m < 1 or self.base_n < 0:
            raise OutOfRange("blow-up needs m >= 1")

    @property
    def n(self) -> int:
        return self.base_n * self.m

    def block(self, j: int) -> range:
        """Class C_j = {(j-1)m + 1 .. jm}."""
        return range((j - 1) * self.m + 1, j * self.m + 1)

    @property
    def classes(self) -> list[range]:
        return [self.block(j) for j in range(1, self.base_n + 1)]


def _blow_members(f: SetFamily, spec: BlowupSpec):
    for mem in f.members:
        for pick in product(*(spec.block(j) for j in mem)):
            yield pick


def blow_up(f: SetFamily, m: int, budget: int = DEFAULT_MEMBER_BUDGET) -> SetFamily:
    """All transversal copies of members of f after replacing each point by m points."""
    spec = BlowupSpec(f.n, m)
    if len(f) * m**f.r > budget:
        raise BudgetExceeded(f"blow-up would hold {len(f) * m ** f.r} members")
    g = SetFamily(spec.n, f.r, _blow_members(f, spec), validate=False)
    if f.n and density(g) < (1 - Fraction(binomial(f.r, 2), f.n)) * density(f):
        raise AssertionError("blow-up density below the transversal estimate")
    return g


def blow_up_layered(lf: LayeredFamily, m: int, budget: int = DEFAULT_MEMBER_BUDGET) -> LayeredFamily:
    return LayeredFamily(blow_up(lf.upper, m, budget), blow_up(lf.lower, m, budget))


def default_w(r: int) -> tuple[int, ...]:
    """e_1 = (1, 0, ..., 0), the lexicographically last unit vector."""
    return (1,) + (0,) * (r - 1)


def two_layer_family(r: int, w: Sequence[int] | FqVector | None = None,
                     budget: int = DEFAULT_MEMBER_BUDGET) -> LayeredFamily:
    """Bases of GF(5)^r on top, (r-1)-sets completing to a basis with w below.

    For r = 1 this degenerates to all 4 singletons over the single empty set.
    """
    F = field_make(TWO_LAYER_Q)
    if r < 1:
        raise OutOfRange("r must be >= 1")
    if w is None:
        w = default_w(r)
    w = tuple(w.coords if isinstance(w, FqVector) else w)
    if len(w) != r:
        raise OutOfRange(f"w must have {r} coordinates")
    if not any(w):
        raise ZeroVector("w must be nonzero")
    n = TWO_LAYER_Q**r - 1
    if binomial(n, r) > budget:
        raise BudgetExceeded(f"C({n},{r}) exceeds the member budget {budget}")
    upper = SetFamily(n, r, _independent_extensions(F, r, r), validate=False)
    lower = SetFamily(n, r - 1, _independent_extensions(F, r, r - 1, [w]), validate=False)
    if not density(upper) > finite_product(TWO_LAYER_Q, r):
        raise AssertionError("upper density does not exceed the finite product")
    if r > 1 and not density(lower) > finite_product(TWO_LAYER_Q, r - 1):
        raise AssertionError("lower density does not exceed the finite product")
    return LayeredFamily(upper, lower)


def mod_level_family(n: int, d: int) -> HittingFamily:
    """Every vertex whose level is a multiple of d + 1."""
    if not 0 <= d <= n:
        raise OutOfRange("need 0 <= d <= n")
    import numpy as np

    levels = np.array([bin(v).count("1") for v in range(1 << n)])
    return HittingFamily(n, levels % (d + 1) == 0)


# striped plans ------------------------------------------------------------------

@dataclass
class LevelEntry:
    """One covered level of a striped plan.

    ``complement`` is the part of the hitting set on this level (materialized
    entries only).  ``achieved_density`` is the density of the daisy-free
    family it complements.  For symbolic entries ``density_lower_bound`` is a
    rigorous lower bound on that density (d = 7) or on the pair's density-sum
    (d = 6, with ``pair`` set).
    """

    level: int
    kind: str
    source: str
    complement: SetFamily | None = None
    achieved_density: Fraction | None = None
    density_lower_bound: Fraction | None = None
    pair: tuple[int, int] | None = None


@dataclass
class StripedPlan:
    n: int
    d: int
    levels: list[LevelEntry] = field(default_factory=list)
    asymptotic_formula: str = ""
    asymptotic_bound: Fraction = Fraction(0)

    @property
    def covered_levels(self) -> list[int]:
        return [e.level for e in self.levels]

    @property
    def fully_materialized(self) -> bool:
        return all(e.kind == "materialized" for e in self.levels)

    def hitting_family(self) -> HittingFamily:
        if not self.fully_materialized:
            raise BudgetExceeded("plan has symbolic levels; cannot build the vertex set")
        sets = [m for e in self.levels for m in e.complement.members]
        return HittingFamily.from_vertices(self.n, (set_to_bits(s) for s in sets))

    def to_json(self, family_refs: dict[int, str] | None = None) -> dict:
        family_refs = family_refs or {}
        levels = []
        for e in self.levels:
            item: dict = {"level": e.level, "kind": e.kind, "source": e.source}
            if e.pair:
                item["pair"] = list(e.pair)
            if e.kind == "materialized":
                item["family_ref"] = family_refs.get(e.level)
                item["complement_size"] = len(e.complement)
                item["achieved_density"] = fmt(e.achieved_density)
            else:
                item["density_lower_bound"] = fmt(e.density_lower_bound)
            levels.append(item)
        return {"n": self.n, "d": self.d, "levels": levels,
                "asymptotic_density": self.asymptotic_formula,
                "asymptotic_bound": fmt(self.asymptotic_bound)}


def d7_patterns(r: int) -> list[DaisyPattern]:
    """The two patterns a level-r family must avoid in the d = 7 plan (t = 6)."""
    return [DaisyPattern(r, s, 6) for s in (2, 4) if s <= r]


def _fits_any(pats: list[DaisyPattern], n: int) -> bool:
    return any(p.fits(n) for p in pats)


def _q6_fits(n: int, r: int) -> bool:
    return any(r - i + 6 <= n for i in q6_layer_indices(r))


def _resize(f, n: int, budget: int, slicer, blower):
    """Bring a family on [N] to [n]: slice down, or blow up and slice."""
    if f.n >= n:
        return slicer(f, n)
    m = -(-n // f.n)
    return slicer(blower(f, m, budget), n)


def _sized_ok(n: int, r: int, budget: int) -> bool:
    return binomial(n, r) <= budget


def striped_plan(n: int, d: int, budget: Budget | None = None, K: int = 8) -> StripedPlan:
    """The level-residue hitting construction for d = 7 (n = 3 mod 4) or d = 6 (n = 7 mod 8)."""
    budget = budget or Budget()
    cap = budget.members
    if d == 7:
        if n % 4 != 3:
            raise BadResidue("d = 7 plans need n = 3 (mod 4)")
        q = 4
        plan = StripedPlan(n, d, asymptotic_formula="(1/4)(1 - prod_(k>=1)(1 - 4^-k))",
                           asymptotic_bound=gamma7_report(K).bound)
        pb = product_bound(q, K)
        for r in range(3, n + 1, 4):
            pats = d7_patterns(r)
            if not _fits_any(pats, n):
                plan.levels.append(LevelEntry(r, "materialized", "vacuous: no forbidden daisy fits",
                                              SetFamily(n, r), Fraction(1)))
                continue
            N = q**r - 1
            blow = -(-n // N)
            if _sized_ok(N, r, cap) and _sized_ok(N * blow, r, cap) and _sized_ok(n, r, cap):
                base = basis_family(q, r, cap)
                fam = _resize(base, n, cap, greedy_slice, blow_up)
                how = "greedy_slice" if N >= n else f"blow_up(m={blow}) + greedy_slice"
                plan.levels.append(LevelEntry(r, "materialized", f"basis_family({q},{r}) {how}",
                                              complement_in_layer(fam, cap), density(fam)))
            else:
                plan.levels.append(LevelEntry(r, "symbolic", f"basis family over GF({q})^{r}",
                                              density_lower_bound=pb.lower))
        return plan
    if d == 6:
        if n % 8 != 7:
            raise BadResidue("d = 6 plans need n = 7 (mod 8)")
        q = TWO_LAYER_Q
        plan = StripedPlan(n, d, asymptotic_formula="1/2 - 2 prod_(k>=1)(1 - 5^-k) / 4",
                           asymptotic_bound=gamma6_report(K).bound)
        dsum_bound = 2 * product_bound(q, K).lower
        for r in range(3, n + 1, 4):
            pair = (r - 1, r)
            if not _q6_fits(n, r):
                for lvl in pair:
                    plan.levels.append(LevelEntry(lvl, "materialized", "vacuous: no Q6 layer pair fits",
                                                  SetFamily(n, lvl), Fraction(1), pair=pair))
                continue
            N = q**r - 1
            blow = -(-n // N)
            if _sized_ok(N, r, cap) and _sized_ok(N * blow, r, cap) and _sized_ok(n, r, cap):
                lf = _resize(two_layer_family(r, budget=cap), n, cap, greedy_slice_layered, blow_up_layered)
                how = "greedy_slice" if N >= n else f"blow_up(m={blow}) + greedy_slice"
                src = f"two_layer_family({r}) {how}"
                plan.levels.append(LevelEntry(r - 1, "materialized", src, complement_in_layer(lf.lower, cap),
                                              density(lf.lower), pair=pair))
                plan.levels.append(LevelEntry(r, "materialized", src, complement_in_layer(lf.upper, cap),
                                              density(lf.upper), pair=pair))
            else:
                for lvl in pair:
                    plan.levels.append(LevelEntry(lvl, "symbolic", f"two-layer family over GF(5)^{r}",
                                                  density_lower_bound=dsum_bound, pair=pair))
        return plan
    raise BadResidue("striped plans exist for d = 6 and d = 7 only")


def plan_layer_families(plan: StripedPlan) -> dict:
    """Forbidden-pattern-free families recovered from materialized entries, keyed by level."""
    out = {}
    for e in plan.levels:
        if e.kind == "materialized":
            out[e.level] = complement_in_layer(e.complement)
    return out


__all__ = [
    "BlowupSpec", "LevelEntry", "StripedPlan", "basis_count", "basis_family", "blow_up",
    "blow_up_layered", "d7_patterns", "default_w", "density_sum", "mod_level_family",
    "plan_layer_families", "striped_plan", "two_layer_family",
]
