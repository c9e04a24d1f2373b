"""Exact rational bounds on prod_{k>=1} (1 - q^-k) and the headline density bounds.

Nothing here touches floating point.  The infinite product is bracketed by

    upper(K) = prod_{k<=K} (1 - q^-k)
    lower(K) = upper(K) * (1 - q^-K / (q - 1))

where the tail uses prod (1 - x_k) >= 1 - sum x_k.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .errors import BoundTooLoose, OutOfRange


@dataclass(frozen=True)
class ProductBound:
    q: int
    K: int
    lower: Fraction
    upper: Fraction


def finite_product(q: int, K: int) -> Fraction:
    out = Fraction(1)
    for k in range(1, K + 1):
        out *= 1 - Fraction(1, q**k)
    return out


def product_bound(q: int, K: int) -> ProductBound:
    if q < 2 or K < 1:
        raise OutOfRange("product_bound needs q >= 2 and K >= 1")
    upper = finite_product(q, K)
    lower = upper * (1 - Fraction(1, q**K * (q - 1)))
    return ProductBound(q, K, lower, upper)


def fmt(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass
class DensityReport:
    d: int
    K: int
    bound: Fraction
    target: Fraction
    trace: list[str] = field(default_factory=list)
    checks: list[tuple[str, Fraction, str, Fraction]] = field(default_factory=list, repr=False)

    @property
    def implied_lambda_lower(self) -> Fraction:
        return 1 - self.bound

    def to_json(self) -> dict:
        return {"d": self.d, "K": self.K,
                "bound_num": self.bound.numerator, "bound_den": self.bound.denominator,
                "target_num": self.target.numerator, "target_den": self.target.denominator,
                "trace": list(self.trace)}

    def recheck(self) -> bool:
        return all(_OPS[op](a, b) for _, a, op, b in self.checks)


_OPS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b,
}


class _Tracer:
    def __init__(self, report: DensityReport):
        self.report = report

    def note(self, text: str) -> None:
        self.report.trace.append(text)

    def claim(self, label: str, a: Fraction, op: str, b: Fraction) -> bool:
        ok = _OPS[op](a, b)
        self.report.checks.append((label, a, op, b))
        self.report.trace.append(f"{label}: {fmt(a)} {op} {fmt(b)} [{'ok' if ok else 'FAILS'}]")
        return ok


def gamma7_report(K: int = 8) -> DensityReport:
    """Limit density of the d = 7 striped construction with q = 4, bounded above.

    Levels congruent to 3 mod 4 carry a quarter of the cube asymptotically and
    each keeps at most a ``1 - prod(1 - 4^-k)`` fraction of its level.
    """
    pb = product_bound(4, K)
    bound = Fraction(1, 4) * (1 - pb.lower)
    rep = DensityReport(7, K, bound, Fraction(1, 8))
    t = _Tracer(rep)
    t.note(f"P4 = prod_(k>=1)(1-4^-k) lies in [{fmt(pb.lower)}, {fmt(pb.upper)}] (K={K})")
    ok = t.claim("P4 lower bound vs 3/5", pb.lower, ">", Fraction(3, 5))
    t.note(f"density <= (1/4)(1 - P4) <= (1/4)(1 - {fmt(pb.lower)}) = {fmt(bound)}")
    ok &= t.claim("bound vs 1/10", bound, "<=", Fraction(1, 10))
    ok &= t.claim("1/10 vs trivial 1/8", Fraction(1, 10), "<", Fraction(1, 8))
    ok &= t.claim("bound vs trivial 1/8", bound, "<", Fraction(1, 8))
    if not (bound <= Fraction(1, 10) and bound < Fraction(1, 8)):
        raise BoundTooLoose(f"K={K} gives {fmt(bound)}")
    if not ok:
        raise BoundTooLoose(f"K={K}: a derivation step failed")
    return rep


def binomials_increase_below_half(s: int) -> bool:
    """C(n,r) > C(n,r-1) for all 1 <= r <= 4s-1 with n = 8s-1."""
    n = 8 * s - 1
    return all(comb(n, r) > comb(n, r - 1) for r in range(1, 4 * s))


def gamma6_report(K: int = 8, binomial_check_s: int = 12) -> DensityReport:
    """Limit density of the d = 6 striped construction with q = 5, bounded above.

    Levels 2, 3 mod 4 carry half the cube; each pair (r-1, r) recovers at
    least its density-sum times the smaller of the two level sizes, and the
    smaller level covers an eighth of the cube on either side of n/2.
    """
    pb = product_bound(5, K)
    dsum = 2 * pb.lower
    bound = Fraction(1, 2) - dsum / 4
    rep = DensityReport(6, K, bound, Fraction(1, 7))
    t = _Tracer(rep)
    t.note(f"P5 = prod_(k>=1)(1-5^-k) lies in [{fmt(pb.lower)}, {fmt(pb.upper)}] (K={K})")
    ok = t.claim("density-sum lower bound 2*P5 vs 38/25", dsum, ">=", Fraction(38, 25))
    binom_ok = all(binomials_increase_below_half(s) for s in range(1, binomial_check_s + 1))
    t.note(f"C(8s-1, r) > C(8s-1, r-1) for r <= 4s-1, s = 1..{binomial_check_s}: "
           f"{'ok' if binom_ok else 'FAILS'}")
    ok &= binom_ok
    t.note(f"density <= 1/2 - (1/8 + 1/8) * density_sum <= 1/2 - ({fmt(dsum)})/4 = {fmt(bound)}")
    ok &= t.claim("bound vs 3/25", bound, "<=", Fraction(3, 25))
    ok &= t.claim("3/25 vs trivial 1/7", Fraction(3, 25), "<", Fraction(1, 7))
    ok &= t.claim("bound vs trivial 1/7", bound, "<", Fraction(1, 7))
    if not (bound <= Fraction(3, 25) and bound < Fraction(1, 7)):
        raise BoundTooLoose(f"K={K} gives {fmt(bound)}")
    if not ok:
        raise BoundTooLoose(f"K={K}: a derivation step failed")
    return rep


def trivial_upper(d: int) -> Fraction:
    """1/(d+1), witnessed by ``construct.mod_level_family``."""
    if d < 1:
        raise OutOfRange("d must be >= 1")
    return Fraction(1, d + 1)
