"""Uniform set families on the ground set ``[n] = {1..n}``.

Members are stored as sorted tuples; a parallel frozenset of bitmasks
(bit i set for element i) backs the fast membership tests used by the
searches.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Iterable, Iterator

from .config import DEFAULT_MEMBER_BUDGET
from .errors import InvalidFamily, LayerTooLarge, OutOfRange, TargetTooSmall

FAMILY_FILE_VERSION = 1


def binomial(n: int, k: int) -> int:
    if not 0 <= k <= n:
        raise OutOfRange(f"binomial({n}, {k}) needs 0 <= k <= n")
    return math.comb(n, k)


def mask_of(members: Iterable[int]) -> int:
    m = 0
    for x in members:
        m |= 1 << x
    return m


def elements_of(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


class SetFamily:
    """An r-uniform family of subsets of [n]."""

    __slots__ = ("n", "r", "members", "__dict__")

    def __init__(self, n: int, r: int, members: Iterable[Iterable[int]] = (), *, validate: bool = True):
        if n < 0 or r < 0:
            raise InvalidFamily("n and r must be non-negative")
        if r > n:
            raise InvalidFamily(f"uniformity {r} exceeds ground size {n}")
        self.n = n
        self.r = r
        if validate:
            seen = set()
            for m in members:
                t = tuple(sorted(m))
                if len(t) != r or len(set(t)) != r:
                    raise InvalidFamily(f"member {list(m)} is not an {r}-set")
                if t and (t[0] < 1 or t[-1] > n):
                    raise InvalidFamily(f"member {list(m)} leaves the ground set [{n}]")
                seen.add(t)
            self.members = frozenset(seen)
        else:
            self.members = frozenset(members)

    @classmethod
    def from_masks(cls, n: int, r: int, masks: Iterable[int]) -> "SetFamily":
        masks = frozenset(masks)
        fam = cls(n, r, (elements_of(m) for m in masks), validate=False)
        fam.__dict__["masks"] = masks
        return fam

    @classmethod
    def full_layer(cls, n: int, r: int, budget: int = DEFAULT_MEMBER_BUDGET) -> "SetFamily":
        if binomial(n, r) > budget:
            raise LayerTooLarge(f"C({n},{r}) exceeds the member budget {budget}")
        return cls(n, r, combinations(range(1, n + 1), r), validate=False)

    @cached_property
    def masks(self) -> frozenset[int]:
        return frozenset(mask_of(m) for m in self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.sorted_members())

    def __contains__(self, item) -> bool:
        return tuple(sorted(item)) in self.members

    def __eq__(self, other) -> bool:
        if not isinstance(other, SetFamily):
            return NotImplemented
        return (self.n, self.r, self.members) == (other.n, other.r, other.members)

    def __hash__(self) -> int:
        return hash((self.n, self.r, self.members))

    def __repr__(self) -> str:
        return f"SetFamily(n={self.n}, r={self.r}, size={len(self)})"

    def sorted_members(self) -> list[tuple[int, ...]]:
        return sorted(self.members)

    # serialisation

    def to_json(self) -> dict:
        return {"version": FAMILY_FILE_VERSION, "n": self.n, "r": self.r,
                "sets": [list(m) for m in self.sorted_members()]}

    def canonical_bytes(self) -> bytes:
        return dump_json(self.to_json())

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_bytes()).hexdigest()

    @classmethod
    def from_json(cls, data: dict) -> "SetFamily":
        for key in ("n", "r", "sets"):
            if key not in data:
                raise InvalidFamily(f"family file lacks {key!r}")
        if data.get("version", FAMILY_FILE_VERSION) != FAMILY_FILE_VERSION:
            raise InvalidFamily(f"unsupported family file version {data.get('version')}")
        n, r = data["n"], data["r"]
        if not isinstance(n, int) or not isinstance(r, int):
            raise InvalidFamily("n and r must be integers")
        sets = data["sets"]
        for s in sets:
            if not isinstance(s, list) or any(not isinstance(x, int) for x in s):
                raise InvalidFamily(f"set {s!r} is not a list of integers")
            if any(a >= b for a, b in zip(s, s[1:])):
                raise InvalidFamily(f"set {s} is not strictly increasing")
        if len({tuple(s) for s in sets}) != len(sets):
            raise InvalidFamily("duplicate sets in family file")
        return cls(n, r, sets)

    def save(self, path) -> None:
        Path(path).write_bytes(self.canonical_bytes())

    @classmethod
    def load(cls, path) -> "SetFamily":
        return cls.from_json(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class LayeredFamily:
    """``upper`` on [n]^(r) together with ``lower`` on [n]^(r-1)."""

    upper: SetFamily
    lower: SetFamily

    def __post_init__(self):
        if self.upper.n != self.lower.n or self.upper.r != self.lower.r + 1:
            raise InvalidFamily("layered family needs equal n and consecutive uniformities")

    @property
    def n(self) -> int:
        return self.upper.n

    @property
    def r(self) -> int:
        return self.upper.r

    def to_json(self) -> dict:
        return {"version": FAMILY_FILE_VERSION, "kind": "layered", "n": self.n, "r": self.r,
                "upper": [list(m) for m in self.upper.sorted_members()],
                "lower": [list(m) for m in self.lower.sorted_members()]}

    def canonical_bytes(self) -> bytes:
        return dump_json(self.to_json())

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_bytes()).hexdigest()

    @classmethod
    def from_json(cls, data: dict) -> "LayeredFamily":
        if data.get("kind") != "layered":
            raise InvalidFamily("not a layered family file")
        n, r = data["n"], data["r"]
        up = SetFamily.from_json({"n": n, "r": r, "sets": data["upper"]})
        lo = SetFamily.from_json({"n": n, "r": r - 1, "sets": data["lower"]})
        return cls(up, lo)

    def save(self, path) -> None:
        Path(path).write_bytes(self.canonical_bytes())

    @classmethod
    def load(cls, path) -> "LayeredFamily":
        return cls.from_json(json.loads(Path(path).read_text()))


def dump_json(obj) -> bytes:
    """Deterministic JSON bytes: insertion-ordered keys, 2-space indent, final newline."""
    return (json.dumps(obj, indent=2, ensure_ascii=False) + "\n").encode()


def density(f: SetFamily) -> Fraction:
    return Fraction(len(f), binomial(f.n, f.r))


def density_sum(lf: LayeredFamily) -> Fraction:
    return density(lf.upper) + density(lf.lower)


def complement_in_layer(f: SetFamily, budget: int = DEFAULT_MEMBER_BUDGET) -> SetFamily:
    if binomial(f.n, f.r) > budget:
        raise LayerTooLarge(f"C({f.n},{f.r}) exceeds the member budget {budget}")
    return SetFamily(f.n, f.r, (c for c in combinations(range(1, f.n + 1), f.r)
                                if c not in f.members), validate=False)


def _relabel(member: tuple[int, ...], i: int) -> tuple[int, ...]:
    return tuple(x - 1 if x > i else x for x in member)


def delete_coordinate(f: SetFamily, i: int) -> SetFamily:
    """Members avoiding i, relabelled order-preservingly onto [n-1]."""
    if not 1 <= i <= f.n:
        raise OutOfRange(f"{i} is not in [{f.n}]")
    if f.r > f.n - 1:
        raise TargetTooSmall(f"cannot delete from [{f.n}] at uniformity {f.r}")
    return SetFamily(f.n - 1, f.r, (_relabel(m, i) for m in f.members if i not in m), validate=False)


class _Slicer:
    """Incremental degree bookkeeping for repeated coordinate deletion."""

    def __init__(self, f: SetFamily):
        self.f = f
        self.alive = [True] * len(f.members)
        self.members = f.sorted_members()
        self.incidence: dict[int, list[int]] = {x: [] for x in range(1, f.n + 1)}
        for idx, m in enumerate(self.members):
            for x in m:
                self.incidence[x].append(idx)
        self.degree = {x: len(v) for x, v in self.incidence.items()}
        self.size = len(self.members)

    def delete(self, x: int) -> None:
        for idx in self.incidence[x]:
            if self.alive[idx]:
                self.alive[idx] = False
                self.size -= 1
                for y in self.members[idx]:
                    self.degree[y] -= 1
        del self.degree[x]

    def result(self) -> SetFamily:
        ground = sorted(self.degree)
        relabel = {x: j for j, x in enumerate(ground, 1)}
        return SetFamily(len(ground), self.f.r,
                         (tuple(relabel[x] for x in m) for m, a in zip(self.members, self.alive) if a),
                         validate=False)


def greedy_slice(f: SetFamily, target_n: int) -> SetFamily:
    """Delete coordinates one at a time, each time the one leaving the densest family.

    Ties go to the smallest current label.  The averaging identity
    ``sum_i |f_i| = (n - r)|f|`` guarantees each step is non-decreasing in
    density; this is asserted.
    """
    if target_n < f.r:
        raise TargetTooSmall(f"target {target_n} is below the uniformity {f.r}")
    if target_n > f.n:
        raise TargetTooSmall(f"target {target_n} exceeds the ground size {f.n}")
    s = _Slicer(f)
    n = f.n
    current = Fraction(s.size, binomial(n, f.r))
    while n > target_n:
        x = min(s.degree, key=lambda y: (s.degree[y], y))
        s.delete(x)
        n -= 1
        nxt = Fraction(s.size, binomial(n, f.r))
        assert nxt >= current, "averaging guarantee violated"
        current = nxt
    return s.result()


def greedy_slice_layered(lf: LayeredFamily, target_n: int) -> LayeredFamily:
    """Layered analogue of :func:`greedy_slice`, maximising the density-sum."""
    if target_n < lf.r:
        raise TargetTooSmall(f"target {target_n} is below the uniformity {lf.r}")
    if target_n > lf.n:
        raise TargetTooSmall(f"target {target_n} exceeds the ground size {lf.n}")
    up, lo = _Slicer(lf.upper), _Slicer(lf.lower)
    n, r = lf.n, lf.r
    current = Fraction(up.size, binomial(n, r)) + Fraction(lo.size, binomial(n, r - 1))
    while n > target_n:
        cu, cl = binomial(n - 1, r), binomial(n - 1, r - 1)

        def after(y: int) -> Fraction:
            return Fraction(up.size - up.degree[y], cu) + Fraction(lo.size - lo.degree[y], cl)

        x = min(up.degree, key=lambda y: (-after(y), y))
        up.delete(x)
        lo.delete(x)
        n -= 1
        nxt = Fraction(up.size, cu) + Fraction(lo.size, cl)
        assert nxt >= current, "averaging guarantee violated"
        current = nxt
    return LayeredFamily(up.result(), lo.result())
