"""Subcubes of {0,1}^n, hitting verification and the level-residue reduction.

Vertex v of Q_n is the integer whose bit (x - 1) is set for x in the
subset; so a subcube with base B and free coordinates X has vertices
``B | A`` for every submask A of X.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterator

import numpy as np

from .config import DEFAULT_HITTING_MAX_N
from .daisy import DaisyPattern, DaisyWitness
from .errors import InvalidFamily, OracleScaleExceeded, OutOfRange, ScaleExceeded
from .families import dump_json

_CHUNK = 1 << 20


def bits_to_set(mask: int) -> tuple[int, ...]:
    out, x = [], 1
    while mask:
        if mask & 1:
            out.append(x)
        mask >>= 1
        x += 1
    return tuple(out)


def set_to_bits(elements) -> int:
    m = 0
    for x in elements:
        m |= 1 << (x - 1)
    return m


@dataclass(frozen=True)
class Subcube:
    n: int
    base_mask: int
    free_mask: int

    def __post_init__(self):
        if self.base_mask & self.free_mask:
            raise OutOfRange("base and free coordinates must be disjoint")

    @property
    def base(self) -> tuple[int, ...]:
        return bits_to_set(self.base_mask)

    @property
    def free(self) -> tuple[int, ...]:
        return bits_to_set(self.free_mask)

    @property
    def dim(self) -> int:
        return bin(self.free_mask).count("1")

    def vertices(self) -> list[int]:
        return [self.base_mask | a for a in gray_submasks(self.free_mask)]

    def to_json(self) -> dict:
        return {"base": list(self.base), "free": list(self.free)}


@dataclass(eq=False)
class HittingFamily:
    """A vertex subset of Q_n held as a boolean array of length 2^n."""

    n: int
    vertices: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n > DEFAULT_HITTING_MAX_N:
            raise ScaleExceeded(f"n = {self.n} exceeds the hitting cap {DEFAULT_HITTING_MAX_N}")
        self.vertices = np.asarray(self.vertices, dtype=bool)
        if self.vertices.shape != (1 << self.n,):
            raise InvalidFamily("vertex bitset must have length 2^n")

    @classmethod
    def from_vertices(cls, n: int, verts) -> "HittingFamily":
        arr = np.zeros(1 << n, dtype=bool)
        for v in verts:
            if not 0 <= v < (1 << n):
                raise InvalidFamily(f"vertex {v} outside 0..2^{n}-1")
            arr[v] = True
        return cls(n, arr)

    @classmethod
    def from_sets(cls, n: int, sets) -> "HittingFamily":
        return cls.from_vertices(n, (set_to_bits(s) for s in sets))

    def __len__(self) -> int:
        return int(self.vertices.sum())

    def vertex_list(self) -> list[int]:
        return [int(v) for v in np.flatnonzero(self.vertices)]

    def __contains__(self, v: int) -> bool:
        return bool(self.vertices[v])

    def to_json(self) -> dict:
        return {"n": self.n, "vertices": self.vertex_list()}

    def canonical_bytes(self) -> bytes:
        return dump_json(self.to_json())

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_bytes()).hexdigest()

    @classmethod
    def from_json(cls, data: dict) -> "HittingFamily":
        if "n" not in data or "vertices" not in data:
            raise InvalidFamily("hitting family file needs 'n' and 'vertices'")
        return cls.from_vertices(int(data["n"]), data["vertices"])

    def save(self, path) -> None:
        Path(path).write_bytes(self.canonical_bytes())

    @classmethod
    def load(cls, path) -> "HittingFamily":
        return cls.from_json(json.loads(Path(path).read_text()))


def gray_submasks(mask: int) -> list[int]:
    """All submasks of ``mask`` in reflected Gray-code order."""
    bits = [1 << i for i in range(mask.bit_length()) if mask >> i & 1]
    out = [0]
    for b in bits:
        out += [v | b for v in reversed(out)]
    return out


def fixed_weight_masks(n: int, d: int) -> Iterator[int]:
    """d-subsets of n bits in increasing integer order (= colex order)."""
    if d == 0:
        yield 0
        return
    v = (1 << d) - 1
    limit = 1 << n
    while v < limit:
        yield v
        c = v & -v
        r = v + c
        v = (((r ^ v) >> 2) // c) | r


def _submasks_increasing(mask: int, n: int) -> np.ndarray:
    bits = [i for i in range(n) if mask >> i & 1]
    idx = np.arange(1 << len(bits), dtype=np.int64)
    out = np.zeros_like(idx)
    for j, b in enumerate(bits):
        out |= ((idx >> j) & 1) << b
    return out


def enumerate_subcubes(n: int, d: int) -> Iterator[Subcube]:
    """All C(n,d) 2^(n-d) copies of Q_d, free sets in colex order, then bases."""
    if not 0 <= d <= n:
        raise OutOfRange(f"need 0 <= d <= n, got d={d}, n={n}")
    full = (1 << n) - 1
    for X in fixed_weight_masks(n, d):
        for B in _submasks_increasing(full ^ X, n):
            yield Subcube(n, int(B), X)


@dataclass(frozen=True)
class HittingResult:
    ok: bool
    missed: Subcube | None
    checked: int

    def __bool__(self) -> bool:
        return self.ok


def verify_hitting(h: HittingFamily, d: int) -> HittingResult:
    """Whether ``h`` meets every d-dimensional subcube; reports the first miss."""
    n = h.n
    if not 0 <= d <= n:
        raise OutOfRange(f"need 0 <= d <= n, got d={d}, n={n}")
    full = (1 << n) - 1
    verts = h.vertices
    checked = 0
    for X in fixed_weight_masks(n, d):
        offsets = np.array(gray_submasks(X), dtype=np.int64)
        bases = _submasks_increasing(full ^ X, n)
        step = max(1, _CHUNK >> d)
        for lo in range(0, len(bases), step):
            chunk = bases[lo:lo + step]
            hit = verts[chunk[:, None] | offsets[None, :]].any(axis=1)
            if not hit.all():
                first = int(np.argmin(hit))
                return HittingResult(False, Subcube(n, int(chunk[first]), X), checked + first + 1)
            checked += len(chunk)
    return HittingResult(True, None, checked)


@dataclass(frozen=True)
class ResidueRule:
    """Levels ``L`` with ``L % modulus in residues`` are covered."""

    modulus: int
    residues: frozenset[int]

    def __call__(self, level: int) -> bool:
        return level % self.modulus in self.residues


def residue_reduction_check(d: int, covered: ResidueRule, layer_lo: int, layer_hi: int,
                            span: int = 1) -> bool:
    """Every placement of Q_d puts ``span`` consecutive layers from [lo, hi] on covered levels.

    A Q_d whose bottom vertex sits at level b has its layer j at level b + j.
    Checked for every b in one period of the rule.
    """
    if not 0 <= layer_lo <= layer_hi <= d:
        raise OutOfRange("need 0 <= layer_lo <= layer_hi <= d")
    for b in range(covered.modulus):
        if not any(all(covered(b + j + k) for k in range(span))
                   for j in range(layer_lo, layer_hi - span + 2)):
            return False
    return True


def layer_of_subcube_is_daisy(c: Subcube, j: int) -> tuple[DaisyPattern, DaisyWitness]:
    """Layer j of subcube c, as the daisy ``D_{|B|+j}(j, d)`` with stem B and petal-set X."""
    if not 0 <= j <= c.dim:
        raise OutOfRange(f"layer {j} outside 0..{c.dim}")
    pat = DaisyPattern(len(c.base) + j, j, c.dim)
    return pat, DaisyWitness(c.base, c.free)


def subcube_layer(c: Subcube, j: int) -> list[tuple[int, ...]]:
    """The level-(|B|+j) vertices of c as sorted sets, computed directly."""
    return [tuple(sorted(c.base + a)) for a in combinations(c.free, j)]


def min_hitting_lower_bound_check(n: int, d: int) -> bool:
    """g(n+1, d) >= 2 g(n, d), using exact oracle values."""
    from .oracle import ORACLE_MAX_G_N, exact_g

    if n + 1 > ORACLE_MAX_G_N:
        raise OracleScaleExceeded(f"exact g needs n + 1 <= {ORACLE_MAX_G_N}")
    return exact_g(n + 1, d).value >= 2 * exact_g(n, d).value
