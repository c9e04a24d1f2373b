"""Arithmetic and small linear algebra over GF(q), q = p^k <= 256.

Elements are the integers ``0 .. q-1``.  For a prime field they are the
residues mod p.  For an extension field, integer ``i`` encodes the
polynomial whose coefficient of ``x^j`` is the j-th base-p digit of ``i``,
reduced modulo a fixed irreducible polynomial: the monic irreducible of
degree k with the smallest such encoding.  For GF(4) that is
``x^2 + x + 1`` (so 2 = w, 3 = w + 1 and w*w = w + 1).

Vectors are plain tuples of elements.  The integer encoding of a vector
reads the coordinates as base-q digits, most significant first, so integer
order on encodings is lexicographic order on coordinate tuples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Sequence

from .errors import MixedDimensions, NotPrimePower, OutOfRange, ZeroVector

Vector = tuple[int, ...]

MAX_ORDER = 256
_AXIOM_CHECK_MAX = 16


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, k)`` with ``q == p**k``, or None."""
    if q < 2:
        return None
    for p in range(2, q + 1):
        if q % p == 0:
            if not _is_prime(p):
                return None
            k, rest = 0, q
            while rest % p == 0:
                rest //= p
                k += 1
            return (p, k) if rest == 1 else None
    return None


# polynomials over GF(p) as coefficient lists, lowest degree first

def _poly_from_int(n: int, p: int) -> list[int]:
    out = []
    while n:
        out.append(n % p)
        n //= p
    return out


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    a = list(a)
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        coef = (a[-1] * inv_lead) % p
        shift = len(a) - len(m)
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * c) % p
        while a and a[-1] == 0:
            a.pop()
    return a


def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def _is_irreducible(poly: list[int], p: int) -> bool:
    deg = len(poly) - 1
    for d in range(1, deg // 2 + 1):
        for low in product(range(p), repeat=d):
            if not _poly_mod(poly, list(low) + [1], p):
                return False
    return True


def irreducible_polynomial(p: int, k: int) -> tuple[int, ...]:
    """Coefficients (lowest first) of the modulus used for GF(p^k)."""
    if k == 1:
        return (0, 1)
    for low in range(p**k):
        poly = _poly_from_int(low, p)
        poly += [0] * (k - len(poly)) + [1]
        if _is_irreducible(poly, p):
            return tuple(poly)
    raise AssertionError(f"no irreducible polynomial of degree {k} over GF({p})")


@dataclass(frozen=True, eq=False)
class FiniteField:
    """GF(q) with precomputed addition, multiplication and inverse tables.

    Build instances with :func:`field_make`, which caches one field per q.
    """

    q: int
    p: int
    k: int
    modulus: tuple[int, ...]
    add_table: tuple[tuple[int, ...], ...] = field(repr=False)
    mul_table: tuple[tuple[int, ...], ...] = field(repr=False)
    neg_table: tuple[int, ...] = field(repr=False)
    inv_table: tuple[int, ...] = field(repr=False)

    def __reduce__(self):
        return (field_make, (self.q,))

    # scalar arithmetic

    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.add_table[a][self.neg_table[b]]

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.inv_table[a]

    @property
    def elements(self) -> range:
        return range(self.q)

    # vectors

    def encode(self, v: Sequence[int]) -> int:
        code = 0
        for c in v:
            code = code * self.q + c
        return code

    def decode(self, code: int, dim: int) -> Vector:
        out = [0] * dim
        for i in range(dim - 1, -1, -1):
            code, out[i] = divmod(code, self.q)
        return tuple(out)

    def vadd(self, u: Sequence[int], v: Sequence[int]) -> Vector:
        t = self.add_table
        return tuple(t[a][b] for a, b in zip(u, v))

    def vsub(self, u: Sequence[int], v: Sequence[int]) -> Vector:
        t, n = self.add_table, self.neg_table
        return tuple(t[a][n[b]] for a, b in zip(u, v))

    def vscale(self, c: int, v: Sequence[int]) -> Vector:
        row = self.mul_table[c]
        return tuple(row[a] for a in v)

    def nonzero_vectors(self, dim: int) -> Iterator[Vector]:
        """Nonzero vectors of GF(q)^dim in lexicographic order."""
        for code in range(1, self.q**dim):
            yield self.decode(code, dim)

    def projective_rep(self, v: Sequence[int]) -> Vector:
        for c in v:
            if c:
                return self.vscale(self.inv_table[c], v)
        raise ZeroVector("the zero vector has no projective representative")

    def projective_points(self, dim: int) -> list[Vector]:
        """Normalised representatives of all 1-dim subspaces, sorted."""
        return [v for v in self.nonzero_vectors(dim) if v[next(i for i, c in enumerate(v) if c)] == 1]

    def span(self, vectors: Sequence[Sequence[int]], dim: int | None = None) -> set[Vector]:
        if dim is None:
            if not vectors:
                raise MixedDimensions("dimension of an empty span is ambiguous")
            dim = len(vectors[0])
        out = {(0,) * dim}
        for v in vectors:
            multiples = [self.vscale(c, v) for c in range(1, self.q)]
            out |= {self.vadd(s, m) for s in out for m in multiples}
        return out

    # elimination

    def echelon(self, rows: Iterable[Sequence[int]]) -> list[tuple[int, Vector]]:
        """Reduced pivot rows ``(pivot_col, row)`` with row[pivot_col] == 1.

        Rows are absorbed in the given order; the pivot of a new row is its
        first nonzero entry after reduction by the earlier pivots.
        """
        basis: list[tuple[int, list[int]]] = []
        add, mul, neg, inv = self.add_table, self.mul_table, self.neg_table, self.inv_table
        for raw in rows:
            row = list(raw)
            for col, prow in basis:
                c = row[col]
                if c:
                    nc = neg[c]
                    mrow = mul[nc]
                    row = [add[a][mrow[b]] for a, b in zip(row, prow)]
            pivot = next((i for i, c in enumerate(row) if c), None)
            if pivot is None:
                continue
            scale = mul[inv[row[pivot]]]
            basis.append((pivot, [scale[a] for a in row]))
        return [(col, tuple(r)) for col, r in basis]

    def rank(self, rows: Sequence[Sequence[int]]) -> int:
        if rows and len({len(r) for r in rows}) != 1:
            raise MixedDimensions("vectors of different lengths")
        return len(self.echelon(rows))

    def is_basis(self, rows: Sequence[Sequence[int]]) -> bool:
        if not rows:
            return False
        if len({len(r) for r in rows}) != 1:
            raise MixedDimensions("vectors of different lengths")
        dim = len(rows[0])
        return len(rows) == dim and self.rank(rows) == dim

    def coordinates(self, basis: Sequence[Sequence[int]], v: Sequence[int]) -> Vector:
        """Coefficients ``c`` with ``sum c_i * basis_i == v``.

        Solved by Gauss-Jordan on the transposed system; raises ValueError if
        ``basis`` is not a basis or v is outside its span.
        """
        dim = len(v)
        if len(basis) != dim:
            raise MixedDimensions("coordinates need a full basis")
        # augmented matrix: column i of A is basis[i]
        aug = [[basis[c][r] for c in range(dim)] + [v[r]] for r in range(dim)]
        add, mul, neg, inv = self.add_table, self.mul_table, self.neg_table, self.inv_table
        for col in range(dim):
            piv = next((r for r in range(col, dim) if aug[r][col]), None)
            if piv is None:
                raise ValueError("vectors do not form a basis")
            aug[col], aug[piv] = aug[piv], aug[col]
            s = mul[inv[aug[col][col]]]
            aug[col] = [s[a] for a in aug[col]]
            for r in range(dim):
                if r != col and aug[r][col]:
                    m = mul[neg[aug[r][col]]]
                    aug[r] = [add[a][m[b]] for a, b in zip(aug[r], aug[col])]
        return tuple(aug[r][dim] for r in range(dim))


def _build_tables(q: int, p: int, k: int, modulus: tuple[int, ...]):
    if k == 1:
        add = tuple(tuple((a + b) % q for b in range(q)) for a in range(q))
        mul = tuple(tuple((a * b) % q for b in range(q)) for a in range(q))
    else:
        polys = [_poly_from_int(i, p) for i in range(q)]

        def to_int(poly: list[int]) -> int:
            return sum(c * p**i for i, c in enumerate(poly))

        def padd(a: list[int], b: list[int]) -> list[int]:
            n = max(len(a), len(b))
            out = [((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)]
            while out and out[-1] == 0:
                out.pop()
            return out

        m = list(modulus)
        add = tuple(tuple(to_int(padd(polys[a], polys[b])) for b in range(q)) for a in range(q))
        mul = tuple(
            tuple(to_int(_poly_mod(_poly_mul(polys[a], polys[b], p), m, p)) for b in range(q))
            for a in range(q)
        )
    neg = tuple(next(b for b in range(q) if add[a][b] == 0) for a in range(q))
    inv = (0,) + tuple(next(b for b in range(1, q) if mul[a][b] == 1) for a in range(1, q))
    return add, mul, neg, inv


def _verify_axioms(F: FiniteField) -> None:
    q, add, mul = F.q, F.add_table, F.mul_table
    for a in range(q):
        assert add[a][0] == a and mul[a][1] == a and mul[a][0] == 0
        if a:
            assert mul[a][F.inv_table[a]] == 1
        for b in range(q):
            assert add[a][b] == add[b][a] and mul[a][b] == mul[b][a]
            if q <= _AXIOM_CHECK_MAX:
                for c in range(q):
                    assert add[add[a][b]][c] == add[a][add[b][c]]
                    assert mul[mul[a][b]][c] == mul[a][mul[b][c]]
                    assert mul[a][add[b][c]] == add[mul[a][b]][mul[a][c]]


@lru_cache(maxsize=None)
def field_make(q: int) -> FiniteField:
    """Return GF(q), building and verifying its tables on first use."""
    if not 2 <= q <= MAX_ORDER:
        pk = prime_power(q) if q >= 2 else None
        if pk is None:
            raise NotPrimePower(f"{q} is not a prime power")
        raise OutOfRange(f"field order {q} exceeds {MAX_ORDER}")
    pk = prime_power(q)
    if pk is None:
        raise NotPrimePower(f"{q} is not a prime power")
    p, k = pk
    modulus = irreducible_polynomial(p, k)
    add, mul, neg, inv = _build_tables(q, p, k, modulus)
    F = FiniteField(q, p, k, modulus, add, mul, neg, inv)
    _verify_axioms(F)
    return F


@dataclass(frozen=True)
class FqVector:
    field: FiniteField
    coords: Vector

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        if not coords:
            raise MixedDimensions("vectors need dimension >= 1")
        if any(not 0 <= c < self.field.q for c in coords):
            raise OutOfRange(f"coordinates must lie in 0..{self.field.q - 1}")
        object.__setattr__(self, "coords", coords)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __len__(self) -> int:
        return len(self.coords)


def vec(q: int, *coords: int) -> FqVector:
    return FqVector(field_make(q), coords)


def _common(vectors: Sequence[FqVector]) -> FiniteField | None:
    if not vectors:
        return None
    F, dim = vectors[0].field, vectors[0].dim
    for v in vectors:
        if v.field is not F or v.dim != dim:
            raise MixedDimensions("vectors must share field and dimension")
    return F


def rank(vectors: Sequence[FqVector]) -> int:
    F = _common(vectors)
    if F is None:
        return 0
    return F.rank([v.coords for v in vectors])


def is_basis(vectors: Sequence[FqVector]) -> bool:
    F = _common(vectors)
    if F is None:
        return False
    return F.is_basis([v.coords for v in vectors])


def projective_rep(v: FqVector) -> FqVector:
    return FqVector(v.field, v.field.projective_rep(v.coords))


@dataclass(frozen=True)
class GroundMap:
    """Bijection between ``1 .. q^r - 1`` and the nonzero vectors of GF(q)^r.

    Index i is the vector whose lexicographic encoding is i.
    """

    field: FiniteField
    r: int

    @property
    def n(self) -> int:
        return self.field.q**self.r - 1

    def vector(self, index: int) -> Vector:
        if not 1 <= index <= self.n:
            raise OutOfRange(f"index {index} outside 1..{self.n}")
        return self.field.decode(index, self.r)

    def index(self, v: Sequence[int]) -> int:
        code = self.field.encode(v)
        if code == 0 or len(v) != self.r:
            raise OutOfRange("only nonzero vectors of the right dimension have an index")
        return code

    def vectors(self) -> list[Vector]:
        return [self.field.decode(i, self.r) for i in range(1, self.n + 1)]


def ground_map(q: int, r: int) -> GroundMap:
    if r < 1:
        raise OutOfRange("r must be >= 1")
    return GroundMap(field_make(q), r)
