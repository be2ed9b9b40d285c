"""Exact scalars, weighted monomials, sparse graded elements and RREF subspaces.

Scalars are :class:`fractions.Fraction`, which is always kept in lowest terms
with a positive denominator.  A monomial ``alpha_{i1}(-n1) ... alpha_{ik}(-nk) 1``
is a tuple of ``(i, n)`` pairs sorted by descending ``n`` then ascending ``i``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

Rational = Fraction
Monomial = tuple  # tuple[tuple[int, int], ...]

VACUUM: Monomial = ()


def Q(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating point scalars are not accepted")
    return Fraction(x)


def q_str(x: Fraction) -> str:
    x = Q(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# -- monomials ---------------------------------------------------------------

def canonical(factors: Iterable[tuple[int, int]]) -> Monomial:
    return tuple(sorted(((int(i), int(n)) for i, n in factors), key=lambda f: (-f[1], f[0])))


def mono_weight(m: Monomial) -> int:
    return sum(n for _, n in m)


def mono_key(m: Monomial):
    """Total order on monomials: by weight, then factorwise (depth, -index)."""
    return (mono_weight(m), tuple((n, -i) for i, n in m))


def _parts(n: int, largest: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _parts(n - k, k):
            yield (k,) + rest


@lru_cache(maxsize=None)
def enumerate_basis(rank: int, weight: int) -> tuple[Monomial, ...]:
    """All canonical monomials of the given weight for ``rank`` generators.

    Returned in ascending :func:`mono_key` order.
    """
    if rank < 1:
        raise ValueError("rank must be >= 1")
    if weight < 0:
        return ()
    out: set[Monomial] = set()

    # distribute the factors of every partition among generators, keeping the
    # multiset canonical: within a fixed depth, indices are non-decreasing
    def assign(depths, start, acc):
        if not depths:
            out.add(canonical(acc))
            return
        n = depths[0]
        lo = start if acc and acc[-1][1] == n else 1
        for i in range(lo, rank + 1):
            assign(depths[1:], i, acc + [(i, n)])

    for p in _parts(weight, weight):
        assign(list(p), 1, [])
    return tuple(sorted(out, key=mono_key))


def mono_to_json(m: Monomial) -> list:
    return [[i, n] for i, n in m]


def mono_from_json(data) -> Monomial:
    return canonical(tuple(f) for f in data)


# -- graded elements -----------------------------------------------------------

def _sort_key(key):
    # monomials of the Heisenberg/commutative instances sort by mono_key;
    # tagged module keys (tag, inner) sort recursively
    if isinstance(key, tuple) and (not key or isinstance(key[0], tuple)):
        return (0, mono_key(key))
    if isinstance(key, tuple) and len(key) == 2:
        return (1, str(key[0]), _sort_key(key[1]))
    return (2, repr(key))


class GradedElement(Mapping):
    """Immutable sparse linear combination ``{basis key: nonzero Fraction}``.

    Keys are monomials for VOA elements and tagged tuples for module elements.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for k, c in items:
            c = Q(c)
            if c:
                acc[k] = acc.get(k, 0) + c
        self._terms = {k: c for k, c in acc.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "GradedElement":
        obj = object.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def basis(cls, key, coeff=1) -> "GradedElement":
        return cls({key: coeff})

    def __getitem__(self, key):
        return self._terms[key]

    def get(self, key, default=Fraction(0)):
        return self._terms.get(key, default)

    def __iter__(self):
        return iter(self._terms)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, GradedElement):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other: "GradedElement") -> "GradedElement":
        if not other:
            return self
        if not self:
            return other
        acc = dict(self._terms)
        for k, c in other._terms.items():
            v = acc.get(k, 0) + c
            if v:
                acc[k] = v
            else:
                acc.pop(k, None)
        return GradedElement._raw(acc)

    def __neg__(self):
        return GradedElement._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "GradedElement":
        c = Q(c)
        if not c:
            return ZERO
        if c == 1:
            return self
        return GradedElement._raw({k: c * v for k, v in self._terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def sorted_items(self):
        return sorted(self._terms.items(), key=lambda kv: _sort_key(kv[0]))

    def weights(self, weight_of=mono_weight) -> set[int]:
        return {weight_of(k) for k in self._terms}

    def component(self, w: int, weight_of=mono_weight) -> "GradedElement":
        return GradedElement._raw({k: c for k, c in self._terms.items() if weight_of(k) == w})

    def homogeneous_components(self, weight_of=mono_weight) -> dict[int, "GradedElement"]:
        out: dict[int, dict] = {}
        for k, c in self._terms.items():
            out.setdefault(weight_of(k), {})[k] = c
        return {w: GradedElement._raw(t) for w, t in sorted(out.items())}

    def __repr__(self):
        if not self._terms:
            return "0"
        return " + ".join(f"{q_str(c)}*{k!r}" for k, c in self.sorted_items())

    def to_json(self) -> list:
        return [{"mono": mono_to_json(k), "coeff": q_str(c)} for k, c in self.sorted_items()]

    @classmethod
    def from_json(cls, data) -> "GradedElement":
        return cls((mono_from_json(t["mono"]), Q(t["coeff"])) for t in data)


ZERO = GradedElement()


def combine(pairs: Iterable[tuple[Fraction, GradedElement]]) -> GradedElement:
    acc: dict = {}
    for c, v in pairs:
        if not c:
            continue
        for k, x in v._terms.items():
            acc[k] = acc.get(k, 0) + c * x
    return GradedElement._raw({k: x for k, x in acc.items() if x})


# -- subspaces -----------------------------------------------------------------

class NotInAmbientSpan(ValueError):
    pass


def _pivot(v: GradedElement, order):
    return max(v, key=order)


class Subspace:
    """Finite-dimensional span in reduced row-echelon form.

    The pivot of a vector is its greatest key under ``order``; every basis
    vector has pivot coefficient 1 and no other basis vector touches its pivot.
    Basis vectors are kept sorted by descending pivot.
    """

    def __init__(self, order=None):
        self.order = order or _sort_key
        self._rows: dict = {}  # pivot -> row

    @property
    def basis(self) -> list[GradedElement]:
        return [self._rows[p] for p in self.pivots]

    @property
    def pivots(self) -> list:
        return sorted(self._rows, key=self.order, reverse=True)

    @property
    def dim(self) -> int:
        return len(self._rows)

    def __len__(self):
        return len(self._rows)

    def reduce(self, v: GradedElement) -> GradedElement:
        """Remainder of ``v`` with every pivot coordinate eliminated."""
        rows = self._rows
        hits = [(v[p], rows[p]) for p in v if p in rows]
        if not hits:
            return v
        return v - combine(hits)

    def add(self, v: GradedElement) -> bool:
        """Insert ``v``; returns False when it was already in the span."""
        r = self.reduce(v)
        if not r:
            return False
        p = _pivot(r, self.order)
        r = r.scale(1 / r[p])
        for q, row in list(self._rows.items()):
            c = row.get(p)
            if c:
                self._rows[q] = row - r.scale(c)
        self._rows[p] = r
        return True

    def contains(self, v: GradedElement) -> bool:
        return not self.reduce(v)

    def copy(self) -> "Subspace":
        s = Subspace(self.order)
        s._rows = dict(self._rows)
        return s


def echelonize(vs: Iterable[GradedElement], order=None) -> Subspace:
    s = Subspace(order)
    for v in vs:
        s.add(v)
    return s


def contains(S: Subspace, v: GradedElement) -> bool:
    return S.contains(v)


def quotient_coords(ambient: list, S: Subspace, v: GradedElement) -> list[Fraction]:
    """Coordinates of ``v + S`` on the non-pivot keys of ``ambient`` (in order)."""
    amb = set(ambient)
    if any(k not in amb for k in v):
        raise NotInAmbientSpan("not in ambient span")
    r = S.reduce(v)
    return [r.get(k) for k in ambient if k not in S._rows]


# -- dense rational matrices ------------------------------------------------------

Matrix = tuple  # tuple of row tuples of Fractions


def mat(rows) -> Matrix:
    return tuple(tuple(Q(x) for x in r) for r in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def zeros(m: int, n: int) -> Matrix:
    return tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(m))


def shape(A: Matrix) -> tuple[int, int]:
    return (len(A), len(A[0]) if A else 0)


def transpose(A: Matrix, ncols: int | None = None) -> Matrix:
    if not A:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*A))


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if not A:
        return ()
    n = len(B)
    if len(A[0]) != n:
        raise ValueError(f"shape mismatch {shape(A)} @ {shape(B)}")
    cols = len(B[0]) if B else 0
    Bt = transpose(B) if B else tuple(() for _ in range(cols))
    return tuple(tuple(sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in Bt) for row in A)


def matadd(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(A, B))


def matscale(c, A: Matrix) -> Matrix:
    c = Q(c)
    return tuple(tuple(c * a for a in r) for r in A)


def block_diag(*blocks: Matrix) -> Matrix:
    n = sum(len(b) for b in blocks)
    rows = []
    off = 0
    for b in blocks:
        k = len(b)
        for r in b:
            rows.append((Fraction(0),) * off + tuple(r) + (Fraction(0),) * (n - off - k))
        off += k
    return tuple(rows)


def kron(A: Matrix, B: Matrix) -> Matrix:
    return tuple(
        tuple(a * b for a in ra for b in rb)
        for ra in A for rb in B
    )


def _rref(A: Matrix):
    rows = [list(r) for r in A]
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


def rank(A: Matrix) -> int:
    return len(_rref(A)[1]) if A else 0


def nullspace(A: Matrix, ncols: int | None = None) -> list[tuple[Fraction, ...]]:
    """Basis of ``{x : A x = 0}``."""
    n = len(A[0]) if A else (ncols or 0)
    if not A:
        return [tuple(Fraction(int(i == j)) for i in range(n)) for j in range(n)]
    rows, pivots = _rref(A)
    free = [c for c in range(n) if c not in pivots]
    out = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for r, p in enumerate(pivots):
            x[p] = -rows[r][f]
        out.append(tuple(x))
    return out


def det(A: Matrix) -> Fraction:
    n = len(A)
    rows = [list(r) for r in A]
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if rows[i][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            d = -d
        d *= rows[c][c]
        for i in range(c + 1, n):
            if rows[i][c]:
                f = rows[i][c] / rows[c][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
    return d


class SingularMatrix(ValueError):
    pass


def inverse(A: Matrix) -> Matrix:
    n = len(A)
    aug = tuple(tuple(r) + identity(n)[i] for i, r in enumerate(A))
    rows, pivots = _rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrix("matrix is not invertible")
    return tuple(tuple(r[n:]) for r in rows)


def solve_columns(B: Matrix, A: Matrix) -> Matrix | None:
    """X with ``B X = A`` (B has independent columns), or None if no solution."""
    m, k = shape(B)
    cols = shape(A)[1]
    aug = tuple(tuple(B[i]) + tuple(A[i]) for i in range(m))
    rows, pivots = _rref(aug)
    if any(p >= k for p in pivots):
        return None
    X = [[Fraction(0)] * cols for _ in range(k)]
    for r, p in enumerate(pivots):
        X[p] = list(rows[r][k:])
    return tuple(tuple(r) for r in X)


def mat_to_json(A: Matrix) -> list:
    return [[q_str(x) for x in r] for r in A]


def mat_from_json(data) -> Matrix:
    return mat(data)
