"""Concrete vertex operator algebras: the rank-d Heisenberg VOA and
commutative associative algebras viewed as VOAs.

Heisenberg modes are evaluated by peeling one factor off ``u``: writing
``u = a_{-k} b`` with ``a = alpha_i(-1)1`` (so ``a_n = alpha_i(n)``), the
iterate formula

    (a_{-k} b)_m v = sum_{j>=0} C(k+j-1, j) [ a_{-k-j} b_{m+j} v
                                             - (-1)^k b_{m-k-j} a_j v ]

is a finite sum on every ``v`` and reduces ``u_m v`` to modes of shorter
monomials.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable

from .kernel import (
    VACUUM,
    ZERO,
    GradedElement,
    Monomial,
    Q,
    canonical,
    combine,
    enumerate_basis,
    mono_weight,
    q_str,
)


class MixedInstanceError(ValueError):
    pass


class NotHomogeneous(ValueError):
    pass


@dataclass(frozen=True)
class CommAssocData:
    """Structure constants ``e_i e_j = sum_k c[i][j][k] e_k`` (0-based indices)."""

    dimension: int
    structure_constants: tuple
    unit: int

    def __post_init__(self):
        n = self.dimension
        c = tuple(tuple(tuple(Q(x) for x in row) for row in plane) for plane in self.structure_constants)
        object.__setattr__(self, "structure_constants", c)
        if n < 1 or len(c) != n or any(len(p) != n or any(len(r) != n for r in p) for p in c):
            raise ValueError("structure constant tensor must be dimension^3")
        if not 0 <= self.unit < n:
            raise ValueError("unit index out of range")
        for i in range(n):
            for j in range(n):
                if c[i][j] != c[j][i]:
                    raise ValueError(f"not commutative: e{i}*e{j} != e{j}*e{i}")
        for i in range(n):
            e = tuple(Fraction(int(k == i)) for k in range(n))
            if c[self.unit][i] != e:
                raise ValueError(f"unit does not act as identity on e{i}")

        def mul(x, y):
            return tuple(
                sum((x[a] * y[b] * c[a][b][k] for a in range(n) for b in range(n)), Fraction(0))
                for k in range(n)
            )

        for i in range(n):
            for j in range(n):
                for k in range(n):
                    ei, ek = _unit_vec(n, i), _unit_vec(n, k)
                    if mul(c[i][j], ek) != mul(ei, c[j][k]):
                        raise ValueError(f"not associative at (e{i} e{j}) e{k}")

    def product(self, i: int, j: int) -> tuple:
        return self.structure_constants[i][j]

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "unit": self.unit,
            "structure_constants": [[[q_str(x) for x in r] for r in p] for p in self.structure_constants],
        }

    @classmethod
    def from_json(cls, data) -> "CommAssocData":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["dimension"]), data["structure_constants"], int(data.get("unit", 0)))


def _unit_vec(n, i):
    return tuple(Fraction(int(k == i)) for k in range(n))


def complex_numbers() -> CommAssocData:
    return CommAssocData(1, [[[1]]], 0)


def dual_numbers() -> CommAssocData:
    """``C[x]/(x^2)`` with basis (1, x)."""
    return CommAssocData(2, [[[1, 0], [0, 1]], [[0, 1], [0, 0]]], 0)


class VOAInstance:
    """A VOA with exact mode action ``(u, n, v) -> u_n v``.

    Elements are :class:`GradedElement` over monomial keys.  For commutative
    algebras the basis vector ``e_k`` is the weight-0 key ``((k + 1, 0),)``.
    """

    def __init__(self, kind: str, rank_or_dim: int, central_charge, vacuum, omega, *, data=None,
                 bracket: Callable[[int], Fraction] | None = None, label: str | None = None):
        self.kind = kind
        self.rank_or_dim = rank_or_dim
        self.central_charge = Q(central_charge)
        self.vacuum = vacuum
        self.omega = omega
        self.data = data
        self._bracket = bracket or (lambda m: Fraction(m))
        self._memo: dict = {}
        self._patches: dict = {}
        self.label = label or f"{kind}:{rank_or_dim}"

    # -- basic structure -----------------------------------------------------
    @property
    def rank(self) -> int:
        return self.rank_or_dim

    def basis(self, weight: int) -> tuple:
        if self.kind == "heisenberg":
            return enumerate_basis(self.rank_or_dim, weight)
        if weight != 0:
            return ()
        return tuple(((k + 1, 0),) for k in range(self.rank_or_dim))

    def basis_upto(self, wmax: int) -> list:
        return [m for w in range(wmax + 1) for m in self.basis(w)]

    weight = staticmethod(mono_weight)
    degree = staticmethod(mono_weight)
    min_degree = 0

    def header(self) -> dict:
        return {"kind": self.kind, "rank_or_dim": self.rank_or_dim, "central_charge": q_str(self.central_charge)}

    def __repr__(self):
        return f"VOAInstance({self.kind}, {self.rank_or_dim}, c={q_str(self.central_charge)})"

    def owns(self, v: GradedElement) -> bool:
        if self.kind == "heisenberg":
            return all(all(1 <= i <= self.rank_or_dim and n >= 1 for i, n in k) for k in v)
        return all(len(k) == 1 and k[0][1] == 0 and 1 <= k[0][0] <= self.rank_or_dim for k in v)

    # -- modes ---------------------------------------------------------------
    def alpha_mode(self, i: int, m: int, v: GradedElement) -> GradedElement:
        if self.kind != "heisenberg":
            raise MixedInstanceError("alpha modes exist only on Heisenberg instances")
        if not 1 <= i <= self.rank_or_dim:
            raise IndexError(f"generator index {i} out of range 1..{self.rank_or_dim}")
        return combine((c, self._alpha_basis(i, m, k)) for k, c in v.items())

    def _alpha_basis(self, i: int, m: int, v: Monomial) -> GradedElement:
        if m < 0:
            return GradedElement._raw({canonical(v + ((i, -m),)): Fraction(1)})
        if m == 0:
            return ZERO
        count = v.count((i, m))
        if not count:
            return ZERO
        idx = v.index((i, m))
        rest = v[:idx] + v[idx + 1:]
        return GradedElement._raw({rest: count * self._bracket(m)})

    def basis_mode(self, u: Monomial, n: int, v: Monomial) -> GradedElement:
        key = (u, n, v)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._compute(u, n, v)
            patch = self._patches.get(key)
            if patch is not None:
                hit = hit + patch
            self._memo[key] = hit
        return hit

    def _compute(self, u: Monomial, m: int, v: Monomial) -> GradedElement:
        if self.kind != "heisenberg":
            if m != -1:
                return ZERO
            a, b = u[0][0] - 1, v[0][0] - 1
            prod = self.data.product(a, b)
            return GradedElement((((k + 1, 0),), c) for k, c in enumerate(prod))
        if not u:
            return GradedElement._raw({v: Fraction(1)}) if m == -1 else ZERO
        wu, wv = mono_weight(u), mono_weight(v)
        if wu - m - 1 + wv < 0:
            return ZERO
        (i, k), b = u[0], u[1:]
        wb = wu - k
        if not b and k == 1:
            return self._alpha_basis(i, m, v)
        terms = []
        sign = -1 if k % 2 == 0 else 1  # -(-1)^k
        # creation half: a_{-k-j} b_{m+j} v
        for j in range(0, max(wb - 1 + wv - m, -1) + 1):
            inner = self.basis_mode(b, m + j, v)
            if inner:
                terms.append((Fraction(comb(k + j - 1, j)), self.alpha_mode(i, -k - j, inner)))
        # annihilation half: b_{m-k-j} a_j v
        for j in range(1, wv + 1):
            av = self._alpha_basis(i, j, v)
            if not av:
                continue
            inner = combine((c, self.basis_mode(b, m - k - j, key)) for key, c in av.items())
            if inner:
                terms.append((Fraction(sign * comb(k + j - 1, j)), inner))
        return combine(terms)

    def mode(self, u: GradedElement, n: int, v: GradedElement) -> GradedElement:
        """The coefficient ``u_n v`` of ``z^{-n-1}`` in ``Y(u, z) v``."""
        if not (self.owns(u) and self.owns(v)):
            raise MixedInstanceError("elements do not belong to this instance")
        return combine(
            (cu * cv, self.basis_mode(ku, n, kv))
            for ku, cu in u.items()
            for kv, cv in v.items()
        )

    vertex_mode = mode

    def l_op(self, n: int, v: GradedElement) -> GradedElement:
        if not self.omega:
            return ZERO
        return self.mode(self.omega, n + 1, v)

    def mode_matrix(self, u: GradedElement, n: int, from_weight: int) -> tuple:
        ws = u.weights()
        if len(ws) > 1:
            raise NotHomogeneous("mode_matrix needs a homogeneous u")
        wu = ws.pop() if ws else 0
        src = self.basis(from_weight)
        tgt_w = wu - n - 1 + from_weight
        tgt = self.basis(tgt_w) if tgt_w >= 0 else ()
        cols = [self.mode(u, n, GradedElement._raw({s: Fraction(1)})) for s in src]
        return tuple(tuple(col.get(t) for col in cols) for t in tgt) if tgt else ()

    # -- corruption for negative controls ------------------------------------------
    def perturbed(self, u: Monomial, n: int, v: Monomial, delta: GradedElement, label=None) -> "VOAInstance":
        """Copy of this instance whose ``u_n v`` is shifted by ``delta``."""
        other = VOAInstance(self.kind, self.rank_or_dim, self.central_charge, self.vacuum, self.omega,
                            data=self.data, bracket=self._bracket, label=label or self.label + "+perturbed")
        other._patches = dict(self._patches)
        other._patches[(u, n, v)] = other._patches.get((u, n, v), ZERO) + delta
        return other


def heisenberg(d: int, bracket: Callable[[int], Fraction] | None = None) -> VOAInstance:
    """M(1) of rank d with ``[alpha_i(m), alpha_j(n)] = m delta_{m+n,0} delta_ij``.

    ``bracket`` overrides the factor ``m`` (used only to build corrupted fixtures).
    """
    if d < 1:
        raise ValueError("rank must be >= 1")
    omega = GradedElement({((i, 1), (i, 1)): Fraction(1, 2) for i in range(1, d + 1)})
    label = f"heisenberg:{d}" if bracket is None else f"heisenberg:{d}+mutated-bracket"
    return VOAInstance("heisenberg", d, d, GradedElement.basis(VACUUM), omega, bracket=bracket, label=label)


def comm_assoc(data: CommAssocData) -> VOAInstance:
    """The VOA of a commutative associative algebra: ``Y(u, z) v = uv``, omega = 0."""
    vac = GradedElement.basis(((data.unit + 1, 0),))
    return VOAInstance("commutative-associative", data.dimension, 0, vac, ZERO, data=data)


def alpha(i: int = 1, n: int = 1) -> GradedElement:
    """The element ``alpha_i(-n) 1``."""
    return GradedElement.basis(((i, n),))


def element(*factors, coeff=1) -> GradedElement:
    return GradedElement.basis(canonical(factors), coeff)


def from_header(header: dict, data: CommAssocData | None = None) -> VOAInstance:
    kind = header["kind"]
    if kind == "heisenberg":
        return heisenberg(int(header["rank_or_dim"]))
    if kind == "commutative-associative":
        if data is None:
            data = complex_numbers() if int(header["rank_or_dim"]) == 1 else None
        if data is None:
            raise ValueError("commutative instance needs structure constants")
        return comm_assoc(data)
    raise ValueError(f"unknown VOA kind {kind!r}")
