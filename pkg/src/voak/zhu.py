"""Zhu's algebra A(V) = V/O(V), truncated at a weight cutoff.

``O_N`` is the span of ``a o b`` over basis monomials with
``wt a + wt b + 1 <= N``.  This can only under-approximate the true
``O(V) cap V_{<=N}``, so quotient dimensions are upper bounds; use
:func:`stabilization` to see whether they have settled.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .kernel import (
    GradedElement,
    Q,
    Subspace,
    combine,
    echelonize,
    mono_key,
    q_str,
    quotient_coords,
    solve_columns,
)
from .voa import VOAInstance


class WeightOverflow(ValueError):
    pass


def _homogeneous(V: VOAInstance, a: GradedElement):
    return a.homogeneous_components(V.weight).items()


def star(V: VOAInstance, a: GradedElement, b: GradedElement) -> GradedElement:
    """``a * b = sum_i C(wt a, i) a_{i-1} b``, extended bilinearly."""
    return combine(
        (Fraction(comb(w, i)), V.mode(ah, i - 1, b))
        for w, ah in _homogeneous(V, a)
        for i in range(w + 1)
    )


def circ(V: VOAInstance, a: GradedElement, b: GradedElement) -> GradedElement:
    """``a o b = sum_i C(wt a, i) a_{i-2} b``, extended bilinearly."""
    return combine(
        (Fraction(comb(w, i)), V.mode(ah, i - 2, b))
        for w, ah in _homogeneous(V, a)
        for i in range(w + 1)
    )


@dataclass(frozen=True)
class ZhuClass:
    coords: tuple
    cutoff: int

    def __add__(self, other):
        return ZhuClass(tuple(x + y for x, y in zip(self.coords, other.coords)), self.cutoff)

    def __sub__(self, other):
        return ZhuClass(tuple(x - y for x, y in zip(self.coords, other.coords)), self.cutoff)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def to_json(self) -> dict:
        return {"coords": [q_str(x) for x in self.coords], "cutoff": self.cutoff}

    @classmethod
    def from_json(cls, data) -> "ZhuClass":
        return cls(tuple(Q(x) for x in data["coords"]), int(data["cutoff"]))


class ZhuQuotient:
    """Weight-cutoff model of A(V)."""

    def __init__(self, V: VOAInstance, N: int):
        if N < 0:
            raise ValueError("cutoff must be >= 0")
        self.voa = V
        self.cutoff = N
        self.ambient = sorted(V.basis_upto(N), key=mono_key)
        gens = []
        for ka in self.ambient:
            wa = V.weight(ka)
            for kb in self.ambient:
                if wa + V.weight(kb) + 1 > N:
                    continue
                g = circ(V, GradedElement.basis(ka), GradedElement.basis(kb))
                if g:
                    gens.append(g)
        self.generators = gens
        self.o_space: Subspace = echelonize(gens)
        piv = set(self.o_space.pivots)
        self.coset_basis = [k for k in self.ambient if k not in piv]

    @property
    def dim(self) -> int:
        return len(self.coset_basis)

    def reduce(self, v: GradedElement) -> ZhuClass:
        if any(self.voa.weight(k) > self.cutoff for k in v):
            raise WeightOverflow(f"element has weight above cutoff {self.cutoff}")
        return ZhuClass(tuple(quotient_coords(self.ambient, self.o_space, v)), self.cutoff)

    def representative(self, c: ZhuClass) -> GradedElement:
        return GradedElement(zip(self.coset_basis, c.coords))

    def basis_class(self, k) -> ZhuClass:
        return self.reduce(GradedElement.basis(k))

    def multiply(self, a, b) -> ZhuClass:
        """``[a][b] = [a * b]``; accepts classes or representatives."""
        ra = self.representative(a) if isinstance(a, ZhuClass) else a
        rb = self.representative(b) if isinstance(b, ZhuClass) else b
        top = max((self.voa.weight(k) for k in ra), default=0) + max((self.voa.weight(k) for k in rb), default=0)
        if top > self.cutoff:
            raise WeightOverflow(f"product weight {top} exceeds cutoff {self.cutoff}")
        return self.reduce(star(self.voa, ra, rb))

    def image_dim(self, k: int) -> int:
        """Dimension of the image of ``V_{<=k}`` in the truncated quotient (needs k <= cutoff)."""
        from .kernel import rank

        if k > self.cutoff:
            raise WeightOverflow(f"V_<={k} does not fit under cutoff {self.cutoff}")
        rows = [self.reduce(GradedElement.basis(m)).coords for m in self.voa.basis_upto(k)]
        return rank(rows) if rows and rows[0] else 0

    def product_table(self, wmax: int | None = None):
        """Products of coset-basis classes whose star product fits under the cutoff."""
        keys = [k for k in self.coset_basis if wmax is None or self.voa.weight(k) <= wmax]
        table = {}
        for ka in keys:
            for kb in keys:
                if self.voa.weight(ka) + self.voa.weight(kb) <= self.cutoff:
                    table[(ka, kb)] = self.multiply(GradedElement.basis(ka), GradedElement.basis(kb))
        return table


def build_zhu(V: VOAInstance, N: int) -> ZhuQuotient:
    return ZhuQuotient(V, N)


def reduce(Z: ZhuQuotient, v: GradedElement) -> ZhuClass:
    return Z.reduce(v)


def zhu_multiply(Z: ZhuQuotient, a, b) -> ZhuClass:
    return Z.multiply(a, b)


def stabilization(V: VOAInstance, k: int, cutoffs) -> dict:
    dims = {N: build_zhu(V, N).image_dim(k) for N in cutoffs}
    vals = list(dims.values())
    return {"k": k, "dims": dims, "stabilized": len(set(vals[-2:])) == 1 and len(vals) >= 2,
            "monotone": all(x >= y for x, y in zip(vals, vals[1:]))}


def phi(V: VOAInstance, a: GradedElement) -> GradedElement:
    """``e^{L(1)} (-1)^{L(0)} a``; the exponential series is finite."""
    signed = combine((Fraction((-1) ** (w % 2)), comp) for w, comp in _homogeneous(V, a))
    out, term, j = signed, signed, 1
    while True:
        term = V.l_op(1, term)
        if not term:
            break
        out = out + term.scale(Fraction(1, factorial(j)))
        j += 1
    return out


# -- lowest-weight spaces ------------------------------------------------------------

def omega_space(M, wmax: int, awmax: int | None = None) -> dict:
    """Per-degree bases of ``Omega(M)`` up to degree ``wmax``.

    The defining condition is tested against ``a_{wt a + m}`` for basis
    monomials a with ``wt a <= awmax`` (default wmax) and ``0 <= m <= wmax``.
    Returns ``{degree: [GradedElement, ...]}``.
    """
    from .kernel import nullspace

    V = M.voa
    awmax = wmax if awmax is None else awmax
    avec = [GradedElement.basis(k) for k in V.basis_upto(awmax)]
    out = {}
    for d in range(M.min_degree, M.min_degree + wmax + 1):
        src = M.basis(d)
        if not src:
            out[d] = []
            continue
        rows = []
        for a in avec:
            wa = V.weight(next(iter(a)))
            for m in range(0, wmax + 1):
                n = wa + m
                tgt_d = wa - n - 1 + d
                if tgt_d < M.min_degree:
                    continue
                cols = [M.mode(a, n, GradedElement.basis(s)) for s in src]
                for t in M.basis(tgt_d):
                    rows.append(tuple(c.get(t) for c in cols))
        kernel = nullspace(tuple(rows), len(src)) if rows else nullspace((), len(src))
        out[d] = [GradedElement(zip(src, vec)) for vec in kernel]
    return out


class NotPreserved(ValueError):
    pass


def o_action(M, a: GradedElement, omega_basis: list[GradedElement]) -> tuple:
    """Matrix of ``o(a) = a_{wt a - 1}`` on the span of ``omega_basis``.

    Columns are images of the basis vectors in their own coordinates.
    """
    V = M.voa
    if not omega_basis:
        return ()
    keys = sorted({k for b in omega_basis for k in b}, key=repr)
    B = tuple(tuple(b.get(k) for b in omega_basis) for k in keys)
    images = []
    for b in omega_basis:
        img = combine((Fraction(1), M.mode(comp, w - 1, b)) for w, comp in _homogeneous(V, a))
        images.append(img)
    if any(k not in set(keys) for img in images for k in img):
        raise NotPreserved("o(a) leaves the span of the lowest-weight basis")
    A = tuple(tuple(img.get(k) for img in images) for k in keys)
    X = solve_columns(B, A)
    if X is None:
        raise NotPreserved("o(a) leaves the span of the lowest-weight basis")
    return X


# -- algebra checks on the truncation --------------------------------------------------

def _report(name, Z, **params):
    from .axioms import AxiomReport

    return AxiomReport(name, Z.voa.header(), {"cutoff": Z.cutoff, **params})


def _mono_json(k):
    from .kernel import mono_to_json

    return mono_to_json(k)


def check_identity(Z: ZhuQuotient):
    """``[1][b] = [b] = [b][1]`` for every coset-basis class."""
    rep = _report("zhu-identity", Z)
    one = Z.voa.vacuum
    for k in Z.coset_basis:
        b = GradedElement.basis(k)
        target = Z.reduce(b)
        if Z.multiply(one, b) != target or Z.multiply(b, one) != target:
            return rep.fail({"class": _mono_json(k)})
    return rep


def check_central(V: VOAInstance, N: int, x: GradedElement | None = None):
    """``[x][b] = [b][x]`` for every coset-basis class b of the cutoff-N quotient.

    The commutator ``x * b - b * x`` has weight up to ``N + wt x``, so it is
    reduced in the quotient at that larger cutoff.
    """
    x = V.omega if x is None else x
    wx = max(x.weights(), default=0)
    Z = build_zhu(V, N)
    big = build_zhu(V, N + wx)
    rep = _report("zhu-central", Z, extended_cutoff=N + wx)
    for k in Z.coset_basis:
        b = GradedElement.basis(k)
        if not big.reduce(star(V, x, b) - star(V, b, x)).is_zero():
            return rep.fail({"class": _mono_json(k)})
    return rep


def check_commutative(Z: ZhuQuotient, wmax: int):
    """``a * b - b * a`` lies in the truncated O(V) for basis pairs of weight <= wmax."""
    V = Z.voa
    rep = _report("zhu-commutative", Z, wmax=wmax)
    keys = V.basis_upto(wmax)
    for ka in keys:
        for kb in keys:
            if V.weight(ka) + V.weight(kb) > Z.cutoff:
                continue
            a, b = GradedElement.basis(ka), GradedElement.basis(kb)
            if not Z.reduce(star(V, a, b) - star(V, b, a)).is_zero():
                return rep.fail({"a": _mono_json(ka), "b": _mono_json(kb)})
    return rep


def check_associative(Z: ZhuQuotient, wmax: int):
    V = Z.voa
    rep = _report("zhu-associative", Z, wmax=wmax)
    keys = V.basis_upto(wmax)
    for ka in keys:
        for kb in keys:
            for kc in keys:
                if V.weight(ka) + V.weight(kb) + V.weight(kc) > Z.cutoff:
                    continue
                a, b, c = (GradedElement.basis(k) for k in (ka, kb, kc))
                lhs = star(V, star(V, a, b), c)
                rhs = star(V, a, star(V, b, c))
                if not Z.reduce(lhs - rhs).is_zero():
                    return rep.fail({"a": _mono_json(ka), "b": _mono_json(kb), "c": _mono_json(kc)})
    return rep


def check_phi_involution(V: VOAInstance, wmax: int):
    from .axioms import AxiomReport

    rep = AxiomReport("phi-involution", V.header(), {"wmax": wmax})
    for k in V.basis_upto(wmax):
        a = GradedElement.basis(k)
        if phi(V, phi(V, a)) != a:
            return rep.fail({"a": _mono_json(k)})
    return rep


def check_phi_anti(Z: ZhuQuotient, wmax: int):
    """``[phi(a * b)] = [phi(b) * phi(a)]`` for basis pairs of weight <= wmax."""
    V = Z.voa
    rep = _report("phi-anti-homomorphism", Z, wmax=wmax)
    keys = V.basis_upto(wmax)
    for ka in keys:
        for kb in keys:
            a, b = GradedElement.basis(ka), GradedElement.basis(kb)
            diff = phi(V, star(V, a, b)) - star(V, phi(V, b), phi(V, a))
            if not Z.reduce(diff).is_zero():
                return rep.fail({"a": _mono_json(ka), "b": _mono_json(kb)})
    return rep


def check_well_defined(Z: ZhuQuotient, wmax: int):
    """Shifting a representative by an O(V) generator leaves ``[a][b]`` unchanged."""
    V = Z.voa
    rep = _report("zhu-well-defined", Z, wmax=wmax)
    keys = V.basis_upto(wmax)
    for g in Z.generators:
        wg = max(g.weights())
        for ka in keys:
            for kb in keys:
                if max(wg, V.weight(ka)) + V.weight(kb) > Z.cutoff:
                    continue
                a, b = GradedElement.basis(ka), GradedElement.basis(kb)
                base = Z.reduce(star(V, a, b))
                if Z.reduce(star(V, a + g, b)) != base:
                    return rep.fail({"a": _mono_json(ka), "b": _mono_json(kb), "side": "left"})
                if V.weight(ka) + wg <= Z.cutoff and Z.reduce(star(V, a, b + g)) != Z.reduce(star(V, a, b)):
                    return rep.fail({"a": _mono_json(ka), "b": _mono_json(kb), "side": "right"})
    return rep


def check_o_multiplicative(M, wmax: int, omega_wmax: int = 2):
    """``o(a * b) = o(a) o(b)`` on every graded piece of Omega(M)."""
    from .axioms import AxiomReport
    from .kernel import matmul

    V = M.voa
    rep = AxiomReport("o-multiplicative", M.header(), {"wmax": wmax, "omega_wmax": omega_wmax})
    om = omega_space(M, omega_wmax)
    keys = V.basis_upto(wmax)
    for d, basis in sorted(om.items()):
        if not basis:
            continue
        for ka in keys:
            for kb in keys:
                a, b = GradedElement.basis(ka), GradedElement.basis(kb)
                lhs = o_action(M, star(V, a, b), basis)
                rhs = matmul(o_action(M, a, basis), o_action(M, b, basis))
                if lhs != rhs:
                    return rep.fail({"degree": d, "a": _mono_json(ka), "b": _mono_json(kb)})
    return rep
