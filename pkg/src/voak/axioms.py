"""Exact verification of the VOA and module axioms on finite parameter boxes.

Every check returns an :class:`AxiomReport`; a pass is an exact identity of
graded elements for every parameter in the recorded box.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as cartesian

from .kernel import ZERO, GradedElement, combine, q_str
from .voa import VOAInstance, alpha


def binom(n: int, j: int) -> Fraction:
    """Generalized binomial ``C(n, j)`` for any integer n and j >= 0."""
    if j < 0:
        return Fraction(0)
    out = Fraction(1)
    for t in range(j):
        out = out * (n - t) / (t + 1)
    return out


@dataclass(frozen=True)
class BinomialExpansion:
    """``(z_first - z_second)^exponent`` expanded in nonnegative powers of z_second."""

    first: str
    second: str
    exponent: int

    def coefficient(self, j: int) -> Fraction:
        """Coefficient of ``z_first^(exponent - j) z_second^j``."""
        return binom(self.exponent, j) * (-1) ** j

    def terms(self, jmax: int):
        for j in range(jmax + 1):
            c = self.coefficient(j)
            if c:
                yield j, c


@dataclass
class AxiomReport:
    axiom: str
    instance: dict
    params: dict
    passed: bool = True
    counterexample: dict | None = None
    extra: dict = field(default_factory=dict)

    def fail(self, params: dict, residual: GradedElement | None = None):
        self.passed = False
        cx = {k: _jsonable(v) for k, v in params.items()}
        if residual is not None:
            cx["residual"] = _element_json(residual)
        self.counterexample = cx
        return self

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        out = {"axiom": self.axiom, "instance": self.instance, "params": self.params, "pass": self.passed}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        out.update(self.extra)
        return out

    @classmethod
    def from_json(cls, data) -> "AxiomReport":
        if isinstance(data, str):
            data = json.loads(data)
        known = {"axiom", "instance", "params", "pass", "counterexample"}
        rep = cls(data["axiom"], data["instance"], data["params"], bool(data["pass"]), data.get("counterexample"),
                  {k: v for k, v in data.items() if k not in known})
        if rep.passed != (rep.counterexample is None):
            raise ValueError("pass flag inconsistent with counterexample")
        return rep


def _element_json(v: GradedElement):
    return [{"key": _jsonable(k), "coeff": q_str(c)} for k, c in v.sorted_items()]


def _jsonable(x):
    if isinstance(x, Fraction):
        return q_str(x)
    if isinstance(x, GradedElement):
        return _element_json(x)
    if isinstance(x, tuple):
        return [_jsonable(y) for y in x]
    return x


def _header(M) -> dict:
    if isinstance(M, VOAInstance):
        return M.header()
    return M.header()


def _voa(M) -> VOAInstance:
    return M if isinstance(M, VOAInstance) else M.voa


def _e(key) -> GradedElement:
    return GradedElement._raw({key: Fraction(1)})


def _max_weight(V: VOAInstance, u: GradedElement) -> int:
    return max((V.weight(k) for k in u), default=0)


def _max_degree(M, w: GradedElement) -> int:
    return max((M.degree(k) for k in w), default=M.min_degree)


def _vanish_above(M, wt_u: int, w: GradedElement) -> int:
    """Largest n for which ``u_n w`` can be nonzero (grading bound)."""
    return wt_u - 1 + _max_degree(M, w) - M.min_degree


# -- individual axioms ---------------------------------------------------------

def check_vacuum(V: VOAInstance, wmax: int = 4) -> AxiomReport:
    rep = AxiomReport("vacuum", V.header(), {"wmax": wmax, "nbox": [-wmax - 2, wmax + 2]})
    for key in V.basis_upto(wmax):
        v = _e(key)
        for n in range(-wmax - 2, wmax + 3):
            got = V.mode(V.vacuum, n, v)
            want = v if n == -1 else ZERO
            if got != want:
                return rep.fail({"v": key, "n": n}, got - want)
    return rep


def check_creation(V: VOAInstance, wmax: int = 4) -> AxiomReport:
    rep = AxiomReport("creation", V.header(), {"wmax": wmax})
    for key in V.basis_upto(wmax):
        v = _e(key)
        got = V.mode(v, -1, V.vacuum)
        if got != v:
            return rep.fail({"v": key, "n": -1}, got - v)
        for n in range(0, wmax + 3):
            got = V.mode(v, n, V.vacuum)
            if got:
                return rep.fail({"v": key, "n": n}, got)
    return rep


def check_translation(V: VOAInstance, wmax: int = 4, nbox=(-4, 4), us=None) -> AxiomReport:
    """``(L(-1)v)_n = -n v_{n-1}`` as operators on the weight <= wmax basis.

    ``us`` defaults to every basis monomial of weight <= wmax.
    """
    lo, hi = nbox
    rep = AxiomReport("translation", V.header(), {"wmax": wmax, "nbox": [lo, hi]})
    us = [_e(k) for k in V.basis_upto(wmax)] if us is None else us
    ws = [_e(k) for k in V.basis_upto(wmax)]
    for v in us:
        name = _key(v)
        dv = V.l_op(-1, v)
        for w in ws:
            for n in range(lo, hi + 1):
                lhs = V.mode(dv, n, w)
                rhs = V.mode(v, n - 1, w).scale(-n)
                if lhs != rhs:
                    return rep.fail({"v": name, "n": n, "w": _key(w)}, lhs - rhs)
    return rep


def locality_residual(M, u, v, w, a, b, order) -> GradedElement:
    terms = []
    for i in range(order + 1):
        c = binom(order, i) * (-1) ** i
        p, q = a + order - i, b + i
        terms.append((c, M.mode(u, p, M.mode(v, q, w))))
        terms.append((-c, M.mode(v, q, M.mode(u, p, w))))
    return combine(terms)


def check_locality(V, u: GradedElement, v: GradedElement, wmax: int = 4, nmax: int = 6, abox=(-4, 4)):
    """Least n <= nmax with ``(z1 - z2)^n [Y(u,z1), Y(v,z2)] = 0`` on the box."""
    lo, hi = abox
    rep = AxiomReport("locality", _header(V), {"u": _element_json(u), "v": _element_json(v), "wmax": wmax,
                                               "nmax": nmax, "abox": [lo, hi]})
    ws = [_e(k) for k in _basis_upto(V, wmax)]
    last = None
    for order in range(nmax + 1):
        bad = None
        for w in ws:
            for a in range(lo, hi + 1):
                for b in range(lo, hi + 1):
                    r = locality_residual(V, u, v, w, a, b, order)
                    if r:
                        bad = ({"order": order, "a": a, "b": b, "w": _key(w)}, r)
                        break
                if bad:
                    break
            if bad:
                break
        if bad is None:
            rep.extra["minimal_order"] = order
            return order, rep
        last = bad
    rep.fail(*last)
    rep.extra["minimal_order"] = None
    return None, rep


def jacobi_sides(M, u: GradedElement, v: GradedElement, w: GradedElement, a: int, b: int, c: int):
    """Coefficients of ``z0^a z1^b z2^c`` of the Jacobi identity applied to w.

    Returns ``(lhs, rhs)``; lhs is the difference of the two delta-function
    terms, rhs the iterate term.
    """
    V = _voa(M)
    k = -a - 1
    wu, wv = _max_weight(V, u), _max_weight(V, v)
    e01 = BinomialExpansion("z1", "z2", k)
    e02 = BinomialExpansion("z2", "z1", k)
    # z0^{-1} delta((z1-z2)/z0) Y(u,z1) Y(v,z2)
    first = []
    for j, cj in e01.terms(max(wv + _max_degree(M, w) - M.min_degree + c, -1)):
        p, q = k - j - 1 - b, j - 1 - c
        first.append((cj, M.mode(u, p, M.mode(v, q, w))))
    # z0^{-1} delta((z2-z1)/(-z0)) Y(v,z2) Y(u,z1)
    second = []
    for j, cj in e02.terms(max(wu + _max_degree(M, w) - M.min_degree + b, -1)):
        q, p = k - j - 1 - c, j - 1 - b
        second.append((cj * (-1) ** (k % 2), M.mode(v, q, M.mode(u, p, w))))
    # z2^{-1} delta((z1-z0)/z2) Y(Y(u,z0)v, z2)
    rhs = []
    for j in range(0, max(wu + wv + a, -1) + 1):
        e12 = BinomialExpansion("z1", "z0", b + j).coefficient(j)
        r, s = j - 1 - a, -b - j - 2 - c
        uv = V.mode(u, r, v)
        if uv:
            rhs.append((e12, M.mode(uv, s, w)))
    return combine(first) - combine(second), combine(rhs)


def check_jacobi(M, u: GradedElement, v: GradedElement, w: GradedElement, box=None) -> AxiomReport:
    box = list(box) if box is not None else list(cartesian(range(-3, 4), repeat=3))
    rep = AxiomReport("jacobi", _header(M), {"u": _element_json(u), "v": _element_json(v),
                                             "w": _element_json(w), "box_size": len(box)})
    for a, b, c in box:
        lhs, rhs = jacobi_sides(M, u, v, w, a, b, c)
        if lhs != rhs:
            return rep.fail({"a": a, "b": b, "c": c}, lhs - rhs)
    return rep


def check_virasoro(V, mbox=(-3, 3), wmax: int = 4) -> AxiomReport:
    lo, hi = mbox
    c = _voa(V).central_charge
    rep = AxiomReport("virasoro", _header(V), {"mbox": [lo, hi], "wmax": wmax, "central_charge": q_str(c)})
    L = V.l_op
    for key in _basis_upto(V, wmax):
        v = _e(key)
        Lv = {n: L(n, v) for n in range(lo, hi + 1)}
        for m in range(lo, hi + 1):
            for n in range(lo, hi + 1):
                lhs = L(m, Lv[n]) - L(n, Lv[m])
                rhs = L(m + n, v).scale(m - n)
                if m + n == 0:
                    rhs = rhs + v.scale(Fraction(m ** 3 - m, 12) * c)
                if lhs != rhs:
                    return rep.fail({"m": m, "n": n, "v": key}, lhs - rhs)
    return rep


def check_grading(V, wmax: int = 4, nbox=(-4, 4), uwmax: int | None = None) -> AxiomReport:
    lo, hi = nbox
    uwmax = wmax if uwmax is None else uwmax
    rep = AxiomReport("grading", _header(V), {"wmax": wmax, "uwmax": uwmax, "nbox": [lo, hi]})
    Vo = _voa(V)
    for ku in Vo.basis_upto(uwmax):
        wu = Vo.weight(ku)
        u = _e(ku)
        for kv in _basis_upto(V, wmax):
            for n in range(lo, hi + 1):
                out = V.mode(u, n, _e(kv))
                target = wu - n - 1 + V.degree(kv)
                bad = [k for k in out if V.degree(k) != target]
                if bad:
                    return rep.fail({"u": ku, "n": n, "v": kv, "expected_weight": target}, out)
    return rep


# -- helpers -------------------------------------------------------------------

def _basis_upto(M, wmax):
    if isinstance(M, VOAInstance):
        return M.basis_upto(wmax)
    return [k for d in range(M.min_degree, M.min_degree + wmax + 1) for k in M.basis(d)]


def _key(w: GradedElement):
    return next(iter(w)) if len(w) == 1 else _element_json(w)


# -- negative controls -------------------------------------------------------------

def negative_control(axiom: str, rank: int = 1) -> VOAInstance:
    """A Heisenberg instance corrupted so that ``axiom`` fails."""
    from .voa import heisenberg

    V = heisenberg(rank)
    a1 = ((1, 1),)
    if axiom == "vacuum":
        return V.perturbed((), -1, a1, alpha(), "corrupt-vacuum")
    if axiom == "creation":
        return V.perturbed(((1, 2),), -1, (), alpha(), "corrupt-creation")
    if axiom == "translation":
        return V.perturbed(((1, 2),), 0, a1, alpha(), "corrupt-translation")
    if axiom == "grading":
        return V.perturbed(a1, -1, a1, alpha(), "corrupt-grading")
    if axiom in ("locality", "jacobi", "virasoro"):
        return heisenberg(rank, bracket=lambda m: Fraction(m) if m != 2 else Fraction(3))
    raise ValueError(f"no negative control for {axiom!r}")


AXIOMS = ("vacuum", "creation", "translation", "grading", "locality", "jacobi", "virasoro")


def run_suite(V: VOAInstance, wmax: int = 4, nbox=(-4, 4), jbox=3, which=AXIOMS) -> list[AxiomReport]:
    """Default-box run of the selected axioms on ``V``.

    ``jbox`` is a half-width or a ``(lo, hi)`` pair; the Jacobi box is its cube.
    """
    jlo, jhi = (-jbox, jbox) if isinstance(jbox, int) else jbox
    out = []
    for name in which:
        if name == "vacuum":
            out.append(check_vacuum(V, wmax))
        elif name == "creation":
            out.append(check_creation(V, wmax))
        elif name == "translation":
            out.append(check_translation(V, min(wmax, 3), nbox))
        elif name == "grading":
            out.append(check_grading(V, wmax, nbox, uwmax=min(wmax, 3)))
        elif name == "virasoro":
            out.append(check_virasoro(V, (-3, 3), wmax))
        elif name == "locality":
            for u in _locality_pairs(V):
                _, rep = check_locality(V, u, u, min(wmax, 3), 6, (-3, 3))
                out.append(rep)
        elif name == "jacobi":
            box = list(cartesian(range(jlo, jhi + 1), repeat=3))
            gens = _locality_pairs(V)
            for u in gens:
                for v in gens:
                    for kw in V.basis_upto(2):
                        out.append(check_jacobi(V, u, v, _e(kw), box))
    return out


def _locality_pairs(V: VOAInstance):
    if V.kind == "heisenberg":
        return [alpha(), V.omega]
    return [_e(k) for k in V.basis(0)]
