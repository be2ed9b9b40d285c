"""V-modules: adjoint, direct sums, contragredients, invariant forms and homomorphisms.

Module elements are :class:`GradedElement` over module-specific keys.  The
adjoint module uses monomials; a direct sum tags keys as ``(0, k)`` and
``(1, k)``; a contragredient uses ``("dual", k)`` for the dual basis vector.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial

from .axioms import AxiomReport
from .kernel import (
    ZERO,
    GradedElement,
    combine,
    matmul,
    q_str,
    rank,
    transpose,
)
from .voa import VOAInstance


class TruncationError(ValueError):
    pass


class MismatchedBase(ValueError):
    pass


class VModule:
    """Base class; subclasses provide ``basis``, ``degree`` and ``_basis_mode``."""

    voa: VOAInstance
    min_degree = 0

    def basis(self, d: int) -> tuple:
        raise NotImplementedError

    def degree(self, key) -> int:
        raise NotImplementedError

    def lowest_weights(self) -> list:
        raise NotImplementedError

    def _basis_mode(self, u: GradedElement, wu: int, n: int, key) -> GradedElement:
        raise NotImplementedError

    def mode(self, u: GradedElement, n: int, w: GradedElement) -> GradedElement:
        """``u_n w`` for u in V and w in this module."""
        if not w or not u:
            return ZERO
        out = []
        for wu, uh in u.homogeneous_components(self.voa.weight).items():
            for k, c in w.items():
                out.append((c, self._basis_mode(uh, wu, n, k)))
        return combine(out)

    def l_op(self, n: int, w: GradedElement) -> GradedElement:
        if not self.voa.omega:
            return ZERO
        return self.mode(self.voa.omega, n + 1, w)

    def mode_matrix(self, u: GradedElement, n: int, d: int) -> tuple:
        """Matrix of ``u_n`` from degree d to its target degree (rows = target basis)."""
        ws = u.weights(self.voa.weight)
        wu = ws.pop() if len(ws) == 1 else (0 if not ws else None)
        if wu is None:
            raise ValueError("mode_matrix needs a homogeneous u")
        src = self.basis(d)
        td = wu - n - 1 + d
        tgt = self.basis(td) if td >= self.min_degree else ()
        cols = [self.mode(u, n, GradedElement.basis(s)) for s in src]
        return tuple(tuple(c.get(t) for c in cols) for t in tgt)

    def dims(self, wmax: int) -> dict:
        return {d: len(self.basis(d)) for d in range(self.min_degree, self.min_degree + wmax + 1)}

    def to_json(self, wmax: int = 4) -> dict:
        return {"module": self.header(), "lowest_weights": self.lowest_weights(),
                "dims": {str(d): n for d, n in self.dims(wmax).items()}}

    def header(self) -> dict:
        raise NotImplementedError


class AdjointModule(VModule):
    def __init__(self, V: VOAInstance):
        self.voa = V

    def basis(self, d):
        return self.voa.basis(d) if d >= 0 else ()

    def degree(self, key):
        return self.voa.weight(key)

    def lowest_weights(self):
        return [0]

    def _basis_mode(self, u, wu, n, key):
        return self.voa.mode(u, n, GradedElement._raw({key: Fraction(1)}))

    def mode(self, u, n, w):
        return self.voa.mode(u, n, w)

    def header(self):
        return {"kind": "adjoint", "voa": self.voa.header()}


def adjoint_module(V: VOAInstance) -> AdjointModule:
    return AdjointModule(V)


class DirectSum(VModule):
    def __init__(self, first: VModule, second: VModule):
        if first.voa is not second.voa:
            raise MismatchedBase("summands are modules over different VOA instances")
        self.voa = first.voa
        self.parts = (first, second)
        self.min_degree = min(first.min_degree, second.min_degree)

    def basis(self, d):
        return tuple((i, k) for i, P in enumerate(self.parts) for k in P.basis(d))

    def degree(self, key):
        return self.parts[key[0]].degree(key[1])

    def lowest_weights(self):
        return sorted(set(self.parts[0].lowest_weights()) | set(self.parts[1].lowest_weights()))

    def inject(self, i: int, w: GradedElement) -> GradedElement:
        return GradedElement._raw({(i, k): c for k, c in w.items()})

    def component(self, i: int, w: GradedElement) -> GradedElement:
        return GradedElement._raw({k[1]: c for k, c in w.items() if k[0] == i})

    def _basis_mode(self, u, wu, n, key):
        i, k = key
        return self.inject(i, self.parts[i]._basis_mode(u, wu, n, k))

    def header(self):
        return {"kind": "direct_sum", "parts": [p.header() for p in self.parts]}


def direct_sum(M: VModule, N: VModule) -> DirectSum:
    return DirectSum(M, N)


def _l1_powers(V: VOAInstance, u: GradedElement):
    """``[(j, L(1)^j u / j!)]`` until the series terminates."""
    out, term, j = [], u, 0
    while term:
        out.append((j, term.scale(Fraction(1, factorial(j)))))
        term = V.l_op(1, term)
        j += 1
    return out


def adjoint_operator_terms(V: VOAInstance, u: GradedElement, wu: int, n: int):
    """Terms ``(c, v, p)`` with ``(u_n x, y) = sum c (x, v_p y)`` for invariant pairings.

    Expands ``Y(e^{zL(1)} (-z^{-2})^{L(0)} u, z^{-1})`` at ``z^{-n-1}``.
    """
    sign = Fraction((-1) ** (wu % 2))
    return [(sign, v, 2 * wu - j - n - 2) for j, v in _l1_powers(V, u)]


class Contragredient(VModule):
    """Graded dual ``M'`` on degrees ``<= wmax`` with the twisted action."""

    def __init__(self, M: VModule, wmax: int):
        self.base = M
        self.voa = M.voa
        self.wmax = wmax
        self.min_degree = M.min_degree
        self._cache: dict = {}

    def basis(self, d):
        if d > self.min_degree + self.wmax:
            raise TruncationError(f"degree {d} beyond contragredient truncation {self.wmax}")
        return tuple(("dual", k) for k in self.base.basis(d))

    def degree(self, key):
        return self.base.degree(key[1])

    def lowest_weights(self):
        return self.base.lowest_weights()

    def _basis_mode(self, u, wu, n, key):
        d = self.degree(key)
        td = d + wu - n - 1
        if td < self.min_degree:
            return ZERO
        if td > self.min_degree + self.wmax:
            raise TruncationError(f"target degree {td} beyond contragredient truncation {self.wmax}")
        s = key[1]
        out = {}
        for t in self.base.basis(td):
            et = GradedElement._raw({t: Fraction(1)})
            val = Fraction(0)
            for c, v, p in self._terms(u, wu, n):
                val += c * self.base.mode(v, p, et).get(s)
            if val:
                out[("dual", t)] = val
        return GradedElement._raw(out)

    def _terms(self, u, wu, n):
        key = (u, n)
        hit = self._cache.get(key)
        if hit is None:
            hit = adjoint_operator_terms(self.voa, u, wu, n)
            self._cache[key] = hit
        return hit

    def header(self):
        return {"kind": "contragredient", "wmax": self.wmax, "of": self.base.header()}


def contragredient(M: VModule, wmax: int) -> Contragredient:
    return Contragredient(M, wmax)


def dual_basis_element(key) -> GradedElement:
    return GradedElement.basis(("dual", key))


def pairing(wd: GradedElement, w: GradedElement) -> Fraction:
    """Natural pairing of ``M'`` with ``M``; weight mismatch pairs to 0."""
    return sum((c * w.get(k[1]) for k, c in wd.items()), Fraction(0))


class BilinearFormModel:
    """The symmetric form ``(u + u', w + w') = u'(w) + w'(u)`` on ``M + M'``."""

    def __init__(self, M: VModule, wmax: int):
        self.base = M
        self.dual = Contragredient(M, wmax)
        self.module = DirectSum(M, self.dual)
        self.voa = M.voa
        self.wmax = wmax

    def __call__(self, x: GradedElement, y: GradedElement) -> Fraction:
        D = self.module
        return (pairing(D.component(1, y), D.component(0, x))
                + pairing(D.component(1, x), D.component(0, y)))

    def gram(self, d: int) -> tuple:
        keys = self.module.basis(d)
        es = [GradedElement.basis(k) for k in keys]
        return tuple(tuple(self(a, b) for b in es) for a in es)

    def is_symmetric(self, d: int) -> bool:
        G = self.gram(d)
        return G == transpose(G) if G else True

    def is_nondegenerate(self, d: int) -> bool:
        G = self.gram(d)
        return rank(G) == len(G) if G else True

    def to_json(self) -> dict:
        return {"module": self.module.header(),
                "gram": {str(d): [[q_str(x) for x in r] for r in self.gram(d)]
                         for d in range(self.module.min_degree, self.module.min_degree + self.wmax + 1)}}


def double_form(M: VModule, wmax: int) -> BilinearFormModel:
    return BilinearFormModel(M, wmax)


def check_invariance(form: BilinearFormModel, u: GradedElement, wbox: int) -> AxiomReport:
    """``(u_n x, y) = (x, Y(e^{zL(1)}(-z^{-2})^{L(0)} u, z^{-1})_n y)`` on basis pairs."""
    D = form.module
    V = form.voa
    rep = AxiomReport("invariance", D.header(), {"u": [[list(map(list, k)), q_str(c)] for k, c in u.sorted_items()],
                                                 "wbox": wbox})
    keys = [k for d in range(D.min_degree, D.min_degree + wbox + 1) for k in D.basis(d)]
    for wu, uh in u.homogeneous_components(V.weight).items():
        for kx in keys:
            x = GradedElement.basis(kx)
            for ky in keys:
                y = GradedElement.basis(ky)
                n = wu - 1 + D.degree(kx) - D.degree(ky)
                lhs = form(D.mode(uh, n, x), y)
                rhs = sum((c * form(x, D.mode(v, p, y)) for c, v, p in adjoint_operator_terms(V, uh, wu, n)),
                          Fraction(0))
                if lhs != rhs:
                    return rep.fail({"x": repr(kx), "y": repr(ky), "n": n, "lhs": q_str(lhs), "rhs": q_str(rhs)})
    return rep


def check_hom(f: dict, M: VModule, N: VModule, samples, wmax: int | None = None) -> AxiomReport:
    """Check that per-degree matrices ``f[d]: M_d -> N_d`` intertwine sampled modes.

    On success also checks ``f(Omega(M)) <= Omega(N)`` degreewise.
    """
    from .zhu import omega_space
    from .kernel import echelonize

    if M.voa is not N.voa:
        raise MismatchedBase("modules over different VOA instances")
    degs = sorted(f)
    wmax = max(degs) - M.min_degree if wmax is None else wmax
    for d in degs:
        rows, cols = len(f[d]), (len(f[d][0]) if f[d] else 0)
        if rows != len(N.basis(d)) or (rows and cols != len(M.basis(d))):
            raise ValueError(f"shape mismatch at degree {d}")
    rep = AxiomReport("hom", {"source": M.header(), "target": N.header()},
                      {"samples": [[repr(sorted(u)), n] for u, n in samples], "degrees": degs})
    for u, n in samples:
        wu = max(u.weights(M.voa.weight), default=0)
        for d in degs:
            td = wu - n - 1 + d
            if td not in f:
                continue
            left = matmul(f[td], M.mode_matrix(u, n, d)) if M.basis(td) and M.basis(d) else ()
            right = matmul(N.mode_matrix(u, n, d), f[d]) if N.basis(d) and M.basis(d) else ()
            if _nz(left) != _nz(right):
                return rep.fail({"n": n, "degree": d})
    om_m = omega_space(M, wmax)
    om_n = omega_space(N, wmax)
    for d in degs:
        if d not in om_m:
            continue
        S = echelonize(om_n.get(d, []))
        src = M.basis(d)
        tgt = N.basis(d)
        for w in om_m[d]:
            vec = [w.get(k) for k in src]
            img = GradedElement(zip(tgt, (sum((a * b for a, b in zip(row, vec)), Fraction(0)) for row in f[d])))
            if not S.contains(img):
                return rep.fail({"omega_functoriality_degree": d})
    rep.extra["omega_functorial"] = True
    return rep


def _nz(A):
    # normalise empty/zero matrices so shapes with no rows compare equal
    if not A or not A[0] or not any(any(r) for r in A):
        return None
    return A


def identity_map(M: VModule, wmax: int, scale=1) -> dict:
    out = {}
    for d in range(M.min_degree, M.min_degree + wmax + 1):
        n = len(M.basis(d))
        out[d] = tuple(tuple(Fraction(scale) if i == j else Fraction(0) for j in range(n)) for i in range(n))
    return out


def projection_map(S: DirectSum, i: int, wmax: int) -> dict:
    """Per-degree matrices of the projection ``S -> S.parts[i]``."""
    out = {}
    for d in range(S.min_degree, S.min_degree + wmax + 1):
        src = S.basis(d)
        tgt = S.parts[i].basis(d)
        out[d] = tuple(tuple(Fraction(int(s == (i, t))) for s in src) for t in tgt)
    return out
