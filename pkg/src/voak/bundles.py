"""V-bundles over finite covers, K_V(pt), and the constructions built on them.

A fiber is ``M = sum_i W_i (x) M^i`` over an :class:`IrrepTable`, so a
V-module automorphism of M is one invertible matrix per irreducible label
acting on the multiplicity space ``W_i``.  Transitions are stored that way.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .axioms import AxiomReport
from .kernel import (
    Q,
    SingularMatrix,
    block_diag,
    det,
    identity,
    inverse,
    kron,
    mat,
    mat_to_json,
    matmul,
    nullspace,
    q_str,
    transpose,
    zeros,
)


class TableMismatch(ValueError):
    pass


class CoverMismatch(ValueError):
    pass


class MissingOmegaData(ValueError):
    pass


class DegenerateForm(ValueError):
    pass


class BadPartition(ValueError):
    pass


# -- irreducible tables and K_V(pt) ---------------------------------------------------

@dataclass(frozen=True)
class Irrep:
    label: str
    dims: tuple = ()  # ((degree, dim), ...)
    omega_dims: tuple | None = None  # ((degree, dim), ...)
    dual: str | None = None

    def dim(self, d: int) -> int:
        return dict(self.dims).get(d, 0)

    def omega_dim(self, d: int) -> int:
        if self.omega_dims is None:
            raise MissingOmegaData(f"no lowest-weight data for {self.label}")
        return dict(self.omega_dims).get(d, 0)


@dataclass(frozen=True)
class IrrepTable:
    irreps: tuple

    def __post_init__(self):
        labels = [r.label for r in self.irreps]
        if len(set(labels)) != len(labels):
            raise ValueError("irrep labels must be distinct")
        for r in self.irreps:
            if r.dual is not None and r.dual not in labels:
                raise ValueError(f"dual of {r.label} not in table")

    @classmethod
    def of(cls, *labels, omega_dims=None) -> "IrrepTable":
        om = omega_dims or {}
        return cls(tuple(Irrep(l, omega_dims=tuple(sorted(om[l].items())) if l in om else None) for l in labels))

    @property
    def labels(self) -> tuple:
        return tuple(r.label for r in self.irreps)

    @property
    def p(self) -> int:
        return len(self.irreps)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def dual_index(self, i: int) -> int:
        d = self.irreps[i].dual
        return i if d is None else self.index(d)

    def to_json(self) -> list:
        out = []
        for r in self.irreps:
            item = {"label": r.label}
            if r.dims:
                item["dims"] = {str(d): n for d, n in r.dims}
            if r.omega_dims is not None:
                item["omega_dims"] = {str(d): n for d, n in r.omega_dims}
            if r.dual is not None:
                item["dual"] = r.dual
            out.append(item)
        return out

    @classmethod
    def from_json(cls, data) -> "IrrepTable":
        irreps = []
        for item in data:
            if isinstance(item, str):
                irreps.append(Irrep(item))
                continue
            dims = tuple(sorted((int(d), int(n)) for d, n in item.get("dims", {}).items()))
            om = item.get("omega_dims")
            om = None if om is None else tuple(sorted((int(d), int(n)) for d, n in om.items()))
            irreps.append(Irrep(item["label"], dims, om, item.get("dual")))
        return cls(tuple(irreps))


PLAIN = IrrepTable((Irrep("C", ((0, 1),), ((0, 1),)),))


def table_from_modules(named: Iterable, wmax: int) -> IrrepTable:
    """Build a table from ``(label, VModule)`` pairs, computing graded and Omega dimensions."""
    from .zhu import omega_space

    irreps = []
    for label, M in named:
        dims = tuple((d, n) for d, n in M.dims(wmax).items() if n)
        om = tuple((d, len(b)) for d, b in omega_space(M, wmax).items() if b)
        irreps.append(Irrep(label, dims, om))
    return IrrepTable(tuple(irreps))


@dataclass(frozen=True)
class KClass:
    """Element of ``K_V(pt) = Z^p``; stored as one signed integer per irrep."""

    table: IrrepTable
    coeffs: tuple

    @property
    def positive(self) -> dict:
        return {l: c for l, c in zip(self.table.labels, self.coeffs) if c > 0}

    @property
    def negative(self) -> dict:
        return {l: -c for l, c in zip(self.table.labels, self.coeffs) if c < 0}

    def __add__(self, other: "KClass") -> "KClass":
        return k_add(self, other)

    def __neg__(self):
        return k_neg(self)

    def __sub__(self, other):
        return k_add(self, k_neg(other))

    def to_json(self) -> dict:
        return {"table": list(self.table.labels), "positive": self.positive, "negative": self.negative}

    @classmethod
    def from_json(cls, data, table: IrrepTable | None = None) -> "KClass":
        table = table or IrrepTable.of(*data["table"])
        pos, neg = data.get("positive", {}), data.get("negative", {})
        return cls(table, tuple(int(pos.get(l, 0)) - int(neg.get(l, 0)) for l in table.labels))


def k_class(table: IrrepTable, mults: Mapping | Iterable, negative: Mapping | None = None) -> KClass:
    """``[sum n_i M^i] - [sum m_i M^i]`` from label->multiplicity maps."""
    if isinstance(mults, Mapping):
        bad = set(mults) - set(table.labels)
        if bad:
            raise TableMismatch(f"labels {sorted(bad)} not in table")
        pos = tuple(int(mults.get(l, 0)) for l in table.labels)
    else:
        pos = tuple(int(x) for x in mults)
        if len(pos) != table.p:
            raise TableMismatch("multiplicity list has the wrong length")
    neg = tuple(int((negative or {}).get(l, 0)) for l in table.labels)
    if any(x < 0 for x in pos + neg):
        raise ValueError("multiplicities must be nonnegative")
    return KClass(table, tuple(a - b for a, b in zip(pos, neg)))


def _same_table(a: KClass, b: KClass):
    if a.table.labels != b.table.labels:
        raise TableMismatch("classes over different irrep tables")


def k_add(a: KClass, b: KClass) -> KClass:
    _same_table(a, b)
    return KClass(a.table, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))


def k_neg(a: KClass) -> KClass:
    return KClass(a.table, tuple(-x for x in a.coeffs))


def k_eq(a: KClass, b: KClass) -> bool:
    _same_table(a, b)
    return a.coeffs == b.coeffs


def k_zero(table: IrrepTable) -> KClass:
    return KClass(table, (0,) * table.p)


def as_difference_with_trivial(a: KClass) -> tuple[dict, dict]:
    """``a = [E] - [M]`` with E, M modules (at a point every bundle is trivial)."""
    return a.positive, a.negative


# -- covers and cocycles --------------------------------------------------------------

def _pair(a, b):
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class CoverComplex:
    """Nerve data of a finite cover, optionally with a finite point set.

    ``points`` maps a point name to ``{patch: weight}`` for every patch
    containing it; weights are the square roots ``p_alpha(x)`` of a partition
    of unity (``sum p^2 = 1``).  A ``None`` weight map chooses the first patch.
    """

    patches: tuple
    overlaps: frozenset
    triples: frozenset = frozenset()
    points: tuple = ()  # ((name, ((patch, weight), ...)), ...)

    def __post_init__(self):
        ps = set(self.patches)
        norm = frozenset(_pair(*o) for o in self.overlaps)
        object.__setattr__(self, "overlaps", norm)
        object.__setattr__(self, "triples", frozenset(tuple(sorted(t)) for t in self.triples))
        for a, b in norm:
            if a not in ps or b not in ps or a == b:
                raise ValueError(f"bad overlap {a}|{b}")
        for t in self.triples:
            a, b, c = t
            for pr in ((a, b), (b, c), (a, c)):
                if pr not in norm:
                    raise ValueError(f"triple {t} lacks overlap {pr}")
        for name, memb in self.points:
            pat = [p for p, _ in memb]
            if not pat or any(p not in ps for p in pat):
                raise ValueError(f"point {name} has bad patch membership")
            for i, a in enumerate(pat):
                for b in pat[i + 1:]:
                    if _pair(a, b) not in norm:
                        raise ValueError(f"point {name} lies in {a} and {b} but they do not overlap")
            for i, a in enumerate(sorted(pat)):
                for b in sorted(pat)[i + 1:]:
                    for c in sorted(pat)[sorted(pat).index(b) + 1:]:
                        if (a, b, c) not in self.triples:
                            raise ValueError(f"point {name} lies in {a},{b},{c} but the triple is missing")

    @classmethod
    def make(cls, patches, overlaps=(), triples=(), points=None) -> "CoverComplex":
        pts = ()
        if points:
            pts = tuple(
                (name, tuple((p, None if w is None else Q(w)) for p, w in (memb.items() if isinstance(memb, Mapping)
                                                                         else ((m, None) for m in memb))))
                for name, memb in (points.items() if isinstance(points, Mapping) else points)
            )
        return cls(tuple(patches), frozenset(tuple(o) for o in overlaps), frozenset(tuple(t) for t in triples), pts)

    def ordered_overlaps(self):
        for a, b in sorted(self.overlaps):
            yield a, b
            yield b, a

    def to_json(self) -> dict:
        out = {"patches": list(self.patches),
               "overlaps": [list(o) for o in sorted(self.overlaps)],
               "triples": [list(t) for t in sorted(self.triples)]}
        if self.points:
            out["points"] = {name: {p: (None if w is None else q_str(w)) for p, w in memb}
                             for name, memb in self.points}
        return out

    @classmethod
    def from_json(cls, data) -> "CoverComplex":
        return cls.make(data["patches"], data.get("overlaps", ()), data.get("triples", ()), data.get("points"))


@dataclass(frozen=True)
class BundleCocycle:
    """Transition data ``g[(a, b)] = (block_1, ..., block_p)`` on multiplicity spaces."""

    cover: CoverComplex
    table: IrrepTable
    fiber: tuple  # multiplicity per irrep
    transitions: Mapping  # (a, b) -> tuple of matrices

    def __post_init__(self):
        object.__setattr__(self, "fiber", tuple(int(n) for n in self.fiber))
        if len(self.fiber) != self.table.p:
            raise TableMismatch("fiber length differs from table size")
        object.__setattr__(self, "transitions", dict(self.transitions))

    @classmethod
    def build(cls, cover, table, fiber, transitions=None, fill_inverses=True) -> "BundleCocycle":
        """Build from one orientation per overlap (label->matrix maps); missing = identity."""
        fib = tuple(int(fiber.get(l, 0)) for l in table.labels) if isinstance(fiber, Mapping) else tuple(fiber)
        given = {}
        for key, blocks in (transitions or {}).items():
            a, b = key.split("|") if isinstance(key, str) else key
            given[(a, b)] = _blocks(table, fib, blocks)
        trans = {}
        for a, b in cover.ordered_overlaps():
            if (a, b) in given:
                trans[(a, b)] = given[(a, b)]
            elif (b, a) in given and fill_inverses:
                trans[(a, b)] = tuple(inverse(g) for g in given[(b, a)])
            else:
                trans[(a, b)] = tuple(identity(n) for n in fib)
        return cls(cover, table, fib, trans)

    def g(self, a, b) -> tuple:
        if a == b:
            return tuple(identity(n) for n in self.fiber)
        return self.transitions[(a, b)]

    @property
    def fiber_map(self) -> dict:
        return {l: n for l, n in zip(self.table.labels, self.fiber) if n}

    def fiber_matrix(self, a, b, degree: int, omega: bool = False) -> tuple:
        """Transition on the full graded piece ``M_degree = sum W_i (x) M^i_degree``."""
        blocks = []
        for i, g in enumerate(self.g(a, b)):
            r = self.table.irreps[i]
            k = r.omega_dim(degree) if omega else r.dim(degree)
            if k and self.fiber[i]:
                blocks.append(kron(g, identity(k)))
        return block_diag(*blocks) if blocks else ()

    def to_json(self) -> dict:
        out = self.cover.to_json()
        out["table"] = self.table.to_json()
        out["fiber"] = {l: n for l, n in zip(self.table.labels, self.fiber)}
        out["transitions"] = {
            f"{a}|{b}": {l: mat_to_json(g) for l, g in zip(self.table.labels, blocks)}
            for (a, b), blocks in sorted(self.transitions.items())
        }
        return out

    @classmethod
    def from_json(cls, data) -> "BundleCocycle":
        if isinstance(data, str):
            data = json.loads(data)
        cover = CoverComplex.from_json(data)
        table = IrrepTable.from_json(data["table"]) if "table" in data else IrrepTable.of(*data["fiber"].keys())
        fib = tuple(int(data["fiber"].get(l, 0)) for l in table.labels)
        trans = {}
        for key, blocks in data.get("transitions", {}).items():
            a, b = key.split("|")
            trans[(a, b)] = _blocks(table, fib, blocks)
        return cls.build(cover, table, fib, trans, fill_inverses=True) if not _complete(cover, trans) else \
            cls(cover, table, fib, trans)


def _complete(cover, trans):
    return all(o in trans for o in cover.ordered_overlaps())


def _blocks(table: IrrepTable, fib: tuple, blocks) -> tuple:
    if isinstance(blocks, Mapping):
        out = []
        for l, n in zip(table.labels, fib):
            g = blocks.get(l)
            out.append(identity(n) if g is None else mat(g))
        return tuple(out)
    return tuple(mat(g) for g in blocks)


def trivial_bundle(cover: CoverComplex, table: IrrepTable, fiber) -> BundleCocycle:
    return BundleCocycle.build(cover, table, fiber)


def check_cocycle(E: BundleCocycle) -> AxiomReport:
    rep = AxiomReport("cocycle", {"table": list(E.table.labels), "fiber": E.fiber_map},
                      {"overlaps": len(E.cover.overlaps), "triples": len(E.cover.triples)})
    for (a, b), blocks in sorted(E.transitions.items()):
        if a == b and any(g != identity(n) for g, n in zip(blocks, E.fiber)):
            return rep.fail({"identity": f"{a}|{a}"})
        for g, n in zip(blocks, E.fiber):
            if len(g) != n or any(len(r) != n for r in g):
                return rep.fail({"shape": f"{a}|{b}"})
    for a, b in E.cover.ordered_overlaps():
        if (a, b) not in E.transitions:
            return rep.fail({"missing": f"{a}|{b}"})
        for i, n in enumerate(E.fiber):
            if n and matmul(E.g(b, a)[i], E.g(a, b)[i]) != identity(n):
                return rep.fail({"inverse": f"{b}|{a}", "irrep": E.table.labels[i]})
    for t in sorted(E.cover.triples):
        a, b, c = t
        for x, y, z in ((a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)):
            for i, n in enumerate(E.fiber):
                if n and matmul(E.g(x, y)[i], E.g(y, z)[i]) != E.g(x, z)[i]:
                    return rep.fail({"triple": [x, y, z], "irrep": E.table.labels[i]})
    return rep


# -- operations on bundles -------------------------------------------------------------

def _same_base(E: BundleCocycle, F: BundleCocycle):
    if E.cover != F.cover:
        raise CoverMismatch("bundles live on different covers")
    if E.table.labels != F.table.labels:
        raise TableMismatch("bundles use different irrep tables")


def bundle_sum(E: BundleCocycle, F: BundleCocycle) -> BundleCocycle:
    _same_base(E, F)
    fib = tuple(x + y for x, y in zip(E.fiber, F.fiber))
    trans = {k: tuple(block_diag(g, h) if (g or h) else () for g, h in zip(E.transitions[k], F.transitions[k]))
             for k in E.transitions}
    return BundleCocycle(E.cover, E.table, fib, trans)


def _inv_t(g):
    return transpose(inverse(g)) if g else ()


def bundle_dual(E: BundleCocycle) -> BundleCocycle:
    """``E'``: fibers ``(W_i)^*`` over the dual labels, transitions inverse-transposed."""
    t = E.table
    perm = [t.dual_index(i) for i in range(t.p)]
    fib = [0] * t.p
    for i, j in enumerate(perm):
        fib[j] = E.fiber[i]
    trans = {}
    for k, blocks in E.transitions.items():
        new = [None] * t.p
        for i, j in enumerate(perm):
            new[j] = _inv_t(blocks[i])
        trans[k] = tuple(new)
    return BundleCocycle(E.cover, t, tuple(fib), trans)


def check_dual_pairing(E: BundleCocycle, Ed: BundleCocycle) -> AxiomReport:
    """``(g*(x) s*, g(x) s) = (s*, s)``, i.e. ``(g*)^T g = 1`` blockwise on every overlap."""
    rep = AxiomReport("dual-pairing", {"table": list(E.table.labels)}, {"overlaps": len(E.transitions)})
    t = E.table
    for k in sorted(E.transitions):
        for i in range(t.p):
            j = t.dual_index(i)
            g, gs = E.transitions[k][i], Ed.transitions[k][j]
            if g and matmul(transpose(gs), g) != identity(len(g)):
                return rep.fail({"overlap": "|".join(k), "irrep": t.labels[i]})
    return rep


def bundle_pullback(E: BundleCocycle, cover: CoverComplex, cover_map: Mapping) -> BundleCocycle:
    """Pull back along a simplicial map of nerves ``patch -> patch``."""
    for p in cover.patches:
        if cover_map.get(p) not in E.cover.patches:
            raise CoverMismatch(f"patch {p} is not mapped into the old cover")
    for a, b in cover.overlaps:
        fa, fb = cover_map[a], cover_map[b]
        if fa != fb and _pair(fa, fb) not in E.cover.overlaps:
            raise CoverMismatch(f"overlap {a}|{b} maps to a non-overlap")
    for tr in cover.triples:
        img = sorted({cover_map[x] for x in tr})
        if len(img) == 3 and tuple(img) not in E.cover.triples:
            raise CoverMismatch(f"triple {tr} maps to a non-triple")
    trans = {(a, b): E.g(cover_map[a], cover_map[b]) for a, b in cover.ordered_overlaps()}
    return BundleCocycle(cover, E.table, E.fiber, trans)


def omega_bundle(E: BundleCocycle) -> BundleCocycle:
    """Restrict every fiber to its lowest-weight space; blocks act on the same W_i.

    Irreps with zero lowest-weight space drop out.
    """
    keep = []
    for i, r in enumerate(E.table.irreps):
        if r.omega_dims is None:
            raise MissingOmegaData(f"no lowest-weight data for {r.label}")
        if any(n for _, n in r.omega_dims):
            keep.append(i)
    labels = {r.label: f"Omega({r.label})" for r in E.table.irreps}
    table = IrrepTable(tuple(
        Irrep(labels[E.table.irreps[i].label], E.table.irreps[i].omega_dims, E.table.irreps[i].omega_dims,
              labels[E.table.irreps[i].dual] if E.table.irreps[i].dual else None)
        for i in keep
    ))
    fib = tuple(E.fiber[i] for i in keep)
    trans = {k: tuple(blocks[i] for i in keep) for k, blocks in E.transitions.items()}
    return BundleCocycle(E.cover, table, fib, trans)


def multiplicity_bundles(E: BundleCocycle) -> dict:
    """``{label: plain bundle V(E)^i}`` with fiber ``W_i`` and the i-th blocks."""
    out = {}
    for i, l in enumerate(E.table.labels):
        trans = {k: (blocks[i],) for k, blocks in E.transitions.items()}
        out[l] = BundleCocycle(E.cover, PLAIN, (E.fiber[i],), trans)
    return out


def reassemble(parts: Mapping, table: IrrepTable) -> BundleCocycle:
    """Inverse of :func:`multiplicity_bundles`: ``sum_i V(E)^i (x) M^i``."""
    first = next(iter(parts.values()))
    cover = first.cover
    fib = tuple(parts[l].fiber[0] for l in table.labels)
    keys = first.transitions.keys()
    trans = {k: tuple(parts[l].transitions[k][0] for l in table.labels) for k in keys}
    return BundleCocycle(cover, table, fib, trans)


def k_class_of_fiber(E: BundleCocycle) -> KClass:
    return KClass(E.table, E.fiber)


def k_class_over_base(E: BundleCocycle, classify: Callable[[BundleCocycle], Mapping]) -> dict:
    """Bookkeeping for ``K_V(X) = K(X) (x) K_V(pt)``.

    ``classify`` sends a plain bundle to its class in K(X) as ``{generator: int}``;
    the result is ``{(generator, irrep label): int}``.
    """
    out: dict = {}
    for l, P in multiplicity_bundles(E).items():
        for gen, c in classify(P).items():
            if c:
                out[(gen, l)] = out.get((gen, l), 0) + int(c)
    return {k: v for k, v in sorted(out.items()) if v}


# -- trivial complement over a finite discrete base ---------------------------------------

@dataclass
class ComplementResult:
    embedded: BundleCocycle  # the bundle carrying the form (E itself, or E + E')
    complement: BundleCocycle  # F over the point cover
    sigma: dict  # point -> per-irrep sigma matrices
    frames: dict  # point -> per-irrep column bases of F_x
    witness: dict  # point -> per-irrep square matrices [sigma | frame]
    forms: tuple  # per-irrep Gram matrices on the multiplicity spaces
    n_patches: int
    extra_summand: BundleCocycle | None = None  # E' when the form came from E + E'

    def to_json(self) -> dict:
        labels = self.embedded.table.labels

        def per(d):
            return {x: {l: mat_to_json(m) for l, m in zip(labels, ms)} for x, ms in sorted(d.items())}

        out = {"embedded": self.embedded.to_json(), "complement": self.complement.to_json(),
               "sigma": per(self.sigma), "frames": per(self.frames), "witness": per(self.witness),
               "forms": {l: mat_to_json(G) for l, G in zip(labels, self.forms)}, "patches": self.n_patches}
        if self.extra_summand is not None:
            out["extra_summand"] = self.extra_summand.to_json()
        return out


def _stack(blocks):
    rows = []
    for b in blocks:
        rows.extend(b)
    return tuple(rows) if rows else ()


def _point_weights(cover: CoverComplex, memb) -> dict:
    pats = [p for p, _ in memb]
    ws = {p: w for p, w in memb}
    if all(w is None for w in ws.values()):
        ws = {p: Fraction(int(i == 0)) for i, p in enumerate(pats)}
    elif any(w is None for w in ws.values()):
        raise BadPartition("either all or none of a point's weights must be given")
    if any(w < 0 for w in ws.values()):
        raise BadPartition("weights must be nonnegative")
    if sum(w * w for w in ws.values()) != 1:
        raise BadPartition("squared weights do not sum to 1")
    return ws


def _hyperbolic(h: int) -> tuple:
    """Gram matrix ``[[0, I], [I, 0]]`` of the pairing on ``W + W*``."""
    return tuple(tuple(Fraction(int(c == (r + h) % (2 * h))) for c in range(2 * h)) for r in range(2 * h))


def trivial_complement(E: BundleCocycle, forms=None) -> ComplementResult:
    """F with ``E + F`` trivial, computed pointwise over ``E.cover.points``.

    ``forms`` gives one symmetric nondegenerate Gram matrix per irrep on the
    multiplicity spaces, preserved by every transition.  Without it, E is
    replaced by ``E + E'`` with its canonical pairing, and the complement of E
    is then ``E' + F``.
    """
    cover = E.cover
    if not cover.points:
        raise ValueError("trivial_complement needs a finite point set on the cover")
    extra = None
    if forms is None:
        t = E.table
        if any(t.dual_index(i) != i for i in range(t.p)):
            raise ValueError("canonical pairing needs self-dual irreducibles")
        extra = bundle_dual(E)
        E = bundle_sum(E, extra)
        forms = tuple(_hyperbolic(n // 2) if n else () for n in E.fiber)
    forms = tuple(mat(G) if G else () for G in forms)
    for i, (G, n) in enumerate(zip(forms, E.fiber)):
        if not n:
            continue
        if len(G) != n or G != transpose(G):
            raise DegenerateForm(f"form for {E.table.labels[i]} is not a symmetric {n}x{n} matrix")
        if det(G) == 0:
            raise DegenerateForm(f"form for {E.table.labels[i]} is degenerate")
        for k, blocks in E.transitions.items():
            g = blocks[i]
            if matmul(matmul(transpose(g), G), g) != G:
                raise DegenerateForm(f"transition {k} does not preserve the form on {E.table.labels[i]}")
    patches = cover.patches
    npatch = len(patches)
    sigma, frames, witness = {}, {}, {}
    for name, memb in cover.points:
        ws = _point_weights(cover, memb)
        beta = memb[0][0]
        sig_x, fr_x, wit_x = [], [], []
        for i, n in enumerate(E.fiber):
            if not n:
                sig_x.append(())
                fr_x.append(())
                wit_x.append(())
                continue
            blocks = []
            for a in patches:
                w = ws.get(a, Fraction(0))
                blocks.append(tuple(tuple(w * x for x in r) for r in E.g(a, beta)[i]) if w else zeros(n, n))
            s = _stack(blocks)
            Gn = block_diag(*([forms[i]] * npatch))
            if matmul(matmul(transpose(s), Gn), s) != forms[i]:
                raise AssertionError("sigma does not preserve the form")
            perp = nullspace(matmul(transpose(s), Gn), n * npatch)
            fr = transpose(perp) if perp else tuple(() for _ in range(n * npatch))
            sq = tuple(tuple(s[r]) + tuple(fr[r]) for r in range(n * npatch))
            if det(sq) == 0:
                raise AssertionError("E + F does not fill the trivial bundle")
            sig_x.append(s)
            fr_x.append(fr)
            wit_x.append(sq)
        sigma[name], frames[name], witness[name] = tuple(sig_x), tuple(fr_x), tuple(wit_x)
    pcover = CoverComplex.make([name for name, _ in cover.points])
    F = BundleCocycle(pcover, E.table, tuple(n * (npatch - 1) for n in E.fiber), {})
    return ComplementResult(E, F, sigma, frames, witness, forms, npatch, extra)


def verify_complement(res: ComplementResult) -> AxiomReport:
    """Re-check the pointwise identities of a complement computation."""
    E = res.embedded
    rep = AxiomReport("trivial-complement", {"table": list(E.table.labels)},
                      {"points": len(res.sigma), "patches": res.n_patches})
    for x in sorted(res.sigma):
        for i, n in enumerate(E.fiber):
            if not n:
                continue
            s, fr, sq = res.sigma[x][i], res.frames[x][i], res.witness[x][i]
            Gn = block_diag(*([res.forms[i]] * res.n_patches))
            if matmul(matmul(transpose(s), Gn), s) != res.forms[i]:
                return rep.fail({"point": x, "form_preserved": False})
            if fr and fr[0] and any(any(r) for r in matmul(matmul(transpose(s), Gn), fr)):
                return rep.fail({"point": x, "orthogonal": False})
            if len(sq) != n * res.n_patches or det(sq) == 0:
                return rep.fail({"point": x, "isomorphism": False})
            if fr and fr[0]:
                GF = matmul(matmul(transpose(fr), Gn), fr)
                if det(GF) == 0:
                    return rep.fail({"point": x, "complement_form_nondegenerate": False})
    return rep


# -- the rotation homotopy -----------------------------------------------------------------

@dataclass(frozen=True)
class HomotopyFrame:
    s: Fraction
    c: Fraction
    sigma: Fraction
    blocks: tuple  # per irrep, 2n x 2n
    inverse_blocks: tuple

    def to_json(self, labels=None) -> dict:
        labels = labels or [str(i) for i in range(len(self.blocks))]
        return {"s": q_str(self.s), "c": q_str(self.c), "sigma": q_str(self.sigma),
                "F": {l: mat_to_json(b) for l, b in zip(labels, self.blocks)},
                "F_inverse": {l: mat_to_json(b) for l, b in zip(labels, self.inverse_blocks)}}

    @classmethod
    def from_json(cls, data) -> "HomotopyFrame":
        frame = cls(Q(data["s"]), Q(data["c"]), Q(data["sigma"]),
                    tuple(mat(b) for b in data["F"].values()),
                    tuple(mat(b) for b in data["F_inverse"].values()))
        if frame.c ** 2 + frame.sigma ** 2 != 1:
            raise ValueError("circle point is off the unit circle")
        return frame


def circle_point(s) -> tuple[Fraction, Fraction]:
    s = Q(s)
    return (1 - s * s) / (1 + s * s), 2 * s / (1 + s * s)


def _rot(c, sg, n):
    I = identity(n)
    cI = tuple(tuple(c * x for x in r) for r in I)
    sI = tuple(tuple(sg * x for x in r) for r in I)
    msI = tuple(tuple(-sg * x for x in r) for r in I)
    top = tuple(a + b for a, b in zip(cI, sI))
    bot = tuple(a + b for a, b in zip(msI, cI))
    return top + bot


def clutch_homotopy(f, s) -> HomotopyFrame:
    """``diag(f, 1) R(c, sigma) diag(1, f^-1) R(c, -sigma)`` on every block.

    ``(c, sigma) = ((1 - s^2)/(1 + s^2), 2s/(1 + s^2))``; s = 0 gives
    ``diag(f, f^-1)`` and s = 1 gives the identity.
    """
    if isinstance(f, Mapping):
        blocks_in = list(f.values())
    elif f and f[0] and not isinstance(f[0][0], (list, tuple)):
        blocks_in = [f]  # a single matrix
    else:
        blocks_in = list(f)
    c, sg = circle_point(s)
    out, inv = [], []
    for g in blocks_in:
        g = mat(g)
        n = len(g)
        try:
            gi = inverse(g)
        except SingularMatrix:
            raise SingularMatrix("clutching function must be invertible") from None
        I = identity(n)
        F = matmul(matmul(matmul(block_diag(g, I), _rot(c, sg, n)), block_diag(I, gi)), _rot(c, -sg, n))
        Fi = matmul(matmul(matmul(_rot(c, sg, n), block_diag(I, g)), _rot(c, -sg, n)), block_diag(gi, I))
        out.append(F)
        inv.append(Fi)
    return HomotopyFrame(Q(s), c, sg, tuple(out), tuple(inv))


# -- Grassmannians of submodules ---------------------------------------------------------------

def grassmannian_shape(n_mults, k_mults) -> dict:
    """``G(W, M) = prod G(n_i, k_i)``; empty when some ``k_i > n_i``."""
    if len(n_mults) != len(k_mults):
        raise TableMismatch("multiplicity lists differ in length")
    factors = [[int(n), int(k)] for n, k in zip(n_mults, k_mults)]
    if any(k > n or k < 0 for n, k in factors):
        return {"factors": factors, "empty": True, "dimension": None}
    return {"factors": factors, "empty": False, "dimension": sum(k * (n - k) for n, k in factors)}


# -- fixtures -------------------------------------------------------------------------------

def _random_invertible(rng, n: int) -> tuple:
    """Integer matrix with determinant +-1: unit lower times unit upper, signed diagonal."""
    def entry(i, j, lower):
        if i == j:
            return 1 if lower else rng.choice((-1, 1))
        return rng.randint(-2, 2) if (i > j) == lower else 0

    L = [[entry(i, j, True) for j in range(n)] for i in range(n)]
    U = [[entry(i, j, False) for j in range(n)] for i in range(n)]
    return matmul(mat(L), mat(U))


def random_cocycle(rng, labels=("M1", "M2"), max_mult: int = 2) -> BundleCocycle:
    """A 3-patch cocycle with random unimodular blocks on two overlaps and the third forced."""
    table = IrrepTable.of(*labels, omega_dims={l: {0: 1} for l in labels})
    cover = CoverComplex.make(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")], [("a", "b", "c")])
    fib = {l: rng.randint(1, max_mult) for l in labels}
    gab = {l: _random_invertible(rng, n) for l, n in fib.items()}
    gbc = {l: _random_invertible(rng, n) for l, n in fib.items()}
    gac = {l: matmul(gab[l], gbc[l]) for l in labels}
    return BundleCocycle.build(cover, table, fib, {"a|b": gab, "b|c": gbc, "a|c": gac})
