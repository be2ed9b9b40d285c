"""Command-line interface: ``voak <dim|mode|lop|axioms|zhu|bundle|kgroup>``.

Output is deterministic JSON (sorted keys, rationals as strings).  Exit
status is 0 on success, 1 when a check fails and 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import random
import sys

from . import axioms, bundles, zhu
from .kernel import GradedElement, Q, mat_to_json, mono_from_json, mono_to_json, q_str
from .modules import adjoint_module
from .voa import CommAssocData, VOAInstance, comm_assoc, complex_numbers, dual_numbers, heisenberg


class InputError(ValueError):
    pass


# -- argument helpers -------------------------------------------------------------

def _range_arg(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError("empty range")
    return lo, hi


def _nonneg(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return n


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _load(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _instance(args) -> VOAInstance:
    if args.instance == "heisenberg":
        if args.rank < 1:
            raise InputError("rank must be >= 1")
        return heisenberg(args.rank)
    if args.algebra in (None, "complex"):
        data = complex_numbers()
    elif args.algebra == "dual-numbers":
        data = dual_numbers()
    else:
        data = CommAssocData.from_json(_load(args.algebra))
    return comm_assoc(data)


def _element(V: VOAInstance, text: str) -> GradedElement:
    """Parse ``vacuum``, ``omega``, a monomial ``[[i, n], ...]`` or an element JSON list."""
    if text == "vacuum":
        return V.vacuum
    if text == "omega":
        return V.omega
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        raise InputError(f"cannot parse element {text!r}") from None
    if isinstance(data, list) and data and isinstance(data[0], dict):
        v = GradedElement.from_json(data)
    elif isinstance(data, list):
        v = GradedElement.basis(mono_from_json(data))
    else:
        raise InputError(f"cannot parse element {text!r}")
    if not V.owns(v):
        raise InputError(f"element {text!r} does not belong to {V.label}")
    return v


# -- commands ---------------------------------------------------------------------

def cmd_dim(args):
    V = _instance(args)
    lo, hi = args.weights or (0, args.cutoff)
    dims = {str(w): len(V.basis(w)) for w in range(lo, hi + 1)}
    payload = {"command": "dim", "instance": V.header(), "dims": dims}
    return payload, 0, (["weight", "dim"], [[w, n] for w, n in dims.items()])


def cmd_mode(args):
    V = _instance(args)
    u, v = _element(V, args.u), _element(V, args.v)
    out = V.mode(u, args.n, v)
    payload = {"command": "mode", "instance": V.header(), "u": u.to_json(), "n": args.n, "v": v.to_json(),
               "result": out.to_json()}
    return payload, 0, None


def cmd_lop(args):
    V = _instance(args)
    v = _element(V, args.v)
    out = V.l_op(args.n, v)
    payload = {"command": "lop", "instance": V.header(), "n": args.n, "v": v.to_json(), "result": out.to_json()}
    return payload, 0, None


def cmd_axioms(args):
    if args.corrupt:
        if args.instance != "heisenberg":
            raise InputError("--corrupt fixtures are Heisenberg instances")
        V = axioms.negative_control(args.corrupt, args.rank)
    else:
        V = _instance(args)
    which = args.which.split(",") if args.which else list(axioms.AXIOMS)
    bad = [w for w in which if w not in axioms.AXIOMS]
    if bad:
        raise InputError(f"unknown axioms {bad}; choose from {list(axioms.AXIOMS)}")
    # --box overrides both the mode box and the Jacobi cube
    nbox = args.box or (-4, 4)
    jbox = args.box or (-3, 3)
    wmax = min(args.cutoff, 4) if args.wmax is None else args.wmax
    reports = axioms.run_suite(V, wmax=wmax, nbox=nbox, jbox=jbox, which=which)
    ok = all(r.passed for r in reports)
    payload = {"command": "axioms", "instance": V.header(), "label": V.label, "box": list(nbox),
               "jacobi_box": list(jbox), "wmax": wmax,
               "reports": [r.to_json() for r in reports], "pass": ok}
    rows = [[r.axiom, "pass" if r.passed else "FAIL"] for r in reports]
    return payload, 0 if ok else 1, (["axiom", "result"], rows)


def _class_json(c: zhu.ZhuClass):
    return c.to_json()


def cmd_zhu(args):
    V = _instance(args)
    N = args.cutoff
    sub = args.sub
    if sub == "phi":
        a = _element(V, args.a)
        return {"command": "zhu phi", "instance": V.header(), "a": a.to_json(),
                "result": zhu.phi(V, a).to_json()}, 0, None
    if sub == "omega-space":
        M = adjoint_module(V)
        wmax = args.wmax if args.wmax is not None else N
        sp = zhu.omega_space(M, wmax)
        payload = {"command": "zhu omega-space", "instance": V.header(), "wmax": wmax, "truncated_test": True,
                   "dims": {str(d): len(b) for d, b in sp.items()},
                   "basis": {str(d): [v.to_json() for v in b] for d, b in sp.items()}}
        return payload, 0, (["degree", "dim"], [[d, len(b)] for d, b in sp.items()])
    if sub == "o-matrix":
        M = adjoint_module(V)
        a = _element(V, args.a)
        wmax = args.wmax if args.wmax is not None else 2
        sp = zhu.omega_space(M, wmax)
        mats = {str(d): mat_to_json(zhu.o_action(M, a, b)) for d, b in sp.items() if b}
        return {"command": "zhu o-matrix", "instance": V.header(), "a": a.to_json(), "wmax": wmax,
                "matrices": mats}, 0, None
    if sub == "stabilization":
        cutoffs = _int_list(args.cutoffs) if args.cutoffs else [N, N + 1, N + 2]
        res = zhu.stabilization(V, args.k, cutoffs)
        payload = {"command": "zhu stabilization", "instance": V.header(), "k": args.k,
                   "dims": {str(n): d for n, d in res["dims"].items()},
                   "stabilized": res["stabilized"], "monotone": res["monotone"]}
        return payload, 0, (["cutoff", "dim"], [[n, d] for n, d in res["dims"].items()])
    Z = zhu.build_zhu(V, N)
    head = {"instance": V.header(), "cutoff": N}
    if sub == "basis":
        payload = {"command": "zhu basis", **head, "dim": Z.dim, "o_space_dim": Z.o_space.dim,
                   "coset_basis": [mono_to_json(k) for k in Z.coset_basis]}
        return payload, 0, (["index", "monomial"], [[i, json.dumps(mono_to_json(k))] for i, k in
                                                    enumerate(Z.coset_basis)])
    if sub == "product":
        a, b = _element(V, args.a), _element(V, args.b)
        try:
            c = Z.multiply(a, b)
        except zhu.WeightOverflow as exc:
            raise InputError(str(exc)) from None
        return {"command": "zhu product", **head, "a": a.to_json(), "b": b.to_json(),
                "result": _class_json(c)}, 0, None
    if sub == "table":
        wmax = args.wmax
        keys = [k for k in Z.coset_basis if wmax is None or V.weight(k) <= wmax]
        prods = Z.product_table(wmax)
        rows = [[[q_str(x) for x in prods[(ka, kb)].coords] if (ka, kb) in prods else None for kb in keys]
                for ka in keys]
        payload = {"command": "zhu table", **head, "coset_basis": [mono_to_json(k) for k in keys],
                   "dim": Z.dim, "rows": rows}
        return payload, 0, None
    if sub == "check":
        rng = random.Random(args.seed)
        reports = [zhu.check_identity(Z), zhu.check_central(V, N), zhu.check_commutative(Z, min(3, N)),
                   zhu.check_phi_involution(V, min(6, N)), zhu.check_phi_anti(Z, min(2, N // 2))]
        reports.append(_sampled_associativity(Z, rng, args.samples))
        ok = all(r.passed for r in reports)
        payload = {"command": "zhu check", **head, "seed": args.seed, "reports": [r.to_json() for r in reports],
                   "pass": ok}
        return payload, 0 if ok else 1, (["check", "result"], [[r.axiom, "pass" if r.passed else "FAIL"]
                                                                 for r in reports])
    raise InputError(f"unknown zhu subcommand {sub}")


def _sampled_associativity(Z: zhu.ZhuQuotient, rng: random.Random, samples: int):
    V = Z.voa
    keys = V.basis_upto(max(Z.cutoff // 3, 0))
    rep = axioms.AxiomReport("zhu-associative-sampled", V.header(), {"cutoff": Z.cutoff, "samples": samples})
    for _ in range(samples):
        ka, kb, kc = (rng.choice(keys) for _ in range(3))
        a, b, c = (GradedElement.basis(k) for k in (ka, kb, kc))
        diff = zhu.star(V, zhu.star(V, a, b), c) - zhu.star(V, a, zhu.star(V, b, c))
        if not Z.reduce(diff).is_zero():
            return rep.fail({"a": mono_to_json(ka), "b": mono_to_json(kb), "c": mono_to_json(kc)})
    return rep


def _bundle(path) -> bundles.BundleCocycle:
    return bundles.BundleCocycle.from_json(_load(path))


def _need(inputs, n, sub):
    if len(inputs) != n:
        raise InputError(f"bundle {sub} takes {n} input file(s)")


def cmd_bundle(args):
    sub, inputs = args.sub, args.inputs
    if sub == "fixture":
        E = bundles.random_cocycle(random.Random(args.seed))
        return {"command": "bundle fixture", "seed": args.seed, "bundle": E.to_json()}, 0, None
    if sub == "homotopy":
        f = json.loads(args.f) if args.f else [[2]]
        s = Q(args.s)
        fr = bundles.clutch_homotopy(f, s)
        labels = list(f.keys()) if isinstance(f, dict) else None
        payload = {"command": "bundle homotopy", "frame": fr.to_json(labels),
                   "det": [q_str(bundles.det(b)) for b in fr.blocks]}
        return payload, 0, None
    if sub == "check":
        _need(inputs, 1, sub)
        rep = bundles.check_cocycle(_bundle(inputs[0]))
        return {"command": "bundle check", "report": rep.to_json(), "pass": rep.passed}, 0 if rep.passed else 1, None
    if sub == "sum":
        _need(inputs, 2, sub)
        E = bundles.bundle_sum(_bundle(inputs[0]), _bundle(inputs[1]))
        return {"command": "bundle sum", "bundle": E.to_json()}, 0, None
    if sub == "dual":
        _need(inputs, 1, sub)
        E = _bundle(inputs[0])
        D = bundles.bundle_dual(E)
        rep = bundles.check_dual_pairing(E, D)
        return {"command": "bundle dual", "bundle": D.to_json(), "pairing": rep.to_json()}, 0 if rep.passed else 1, None
    if sub == "omega":
        _need(inputs, 1, sub)
        E = bundles.omega_bundle(_bundle(inputs[0]))
        return {"command": "bundle omega", "bundle": E.to_json()}, 0, None
    if sub == "split":
        _need(inputs, 1, sub)
        E = _bundle(inputs[0])
        parts = bundles.multiplicity_bundles(E)
        back = bundles.reassemble(parts, E.table)
        same = json.dumps(back.to_json(), sort_keys=True) == json.dumps(E.to_json(), sort_keys=True)
        payload = {"command": "bundle split", "parts": {l: P.to_json() for l, P in parts.items()},
                   "reassembled_identical": same}
        return payload, 0 if same else 1, None
    if sub == "complement":
        _need(inputs, 1, sub)
        data = _load(inputs[0])
        E = bundles.BundleCocycle.from_json(data)
        forms = data.get("forms")
        if isinstance(forms, dict):
            forms = [forms.get(l, ()) for l in E.table.labels]
        res = bundles.trivial_complement(E, forms)
        rep = bundles.verify_complement(res)
        payload = {"command": "bundle complement", "result": res.to_json(), "report": rep.to_json(),
                   "pass": rep.passed}
        return payload, 0 if rep.passed else 1, None
    raise InputError(f"unknown bundle subcommand {sub}")


def cmd_kgroup(args):
    if args.sub == "grassmannian":
        shape = bundles.grassmannian_shape(_int_list(args.n), _int_list(args.k))
        return {"command": "kgroup grassmannian", **shape}, 0, None
    labels = args.labels.split(",")
    table = bundles.IrrepTable.of(*labels)
    a = _kclass(table, args.a)
    b = _kclass(table, args.b)
    if args.sub == "add":
        return {"command": "kgroup add", "result": bundles.k_add(a, b).to_json()}, 0, None
    if args.sub == "eq":
        eq = bundles.k_eq(a, b)
        return {"command": "kgroup eq", "a": a.to_json(), "b": b.to_json(), "equal": eq}, 0, None
    raise InputError(f"unknown kgroup subcommand {args.sub}")


def _kclass(table, text):
    """``{"positive": {...}, "negative": {...}}`` or a plain ``{label: n}`` map."""
    if text is None:
        return bundles.k_zero(table)
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        raise InputError(f"cannot parse class {text!r}") from None
    if "positive" in data or "negative" in data:
        return bundles.k_class(table, data.get("positive", {}), data.get("negative", {}))
    pos = {l: n for l, n in data.items() if n > 0}
    neg = {l: -n for l, n in data.items() if n < 0}
    return bundles.k_class(table, pos, neg)


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance", choices=("heisenberg", "commutative"), default="heisenberg")
    common.add_argument("--algebra", help="structure constants JSON, or 'complex' / 'dual-numbers'")
    common.add_argument("--rank", type=int, default=1)
    common.add_argument("--cutoff", type=_nonneg, default=6)
    common.add_argument("--box", type=_range_arg, help="mode range LO:HI")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "table"), default="json")

    p = argparse.ArgumentParser(prog="voak", description=__doc__.splitlines()[0])
    sp = p.add_subparsers(dest="command", required=True)

    d = sp.add_parser("dim", parents=[common], help="graded dimensions")
    d.add_argument("--weights", type=_range_arg)
    d.set_defaults(func=cmd_dim)

    m = sp.add_parser("mode", parents=[common], help="u_n v")
    m.add_argument("--u", required=True)
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--v", required=True)
    m.set_defaults(func=cmd_mode)

    lo = sp.add_parser("lop", parents=[common], help="L(n) v")
    lo.add_argument("--n", type=int, required=True)
    lo.add_argument("--v", required=True)
    lo.set_defaults(func=cmd_lop)

    a = sp.add_parser("axioms", parents=[common], help="run the axiom suite")
    a.add_argument("--which", help="comma-separated subset of " + ",".join(axioms.AXIOMS))
    a.add_argument("--wmax", type=_nonneg)
    a.add_argument("--corrupt", choices=axioms.AXIOMS, help="run on the negative-control fixture for AXIOM")
    a.set_defaults(func=cmd_axioms)

    z = sp.add_parser("zhu", parents=[common], help="Zhu algebra queries")
    z.add_argument("sub", choices=("basis", "product", "table", "phi", "omega-space", "o-matrix", "check",
                                   "stabilization"))
    z.add_argument("--a", default="vacuum")
    z.add_argument("--b", default="vacuum")
    z.add_argument("--wmax", type=_nonneg)
    z.add_argument("--k", type=_nonneg, default=3)
    z.add_argument("--cutoffs")
    z.add_argument("--samples", type=_nonneg, default=10)
    z.set_defaults(func=cmd_zhu)

    b = sp.add_parser("bundle", parents=[common], help="bundle cocycle operations")
    b.add_argument("sub", choices=("check", "sum", "dual", "omega", "split", "complement", "homotopy", "fixture"))
    b.add_argument("inputs", nargs="*")
    b.add_argument("--f", help="clutching function: matrix JSON or {label: matrix}")
    b.add_argument("--s", default="0", help="circle parameter (rational)")
    b.set_defaults(func=cmd_bundle)

    k = sp.add_parser("kgroup", parents=[common], help="K_V(pt) arithmetic and Grassmannian shapes")
    k.add_argument("sub", choices=("add", "eq", "grassmannian"))
    k.add_argument("--labels", default="M1,M2")
    k.add_argument("--a")
    k.add_argument("--b")
    k.add_argument("--n", default="")
    k.add_argument("--k", default="")
    k.set_defaults(func=cmd_kgroup)
    return p


def render(payload, table, fmt: str) -> str:
    if fmt == "json" or table is None:
        return json.dumps(payload, sort_keys=True, indent=2)
    cols, rows = table
    cells = [cols] + [[str(x) for x in r] for r in rows]
    width = [max(len(str(r[i])) for r in cells) for i in range(len(cols))]
    return "\n".join("  ".join(str(c).ljust(w) for c, w in zip(r, width)).rstrip() for r in cells)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        payload, status, table = args.func(args)
    except (InputError, ValueError, KeyError, TypeError, IndexError) as exc:
        print(f"voak: error: {exc}", file=sys.stderr)
        return 2
    print(render(payload, table, args.format))
    return status


if __name__ == "__main__":
    sys.exit(main())
