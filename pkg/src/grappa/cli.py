"""Command line front end.

Every run prints one document containing the graph hash and the results.
Exit status: 0 on success, 1 on bad input, 2 when a verification fails.
"""
import argparse
import json
import os
import random
import sys
import warnings
from fractions import Fraction

from . import homology
from .graph import GraphError, GraphPoint, load_graph, bundled, BUNDLED
from .linalg import Vec

EXIT_OK, EXIT_INPUT, EXIT_MISMATCH = 0, 1, 2


class InputError(Exception):
    pass


class Mismatch(Exception):
    def __init__(self, what, lhs, rhs):
        super().__init__(what)
        self.what, self.lhs, self.rhs = what, lhs, rhs


def _s(x):
    if isinstance(x, Vec):
        return [str(c) for c in x]
    if isinstance(x, (Fraction, int)):
        return str(Fraction(x))
    if isinstance(x, (list, tuple)):
        return [_s(c) for c in x]
    if isinstance(x, dict):
        return {str(k): _s(v) for k, v in x.items()}
    return str(x)


def default_depth():
    env = os.environ.get("GRAPPA_DEPTH")
    if env is None:
        return 4
    try:
        d = int(env)
    except ValueError:
        raise InputError(f"GRAPPA_DEPTH must be an integer, got {env!r}")
    if d < 1:
        raise InputError("depth must be at least 1")
    return d


def read_graph(path):
    if not os.path.exists(path) and path in BUNDLED:
        return bundled(path)
    try:
        return load_graph(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}")


def _kummer(G, base, depth):
    from .kummer import Kummer
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return Kummer(G, base=base, depth=depth)


def _need_depth(n, depth):
    if n < 1:
        raise InputError("weight must be at least 1")
    if n > depth:
        raise InputError(f"weight {n} exceeds depth {depth}")


def _base(G, args):
    return G.parse_point(args.base) if getattr(args, "base", None) else GraphPoint("v", min(G.genus))


# commands

def cmd_validate(G, args):
    return {"stability": G.stability(), "vertices": len(G.genus), "edges": len(G.edges),
            "half_edges": len(G.half_edges)}


def cmd_invariants(G, args):
    return {
        "betti": G.betti(), "total_genus": G.total_genus(), "euler_characteristic": G.euler_char(),
        "canonical_divisor": G.canonical_divisor(), "stability": G.stability(),
        "h1_basis": [_s(dict(sorted(g.items()))) for g in homology.h1_basis(G)],
        "gram": _s(homology.gram(G)),
    }


def cmd_measure(G, args):
    _need_depth(args.n, args.depth)
    K = _kummer(G, None, args.depth)
    return {"weight": args.n, "measure": K.mu(args.n).to_dict()}


def cmd_kummer(G, args):
    _need_depth(args.n, args.depth)
    b = _base(G, args)
    x = G.parse_point(args.point)
    K = _kummer(G, b, args.depth)
    vals = K.kummer(x, args.n)
    return {"base": str(b), "point": str(x),
            "v_basis": {str(r): K.v_basis_description(r) for r in range(2, args.n + 1)},
            "values": {str(r): _s(v) for r, v in vals.items()}}


def cmd_injectivity(G, args):
    from .graphops import injectivity_census
    if args.denominator < 1:
        raise InputError("denominator must be at least 1")
    if G.stability() != "stable":
        raise InputError("graph is not stable")
    rep = injectivity_census(G, args.denominator, args.n)
    if not rep["ok"]:
        raise Mismatch("injectivity census", rep.get("unexplained") or rep.get("involution_pairs_not_colliding"),
                       rep.get("weight3_collisions"))
    return rep


def cmd_canonical(G, args):
    from .chabauty import canonical_measure
    mu = canonical_measure(G)
    return {"measure": mu.to_dict(), "total_mass": _s(mu.total_mass())}


def cmd_mu_f(G, args):
    from .chabauty import EndomorphismData, mu_f
    try:
        with open(args.endo, encoding="utf-8") as fh:
            F = EndomorphismData.from_json(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read {args.endo}: {exc.strerror}")
    except (ValueError, TypeError) as exc:
        raise InputError(f"malformed endomorphism file: {exc}")
    mu = mu_f(G, F)
    return {"h1_basis": [_s(dict(sorted(g.items()))) for g in homology.h1_basis(G)],
            "measure": mu.to_dict(), "total_mass": _s(mu.total_mass()),
            "total_trace": _s(F.total_trace())}


def cmd_mu_z(G, args):
    from .chabauty import mu_z
    mu, ok = mu_z(G)
    if not ok:
        from .chabauty import canonical_measure
        raise Mismatch("mu_Z = mu_can + K/2 - g e0", mu.to_dict(), canonical_measure(G).to_dict())
    return {"measure": mu.to_dict(), "identity": ok}


def cmd_reduce(G, args):
    from .graphops import eliminate_half_edge, resistance_reduce
    if bool(args.half_edge) == bool(args.contract):
        raise InputError("give exactly one of --half-edge or --contract")
    if args.half_edge:
        red = eliminate_half_edge(G, args.half_edge)
    else:
        if not args.w0 or not args.w1:
            raise InputError("--contract needs --w0 and --w1")
        red = resistance_reduce(G, args.contract.split(","), args.w0, args.w1)
    return {"graph": red.H.to_dict(), "graph_hash_out": red.H.hash(), "warning": red.warning,
            "vertex_map": {v: str(red.point(GraphPoint("v", v))) for v in sorted(G.genus)}}


def _sample_points(G, k, seed=0):
    from .graph import random_point
    rng = random.Random(seed)
    return [random_point(G, rng, 6) for _ in range(k)]


def verify_ode(G, n):
    from .kummer import ode_oracle, w2_closed_form, w2_relation
    K = _kummer(G, None, n)
    checks = 0
    for r in range(2, n + 1):
        m = K.mu_ambient(r).total_mass()
        checks += 1
        if m != 0:
            raise Mismatch(f"total mass of mu_{r}", m, 0)
    for where, lhs, rhs in ode_oracle(K, n):
        raise Mismatch(f"differential equation at {where}", lhs, rhs)
    checks += 1
    if n >= 2:
        g = w2_closed_form(K)
        j = K.j_ambient(2)
        for x in G.vertex_points() + _sample_points(G, 10):
            checks += 1
            lhs, rhs = j(x), g(x) - g(K.base)
            if lhs != rhs:
                raise Mismatch(f"weight 2 closed form at {x}", lhs, rhs)
        rel = w2_relation(K)
        checks += 1
        if rel != 0:
            raise Mismatch("weight 2 relation", rel, 0)
    for e in G.edges:
        for r in range(2, n + 1):
            p = K.j_ambient(r).edges.get(e, [])
            lead = p[r] if len(p) > r else 0
            want = K.leading_coefficient(e, r)
            checks += 1
            if lead != want:
                raise Mismatch(f"leading coefficient on {e} in weight {r}", lead, want)
    return checks


def verify_cheng_katz(G, n):
    from . import chengkatz as ck
    d = min(n, 3)
    checks = 0
    u = GraphPoint("v", min(G.genus))
    pts = G.vertex_points() + [G.point(e, G.length(e) / 2) for e in sorted(G.edges)[:2]]
    v, w = pts[-1], pts[len(pts) // 2]
    _, ok, r = ck.duality_gram(G, u, v, d)
    checks += 1
    if not ok:
        raise Mismatch("duality pairing rank", r, len(ck.all_words(G.betti(), d)))
    for law, good in ck.groupoid_checks(G, u, v, w, d).items():
        checks += 1
        if not good:
            raise Mismatch(f"canonical path {law} law", False, True)
    K = _kummer(G, u, d)
    cand = pts + _sample_points(G, 3, seed=1)
    for x, y in [(cand[i], cand[k]) for i in range(len(cand)) for k in range(i + 1, len(cand))][:6]:
        if x == y:
            continue
        Kx = _kummer(G, x, d)
        same = all(Kx.j_ambient(r)(y) == 0 for r in range(2, d + 1))
        kdim = ck.MonodromyOnPaths(Kx, y, d).kernel_dimension()
        checks += 1
        if same != (kdim > 0):
            raise Mismatch(f"N-kernel on paths {x} -> {y}", kdim, same)
    return checks


def cmd_verify(G, args):
    _need_depth(args.n, max(args.depth, args.n))
    out = {}
    if args.oracle in ("ode", "all"):
        out["ode"] = {"checks": verify_ode(G, args.n)}
    if args.oracle in ("cheng-katz", "all"):
        out["cheng_katz"] = {"checks": verify_cheng_katz(G, args.n)}
    out["status"] = "ok"
    return out


COMMANDS = {
    "validate": cmd_validate, "invariants": cmd_invariants, "measure": cmd_measure,
    "kummer": cmd_kummer, "injectivity": cmd_injectivity, "canonical-measure": cmd_canonical,
    "mu-f": cmd_mu_f, "mu-z": cmd_mu_z, "reduce": cmd_reduce, "verify": cmd_verify,
}


def build_parser():
    p = argparse.ArgumentParser(prog="grappa", description="Harmonic analysis and Kummer maps on reduction graphs.")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--depth", type=int, default=None)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        sp = sub.add_parser(name, **kw)
        sp.add_argument("graph", help="graph file, or the name of a bundled graph")
        return sp
    add("validate")
    add("invariants")
    sp = add("measure")
    sp.add_argument("--n", type=int, required=True)
    sp = add("kummer")
    sp.add_argument("--base")
    sp.add_argument("--point", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp = add("injectivity")
    sp.add_argument("--denominator", type=int, default=6)
    sp.add_argument("--n", type=int, default=3)
    add("canonical-measure")
    sp = add("mu-f")
    sp.add_argument("--endo", required=True)
    add("mu-z")
    sp = add("reduce")
    sp.add_argument("--half-edge")
    sp.add_argument("--contract", help="comma separated edge ids")
    sp.add_argument("--w0")
    sp.add_argument("--w1")
    sp = add("verify")
    sp.add_argument("--oracle", choices=["ode", "cheng-katz", "all"], default="all")
    sp.add_argument("--n", type=int, default=3)
    return p


def _text(doc, indent=""):
    lines = []
    for k, v in doc.items():
        if isinstance(v, dict):
            lines.append(f"{indent}{k}:")
            lines += _text(v, indent + "  ")
        else:
            lines.append(f"{indent}{k}: {json.dumps(v, sort_keys=True)}")
    return lines


def emit(doc, fmt, stream):
    if fmt == "text":
        stream.write("\n".join(_text(doc)) + "\n")
    else:
        stream.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def run(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    doc = {"command": args.command}
    try:
        if args.depth is None:
            args.depth = default_depth()
        elif args.depth < 1:
            raise InputError("depth must be at least 1")
        G = read_graph(args.graph)
        doc["graph_hash"] = G.hash()
        doc["result"] = COMMANDS[args.command](G, args)
        code = EXIT_OK
    except Mismatch as m:
        doc["error"] = {"kind": "mismatch", "identity": m.what, "lhs": _s(m.lhs), "rhs": _s(m.rhs)}
        code = EXIT_MISMATCH
    except (InputError, GraphError, ValueError) as exc:
        doc["error"] = {"kind": "input", "message": str(exc)}
        code = EXIT_INPUT
    emit(doc, args.format, stdout)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
