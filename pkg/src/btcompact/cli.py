"""Command-line interface: every operation with JSON in and JSON out.

Exit status 0 on success, 2 on any domain or usage error (with an error
object ``{code, message, context}`` on stdout).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import building, chabauty, distal, limits, norms, polyhedral, sequences, tree
from .errors import BTError, DomainError
from .matrix import Matrix
from .scalar import INF, ScalarConfig, format_rational, parse_rational


class UsageError(BTError):
    code = "BAD_USAGE"


class UnknownCommandError(UsageError):
    code = "UNKNOWN_COMMAND"


class BadJSONError(BTError):
    code = "BAD_JSON"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        if "invalid choice" in message:
            raise UnknownCommandError(message)
        raise UsageError(message)


# ---------------------------------------------------------------------------
# input helpers


def _load(text):
    if text == "-":
        text = sys.stdin.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadJSONError(f"invalid JSON: {exc.msg}", position=exc.pos) from exc


def parse_matrix(text, p: int = 2, group: bool = False) -> Matrix:
    return Matrix.from_json(_load(text) if isinstance(text, str) else text, p, group)


def _rationals(values):
    if not isinstance(values, list):
        raise DomainError("expected a JSON list of rationals")
    return [parse_rational(v) if isinstance(v, str) else Fraction(v) for v in values]


def _ints(values):
    if not isinstance(values, list) or not all(isinstance(v, int) for v in values):
        raise DomainError("expected a JSON list of integers")
    return values


def _desc(text, p):
    return limits.LimitGroupDescriptor.from_json(_load(text), p)


def _q(x):
    return "inf" if x == INF else format_rational(x) if isinstance(x, Fraction) else x


# ---------------------------------------------------------------------------
# commands


def cmd_vertex(a):
    if a.matrix is not None:
        v = building.canonicalize_lattice(parse_matrix(a.matrix, a.prime))
    elif a.nu is not None:
        v = building.apartment_vertex(_ints(_load(a.nu)), a.prime)
    else:
        raise UsageError("vertex needs --matrix or --nu")
    out = building.vertex_coords(v).to_json()
    out["class"] = v.to_json()
    return out


def cmd_cartan(a):
    return building.cartan_decompose(parse_matrix(a.matrix, a.prime, group=True), a.normalize).to_json()


def cmd_iwasawa(a):
    return building.iwasawa_decompose(parse_matrix(a.matrix, a.prime, group=True)).to_json()


def cmd_norm(a):
    basis = parse_matrix(a.basis, a.prime) if a.basis else Matrix.identity(len(_load(a.c)), a.prime)
    gamma = norms.AdditiveNorm(basis, _rationals(_load(a.c)))
    out = {"norm": gamma.to_json(), "chain": [e.to_json() for e in norms.norm_to_chain(gamma)]}
    if a.vector:
        x = _rationals(_load(a.vector))
        out["value"] = _q(gamma(x))
    return out


def _spec(a):
    return sequences.SequenceSpec.from_json(_load(a.spec), a.prime)


def cmd_classify(a):
    return sequences.classify(_spec(a)).to_json()


def cmd_limit_group(a):
    spec = _spec(a)
    return chabauty._expected_descriptor(spec, a.prime).to_json()


def cmd_member(a):
    desc = _desc(a.desc, a.prime)
    g = parse_matrix(a.matrix, a.prime, group=True)
    return {"member": limits.member(desc, g), "descriptor": desc.to_json()}


def cmd_normalizer(a):
    return limits.normalizer(_desc(a.desc, a.prime)).to_json()


def cmd_phi(a):
    I = _ints(_load(a.I))
    J = _ints(_load(a.J))
    d = _rationals(_load(a.d))
    if len(d) != len(J):
        raise DomainError("d needs one entry per element of J")
    inner = limits.LeviGroup(a.n, frozenset(I), frozenset(J), tuple(zip(sorted(J), d)), a.prime)
    return limits.phi_embed(I, inner).to_json()


def cmd_closed_orbit(a):
    orbit = limits.closed_orbit(a.n, a.prime)
    seps = []
    for i in range(len(orbit)):
        for j in range(i + 1, len(orbit)):
            w = limits.separating_witness(orbit[i], orbit[j])
            seps.append({"pair": [i, j], "side": w[0], "generator": w[1], "witness": w[2].to_json()})
    return {"descriptors": [d.to_json() for d in orbit], "witnesses": seps}


def cmd_poly(a):
    if a.point is not None:
        x = polyhedral.PolyhedralPoint.from_json(_load(a.point))
    elif a.seq is not None:
        data = _load(a.seq)
        if data and isinstance(data[0], dict):
            data = [polyhedral.PolyhedralPoint.from_json(x) for x in data]
        elif not all(isinstance(x, str) for x in data):
            raise DomainError("sequence must be component expressions or a list of points")
        x = polyhedral.poly_limit(data, a.horizon)
        if x is polyhedral.DIVERGENT or x is sequences.UNDECIDED:
            return {"limit": repr(x)}
    else:
        raise UsageError("poly needs --point or --seq")
    return {"limit": x.to_json(), "stratum": sorted(polyhedral.stratum(x)),
            "D": polyhedral.D_map(x, a.prime).to_json(), "P": polyhedral.P_map(x, a.prime).to_json()}


def cmd_facet_equal(a):
    x = polyhedral.PolyhedralPoint.from_json(_load(a.x))
    y = polyhedral.PolyhedralPoint.from_json(_load(a.y))
    w = polyhedral.facet_witness(x, y, a.prime, a.gen_depth)
    out = {"equal": w is None, "witness": None}
    if w is not None:
        out["witness"] = {"side": w[0], "generator": w[1], "matrix": w[2].to_json()}
    return out


def cmd_chabauty(a):
    rep = chabauty.verify_convergence(_spec(a), _desc(a.desc, a.prime), chabauty.Window(a.window_m, a.window_j),
                                      a.gen_depth, a.horizon, a.seed, a.samples)
    return rep.to_json()


def _vertex_arg(text, p):
    if text is None:
        return tree.root(p)
    return tree.tree_vertex(parse_matrix(text, p))


def _end(text, p):
    return tree.TreeEnd.from_json(_load(text), p)


def cmd_tree(a):
    p = a.prime
    if a.tree_cmd == "neighbors":
        v = _vertex_arg(a.vertex, p)
        return {"vertex": v.to_json(), "neighbors": [w.to_json() for w in tree.neighbors(v)]}
    if a.tree_cmd == "busemann":
        return {"busemann": tree.busemann(_vertex_arg(a.vertex, p), _end(a.end, p), _vertex_arg(a.base, p))}
    if a.tree_cmd == "measure":
        return tree.visual_measure(_vertex_arg(a.vertex, p), a.depth, _vertex_arg(a.root, p)).to_json()
    if a.tree_cmd == "gap":
        mu = tree.visual_measure(_vertex_arg(a.vertex, p), a.depth, _vertex_arg(a.root, p))
        return {"gap": format_rational(tree.weakstar_gap(mu, _end(a.end, p)))}
    g = parse_matrix(a.matrix, p, group=True)
    return {"member": tree.end_stabilizer_member(_end(a.end, p), g, a.horo)}


def cmd_distal(a):
    if a.matrix is not None:
        return distal.is_distal(parse_matrix(a.matrix, a.prime)).to_json()
    if a.gens is not None:
        data = _load(a.gens)
        if not isinstance(data, list) or not data:
            raise DomainError("--gens needs a non-empty list of matrices")
        gens = [parse_matrix(m, a.prime, group=True) for m in data]
    elif a.desc is not None:
        gens = limits.generators(_desc(a.desc, a.prime), a.gen_depth)
    else:
        raise UsageError("distal needs --matrix, --gens or --desc")
    return distal.sample_group_distal(gens, a.trials, a.max_len, a.seed).to_json()


def cmd_catalog(a):
    if a.id is None:
        return {"catalog": {k: v[0] for k, v in sorted(distal.CATALOG.items())}}
    return distal.catalog_check(a.id, a.n, a.prime, a.seed, a.trials).to_json()


# ---------------------------------------------------------------------------
# parser


def _globals(parser, suppress: bool):
    def d(v):
        return argparse.SUPPRESS if suppress else v

    parser.add_argument("-p", "--prime", type=int, default=d(2))
    parser.add_argument("-k", "--precision", type=int, default=d(6))
    parser.add_argument("--horizon", type=int, default=d(12))
    parser.add_argument("--gen-depth", type=int, default=d(3))
    parser.add_argument("--window-m", type=int, default=d(3))
    parser.add_argument("--window-j", type=int, default=d(2))
    parser.add_argument("--seed", type=int, default=d(0))
    mode = parser.add_mutually_exclusive_group()
    mode.add_argument("--json", dest="pretty", action="store_false", default=d(False))
    mode.add_argument("--pretty", dest="pretty", action="store_true", default=d(False))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="btcompact", description="Exact computations in the Bruhat-Tits building of SL_n over Q.")
    _globals(parser, False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        _globals(sp, True)
        sp.set_defaults(func=fn)
        return sp

    sp = add("vertex", cmd_vertex, "canonical lattice class and chamber coordinates")
    sp.add_argument("--matrix")
    sp.add_argument("--nu")
    sp = add("cartan", cmd_cartan, "Cartan decomposition g = k1 diag(p^nu) k2")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--normalize", action="store_true")
    sp = add("iwasawa", cmd_iwasawa, "Iwasawa decomposition g = k t u")
    sp.add_argument("--matrix", required=True)
    sp = add("norm", cmd_norm, "additive norm and its lattice chain")
    sp.add_argument("--basis")
    sp.add_argument("--c", required=True)
    sp.add_argument("--vector")
    sp = add("classify-seq", cmd_classify, "type and limit gaps of an affine sequence")
    sp.add_argument("--spec", required=True)
    sp = add("limit-group", cmd_limit_group, "limit group of the parahorics along a sequence")
    sp.add_argument("--spec", required=True)
    sp = add("member", cmd_member, "membership in a limit-group descriptor")
    sp.add_argument("--desc", required=True)
    sp.add_argument("--matrix", required=True)
    sp = add("normalizer", cmd_normalizer, "normalizer of a D-kind descriptor")
    sp.add_argument("--desc", required=True)
    sp = add("phi", cmd_phi, "boundary embedding of a Levi limit group")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--I", required=True)
    sp.add_argument("--J", required=True)
    sp.add_argument("--d", required=True)
    sp = add("closed-orbit", cmd_closed_orbit, "Weyl conjugates of D_empty with separating witnesses")
    sp.add_argument("--n", type=int, required=True)
    sp = add("poly", cmd_poly, "stratum and limit groups of a compactified chamber point")
    sp.add_argument("--point")
    sp.add_argument("--seq")
    sp = add("facet-equal", cmd_facet_equal, "compare limit groups of two chamber points")
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp = add("chabauty-verify", cmd_chabauty, "finite-depth convergence check")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--desc", required=True)
    sp.add_argument("--samples", type=int, default=8)

    sp = add("tree", cmd_tree, "Bruhat-Tits tree of SL_2")
    tsub = sp.add_subparsers(dest="tree_cmd", required=True, parser_class=_Parser)
    t = tsub.add_parser("neighbors")
    _globals(t, True)
    t.add_argument("--vertex")
    t = tsub.add_parser("busemann")
    _globals(t, True)
    t.add_argument("--vertex")
    t.add_argument("--end", required=True)
    t.add_argument("--base")
    for name in ("measure", "gap"):
        t = tsub.add_parser(name)
        _globals(t, True)
        t.add_argument("--vertex")
        t.add_argument("--root")
        t.add_argument("--depth", type=int, default=1)
        if name == "gap":
            t.add_argument("--end", required=True)
    t = tsub.add_parser("end-member")
    _globals(t, True)
    t.add_argument("--end", required=True)
    t.add_argument("--matrix", required=True)
    t.add_argument("--horo", action="store_true")

    sp = add("distal", cmd_distal, "distality of a matrix or of sampled words")
    sp.add_argument("--matrix")
    sp.add_argument("--gens")
    sp.add_argument("--desc")
    sp.add_argument("--trials", type=int, default=10_000)
    sp.add_argument("--max-len", type=int, default=8)
    sp = add("catalog", cmd_catalog, "run a catalog check")
    sp.add_argument("--id")
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--trials", type=int, default=200)
    return parser


def _dump(obj, pretty: bool) -> str:
    if pretty:
        return json.dumps(obj, indent=2, sort_keys=True)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def main(argv=None) -> int:
    pretty = "--pretty" in (argv if argv is not None else sys.argv[1:])
    try:
        args = build_parser().parse_args(argv)
        pretty = args.pretty
        ScalarConfig(args.prime, args.precision)
        for name in ("horizon", "gen_depth"):
            if getattr(args, name) < 1:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        out = args.func(args)
    except BTError as exc:
        print(_dump({"error": exc.to_json()}, pretty))
        return 2
    print(_dump(out, pretty))
    return 0


if __name__ == "__main__":
    sys.exit(main())
