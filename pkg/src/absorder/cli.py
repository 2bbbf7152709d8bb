"""``absorder`` command line.

Exit codes: 0 property holds / claim passes, 1 refuted with a witness (or
claim failed), 2 inconclusive, 64 usage error, 65 malformed input file,
69 group outside desk scale, 75 resource budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from .errors import (
    AbsOrderError, NotSupportedError, ParameterError, ResourceError, SchemaError, ShapeError,
)
from .flow import FlowCertificate, normalized_flow, verify_flow
from .groups import GRAMMAR, make_from_spec
from .orders import (
    build_order, claw_embedding, claw_partition_search, orders_agree,
)
from .poset import (
    RankConflict, RankPolynomial, factor_exponents, is_log_concave, is_ranked, level_weights, load_poset,
    parse_weights, quotient, save_poset,
)
from .reproduce import ClaimId, run_claim
from .sperner import (
    SpernerStatus, rank_conflict_to_dict, sperner_report, verify_certificate_doc, verify_witness,
)

EXIT_OK, EXIT_REFUTED, EXIT_INCONCLUSIVE = 0, 1, 2
EXIT_USAGE, EXIT_DATA, EXIT_UNAVAILABLE, EXIT_RESOURCE = 64, 65, 69, 75


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(args, doc: dict, text: str) -> None:
    if getattr(args, "json", False):
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(text)


def _write_json(path: str, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, separators=(",", ":"))
        fh.write("\n")


def _read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


# -- group info -------------------------------------------------------------------

def cmd_group_info(args) -> int:
    G = make_from_spec(args.spec)
    doc = {"group": G.name, "order": G.order, "reflections": len(G.reflections)}
    codim_poly = _histogram(G.codims)
    doc["codim_polynomial"] = codim_poly
    doc["codim_exponents"] = factor_exponents_list(codim_poly)
    try:
        agree = orders_agree(G)
    except ResourceError:
        agree = None
    doc["orders_agree"] = agree
    if agree:
        doc["exponents"] = factor_exponents_list(_histogram(G.reflection_lengths))
    else:
        doc["exponents"] = None
    lines = [f"{G.name}: order {G.order}, {doc['reflections']} reflections"]
    if agree is None:
        lines.append("absolute order: unknown (pairwise comparison over budget)")
    elif agree:
        exps = doc["exponents"]
        lines.append("absolute order: defined; exponents "
                     + ("{" + ",".join(map(str, exps)) + "}" if exps else "do not factor"))
    else:
        lines.append("absolute order: undefined (prefix and codimension orders differ)")
    lines.append("codimension polynomial: " + _poly_text(codim_poly))
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK


def _histogram(values) -> list[int]:
    return np.bincount(np.asarray(values)).tolist()


def factor_exponents_list(coeffs: list[int]):
    return factor_exponents(RankPolynomial(tuple(coeffs)))


def _poly_text(coeffs) -> str:
    return str(RankPolynomial(tuple(coeffs)))


# -- order build / quotient ---------------------------------------------------------

def cmd_order_build(args) -> int:
    G = make_from_spec(args.group)
    P = build_order(G, args.kind)
    save_poset(args.out, P)
    doc = {"group": G.name, "kind": args.kind, "elements": P.size, "covers": len(P.covers),
           "ranked": P.is_ranked, "rank_sizes": list(P.rank_sizes) if P.is_ranked else None,
           "out": args.out}
    text = f"{args.kind}({G.name}): {P.size} elements, {len(P.covers)} covers -> {args.out}"
    if P.is_ranked:
        text += f"\nrank sizes {P.rank_sizes}"
    _emit(args, doc, text)
    return EXIT_OK


def cmd_quotient(args) -> int:
    G = make_from_spec(args.group)
    P = build_order(G, args.kind)
    orbits = G.conjugacy_orbits()
    Q, nu = quotient(P, orbits)
    save_poset(args.out, Q, nu)
    if args.orbits_out:
        _write_json(args.orbits_out, {"orbits": orbits})
    doc = {"group": G.name, "kind": args.kind, "orbits": Q.size, "covers": len(Q.covers),
           "rank_sizes": list(Q.rank_sizes), "out": args.out}
    _emit(args, doc, f"{args.kind}({G.name}) / conjugation: {Q.size} orbits, "
                     f"{len(Q.covers)} covers -> {args.out}")
    return EXIT_OK


# -- check ---------------------------------------------------------------------

def _weights(args, P, stored):
    if args.weights == "unit":
        return None
    if args.weights == "poset":
        if stored is None:
            raise SchemaError("field 'weights': --weights poset needs a weights field in the poset file")
        return stored
    doc = _read_json(args.weights)
    raw = doc.get("weights") if isinstance(doc, dict) else doc
    return parse_weights(raw, P.size)


def _verify(args, P, nu) -> int:
    doc = _read_json(args.verify)
    if not isinstance(doc, dict):
        raise SchemaError(f"{args.verify}: expected an object")
    try:
        if "layers" in doc:
            ok = verify_certificate_doc(P, doc, nu)
            what = "certificate"
        else:
            ok = verify_witness(P, doc, nu)
            what = f"{doc.get('kind')} witness"
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise SchemaError(f"{args.verify}: malformed document ({exc})") from exc
    _emit(args, {"verify": args.verify, "kind": what, "verified": ok},
          f"{what} {args.verify}: {'verified' if ok else 'REJECTED'}")
    return EXIT_OK if ok else EXIT_REFUTED


def cmd_check(args) -> int:
    P, stored = load_poset(args.poset)
    nu = _weights(args, P, stored)
    if args.verify:
        return _verify(args, P, nu)
    check = args.check
    if check == "ranked":
        try:
            result = is_ranked(P)
        except ShapeError as exc:
            _emit(args, {"check": check, "result": "inconclusive", "reason": str(exc)},
                  f"ranked: inconclusive ({exc})")
            return EXIT_INCONCLUSIVE
        if isinstance(result, RankConflict):
            witness = rank_conflict_to_dict(result)
            _save_evidence(args, witness)
            _emit(args, {"check": check, "result": "refuted", "witness": witness},
                  f"ranked: no (element {P.labels[result.element]} reached by paths of lengths "
                  f"{len(result.path_a) - 1} and {len(result.path_b) - 1})")
            return EXIT_REFUTED
        sizes = np.bincount(result).tolist()
        _emit(args, {"check": check, "result": "holds", "rank_sizes": sizes},
              f"ranked: yes, rank sizes {tuple(sizes)}")
        return EXIT_OK
    if not P.is_ranked:
        try:
            conflict = is_ranked(P)
        except ShapeError:
            conflict = None
        witness = rank_conflict_to_dict(conflict) if isinstance(conflict, RankConflict) else None
        _emit(args, {"check": check, "result": "inconclusive", "reason": "poset is not ranked",
                     "witness": witness}, f"{check}: poset is not ranked")
        return EXIT_INCONCLUSIVE
    if check == "log-concave":
        levels = [Fraction(x) for x in (level_weights(P, nu) if nu is not None else P.rank_sizes)]
        ok = is_log_concave(P, nu)
        _emit(args, {"check": check, "result": "holds" if ok else "refuted",
                     "level_weights": [[x.numerator, x.denominator] for x in levels]},
              f"log-concave: {'yes' if ok else 'no'} ({', '.join(str(x) for x in levels)})")
        return EXIT_OK if ok else EXIT_REFUTED
    if check == "flow":
        result = normalized_flow(P, nu)
        if isinstance(result, FlowCertificate):
            if not verify_flow(P, nu, result):
                raise AbsOrderError("emitted certificate failed verification")
            _save_evidence(args, result.to_dict())
            edges = sum(len(layer.values) for layer in result.layers)
            _emit(args, {"check": check, "result": "holds", "edges": edges},
                  f"flow: certificate found ({edges} edges)")
            return EXIT_OK
        _save_evidence(args, result.to_dict())
        _emit(args, {"check": check, "result": "refuted", "witness": result.to_dict()},
              f"flow: none; Hall violation at rank {result.rank}: |S| = {len(result.subset)}, "
              f"{result.lhs} > {result.rhs}")
        return EXIT_REFUTED
    report = sperner_report(P, nu)
    doc = {"check": check, "result": {SpernerStatus.POSITIVE: "holds", SpernerStatus.NEGATIVE: "refuted",
                                      SpernerStatus.INCONCLUSIVE: "inconclusive"}[report.status]}
    doc.update(report.to_dict())
    text = f"sperner: {report.status.value}, rank sizes {report.rank_sizes}"
    if report.status is SpernerStatus.POSITIVE:
        _save_evidence(args, report.certificate.to_dict())
        text += " (normalized flow certificate)"
        code = EXIT_OK
    elif report.status is SpernerStatus.NEGATIVE:
        anti = report.antichain
        if len(anti.elements) > max(report.rank_sizes):
            _save_evidence(args, anti.to_dict(P))
            text += f"; antichain of size {len(anti.elements)}: " + " ".join(P.labels[x] for x in anti.elements)
        else:
            fam = next(f for f in report.k_families if f["max_family"] > f["rank_bound"])
            _save_evidence(args, {"kind": "k-family", **fam})
            text += f"; {fam['k']}-family of size {fam['max_family']} > {fam['rank_bound']}"
        code = EXIT_REFUTED
    else:
        text += "; no flow and no violating family found"
        code = EXIT_INCONCLUSIVE
    _emit(args, doc, text)
    return code


def _save_evidence(args, doc: dict) -> None:
    if args.cert_out:
        _write_json(args.cert_out, doc)


# -- claw ------------------------------------------------------------------------

def cmd_claw(args) -> int:
    G = make_from_spec(args.spec)
    if args.action == "embed":
        lab = claw_embedding(G)
        sizes = [len(b) + 1 for b in lab.blocks if len(b)]
        doc = {"group": G.name, "claws": sizes,
               "blocks": [[G.label(t) for t in b] for b in lab.blocks]}
        _emit(args, doc, f"{G.name}: abs order coarsens " + " x ".join(f"C{s}" for s in sizes))
        return EXIT_OK
    found = claw_partition_search(G)
    if found is None:
        _emit(args, {"group": G.name, "partition": None}, f"{G.name}: no claw partition")
        return EXIT_REFUTED
    doc = {"group": G.name, "sizes": list(found.sizes),
           "partition": [[G.label(t) for t in b] for b in found.blocks]}
    _emit(args, doc, f"{G.name}: claw partition with block sizes {found.sizes}")
    return EXIT_OK


# -- reproduce ---------------------------------------------------------------------

def cmd_reproduce(args) -> int:
    claims = list(ClaimId) if args.claim == "all" else [ClaimId(args.claim)]
    reports = [run_claim(c, args.out_dir, big=args.big, n=args.n) for c in claims]
    if args.json:
        doc = reports[0].to_dict() if len(reports) == 1 else {"claims": [r.to_dict() for r in reports]}
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print("\n".join(r.format_text() for r in reports))
    if any(r.error_type == ResourceError.__name__ for r in reports):
        return EXIT_RESOURCE
    return EXIT_OK if all(r.passed for r in reports) else EXIT_REFUTED


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="absorder", description="Absolute orders on reflection groups: "
                     "construction, Sperner-type checks and exact flow certificates.",
                     epilog=f"group spec grammar: {GRAMMAR}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    group = sub.add_parser("group", help="group summaries")
    gsub = group.add_subparsers(dest="action", required=True, parser_class=_Parser)
    info = gsub.add_parser("info", help="order, reflection count, exponents")
    info.add_argument("spec", help=GRAMMAR)
    info.add_argument("--json", action="store_true")
    info.set_defaults(func=cmd_group_info)

    order = sub.add_parser("order", help="build prefix, codimension or absolute orders")
    osub = order.add_subparsers(dest="action", required=True, parser_class=_Parser)
    build = osub.add_parser("build")
    build.add_argument("--group", required=True, help=GRAMMAR)
    build.add_argument("--kind", choices=("prefix", "codim", "abs"), default="abs")
    build.add_argument("--out", required=True)
    build.add_argument("--json", action="store_true")
    build.set_defaults(func=cmd_order_build)

    check = sub.add_parser("check", help="check a property of a poset file")
    check.add_argument("poset")
    check.add_argument("--check", choices=("flow", "sperner", "ranked", "log-concave"), default="flow")
    check.add_argument("--weights", default="unit",
                       help="unit, poset (weights stored in the poset file) or a weights JSON file")
    check.add_argument("--cert-out", help="write the certificate or witness here")
    check.add_argument("--verify", metavar="FILE", help="re-verify a certificate or witness instead")
    check.add_argument("--json", action="store_true")
    check.set_defaults(func=cmd_check)

    quot = sub.add_parser("quotient", help="quotient of an order by conjugation")
    quot.add_argument("--group", required=True, help=GRAMMAR)
    quot.add_argument("--kind", choices=("prefix", "codim", "abs"), default="abs")
    quot.add_argument("--out", required=True)
    quot.add_argument("--orbits-out")
    quot.add_argument("--json", action="store_true")
    quot.set_defaults(func=cmd_quotient)

    claw = sub.add_parser("claw", help="claw products: embed for G(m,1,n), search for G(2,2,n)")
    claw.add_argument("action", choices=("embed", "search"))
    claw.add_argument("spec", help=GRAMMAR)
    claw.add_argument("--json", action="store_true")
    claw.set_defaults(func=cmd_claw)

    rep = sub.add_parser("reproduce", help="run a claim end to end")
    rep.add_argument("claim", choices=[c.value for c in ClaimId] + ["all"])
    rep.add_argument("--big", action="store_true", help="include H4, E6 and D6")
    rep.add_argument("--n", type=int, nargs="+", help="ranks for type-d-conjecture")
    rep.add_argument("--out-dir", default="absorder-out")
    rep.add_argument("--json", action="store_true")
    rep.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"absorder: usage error: {exc}", file=sys.stderr)
        if "grammar" not in str(exc):
            print(f"group spec grammar: {GRAMMAR}", file=sys.stderr)
        return EXIT_USAGE
    except SchemaError as exc:
        print(f"absorder: schema error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NotSupportedError as exc:
        print(f"absorder: not supported: {exc}", file=sys.stderr)
        return EXIT_UNAVAILABLE
    except ResourceError as exc:
        print(f"absorder: resource budget exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except FileNotFoundError as exc:
        print(f"absorder: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AbsOrderError as exc:
        print(f"absorder: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_REFUTED


if __name__ == "__main__":
    sys.exit(main())
