"""Command-line front end.

Every subcommand reads a JSON input file, prints a JSON report on stdout and
exits 0 when everything verifies, 1 when a verification fails and 2 on bad
input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional

from . import serialize as ser
from .circle import CircleSet
from .crossed import (
    Coefficient,
    FormalElement,
    bump,
    elementary,
    isometry_pair,
    nilpotent_factorization,
    product,
    adjoint,
    scaling_check,
)
from .errors import CertError, NonHyperbolic, NotUnimodular, ParseError, SameAxis, DegenerateCrown, OriginInRegion
from .oracle import GridSpec, evaluate, falsify_empty, realize_numeric
from .paradox import ParadoxFamily, contractive_pair, paradoxical_family, verify_paradoxical_family
from .projective import MoebiusClass, classify, fixed_points
from .regions import Cone, Crown, RegionSet, enclosing_crown
from .scalar import precision, to_rational
from .svg import contract_svg, paradox_svg, squeeze_svg
from .witness import (
    FiniteSubset,
    SqueezeCertificate,
    evaluate_word,
    squeeze_witness,
    verify_squeeze,
)

INPUT_ERRORS = (ParseError, NotUnimodular, NonHyperbolic, SameAxis, DegenerateCrown, OriginInRegion)


class InputError(Exception):
    pass


def _read(path: str) -> Dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc


def _field(doc: Dict, key: str):
    if key not in doc:
        raise InputError(f"missing field {key!r}")
    return doc[key]


def _generators(doc: Dict):
    gens = _field(doc, "generators")
    if not isinstance(gens, dict) or not gens:
        raise InputError("generators must be a non-empty object")
    return {name: ser.dec_mat(m) for name, m in sorted(gens.items())}


def _write(path: Optional[str], text: str) -> None:
    if path:
        Path(path).write_text(text)


def _emit(report: Dict) -> None:
    print(json.dumps(report, sort_keys=True, indent=2))


# -- subcommands --------------------------------------------------------------


def cmd_classify(args) -> int:
    doc = _read(args.input)
    m = ser.dec_mat(doc["matrix"] if isinstance(doc, dict) else doc)
    cls = classify(m)
    report = {"schema_version": ser.SCHEMA_VERSION, "kind": "classification", "class": cls.value}
    if cls is MoebiusClass.HYPERBOLIC:
        fp = fixed_points(m)
        report.update(
            attracting=ser.enc_point(fp.attracting),
            repelling=ser.enc_point(fp.repelling),
            eigenvalue=ser.enc_scalar(fp.eigenvalue),
        )
    _write(args.out, ser.dumps(report))
    _emit(report)
    return 0


def _squeeze_oracle(cert: SqueezeCertificate, args):
    S = cert.subset.elements
    claims = [[cert.gamma @ g @ cert.gamma @ h, cert.gamma @ g] for _, g in S for _, h in S]
    labels = [(wg, wh) for wg, _ in S for wh, _ in S]
    rep = falsify_empty(claims, cert.crown, GridSpec(args.grid, args.seed))
    hits = [
        {"g": labels[ci][0], "h": labels[ci][1], "point": ser.enc_point(p)} for ci, p in rep.counterexamples
    ]
    return rep, hits


def cmd_squeeze(args) -> int:
    doc = _read(args.input)
    gens = _generators(doc)
    F = FiniteSubset.from_words(gens, _field(doc, "subset"))
    if "crown" in doc:
        C = ser.dec_crown(doc["crown"])
    elif "region" in doc:
        C = enclosing_crown(ser.dec_region(doc["region"]))
    else:
        raise InputError("need a crown or a region")
    eta = evaluate_word(doc["eta"], gens) if doc.get("eta") else None
    delta = evaluate_word(doc["delta"], gens) if doc.get("delta") else None
    cert = squeeze_witness(
        F,
        C,
        eta=eta,
        delta=delta,
        generators=None if delta is not None else gens,
        hull_sides=args.hull_sides,
        n_cap=args.cap,
    )
    check = verify_squeeze(cert)
    rep, hits = _squeeze_oracle(cert, args)
    _write(args.out, ser.dumps(cert))
    if args.svg:
        _write(args.svg, squeeze_svg(cert, pair=None if len(cert.subset) <= 3 else ("e", "e")))
    ok = check["ok"] and not hits
    _emit(
        {
            "schema_version": ser.SCHEMA_VERSION,
            "kind": "squeeze_report",
            "verified": ok,
            "n": cert.n,
            "margin": ser.enc_scalar(cert.margin),
            "problems": check["problems"],
            "oracle": {"checked": rep.checked, "density": rep.density, "seed": rep.seed, "counterexamples": hits},
        }
    )
    return 0 if ok else 1


def _family_from(doc: Dict, args) -> ParadoxFamily:
    g1, g2 = ser.dec_mat(_field(doc, "g1")), ser.dec_mat(_field(doc, "g2"))
    return paradoxical_family(g1, g2, int(doc.get("n", 2)), int(doc.get("m", 2)), power_cap=args.cap)


def cmd_paradox(args) -> int:
    fam = _family_from(_read(args.input), args)
    cert = verify_paradoxical_family(fam)
    _write(args.out, ser.dumps(fam))
    if args.svg:
        _write(args.svg, paradox_svg(fam))
    body = ser.enc_paradox_cert(cert)
    body["family"] = ser.enc_family(fam)
    _emit(body)
    return 0 if cert.ok else 1


def _pair_from(doc: Dict, args):
    h = ser.dec_mat(_field(doc, "h"))
    U = ser.dec_arc(doc["U"]) if doc.get("U") else None
    return contractive_pair(h, to_rational(doc.get("shrink", "1/2")), power_cap=args.cap, U=U)


def cmd_contract(args) -> int:
    doc = _read(args.input)
    cp = _pair_from(doc, args)
    _write(args.out, ser.dumps(cp))
    if args.svg:
        _write(args.svg, contract_svg(cp))
    ok = cp.verify()
    body = ser.enc_contractive(cp)
    body["verified"] = ok
    _emit(body)
    return 0 if ok else 1


def cmd_nilpotent(args) -> int:
    doc = _read(args.input)
    if not args.cert:
        raise InputError("nilpotent needs --cert")
    cert = ser.loads(Path(args.cert).read_text())
    if not isinstance(cert, SqueezeCertificate):
        raise InputError("--cert must hold a squeeze certificate")
    gens = _generators(doc)
    z = FormalElement()
    for i, term in enumerate(doc.get("terms", [])):
        g = evaluate_word(term["word"], gens)
        supp = ser.dec_region(term["support"])
        leaf = bump(f"z{i}", supp, supp)
        z = z + FormalElement.coeff_at(Coefficient.of_leaf(leaf), g, term["word"])
    A, B, proof = nilpotent_factorization(z, cert)
    numeric = {}
    if not proof.get("trivial"):
        for name in ("A_cube", "B_cube"):
            table = realize_numeric(proof[name], GridSpec(args.grid, args.seed, cert.crown))
            numeric[name] = {"samples": len(table.points), "all_zero": table.all_zero()}
    ok = proof["A_cube_empty"] and proof["B_cube_empty"] and all(v["all_zero"] for v in numeric.values())
    report = {
        "schema_version": ser.SCHEMA_VERSION,
        "kind": "nilpotent_report",
        "verified": ok,
        "A": ser.enc_formal(A),
        "B": ser.enc_formal(B),
        "A_cube_empty": proof["A_cube_empty"],
        "B_cube_empty": proof["B_cube_empty"],
        "numeric": numeric,
    }
    _write(args.out, ser.dumps(report))
    _emit(report)
    return 0 if ok else 1


def cmd_scaling(args) -> int:
    doc = _read(args.input)
    cp = _pair_from(doc, args)
    f = bump("f", Cone.over(cp.U), Cone(cp.U.closure().image(cp.t)))
    x = elementary(cp.t, Coefficient.of_leaf(f))
    res = scaling_check(x)
    xsx, xxs = product(adjoint(x), x), product(x, adjoint(x))
    grid = GridSpec(args.grid, args.seed, CircleSet.whole())
    lhs = realize_numeric(product(xsx, xxs), grid).values.get("e")
    rhs = realize_numeric(xxs, grid).values.get("e")
    exact = lhs is not None and rhs is not None and bool((lhs == rhs).all())
    gap = None
    if res.witness_point is not None:
        gap = abs(evaluate(xsx, res.witness_point).get("e", 0.0) - evaluate(xxs, res.witness_point).get("e", 0.0))
    ok = res.is_scaling and exact and gap is not None and gap >= 0.5
    report = {
        "schema_version": ser.SCHEMA_VERSION,
        "kind": "scaling_report",
        "verified": ok,
        "is_scaling": res.is_scaling,
        "plateau_condition": res.plateau_condition,
        "proper_condition": res.proper_condition,
        "witness_point": ser.enc_point(res.witness_point) if res.witness_point is not None else None,
        "numeric_identity_exact": exact,
        "numeric_gap_at_witness": gap,
        "pair": ser.enc_contractive(cp),
    }
    _write(args.out, ser.dumps(report))
    _emit(report)
    return 0 if ok else 1


def cmd_isometry(args) -> int:
    fam = _family_from(_read(args.input), args)
    x, y, proof = isometry_pair(fam)
    table = realize_numeric(proof["xstar_y"], GridSpec(args.grid, args.seed, CircleSet.whole()))
    ok = (
        proof["xstar_x_is_one"]
        and proof["ystar_y_is_one"]
        and proof["xstar_y_pruned_terms"] == 0
        and proof["xx_star_witness_nonempty"]
        and table.max_abs() <= 1e-12
    )
    report = {
        "schema_version": ser.SCHEMA_VERSION,
        "kind": "isometry_report",
        "verified": ok,
        "xstar_x_is_one": proof["xstar_x_is_one"],
        "ystar_y_is_one": proof["ystar_y_is_one"],
        "xstar_y_terms": proof["xstar_y_terms"],
        "xstar_y_nonempty_terms": proof["xstar_y_pruned_terms"],
        "xstar_y_numeric_max": table.max_abs(),
        "xx_star_witness": ser.enc_region(proof["xx_star_witness"]),
        "x": ser.enc_formal(x),
        "y": ser.enc_formal(y),
    }
    _write(args.out, ser.dumps(report))
    _emit(report)
    return 0 if ok else 1


def cmd_falsify(args) -> int:
    obj = ser.loads(Path(args.input).read_text()) if Path(args.input).exists() else None
    if obj is None:
        raise InputError(f"cannot read {args.input}")
    if isinstance(obj, SqueezeCertificate):
        check = verify_squeeze(obj)
        rep, hits = _squeeze_oracle(obj, args)
        ok = check["ok"] and not hits
        _emit(
            {
                "schema_version": ser.SCHEMA_VERSION,
                "kind": "falsify_report",
                "verified": ok,
                "exact_problems": check["problems"],
                "oracle": {"checked": rep.checked, "density": rep.density, "seed": rep.seed, "counterexamples": hits},
            }
        )
        return 0 if ok else 1
    if isinstance(obj, ParadoxFamily):
        cert = verify_paradoxical_family(obj)
        body = ser.enc_paradox_cert(cert)
        body["kind"] = "falsify_report"
        body["verified"] = cert.ok
        _emit(body)
        return 0 if cert.ok else 1
    raise InputError("falsify accepts squeeze certificates and paradox families")


# -- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="planecert", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "classify": (cmd_classify, "classify a matrix and report fixed points"),
        "squeeze": (cmd_squeeze, "build and check a squeezing certificate"),
        "paradox": (cmd_paradox, "build and verify a paradoxical family"),
        "contract": (cmd_contract, "build a contractive pair"),
        "nilpotent": (cmd_nilpotent, "factor an element into two nilpotents"),
        "scaling": (cmd_scaling, "check the scaling element of a contractive pair"),
        "isometry": (cmd_isometry, "orthogonal isometries from a paradoxical family"),
        "falsify": (cmd_falsify, "re-verify a certificate and run the sampling oracle"),
    }
    for name, (fn, help_text) in commands.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", help="JSON input file")
        p.add_argument("--grid", type=int, default=100, help="oracle grid density per dimension (default 100)")
        p.add_argument("--precision", type=int, default=4096, help="interval precision cap in bits (default 4096)")
        p.add_argument("--hull-sides", type=int, default=8, help="sides of the crown hull (default 8)")
        p.add_argument("--cap", type=int, default=64, help="search cap for powers (default 64)")
        p.add_argument("--out", help="write the main JSON artifact here")
        p.add_argument("--svg", help="write an SVG picture here")
        p.add_argument("--seed", type=int, default=0, help="oracle jitter seed (default 0)")
        p.add_argument("--cert", help="squeeze certificate (nilpotent only)")
        p.set_defaults(func=fn)
    return parser


def _error(kind: str, exc: BaseException) -> int:
    _emit({"schema_version": ser.SCHEMA_VERSION, "kind": "error", "error": kind, "message": str(exc)})
    return 2 if kind != "verification" else 1


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.hull_sides < 8 or args.hull_sides % 2 or args.grid < 1 or args.cap < 0:
        return _error("InputError", ValueError("need --hull-sides even >= 8, --grid >= 1, --cap >= 0"))
    try:
        with precision(cap_bits=args.precision):
            return args.func(args)
    except INPUT_ERRORS + (InputError, KeyError, TypeError, ValueError) as exc:
        return _error(type(exc).__name__, exc)
    except CertError as exc:
        _emit({"schema_version": ser.SCHEMA_VERSION, "kind": "error", "error": type(exc).__name__, "message": str(exc)})
        return 1


if __name__ == "__main__":
    sys.exit(main())
