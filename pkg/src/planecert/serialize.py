"""Exact JSON encoding of matrices, regions and certificates.

Rationals are written as ``"p/q"`` strings (integers without a slash);
quadratic scalars as ``{"a": .., "b": .., "d": ..}`` meaning ``a + b sqrt(d)``.
Documents carry ``schema_version`` and ``kind``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Dict, List

from .circle import Arc, CircleSet
from .crossed import Coefficient, FormalElement
from .errors import ParseError
from .paradox import ContractivePair, ParadoxCertificate, ParadoxFamily, ParadoxItem
from .projective import Mat2, ProjPoint
from .regions import Cone, ConvexPolygon, Crown, RegionSet
from .scalar import Quad, to_rational
from .witness import FiniteSubset, SqueezeCertificate

__all__ = ["SCHEMA_VERSION", "encode", "decode", "dumps", "loads"]

SCHEMA_VERSION = 1


def enc_scalar(x) -> Any:
    if isinstance(x, Quad):
        return {"a": str(x.a), "b": str(x.b), "d": str(x.d)}
    return str(Fraction(x))


def dec_scalar(v) -> Any:
    if isinstance(v, dict):
        return Quad.make(to_rational(v["a"]), to_rational(v["b"]), to_rational(v["d"]))
    if isinstance(v, (int, str)) and not isinstance(v, bool):
        return to_rational(v)
    raise ParseError(f"expected a rational string, got {v!r}")


def enc_mat(m: Mat2) -> List:
    return [[enc_scalar(m.a), enc_scalar(m.b)], [enc_scalar(m.c), enc_scalar(m.d)]]


def dec_mat(v) -> Mat2:
    try:
        (a, b), (c, d) = v
    except (TypeError, ValueError) as exc:
        raise ParseError(f"matrix must be [[a, b], [c, d]], got {v!r}") from exc
    return Mat2(dec_scalar(a), dec_scalar(b), dec_scalar(c), dec_scalar(d))


def enc_point(p) -> List:
    if isinstance(p, ProjPoint):
        return [enc_scalar(p.x), enc_scalar(p.y)]
    return [enc_scalar(p[0]), enc_scalar(p[1])]


def dec_proj(v) -> ProjPoint:
    return ProjPoint(dec_scalar(v[0]), dec_scalar(v[1]))


def dec_point(v):
    return (dec_scalar(v[0]), dec_scalar(v[1]))


def enc_arc(a: Arc) -> Dict:
    return {"start": enc_point(a.start), "end": enc_point(a.end), "witness": enc_point(a.witness)}


def dec_arc(v) -> Arc:
    return Arc(dec_proj(v["start"]), dec_proj(v["end"]), dec_proj(v["witness"]))


def enc_circle(c: CircleSet) -> Dict:
    return {
        "points": [enc_point(p) for p in c.points],
        "point_in": list(c.point_in),
        "gap_in": list(c.gap_in),
        "full": c.full,
    }


def dec_circle(v) -> CircleSet:
    return CircleSet(
        tuple(dec_proj(p) for p in v["points"]),
        tuple(bool(b) for b in v["point_in"]),
        tuple(bool(b) for b in v["gap_in"]),
        bool(v["full"]),
    )


def enc_polygon(p: ConvexPolygon) -> List:
    return [enc_point(v) for v in p.vertices]


def dec_polygon(v) -> ConvexPolygon:
    return ConvexPolygon(tuple(dec_point(p) for p in v))


def enc_region(r) -> Any:
    if r is None:
        return None
    if isinstance(r, Cone):
        return {"cone": enc_circle(r.base)}
    return {"polygons": [enc_polygon(p) for p in r.polygons]}


def dec_region(v):
    if v is None:
        return None
    if "cone" in v:
        return Cone(dec_circle(v["cone"]))
    return RegionSet(tuple(dec_polygon(p) for p in v["polygons"]))


def enc_crown(c: Crown) -> Dict:
    return {"r1_sq": enc_scalar(c.r1_sq), "r2_sq": enc_scalar(c.r2_sq), "frame": enc_mat(c.frame)}


def dec_crown(v) -> Crown:
    frame = dec_mat(v["frame"]) if "frame" in v else Mat2(1, 0, 0, 1)
    return Crown(dec_scalar(v["r1_sq"]), dec_scalar(v["r2_sq"]), frame)


def enc_subset(F: FiniteSubset) -> List:
    return [{"word": w, "matrix": enc_mat(m)} for w, m in F.elements]


def dec_subset(v) -> FiniteSubset:
    return FiniteSubset(tuple((e["word"], dec_mat(e["matrix"])) for e in v))


def _doc(kind: str, body: Dict) -> Dict:
    return {"schema_version": SCHEMA_VERSION, "kind": kind, **body}


def enc_squeeze(c: SqueezeCertificate) -> Dict:
    return _doc(
        "squeeze_certificate",
        {
            "gamma": enc_mat(c.gamma),
            "base": enc_mat(c.base),
            "n": c.n,
            "lambda_sq": enc_scalar(c.lambda_sq),
            "M": enc_scalar(c.M),
            "min_corner_sq": enc_scalar(c.min_corner_sq),
            "margin": enc_scalar(c.margin),
            "frame": enc_mat(c.frame),
            "r1_sq": enc_scalar(c.r1_sq),
            "r2_sq": enc_scalar(c.r2_sq),
            "hull_sides": c.hull_sides,
            "hull_r1_sq": enc_scalar(c.hull_r1_sq),
            "hull_r2_sq": enc_scalar(c.hull_r2_sq),
            "subset": enc_subset(c.subset),
            "pair_empty": [{"g": g, "h": h, "empty": f} for g, h, f in c.pair_empty],
            "transverse_n": c.transverse_n,
            "eta_word": c.eta_word,
            "delta_word": c.delta_word,
        },
    )


def dec_squeeze(v) -> SqueezeCertificate:
    return SqueezeCertificate(
        gamma=dec_mat(v["gamma"]),
        base=dec_mat(v["base"]),
        n=int(v["n"]),
        lambda_sq=dec_scalar(v["lambda_sq"]),
        M=dec_scalar(v["M"]),
        min_corner_sq=dec_scalar(v["min_corner_sq"]),
        margin=dec_scalar(v["margin"]),
        frame=dec_mat(v["frame"]),
        r1_sq=dec_scalar(v["r1_sq"]),
        r2_sq=dec_scalar(v["r2_sq"]),
        hull_sides=int(v["hull_sides"]),
        hull_r1_sq=dec_scalar(v["hull_r1_sq"]),
        hull_r2_sq=dec_scalar(v["hull_r2_sq"]),
        subset=dec_subset(v["subset"]),
        pair_empty=tuple((p["g"], p["h"], bool(p["empty"])) for p in v["pair_empty"]),
        transverse_n=int(v.get("transverse_n", 0)),
        eta_word=v.get("eta_word"),
        delta_word=v.get("delta_word"),
    )


def enc_contractive(c: ContractivePair) -> Dict:
    return _doc(
        "contractive_pair",
        {"U": enc_arc(c.U), "t": enc_mat(c.t), "power": c.power, "margin": enc_scalar(c.margin), "chart": c.chart},
    )


def dec_contractive(v) -> ContractivePair:
    return ContractivePair(dec_arc(v["U"]), dec_mat(v["t"]), int(v["power"]), dec_scalar(v["margin"]), v["chart"])


def enc_family(f: ParadoxFamily) -> Dict:
    return _doc(
        "paradox_family",
        {
            "n": f.n,
            "m": f.m,
            "power": f.power,
            "items": [{"t": enc_mat(it.t), "U": enc_arc(it.U), "label": it.label} for it in f.items],
        },
    )


def dec_family(v) -> ParadoxFamily:
    items = tuple(ParadoxItem(dec_mat(i["t"]), dec_arc(i["U"]), i.get("label", "")) for i in v["items"])
    return ParadoxFamily(int(v["n"]), int(v["m"]), items, int(v.get("power", 0)))


def enc_paradox_cert(c: ParadoxCertificate) -> Dict:
    return _doc(
        "paradox_certificate",
        {
            "ok": c.ok,
            "conditions": dict(c.conditions),
            "margins": {k: enc_scalar(m) for k, m in c.margins.items()},
            "failure": c.failure,
            "witness": enc_point(c.witness) if c.witness is not None else None,
            "lift_ok": c.lift_ok,
        },
    )


def dec_paradox_cert(v) -> ParadoxCertificate:
    return ParadoxCertificate(
        bool(v["ok"]),
        {k: bool(b) for k, b in v["conditions"].items()},
        {k: dec_scalar(m) for k, m in v["margins"].items()},
        v.get("failure"),
        dec_proj(v["witness"]) if v.get("witness") is not None else None,
        bool(v.get("lift_ok", False)),
    )


def enc_formal(E: FormalElement) -> Dict:
    return _doc(
        "formal_element",
        {
            "terms": [
                {
                    "word": t.word,
                    "matrix": enc_mat(g),
                    "support": enc_region(t.coeff.support),
                    "plateau": enc_region(t.coeff.plateau),
                    "tag": t.coeff.tag,
                }
                for g, t in E.terms
            ]
        },
    )


_ENCODERS = [
    (SqueezeCertificate, enc_squeeze),
    (ContractivePair, enc_contractive),
    (ParadoxFamily, enc_family),
    (ParadoxCertificate, enc_paradox_cert),
    (FormalElement, enc_formal),
    (Mat2, lambda m: _doc("matrix", {"matrix": enc_mat(m)})),
    (Crown, lambda c: _doc("crown", enc_crown(c))),
    (RegionSet, lambda r: _doc("region", enc_region(r))),
    (Arc, lambda a: _doc("arc", enc_arc(a))),
]

_DECODERS = {
    "squeeze_certificate": dec_squeeze,
    "contractive_pair": dec_contractive,
    "paradox_family": dec_family,
    "paradox_certificate": dec_paradox_cert,
    "matrix": lambda v: dec_mat(v["matrix"]),
    "crown": dec_crown,
    "region": dec_region,
    "arc": dec_arc,
}


def encode(obj) -> Dict:
    for cls, fn in _ENCODERS:
        if isinstance(obj, cls):
            return fn(obj)
    raise TypeError(f"no JSON encoding for {type(obj).__name__}")


def decode(doc: Dict):
    kind = doc.get("kind")
    if kind not in _DECODERS:
        raise ParseError(f"unknown document kind {kind!r}")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {doc.get('schema_version')!r}")
    try:
        return _DECODERS[kind](doc)
    except (KeyError, TypeError, IndexError) as exc:
        raise ParseError(f"malformed {kind} document: {exc}") from exc


def dumps(obj) -> str:
    data = obj if isinstance(obj, dict) else encode(obj)
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return decode(doc)
