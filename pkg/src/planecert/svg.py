"""Deterministic SVG pictures of crowns, region families and arc diagrams.

Coordinates are the only floating-point output of the package and are
display-only; everything is emitted in a fixed order with fixed precision.
"""

from __future__ import annotations

import math
from typing import Iterable, List, Sequence, Tuple

from .circle import Arc, CircleSet, psi
from .paradox import ContractivePair, ParadoxFamily
from .regions import HalfPlane, RegionSet, _clip
from .scalar import to_float
from .witness import SqueezeCertificate

__all__ = ["squeeze_svg", "paradox_svg", "contract_svg"]

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]


def _fmt(x: float) -> str:
    return f"{x:.4f}".rstrip("0").rstrip(".") or "0"


def _header(size: int, view: Tuple[float, float, float, float]) -> List[str]:
    x, y, w, h = view
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="{_fmt(x)} {_fmt(y)} {_fmt(w)} {_fmt(h)}">',
    ]


def _clipped(region: RegionSet, half: float) -> Iterable[List[Tuple[float, float]]]:
    from fractions import Fraction

    R = Fraction(half).limit_denominator(1000)
    box = [
        HalfPlane(Fraction(1), Fraction(0), R),
        HalfPlane(Fraction(-1), Fraction(0), R),
        HalfPlane(Fraction(0), Fraction(1), R),
        HalfPlane(Fraction(0), Fraction(-1), R),
    ]
    for poly in region.polygons:
        verts = list(poly.vertices)
        for h in box:
            verts = _clip(verts, h)
            if not verts:
                break
        if len(verts) >= 3:
            yield [(to_float(x), -to_float(y)) for x, y in verts]


def _polygons(region: RegionSet, half: float, color: str, opacity: str) -> List[str]:
    out = []
    for verts in _clipped(region, half):
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in verts)
        out.append(f'<polygon points="{pts}" fill="{color}" fill-opacity="{opacity}" stroke="{color}" stroke-width="0.01"/>')
    return out


def squeeze_svg(cert: SqueezeCertificate, pair: Tuple[str, str] = None, size: int = 600) -> str:
    """Hull C, the sets gamma g C and the sets gamma g gamma h C.

    With ``pair`` only that (g, h) is drawn; otherwise every pair is drawn.
    """
    hull = cert.hull()
    half = 1.6 * math.sqrt(float(cert.hull_r2_sq)) * max(1.0, _frame_norm(cert))
    lines = _header(size, (-half, -half, 2 * half, 2 * half))
    lines.append('<g id="C">')
    lines += _polygons(hull, half, _PALETTE[0], "0.35")
    lines.append("</g>")
    elems = cert.subset.elements
    chosen = [(g, h) for g, _ in elems for h, _ in elems if pair is None or (g, h) == tuple(pair)]
    mats = dict(elems)
    lines.append('<g id="gamma-g-C">')
    for g in sorted({g for g, _ in chosen}, key=[w for w, _ in elems].index):
        lines += _polygons(hull.image(cert.gamma @ mats[g]), half, _PALETTE[1], "0.25")
    lines.append("</g>")
    lines.append('<g id="gamma-g-gamma-h-C">')
    for g, h in chosen:
        lines += _polygons(hull.image(cert.gamma @ mats[g] @ cert.gamma @ mats[h]), half, _PALETTE[2], "0.2")
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _frame_norm(cert: SqueezeCertificate) -> float:
    u = cert.frame.inverse()
    return math.sqrt(sum(to_float(v) ** 2 for v in (u.a, u.b, u.c, u.d)))


def _arc_path(arc: Arc, radius: float) -> str:
    a0 = math.pi * to_float(psi(arc.start))
    a1 = math.pi * to_float(psi(arc.end))
    if a1 <= a0:
        a1 += 2 * math.pi
    large = 1 if a1 - a0 > math.pi else 0
    x0, y0 = radius * math.cos(a0), -radius * math.sin(a0)
    x1, y1 = radius * math.cos(a1), -radius * math.sin(a1)
    return f"M {_fmt(x0)} {_fmt(y0)} A {_fmt(radius)} {_fmt(radius)} 0 {large} 0 {_fmt(x1)} {_fmt(y1)}"


def _set_arcs(s: CircleSet) -> List[Arc]:
    if s.is_full():
        return []
    return [Arc(a, b) for a, b in s.components() if a is not None]


def paradox_svg(fam: ParadoxFamily, size: int = 600) -> str:
    """RP^1 drawn as a circle at angle ``pi * psi``: arcs U_i inside, images outside."""
    lines = _header(size, (-1.6, -1.6, 3.2, 3.2))
    lines.append('<circle cx="0" cy="0" r="1" fill="none" stroke="#444" stroke-width="0.005"/>')
    for i, it in enumerate(fam.items):
        color = _PALETTE[i % len(_PALETTE)]
        r_in = 0.9 - 0.06 * i
        lines.append(f'<g id="U{i + 1}">')
        lines.append(f'<path d="{_arc_path(it.U, r_in)}" fill="none" stroke="{color}" stroke-width="0.02"/>')
        lines.append("</g>")
        lines.append(f'<g id="tU{i + 1}">')
        for arc in _set_arcs(it.image()):
            lines.append(f'<path d="{_arc_path(arc, 1.1 + 0.04 * i)}" fill="none" stroke="{color}" stroke-width="0.04"/>')
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def contract_svg(cp: ContractivePair, size: int = 400) -> str:
    lines = _header(size, (-1.4, -1.4, 2.8, 2.8))
    lines.append('<circle cx="0" cy="0" r="1" fill="none" stroke="#444" stroke-width="0.005"/>')
    lines.append(f'<path d="{_arc_path(cp.U, 1.0)}" fill="none" stroke="{_PALETTE[0]}" stroke-width="0.03"/>')
    for arc in _set_arcs(cp.U.to_set().image(cp.t)):
        lines.append(f'<path d="{_arc_path(arc, 1.1)}" fill="none" stroke="{_PALETTE[1]}" stroke-width="0.03"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
