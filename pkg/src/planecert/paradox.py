"""Contractive pairs and paradoxical families on the projective line.

Neighbourhoods are arcs in the pseudo-angle ``psi`` with rational endpoints,
so every containment below is an exact comparison of breakpoints.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .circle import Arc, CircleSet, point_at_psi, psi
from .errors import CapExceeded, NonHyperbolic, SameAxis
from .projective import (
    INFINITY,
    ZERO_SLOPE,
    Mat2,
    MoebiusClass,
    ProjPoint,
    act_proj,
    classify,
    fixed_points,
    same_axis,
    same_point,
)
from .regions import Cone, arc_checks
from .scalar import Quad, compare, lower, rational_between, upper

__all__ = [
    "ContractivePair",
    "contractive_pair",
    "ParadoxItem",
    "ParadoxFamily",
    "ParadoxCertificate",
    "paradoxical_family",
    "verify_paradoxical_family",
    "psi_arc",
    "psi_distance",
    "shrink_arc",
]


def psi_arc(lo, hi) -> Arc:
    """Open arc of psi values ``(lo, hi)`` taken mod 2, with ``0 < hi - lo < 2``."""
    lo, hi = Fraction(lo), Fraction(hi)
    if not 0 < hi - lo < 2:
        raise ValueError("psi arc must have length in (0, 2)")
    return Arc(point_at_psi(lo), point_at_psi(hi), point_at_psi((lo + hi) / 2))


def psi_distance(p: ProjPoint, q: ProjPoint):
    """Circular psi distance (exact, possibly irrational)."""
    d = abs(psi(p) - psi(q))
    return d if compare(d, 1) <= 0 else 2 - d


def _arc_psi_span(arc: Arc) -> Tuple[Fraction, Fraction]:
    """Rational enclosure of the psi length of an arc."""
    lo, hi = psi(arc.start), psi(arc.end)
    span = hi - lo
    if compare(span, 0) <= 0:
        span = span + 2
    return lower(span), upper(span)


def shrink_arc(arc: Arc, factor) -> Arc:
    """Keep the start of ``arc`` and scale its psi length by ``factor``."""
    lo = lower(psi(arc.start))
    span = _arc_psi_span(arc)[0] * Fraction(factor)
    return psi_arc(lo, lo + span)


def _centred_arc(p: ProjPoint, w: Fraction) -> Arc:
    """Arc of psi half-width about ``w`` containing p, rational endpoints."""
    c = psi(p)
    if isinstance(c, Quad):
        c = rational_between(c - w / 4, c + w / 4)
        w = w * 3 / 4
    return psi_arc(c - w, c + w)


# -- contractive pairs ------------------------------------------------------


def _chart(excluded: ProjPoint):
    """A Moebius chart RP^1 -> R u {inf} sending ``excluded`` to infinity."""
    if same_point(excluded, INFINITY):
        return "slope", lambda p: p.slope
    if same_point(excluded, ZERO_SLOPE):
        return "inverse-slope", lambda p: (p.x / p.y if p.y != 0 else None)
    qs = excluded.slope
    return f"pole {excluded}", lambda p: (p.x / (p.y - qs * p.x) if p.y != qs * p.x else None)


@dataclass(frozen=True)
class ContractivePair:
    U: Arc
    t: Mat2
    power: int
    margin: Fraction
    chart: str

    def image_closure(self) -> CircleSet:
        return self.U.closure().image(self.t)

    def verify(self) -> bool:
        img = self.image_closure()
        return img.issubset(self.U.to_set()) and img != self.U.to_set()


def _contraction_margin(U: Arc, t: Mat2) -> Tuple[Fraction, str]:
    outside = U.complement_arc().witness
    if not U.closure().contains(INFINITY):
        outside = INFINITY
    elif not U.closure().contains(ZERO_SLOPE):
        outside = ZERO_SLOPE
    name, coord = _chart(outside)
    a, b = coord(U.start), coord(U.end)
    ia, ib = coord(act_proj(t, U.start)), coord(act_proj(t, U.end))
    lo, hi = (a, b) if compare(a, b) < 0 else (b, a)
    ilo, ihi = (ia, ib) if compare(ia, ib) < 0 else (ib, ia)
    return lower(min(ilo - lo, hi - ihi, key=lower)), name


def contractive_pair(
    h: Mat2, shrink=Fraction(1, 2), power_cap: int = 64, U: Optional[Arc] = None
) -> ContractivePair:
    """Arc U about h+ avoiding h-, and ``t = h^p`` with ``t cl(U)`` strictly inside U.

    U has psi half-width ``shrink`` times the psi distance from h+ to h-,
    unless an arc is passed explicitly.
    """
    if classify(h) is not MoebiusClass.HYPERBOLIC:
        raise NonHyperbolic(f"{h!r} is not hyperbolic")
    shrink = Fraction(shrink)
    if not 0 < shrink < 1:
        raise ValueError("shrink must lie in (0, 1)")
    fp = fixed_points(h)
    w = lower(shrink * psi_distance(fp.attracting, fp.repelling))
    if U is None:
        U = _centred_arc(fp.attracting, w)
    target = U.to_set()
    closure = U.closure()
    t = h
    for p in range(1, power_cap + 1):
        img = closure.image(t)
        if img.issubset(target):
            margin, chart = _contraction_margin(U, t)
            return ContractivePair(U, t, p, margin, chart)
        t = t @ h
    raise CapExceeded(f"no power <= {power_cap} contracts the arc")


# -- paradoxical families ---------------------------------------------------


@dataclass(frozen=True)
class ParadoxItem:
    t: Mat2
    U: Arc
    label: str = ""

    def image(self) -> CircleSet:
        return self.U.to_set().image(self.t)


@dataclass(frozen=True)
class ParadoxFamily:
    n: int
    m: int
    items: Tuple[ParadoxItem, ...]
    power: int = 0

    @property
    def lifted(self) -> Tuple[Cone, ...]:
        return tuple(Cone.over(it.U) for it in self.items)

    def with_item(self, index: int, item: ParadoxItem) -> "ParadoxFamily":
        items = list(self.items)
        items[index] = item
        return replace(self, items=tuple(items))


@dataclass(frozen=True)
class ParadoxCertificate:
    ok: bool
    conditions: Dict[str, bool]
    margins: Dict[str, Fraction]
    failure: Optional[str] = None
    witness: Optional[ProjPoint] = None
    lift_ok: bool = False


def _hyperbolic_sequence(g1: Mat2, g2: Mat2, count: int, cap: int = 64) -> List[Tuple[str, Mat2]]:
    out = [("g1", g1), ("g2", g2)]
    points = []
    for _, g in out:
        fp = fixed_points(g)
        points += [fp.attracting, fp.repelling]
    j = 1
    while len(out) < count:
        if j > cap:
            raise CapExceeded("could not find enough conjugates with distinct fixed points")
        c = (g2**j) @ g1 @ (g2**-j)
        fp = fixed_points(c)
        if not any(same_point(fp.attracting, q) or same_point(fp.repelling, q) for q in points):
            out.append((f"g2^{j} g1 g2^-{j}", c))
            points += [fp.attracting, fp.repelling]
        j += 1
    return out


def _min_gap(points: Sequence[ProjPoint]) -> Fraction:
    best = None
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            d = lower(psi_distance(points[i], points[j]))
            best = d if best is None or d < best else best
    return best


def paradoxical_family(
    g1: Mat2,
    g2: Mat2,
    n: int = 2,
    m: int = 2,
    power_cap: int = 64,
    retries: int = 6,
) -> ParadoxFamily:
    """Ping-pong family of ``n + m`` contractive arcs.

    Every element h contributes ``(h^p, RP^1 - cl V(h-))`` and
    ``(h^-p, RP^1 - cl V(h+))`` where the V are disjoint small arcs around
    the fixed points; p is the least common power pushing each ``cl U`` into
    the neighbourhood of the attracting point.
    """
    if n < 2 or m < 2:
        raise ValueError("need n, m >= 2")
    for g in (g1, g2):
        if classify(g) is not MoebiusClass.HYPERBOLIC:
            raise NonHyperbolic(f"{g!r} is not hyperbolic")
    if same_axis(g1, g2):
        raise SameAxis("g1 and g2 share their fixed points")
    total = n + m
    elems = _hyperbolic_sequence(g1, g2, (total + 1) // 2)
    fps = [(label, g, fixed_points(g)) for label, g in elems]
    pts = [q for _, _, fp in fps for q in (fp.attracting, fp.repelling)]
    w = min(Fraction(1, 4 * total), _min_gap(pts) / 4)
    for _ in range(retries):
        specs = []
        for label, g, fp in fps:
            v_plus = _centred_arc(fp.attracting, w)
            v_minus = _centred_arc(fp.repelling, w)
            specs.append((label, g, v_plus, v_minus))
            specs.append((label + "^-1", g.inverse(), v_minus, v_plus))
        specs = specs[:total]
        # U = RP^1 - cl(V-) is the open arc from the end of V- round to its start
        tasks = [(label, g, Arc(vm.end, vm.start), vp.to_set()) for label, g, vp, vm in specs]
        closures = [U.closure() for _, _, U, _ in tasks]
        powers = [g for _, g, _, _ in tasks]
        t = list(powers)
        for p in range(1, power_cap + 1):
            if all(cl.image(ti).issubset(target) for cl, ti, (_, _, _, target) in zip(closures, t, tasks)):
                items = tuple(
                    ParadoxItem(ti, U, f"({label})^{p}") for ti, (label, _, U, _) in zip(t, tasks)
                )
                return ParadoxFamily(n, m, items, p)
            t = [ti @ g for ti, g in zip(t, powers)]
        w = w / 2
    raise CapExceeded(f"no common power <= {power_cap} after {retries} arc shrinks")


def _overlap_margin(sets: Sequence[CircleSet]) -> Fraction:
    """Half the shortest psi length among pairwise overlaps of a cover."""
    overlap = CircleSet.empty()
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            overlap = overlap | (sets[i] & sets[j])
    spans = [_arc_psi_span(Arc(s, e))[0] for s, e in overlap.components() if s is not None]
    if overlap.is_full():
        return Fraction(1)
    return min(spans) / 2 if spans else Fraction(0)


def _gap_margin(images: Sequence[CircleSet]) -> Fraction:
    """Shortest psi gap between distinct closed images (0 when they touch)."""
    union = CircleSet.empty()
    for s in images:
        union = union | s.closure()
    comps = union.complement().components()
    spans = [_arc_psi_span(Arc(s, e))[0] for s, e in comps if s is not None]
    return min(spans) if spans else Fraction(0)


def verify_paradoxical_family(fam: ParadoxFamily) -> ParadoxCertificate:
    """Exact check of both covers, disjoint images, proper union, contraction."""
    U = [it.U.to_set() for it in fam.items]
    images = [it.image() for it in fam.items]
    conds: Dict[str, bool] = {}
    margins: Dict[str, Fraction] = {}
    failure, witness = None, None

    for name, part in (("cover_first", U[: fam.n]), ("cover_last", U[fam.n : fam.n + fam.m])):
        union = CircleSet.empty()
        for s in part:
            union = union | s
        conds[name] = union.is_full() and len(fam.items) == fam.n + fam.m
        margins[name] = _overlap_margin(part) if conds[name] else Fraction(0)
        if not conds[name] and failure is None:
            failure, witness = name, union.complement().witness()

    disjoint = True
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            common = images[i] & images[j]
            if not common.is_empty():
                disjoint = False
                if failure is None:
                    failure, witness = f"images_disjoint ({i}, {j})", common.witness()
    conds["images_disjoint"] = disjoint
    margins["images_disjoint"] = _gap_margin(images) if disjoint else Fraction(0)

    union_img = CircleSet.empty()
    for s in images:
        union_img = union_img | s
    rest = union_img.complement()
    conds["union_proper"] = rest.has_interior()
    margins["union_proper"] = rest.psi_length().lo if conds["union_proper"] else Fraction(0)
    if not conds["union_proper"] and failure is None:
        failure, witness = "union_proper", rest.witness()
    elif failure is None:
        witness = rest.witness()

    contract = True
    for i, it in enumerate(fam.items):
        img = it.U.closure().image(it.t)
        if not (img.issubset(U[i]) and img != U[i]):
            contract = False
            if failure is None:
                failure, witness = f"contractive ({i})", (img - U[i]).witness()
    conds["contractive"] = contract

    checks_first = arc_checks([it.U for it in fam.items[: fam.n]])
    checks_last = arc_checks([it.U for it in fam.items[fam.n :]])
    conds["arc_checks"] = checks_first["covers_RP1"] and checks_last["covers_RP1"]

    ok = all(conds.values())
    return ParadoxCertificate(ok, conds, margins, failure, witness, _lift_ok(fam) if ok else False)


def _lift_ok(fam: ParadoxFamily) -> bool:
    """Same relations for the cones over the arcs, checked through the Cone API."""
    cones = fam.lifted
    imgs = [c.image(it.t) for c, it in zip(cones, fam.items)]
    for part in (cones[: fam.n], cones[fam.n :]):
        acc = Cone(CircleSet.empty())
        for c in part:
            acc = acc.union(c)
        if not acc.base.is_full():
            return False
    for i in range(len(imgs)):
        for j in range(i + 1, len(imgs)):
            if not imgs[i].intersect(imgs[j]).is_empty(strict=True):
                return False
    for c, it in zip(cones, fam.items):
        if not c.closure().image(it.t).issubset(c):
            return False
    return True
