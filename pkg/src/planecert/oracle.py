"""Falsification and numeric realization, independent of the certificates.

Sample points are exact rationals drawn on a jittered grid; the jitter comes
from numpy's counter-based Philox generator so a (density, seed) pair always
gives the same points. Membership tests run vectorized in floating point and
fall back to exact arithmetic for every point near a boundary, so the
classification of each sample is exact.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .circle import Arc, CircleSet, point_at_psi, psi
from .crossed import Coefficient, FormalElement, Leaf
from .errors import CapExceeded, UnboundedSupport
from .projective import IDENTITY, Mat2, ProjPoint
from .regions import Cone, ConvexPolygon, Crown, RegionSet
from .scalar import sqrt_lower, sqrt_upper, to_float
from .witness import FiniteSubset, frame_crown

__all__ = [
    "GridSpec",
    "sample_points",
    "FalsifyReport",
    "falsify_empty",
    "member_mask",
    "NumericTable",
    "realize_numeric",
    "evaluate",
    "leaf_value",
    "brute_min_power",
]

Domain = Union[Crown, Arc, RegionSet, Cone]
_JITTER_BITS = 16
_REL_TOL = 1e-9


@dataclass(frozen=True)
class GridSpec:
    density: int
    seed: int = 0
    domain: Optional[Domain] = None
    truncation: Optional[Fraction] = None


def _jitter(seed: int, count: int, dims: int) -> np.ndarray:
    gen = np.random.Generator(np.random.Philox(key=seed))
    return gen.integers(0, 1 << _JITTER_BITS, size=(count, dims), dtype=np.int64)


def _frac(k: int, cells: int) -> Fraction:
    return Fraction(int(k), cells << _JITTER_BITS)


def _unit_vector(theta: float) -> Tuple[Fraction, Fraction]:
    # rational point on the unit circle via t = tan(theta/2); theta = pi maps to (-1, 0)
    if abs(math.cos(theta / 2)) < 1e-12:
        return Fraction(-1), Fraction(0)
    t = Fraction(round(math.tan(theta / 2) * (1 << 20)), 1 << 20)
    den = 1 + t * t
    return (1 - t * t) / den, 2 * t / den


def _crown_samples(c: Crown, density: int, seed: int) -> List[Tuple[Fraction, Fraction]]:
    rational_frame = c.frame.is_rational()
    std = c if rational_frame else frame_crown(c, IDENTITY)
    lo, hi = sqrt_upper(std.r1_sq, 20), sqrt_lower(std.r2_sq, 20)
    jit = _jitter(seed, density * density, 2)
    inv = std.frame.inverse()
    pts = []
    for idx in range(density * density):
        i, j = divmod(idx, density)
        fr = (i << _JITTER_BITS) + int(jit[idx, 0])
        fa = (j << _JITTER_BITS) + int(jit[idx, 1])
        rho = lo + (hi - lo) * _frac(fr, density)
        theta = 2 * math.pi * fa / (density << _JITTER_BITS)
        ux, uy = _unit_vector(theta)
        p = (rho * ux, rho * uy)
        if std.frame != IDENTITY:
            p = inv.apply(p)
        if rational_frame or c.contains_point(p):
            pts.append(p)
    return pts


def _region_samples(r: RegionSet, density: int, seed: int) -> List[Tuple[Fraction, Fraction]]:
    if r.is_empty(strict=True):
        return []
    x0, y0, x1, y1 = (Fraction(v) if not hasattr(v, "d") else Fraction(to_float(v)) for v in r.bbox())
    jit = _jitter(seed, density * density, 2)
    cand = []
    for idx in range(density * density):
        i, j = divmod(idx, density)
        cand.append(
            (
                x0 + (x1 - x0) * _frac((i << _JITTER_BITS) + int(jit[idx, 0]), density),
                y0 + (y1 - y0) * _frac((j << _JITTER_BITS) + int(jit[idx, 1]), density),
            )
        )
    keep = _Member(r).test(cand, _as_array(cand), IDENTITY)
    return [p for p, k in zip(cand, keep) if k]


def _arc_samples(a: Union[Arc, CircleSet], density: int, seed: int) -> List[ProjPoint]:
    base = a.to_set() if isinstance(a, Arc) else a
    jit = _jitter(seed, density, 1)
    out = []
    for i in range(density):
        v = Fraction(-1) + 2 * _frac((i << _JITTER_BITS) + int(jit[i, 0]), density)
        p = point_at_psi(v)
        if base.contains(p):
            out.append(p)
    return out


def sample_points(grid: GridSpec, domain: Optional[Domain] = None):
    """Exact sample points of the grid's domain (planar points, or ProjPoints for arcs)."""
    d = domain if domain is not None else grid.domain
    if d is None:
        raise ValueError("grid has no domain")
    return list(_cached_samples(grid.density, grid.seed, d, grid.truncation))


@functools.lru_cache(maxsize=32)
def _cached_samples(density: int, seed: int, d: Domain, truncation) -> tuple:
    grid = GridSpec(density, seed, d, truncation)
    return tuple(_samples(grid, d))


def _samples(grid: GridSpec, d: Domain):
    if isinstance(d, Crown):
        return _crown_samples(d, grid.density, grid.seed)
    if isinstance(d, RegionSet):
        return _region_samples(d, grid.density, grid.seed)
    if isinstance(d, (Arc, CircleSet)):
        return _arc_samples(d, grid.density * grid.density, grid.seed)
    if isinstance(d, Cone):
        if grid.truncation is None:
            raise UnboundedSupport("cone domains need a truncation radius")
        r = Fraction(grid.truncation)
        return [p for p in _crown_samples(Crown(r * r / 4, r * r), grid.density, grid.seed) if d.contains_point(p)]
    raise TypeError(f"unsupported domain {type(d).__name__}")


# -- vectorized exact membership --------------------------------------------


class _Member:
    """Membership of ``M^-1 y`` in a crown or polygon union, exact per point."""

    def __init__(self, base: Union[Crown, RegionSet]):
        self.base = base

    def test(self, pts: Sequence[Tuple], arr: np.ndarray, m: Mat2) -> np.ndarray:
        mi = m.inverse()
        if isinstance(self.base, Crown):
            full = self.base.frame @ mi
            P = np.array([[to_float(full.a), to_float(full.b)], [to_float(full.c), to_float(full.d)]])
            w = arr @ P.T
            nsq = (w * w).sum(axis=1)
            # forward error of the float product, per point, with a wide safety factor
            err = 1e-13 * (arr.__abs__() @ np.abs(P).T)
            tol = (2 * np.abs(w) * err + err * err).sum(axis=1) + 1e-12 * nsq
            r1, r2 = float(self.base.r1_sq), float(self.base.r2_sq)
            inside = (nsq >= r1 + tol) & (nsq <= r2 - tol)
            unsure = (np.abs(nsq - r1) <= tol) | (np.abs(nsq - r2) <= tol)
            for k in np.nonzero(unsure)[0]:
                inside[k] = self.base.contains_point(mi.apply(pts[k]))
            return inside
        result = np.zeros(len(pts), dtype=bool)
        for poly in self.base.polygons:
            result |= self._poly(poly, pts, arr, mi)
        return result

    @staticmethod
    def _poly(poly: ConvexPolygon, pts, arr, mi: Mat2) -> np.ndarray:
        hs = [h for h in poly.halfplanes()]
        # n . (mi y) <= c  <=>  (mi^T n) . y <= c
        inside = np.ones(len(pts), dtype=bool)
        unsure = np.zeros(len(pts), dtype=bool)
        for h in hs:
            nx = h.nx * mi.a + h.ny * mi.c
            ny = h.nx * mi.b + h.ny * mi.d
            fx, fy, fc = to_float(nx), to_float(ny), to_float(h.c)
            v = arr[:, 0] * fx + arr[:, 1] * fy - fc
            tol = _REL_TOL * (abs(fx) + abs(fy) + abs(fc) + 1.0) * (np.abs(arr).max(initial=1.0) + 1.0)
            unsure |= np.abs(v) <= tol
            inside &= v <= tol
        for k in np.nonzero(unsure & inside)[0]:
            inside[k] = poly.contains_point(mi.apply(pts[k]))
        return inside


@dataclass(frozen=True)
class FalsifyReport:
    counterexamples: Tuple[Tuple[int, Tuple[Fraction, Fraction]], ...]
    checked: int
    density: int
    seed: int

    @property
    def found(self) -> bool:
        return bool(self.counterexamples)

    def summary(self) -> str:
        if not self.counterexamples:
            return f"none found at density {self.density}^2"
        return f"{len(self.counterexamples)} counterexamples"


def _as_array(pts) -> np.ndarray:
    return np.array([[to_float(p[0]), to_float(p[1])] for p in pts], dtype=float).reshape(-1, 2)


def member_mask(base: Union[Crown, RegionSet], pts: Sequence[Tuple], m: Mat2 = IDENTITY) -> np.ndarray:
    """Boolean mask of the points y with ``m^-1 y`` in base (exact near edges)."""
    pts = list(pts)
    if not pts:
        return np.zeros(0, dtype=bool)
    return _Member(base).test(pts, _as_array(pts), m)


def falsify_empty(
    claimed: Sequence[Sequence[Mat2]],
    base: Union[Crown, RegionSet],
    grid: GridSpec,
    limit: int = 10,
    first_only: bool = False,
) -> FalsifyReport:
    """Look for ``y`` in base with ``M^-1 y`` in base for every map of a claim.

    Each claim is a list of maps asserting ``base n M_1 base n ... = empty``.
    The report keeps at most ``limit`` counterexamples per claim, sorted.
    """
    domain = grid.domain if grid.domain is not None else base
    pts = sample_points(grid, domain)
    member = _Member(base)
    if not pts:
        return FalsifyReport((), 0, grid.density, grid.seed)
    arr = _as_array(pts)
    in_base = member.test(pts, arr, IDENTITY)
    hits: List[Tuple[int, Tuple]] = []
    for ci, maps in enumerate(claimed):
        mask = in_base.copy()
        for m in maps:
            idx = np.nonzero(mask)[0]
            if not len(idx):
                break
            sub = member.test([pts[k] for k in idx], arr[idx], m)
            mask[idx] = sub
        for k in np.nonzero(mask)[0][:limit]:
            hits.append((ci, pts[k]))
        if first_only and hits:
            break
    hits.sort(key=lambda h: (h[0], h[1]))
    return FalsifyReport(tuple(hits), len(pts), grid.density, grid.seed)


def brute_min_power(
    F: FiniteSubset,
    C: Crown,
    h: Mat2,
    grid: GridSpec,
    cap: int = 64,
) -> int:
    """Least ``n <= cap`` whose triple intersections show no sampled point."""
    S = F.symmetrized().matrices()
    g_domain = grid if grid.domain is not None else GridSpec(grid.density, grid.seed, C)
    for n in range(1, cap + 1):
        gamma = h**n
        claims = [[gamma @ g @ gamma @ k, gamma @ g] for g in S for k in S]
        if not falsify_empty(claims, C, g_domain, limit=1, first_only=True).found:
            return n
    raise CapExceeded(f"sampled triples stay non-empty up to n = {cap}")


# -- numeric realization ----------------------------------------------------


def _smoothstep(s: float) -> float:
    s = min(max(s, 0.0), 1.0)
    return s * s * (3 - 2 * s)


def _seg_dist(p, a, b) -> float:
    px, py = p
    ax, ay, bx, by = (to_float(v) for v in (a[0], a[1], b[0], b[1]))
    dx, dy = bx - ax, by - ay
    ll = dx * dx + dy * dy
    t = 0.0 if ll == 0 else min(max(((px - ax) * dx + (py - ay) * dy) / ll, 0.0), 1.0)
    qx, qy = ax + t * dx - px, ay + t * dy - py
    return math.hypot(qx, qy)


def _poly_dist_out(poly: ConvexPolygon, p) -> float:
    v = poly.vertices
    if len(v) < 3:
        return 0.0
    return min(_seg_dist(p, v[i], v[(i + 1) % len(v)]) for i in range(len(v)))


def _strict_inside(poly: ConvexPolygon, p) -> bool:
    return len(poly.vertices) >= 3 and all(h.value(p) < 0 for h in poly.halfplanes())


def _region_bump(leaf: Leaf, p) -> float:
    if leaf.plateau is not None and leaf.plateau.contains_point(p):
        return 1.0
    holders = [q for q in leaf.support.polygons if _strict_inside(q, p)]
    if not holders:
        return 0.0
    fp = (to_float(p[0]), to_float(p[1]))
    d_out = max(_poly_dist_out(q, fp) for q in holders)
    plats = leaf.plateau.polygons if leaf.plateau is not None else ()
    if not plats:
        return _smoothstep(d_out)
    d_in = min(_poly_dist_out(q, fp) for q in plats)
    return _smoothstep(d_out / (d_in + d_out))


def _psi_gap(p: ProjPoint, points: Sequence[ProjPoint]) -> float:
    v = to_float(psi(p))
    best = 2.0
    for q in points:
        d = abs(v - to_float(psi(q)))
        best = min(best, d, 2 - d)
    return best


def _cone_bump(leaf: Leaf, q: ProjPoint) -> float:
    supp, plat = leaf.support.base, leaf.plateau.base if leaf.plateau is not None else None
    if plat is not None and plat.contains(q):
        return 1.0
    if not supp.contains(q):
        return 0.0
    if supp.is_full():
        d_out = 1.0
    else:
        d_out = _psi_gap(q, supp.points)
    if plat is None or plat.is_empty():
        return _smoothstep(d_out)
    d_in = 1.0 if plat.is_full() else _psi_gap(q, plat.points)
    return _smoothstep(d_out / (d_in + d_out))


def _partition_weight(arc: Arc, q: ProjPoint) -> float:
    s = arc.to_set()
    if not s.contains(q):
        return 0.0
    return _psi_gap(q, [arc.start, arc.end])


def leaf_value(leaf: Leaf, p) -> float:
    """Value of a base function at a planar point (exact 0 and 1 where claimed)."""
    if p[0] == 0 and p[1] == 0:
        return 0.0
    if leaf.kind == "partition":
        q = ProjPoint(*p)
        weights = [_partition_weight(a, q) for a in leaf.cover]
        w = weights[leaf.index]
        if w == 0.0:
            return 0.0
        total = sum(weights)
        return 1.0 if w == total else w / total
    if leaf.support is None:
        return 1.0
    if isinstance(leaf.support, Cone):
        return _cone_bump(leaf, ProjPoint(*p))
    return _region_bump(leaf, p)


def _coeff_value(c: Coefficient, p) -> float:
    total = 0.0
    for mono in c.monomials:
        val = 1.0
        for f in mono:
            x = f.shift.inverse().apply(p)
            base = leaf_value(f.leaf, x)
            if base == 0.0:
                val = 0.0
                break
            val *= base if f.power == 1 else base ** float(f.power)
        total += val
    return total


def evaluate(E: FormalElement, p) -> Dict[str, float]:
    """Coefficient values of every term of E at the point p."""
    return {t.word: _coeff_value(t.coeff, p) for _, t in E.terms}


@dataclass(frozen=True)
class NumericTable:
    points: Tuple[Tuple, ...]
    values: Dict[str, np.ndarray]
    seed: int
    density: int

    def max_abs(self) -> float:
        return max((float(np.abs(v).max(initial=0.0)) for v in self.values.values()), default=0.0)

    def all_zero(self) -> bool:
        return all(not np.any(v) for v in self.values.values())


# Vectorized leaf evaluation: float classification with an exact scalar
# fallback for every point within tolerance of a boundary.

_PSI_TOL = 1e-11


def _psi_vec(arr: np.ndarray) -> np.ndarray:
    x, y = arr[:, 0], arr[:, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = y / x
        out = s / (1 + np.abs(s))
    return np.where(x == 0, 1.0, out)


def _circ_gap(v: np.ndarray, marks: Sequence[float]) -> np.ndarray:
    best = np.full(v.shape, 2.0)
    for m in marks:
        d = np.abs(v - m)
        best = np.minimum(best, np.minimum(d, 2 - d))
    return best


def _circle_member(cs: CircleSet, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(inside, unsure) for psi values against an exact CircleSet."""
    if not cs.points:
        return np.full(v.shape, cs.full), np.zeros(v.shape, dtype=bool)
    marks = [to_float(psi(q)) for q in cs.points]
    idx = np.searchsorted(np.array(marks), v, side="right") - 1
    gaps = np.array(cs.gap_in, dtype=bool)
    inside = gaps[idx]  # idx == -1 selects the wrapping gap
    unsure = _circ_gap(v, marks) <= _PSI_TOL
    return inside, unsure


def _smooth_vec(s: np.ndarray) -> np.ndarray:
    s = np.clip(s, 0.0, 1.0)
    return s * s * (3 - 2 * s)


def _cone_leaf_vec(leaf: Leaf, arr: np.ndarray):
    v = _psi_vec(arr)
    supp = leaf.support.base
    plat = leaf.plateau.base if leaf.plateau is not None else CircleSet.empty()
    in_s, un_s = _circle_member(supp, v)
    in_p, un_p = _circle_member(plat, v)
    d_out = np.ones(v.shape) if not supp.points else _circ_gap(v, [to_float(psi(q)) for q in supp.points])
    if plat.is_empty():
        ramp = _smooth_vec(d_out)
    else:
        d_in = np.ones(v.shape) if not plat.points else _circ_gap(v, [to_float(psi(q)) for q in plat.points])
        with np.errstate(invalid="ignore", divide="ignore"):
            ramp = _smooth_vec(d_out / (d_in + d_out))
    vals = np.where(in_p, 1.0, np.where(in_s, ramp, 0.0))
    return vals, un_s | un_p


def _partition_leaf_vec(leaf: Leaf, arr: np.ndarray):
    v = _psi_vec(arr)
    weights, unsure = [], np.zeros(v.shape, dtype=bool)
    for a in leaf.cover:
        inside, un = _circle_member(a.to_set(), v)
        w = np.where(inside, _circ_gap(v, [to_float(psi(a.start)), to_float(psi(a.end))]), 0.0)
        weights.append(w)
        unsure |= un
    total = sum(weights)
    w = weights[leaf.index]
    with np.errstate(invalid="ignore", divide="ignore"):
        vals = np.where(w == 0, 0.0, np.where(w == total, 1.0, w / total))
    return vals, unsure


def _poly_vec(poly: ConvexPolygon, arr: np.ndarray):
    """(closed-inside, strictly-inside, unsure, edge distance) for one polygon."""
    n = arr.shape[0]
    closed = np.ones(n, dtype=bool)
    strict = np.ones(n, dtype=bool)
    unsure = np.zeros(n, dtype=bool)
    scale = np.abs(arr).max(initial=1.0) + 1.0
    for h in poly.halfplanes():
        fx, fy, fc = to_float(h.nx), to_float(h.ny), to_float(h.c)
        val = arr[:, 0] * fx + arr[:, 1] * fy - fc
        tol = 1e-9 * (abs(fx) + abs(fy) + abs(fc) + 1.0) * scale
        unsure |= np.abs(val) <= tol
        closed &= val <= 0
        strict &= val < 0
    vs = poly.vertices
    if len(vs) < 3:
        strict[:] = False
    dist = np.full(n, np.inf)
    k = len(vs)
    for i in range(k if k > 1 else 1):
        a, b = vs[i], vs[(i + 1) % k]
        ax, ay, bx, by = (to_float(c) for c in (a[0], a[1], b[0], b[1]))
        dx, dy = bx - ax, by - ay
        ll = dx * dx + dy * dy
        t = np.zeros(n) if ll == 0 else np.clip(((arr[:, 0] - ax) * dx + (arr[:, 1] - ay) * dy) / ll, 0, 1)
        dist = np.minimum(dist, np.hypot(ax + t * dx - arr[:, 0], ay + t * dy - arr[:, 1]))
    return closed, strict, unsure, dist


def _region_leaf_vec(leaf: Leaf, arr: np.ndarray):
    n = arr.shape[0]
    unsure = np.zeros(n, dtype=bool)
    in_p = np.zeros(n, dtype=bool)
    d_in = np.full(n, np.inf)
    for poly in leaf.plateau.polygons if leaf.plateau is not None else ():
        closed, _, un, dist = _poly_vec(poly, arr)
        in_p |= closed
        unsure |= un
        d_in = np.minimum(d_in, dist)
    in_s = np.zeros(n, dtype=bool)
    d_out = np.zeros(n)
    for poly in leaf.support.polygons:
        _, strict, un, dist = _poly_vec(poly, arr)
        in_s |= strict
        unsure |= un
        d_out = np.where(strict, np.maximum(d_out, dist), d_out)
    with np.errstate(invalid="ignore", divide="ignore"):
        ramp = np.where(np.isinf(d_in), _smooth_vec(d_out), _smooth_vec(d_out / (d_in + d_out)))
    vals = np.where(in_p, 1.0, np.where(in_s, ramp, 0.0))
    return vals, unsure


def _leaf_vec(leaf: Leaf, pts: Sequence[Tuple], arr: np.ndarray) -> np.ndarray:
    if leaf.kind == "partition":
        vals, unsure = _partition_leaf_vec(leaf, arr)
    elif leaf.support is None:
        vals, unsure = np.ones(arr.shape[0]), np.zeros(arr.shape[0], dtype=bool)
    elif isinstance(leaf.support, Cone):
        vals, unsure = _cone_leaf_vec(leaf, arr)
    else:
        vals, unsure = _region_leaf_vec(leaf, arr)
    zero = (arr[:, 0] == 0) & (arr[:, 1] == 0)
    unsure |= zero
    for k in np.nonzero(unsure)[0]:
        vals[k] = leaf_value(leaf, pts[k])
    return vals


class _Mapped:
    """Sample points pushed through ``shift^-1``, exact points built lazily."""

    def __init__(self, pts, arr):
        self.pts, self.arr = pts, arr
        self._cache: Dict[Mat2, Tuple] = {}

    def get(self, shift: Mat2):
        if shift not in self._cache:
            inv = shift.inverse()
            P = np.array([[to_float(inv.a), to_float(inv.b)], [to_float(inv.c), to_float(inv.d)]])
            self._cache[shift] = (_LazyPoints(self.pts, inv), self.arr @ P.T)
        return self._cache[shift]


class _LazyPoints:
    def __init__(self, pts, m: Mat2):
        self.pts, self.m = pts, m

    def __getitem__(self, k):
        return self.m.apply(self.pts[k])


def _coeff_vec(c: Coefficient, mapped: _Mapped, n: int) -> np.ndarray:
    total = np.zeros(n)
    for mono in c.monomials:
        val = np.ones(n)
        for f in mono:
            pts, arr = mapped.get(f.shift)
            base = _leaf_vec(f.leaf, pts, arr)
            val = val * (base if f.power == 1 else np.where(base == 0, 0.0, base ** float(f.power)))
        total = total + val
    return total


def realize_numeric(E: FormalElement, grid: GridSpec) -> NumericTable:
    """Evaluate every coefficient of E on the grid's sample points.

    Values are exactly 0 off the declared supports and exactly 1 on
    plateaus; the ramp in between is a cubic smoothstep.
    """
    d = grid.domain
    if d is None:
        raise ValueError("grid has no domain")
    pts = sample_points(grid)
    if pts and isinstance(pts[0], ProjPoint):
        pts = [(q.x, q.y) for q in pts]
    arr = _as_array(pts)
    mapped = _Mapped(pts, arr)
    values = {t.word: _coeff_vec(t.coeff, mapped, len(pts)) for _, t in E.terms}
    return NumericTable(tuple(pts), values, grid.seed, grid.density)
