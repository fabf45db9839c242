"""Support calculus for formal crossed-product elements ``sum f_g u_g``.

Coefficients are never stored as formulas. Each one carries an
over-approximation of its cozero set (``support``), a region where it is
identically one (``plateau``) and a symbolic sum of monomials in named base
functions composed with group elements. The monomials are what the numeric
oracle evaluates; the regions are what the certificates rely on.

Multiplication follows ``(f u_g)(f' u_h) = f (f' o g^-1) u_gh`` and the
adjoint ``(f u_g)* = (conj(f) o g) u_g^-1``. All base functions are real.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .circle import Arc, CircleSet
from .errors import (
    CertificateMismatch,
    FamilyNotVerified,
    NotElementaryTensor,
    SupportNotCovered,
)
from .paradox import ParadoxFamily, verify_paradoxical_family
from .projective import IDENTITY, Mat2, ProjPoint
from .regions import Cone, RegionSet
from .witness import SqueezeCertificate, format_word, invert_word, parse_word

__all__ = [
    "Leaf",
    "Factor",
    "Coefficient",
    "FormalElement",
    "bump",
    "partition_of_unity",
    "product",
    "adjoint",
    "elementary",
    "scaling_check",
    "nilpotent_factorization",
    "isometry_pair",
    "ScalingResult",
]

# None stands for the whole space in supports and plateaus alike.
Region = Union[RegionSet, Cone, None]


def _meet(r1: Region, r2: Region) -> Region:
    if r1 is None:
        return r2
    if r2 is None:
        return r1
    if type(r1) is not type(r2):
        raise TypeError("cannot mix planar polygons and cones in one coefficient")
    return r1.intersect(r2)


def _join(r1: Region, r2: Region) -> Region:
    if r1 is None or r2 is None:
        return None
    if type(r1) is not type(r2):
        raise TypeError("cannot mix planar polygons and cones in one coefficient")
    return r1.union(r2)


def _image(r: Region, g: Mat2) -> Region:
    return None if r is None else r.image(g)


def _void(r: Region) -> bool:
    return r is not None and r.is_empty()


def _empty_like(r: Region) -> Region:
    if isinstance(r, Cone):
        return Cone(CircleSet.empty())
    return RegionSet()


def _subset(r1: Region, r2: Region) -> bool:
    if r2 is None:
        return True
    if r1 is None:
        return False
    return r1.issubset(r2)


@dataclass(frozen=True)
class Leaf:
    """A named base function.

    ``kind`` is "bump" (1 on plateau, 0 off support) or "partition" (member
    ``index`` of a normalized family over ``cover``).
    """

    name: str
    support: Region
    plateau: Region = None
    kind: str = "bump"
    cover: Tuple[Arc, ...] = ()
    index: int = 0


@dataclass(frozen=True)
class Factor:
    """``leaf(shift^-1 x) ** power``."""

    leaf: Leaf
    power: Fraction
    shift: Mat2

    def key(self):
        return (self.leaf.name, self.leaf.index, repr(self.shift))


Monomial = Tuple[Factor, ...]


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    # leaves compare structurally, so equal names with different regions stay apart
    acc: Dict[tuple, Factor] = {}
    for f in m1 + m2:
        k = (f.leaf, f.shift)
        if k in acc:
            acc[k] = Factor(f.leaf, acc[k].power + f.power, f.shift)
        else:
            acc[k] = f
    return tuple(sorted((f for f in acc.values() if f.power != 0), key=Factor.key))


def _mono_shift(m: Monomial, g: Mat2) -> Monomial:
    return tuple(sorted((Factor(f.leaf, f.power, g @ f.shift) for f in m), key=Factor.key))


@dataclass(frozen=True)
class Coefficient:
    support: Region
    plateau: Region
    tag: str
    monomials: Tuple[Monomial, ...]

    @classmethod
    def one(cls) -> "Coefficient":
        return cls(None, None, "unit", ((),))

    @classmethod
    def of_leaf(cls, leaf: Leaf, power=Fraction(1)) -> "Coefficient":
        tag = "partition-member" if leaf.kind == "partition" else leaf.kind
        return cls(leaf.support, leaf.plateau, tag, ((Factor(leaf, Fraction(power), IDENTITY),),))

    def is_one(self) -> bool:
        return self.monomials == ((),)

    def is_zero(self) -> bool:
        return not self.monomials or _void(self.support)

    def sqrt(self) -> "Coefficient":
        """Square root of a single-factor coefficient; supports are unchanged."""
        if len(self.monomials) != 1:
            raise ValueError("square root only of single monomials")
        mono = tuple(Factor(f.leaf, f.power / 2, f.shift) for f in self.monomials[0])
        return replace(self, monomials=(mono,))

    def shifted(self, g: Mat2) -> "Coefficient":
        """``self o g^-1``."""
        return Coefficient(
            _image(self.support, g),
            _image(self.plateau, g),
            self.tag,
            tuple(_mono_shift(m, g) for m in self.monomials),
        )

    def times(self, other: "Coefficient") -> "Coefficient":
        support = _meet(self.support, other.support)
        plateau = _meet(self.plateau, other.plateau)
        if plateau is not None and support is not None:
            plateau = _meet(plateau, support)
        monos = tuple(_mono_mul(a, b) for a in self.monomials for b in other.monomials)
        tag = self.tag if self.tag == other.tag else "generic"
        if self.is_one():
            tag = other.tag
        elif other.is_one():
            tag = self.tag
        return Coefficient(support, plateau, tag, monos)

    def plus(self, other: "Coefficient") -> "Coefficient":
        monos = self.monomials + other.monomials
        support = _join(self.support, other.support)
        merged = Coefficient(support, _empty_like(self.support or other.support), "generic", monos)
        return _recognize_unit(merged)


def _recognize_unit(c: Coefficient) -> Coefficient:
    """A full partition family with a common shift sums to one."""
    shifts, members, families = set(), set(), set()
    cover = None
    for mono in c.monomials:
        if len(mono) != 1:
            return c
        f = mono[0]
        if f.leaf.kind != "partition" or f.power != 1:
            return c
        shifts.add(f.shift)
        members.add(f.leaf.index)
        families.add((f.leaf.name, f.leaf.cover))
        cover = f.leaf
    complete = cover is not None and members == set(range(len(cover.cover)))
    if len(shifts) == 1 and len(families) == 1 and complete and len(c.monomials) == len(cover.cover):
        return Coefficient.one()
    return c


def bump(name: str, support: Region, plateau: Region = None) -> Leaf:
    """Continuous bump: 1 on ``plateau``, 0 off ``support``."""
    if plateau is None:
        plateau = _empty_like(support)
    if not _subset(plateau, support):
        raise ValueError("plateau must lie inside the support")
    return Leaf(name, support, plateau, "bump")


def partition_of_unity(name: str, cover: Sequence[Arc]) -> List[Leaf]:
    """Members ``phi_i = d_i / sum_j d_j`` with ``d_i`` the distance to the complement of ``U_i``.

    The family sums to one; each member's cozero set is the cone over ``U_i``.
    """
    union = CircleSet.empty()
    for a in cover:
        union = union | a.to_set()
    if not union.is_full():
        raise ValueError("partition needs a cover of RP^1")
    cover = tuple(cover)
    return [
        Leaf(name, Cone.over(a), Cone(CircleSet.empty()), "partition", cover, i)
        for i, a in enumerate(cover)
    ]


@dataclass(frozen=True)
class Term:
    word: str
    coeff: Coefficient


@dataclass(frozen=True)
class FormalElement:
    terms: Tuple[Tuple[Mat2, Term], ...] = ()

    @classmethod
    def zero(cls) -> "FormalElement":
        return cls()

    @classmethod
    def unitary(cls, g: Mat2, word: str = "g") -> "FormalElement":
        return cls(((g, Term(word, Coefficient.one())),))

    @classmethod
    def coeff_at(cls, coeff: Coefficient, g: Mat2 = IDENTITY, word: str = "e") -> "FormalElement":
        """``coeff u_g``."""
        return cls(((g, Term(format_word(parse_word(word)), coeff)),))

    def as_dict(self) -> Dict[Mat2, Term]:
        return dict(self.terms)

    def words(self) -> List[str]:
        return [t.word for _, t in self.terms]

    def is_zero(self) -> bool:
        return not self.terms

    def pruned(self) -> "FormalElement":
        return FormalElement(tuple((g, t) for g, t in self.terms if not t.coeff.is_zero()))

    def __add__(self, other: "FormalElement") -> "FormalElement":
        acc: Dict[Mat2, Term] = dict(self.terms)
        order = [g for g, _ in self.terms]
        for g, t in other.terms:
            if g in acc:
                acc[g] = Term(acc[g].word, acc[g].coeff.plus(t.coeff))
            else:
                acc[g] = t
                order.append(g)
        return FormalElement(tuple((g, acc[g]) for g in order))

    def __mul__(self, other: "FormalElement") -> "FormalElement":
        return product(self, other)


def _concat(w1: str, w2: str) -> str:
    return format_word(parse_word(w1 + " " + w2))


def product(A: FormalElement, B: FormalElement, prune: bool = True) -> FormalElement:
    """Twisted convolution at the support level.

    With ``prune=False`` terms of empty support are kept, which lets the
    numeric oracle confirm that they vanish.
    """
    out = FormalElement()
    for g, s in A.terms:
        for h, t in B.terms:
            coeff = s.coeff.times(t.coeff.shifted(g))
            out = out + FormalElement(((g @ h, Term(_concat(s.word, t.word), coeff)),))
    return out.pruned() if prune else out


def adjoint(A: FormalElement) -> FormalElement:
    terms = []
    for g, t in A.terms:
        gi = g.inverse()
        terms.append((gi, Term(invert_word(t.word), t.coeff.shifted(gi))))
    return FormalElement(tuple(terms))


def elementary(t: Mat2, f: Coefficient, word: str = "t") -> FormalElement:
    """``u_t f = (f o t^-1) u_t``."""
    return FormalElement.unitary(t, word) * FormalElement.coeff_at(f)


# -- scaling elements --------------------------------------------------------


@dataclass(frozen=True)
class ScalingResult:
    is_scaling: bool
    plateau_condition: bool
    proper_condition: bool
    witness_region: Region
    witness_point: Optional[Tuple]
    reason: str = ""


def _region_point(r: Region, prefer: Region = None):
    """A rational point of r, preferring the set ``prefer``."""
    if isinstance(r, Cone):
        base = r.base
        if prefer is not None:
            pref = base & prefer.base.closure()
            if not pref.is_empty():
                base = pref
        p = base.witness(prefer_interior=False)
        return None if p is None else (p.x, p.y)
    if isinstance(r, RegionSet) and r.polygons:
        poly = max(r.polygons, key=lambda q: len(q.vertices))
        vs = poly.vertices
        return (sum(v[0] for v in vs) / len(vs), sum(v[1] for v in vs) / len(vs))
    return None


def scaling_check(x: FormalElement) -> ScalingResult:
    """Region-level test that ``x = u_t f`` is a scaling element."""
    if len(x.terms) != 1:
        raise NotElementaryTensor("x must consist of a single term")
    t, term = x.terms[0]
    monos = term.coeff.monomials
    if len(monos) != 1 or len(monos[0]) != 1:
        raise NotElementaryTensor("coefficient must be a single base function")
    factor = monos[0][0]
    if factor.shift != t:
        raise NotElementaryTensor("term is not of the form u_t f")
    leaf = factor.leaf
    supp, plat = leaf.support, leaf.plateau
    if supp is None:
        return ScalingResult(False, False, False, None, None, "support is the whole space")
    moved = supp.image(t)
    plateau_ok = _subset(moved, plat)
    proper = _subset(moved, supp) and not _subset(supp, moved)
    region = supp.difference(moved)
    if isinstance(supp, Cone) and isinstance(moved, Cone):
        # boundary points of t.U lie in the closed plateau but not in t.U
        pref = Cone(moved.base.closure() - moved.base)
        point = _region_point(Cone(supp.base - moved.base), pref if plat is None else Cone(pref.base & plat.base.closure()))
    else:
        point = _region_point(region)
    ok = plateau_ok and proper
    reason = "" if ok else ("t.supp f is not inside the plateau" if not plateau_ok else "t.supp f is not a proper subset of supp f")
    return ScalingResult(ok, plateau_ok, proper, region, point, reason)


# -- nilpotent factorization -------------------------------------------------


def nilpotent_factorization(z: FormalElement, cert: SqueezeCertificate):
    """``z = (f u_gamma)(u_gamma^-1 z)`` with both factors cubing to zero.

    Returns ``(A, B, proof)``; the proof records the cube supports.
    """
    if z.is_zero():
        return FormalElement(), FormalElement(), {"trivial": True, "A_cube_empty": True, "B_cube_empty": True}
    allowed = set(cert.subset.matrices())
    for g, t in z.terms:
        if g not in allowed:
            raise CertificateMismatch(f"word {t.word!r} is not in the certified subset")
    supports = [t.coeff.support for _, t in z.terms]
    if any(s is None or not isinstance(s, RegionSet) for s in supports):
        raise SupportNotCovered("coefficients of z need bounded polygonal supports")
    C = RegionSet()
    for s in supports:
        C = C.union(s)
    if not cert.crown.encloses_interior(C):
        raise SupportNotCovered("supports of z are not inside the open certified crown")
    K = cert.hull()
    f = bump("f", K, C)
    gamma = cert.gamma
    A = FormalElement.coeff_at(Coefficient.of_leaf(f)) * FormalElement.unitary(gamma, "gamma")
    B = FormalElement.unitary(gamma.inverse(), "gamma^-1") * z
    AB = product(A, B)
    recon = all(_subset(t.coeff.support, f.plateau) for _, t in z.terms) and sorted(AB.words()) == sorted(
        z.words()
    )
    A3 = product(product(A, A, prune=False), A, prune=False)
    B3 = product(product(B, B, prune=False), B, prune=False)
    proof = {
        "trivial": False,
        "A_cube_terms": len(A3.terms),
        "B_cube_terms": len(B3.terms),
        "A_cube_empty": all(t.coeff.is_zero() for _, t in A3.terms),
        "B_cube_empty": all(t.coeff.is_zero() for _, t in B3.terms),
        "f_is_one_on_supports": recon,
        "plateau": C,
        "support": K,
        "A_cube": A3,
        "B_cube": B3,
    }
    return A, B, proof


# -- isometry pair -----------------------------------------------------------


def isometry_pair(fam: ParadoxFamily):
    """``x = sum u_t phi_t^(1/2)`` and ``y = sum u_s psi_s^(1/2)`` from a family.

    Returns ``(x, y, proof)``.
    """
    cert = verify_paradoxical_family(fam)
    if not cert.ok:
        raise FamilyNotVerified(f"family fails: {cert.failure}")
    first, last = fam.items[: fam.n], fam.items[fam.n :]
    phis = partition_of_unity("phi", [it.U for it in first])
    psis = partition_of_unity("psi", [it.U for it in last])

    def build(items, leaves, stem):
        acc = FormalElement()
        for k, (it, leaf) in enumerate(zip(items, leaves)):
            acc = acc + elementary(it.t, Coefficient.of_leaf(leaf).sqrt(), f"{stem}{k + 1}")
        return acc

    x, y = build(first, phis, "t"), build(last, psis, "s")
    xx = product(adjoint(x), x)
    yy = product(adjoint(y), y)
    xy_full = product(adjoint(x), y, prune=False)
    images = CircleSet.empty()
    for it in fam.items:
        images = images | it.image()
    witness_region = Cone(images.complement())
    proof = {
        "xstar_x_is_one": _is_unit(xx),
        "ystar_y_is_one": _is_unit(yy),
        "xstar_y_terms": len(xy_full.terms),
        "xstar_y_pruned_terms": len(xy_full.pruned().terms),
        "xstar_y": xy_full,
        "xx_star_witness": witness_region,
        "xx_star_witness_point": _region_point(witness_region),
        "xx_star_witness_nonempty": witness_region.base.has_interior(),
    }
    return x, y, proof


def _is_unit(E: FormalElement) -> bool:
    return len(E.terms) == 1 and E.terms[0][0] == IDENTITY and E.terms[0][1].coeff.is_one()
