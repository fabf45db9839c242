"""Squeezing certificates for subgroups of SL(2,R) acting on the punctured plane.

The pipeline follows the classical argument: pick a hyperbolic ``h`` whose
attracting point is never sent onto its repelling point by the finite set,
diagonalize ``h = u^-1 diag(lam, 1/lam) u``, bound the error terms by a
constant ``M`` and take ``gamma = h^n`` for the least ``n`` with

    lam^(2n) r1^2 > (r2 + sqrt(M))^2 / min_corner^2 + M.

The triple intersections are then re-checked on an exact polygonal hull.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import (
    CapExceeded,
    DegenerateCrown,
    HullCheckFailed,
    NonHyperbolic,
    ParseError,
    SameAxis,
    VanishingCorner,
)
from .projective import (
    IDENTITY,
    Mat2,
    MoebiusClass,
    ProjPoint,
    act_proj,
    classify,
    diagonalize,
    fixed_points,
    proj_sin2,
    proj_sin2_interval,
    same_axis,
    same_point,
)
from .regions import Crown, RegionSet, crown_hull
from .scalar import Quad, lower, sqrt_lower, sqrt_upper, upper

__all__ = [
    "parse_word",
    "invert_word",
    "evaluate_word",
    "FiniteSubset",
    "TransverseResult",
    "find_transverse_hyperbolic",
    "scan_transverse",
    "squeeze_constant_M",
    "squeeze_bound",
    "min_squeeze_power",
    "SqueezeCertificate",
    "squeeze_witness",
    "verify_squeeze",
    "frame_crown",
    "hull_radii",
]

_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


def parse_word(word: str) -> List[Tuple[str, int]]:
    """``"a b^-1 a^2"`` -> ``[("a", 1), ("b", -1), ("a", 2)]``; ``"e"`` is empty."""
    out: List[Tuple[str, int]] = []
    for tok in word.split():
        m = _TOKEN.match(tok)
        if not m:
            raise ParseError(f"malformed word token {tok!r}")
        name, exp = m.group(1), int(m.group(2) or 1)
        if name == "e":
            continue
        if exp == 0:
            continue
        if out and out[-1][0] == name:
            merged = out[-1][1] + exp
            out.pop()
            if merged:
                out.append((name, merged))
        else:
            out.append((name, exp))
    return out


def format_word(letters: Sequence[Tuple[str, int]]) -> str:
    if not letters:
        return "e"
    return " ".join(name if k == 1 else f"{name}^{k}" for name, k in letters)


def invert_word(word: str) -> str:
    return format_word([(n, -k) for n, k in reversed(parse_word(word))])


def evaluate_word(word: str, generators: Mapping[str, Mat2]) -> Mat2:
    result = IDENTITY
    for name, k in parse_word(word):
        if name not in generators:
            raise ParseError(f"unknown generator {name!r} in word {word!r}")
        result = result @ (generators[name] ** k)
    return result


@dataclass(frozen=True)
class FiniteSubset:
    """Finite subset F of a group given by words in named generators."""

    elements: Tuple[Tuple[str, Mat2], ...]

    @classmethod
    def from_words(cls, generators: Mapping[str, Mat2], words: Iterable[str]) -> "FiniteSubset":
        return cls(tuple((format_word(parse_word(w)), evaluate_word(w, generators)) for w in words))

    @classmethod
    def of(cls, *pairs: Tuple[str, Mat2]) -> "FiniteSubset":
        return cls(tuple(pairs))

    def matrices(self) -> List[Mat2]:
        return [m for _, m in self.elements]

    def words(self) -> List[str]:
        return [w for w, _ in self.elements]

    def symmetrized(self) -> "FiniteSubset":
        """``F u F^-1 u {e}``, deduplicated by matrix, e first."""
        out: List[Tuple[str, Mat2]] = [("e", IDENTITY)]
        seen = {IDENTITY}
        for w, m in self.elements:
            for ww, mm in ((w, m), (invert_word(w), m.inverse())):
                if mm not in seen:
                    seen.add(mm)
                    out.append((ww, mm))
        return FiniteSubset(tuple(out))

    def __len__(self):
        return len(self.elements)


@dataclass(frozen=True)
class TransverseResult:
    gamma: Mat2
    n: int
    separation: Fraction
    attracting: ProjPoint
    repelling: ProjPoint


def _require_hyperbolic(*ms: Mat2) -> None:
    for m in ms:
        if classify(m) is not MoebiusClass.HYPERBOLIC:
            raise NonHyperbolic(f"{m!r} is not hyperbolic")


def _min_separation(points: Sequence[ProjPoint], target: ProjPoint) -> Optional[Fraction]:
    """Rational lower bound of ``min |sin angle(p, target)|``, or None on a hit."""
    best: Optional[Fraction] = None
    for p in points:
        if same_point(p, target):
            return None
        bits = 64
        while True:
            lo = proj_sin2_interval(p, target, bits).lo
            if lo > 0:
                break
            bits *= 2
        s = sqrt_lower(lo, 64)
        if s == 0:
            s = Fraction(1, 2**64)
        best = s if best is None or s < best else best
    return best


def find_transverse_hyperbolic(
    F: FiniteSubset,
    eta: Optional[Mat2],
    delta: Mat2,
    n_cap: int = 64,
) -> TransverseResult:
    """Least ``n`` such that ``gamma = eta^n delta eta^-n`` has ``g gamma+ != gamma-``.

    ``eta=None`` selects the cyclic case, where ``gamma = delta``.
    """
    if eta is None:
        _require_hyperbolic(delta)
        caps = [0]
    else:
        _require_hyperbolic(eta, delta)
        if same_axis(eta, delta):
            raise SameAxis("eta and delta share their fixed points")
        caps = range(n_cap + 1)
    mats = F.symmetrized().matrices()
    fp = fixed_points(delta)
    for n in caps:
        conj = eta**n if eta is not None else IDENTITY
        gamma = conj @ delta @ conj.inverse()
        plus, minus = act_proj(conj, fp.attracting), act_proj(conj, fp.repelling)
        sep = _min_separation([act_proj(g, plus) for g in mats], minus)
        if sep is not None:
            return TransverseResult(gamma, n, sep, plus, minus)
    raise CapExceeded(
        f"no n <= {n_cap} separates g.gamma+ from gamma-; some g may fix the fixed points of eta"
    )


def _short_words(names: Sequence[str], max_len: int) -> List[str]:
    letters = [(n, 1) for n in names] + [(n, -1) for n in names]
    out = []
    for length in range(1, max_len + 1):
        for combo in itertools.product(letters, repeat=length):
            if any(combo[i][0] == combo[i + 1][0] and combo[i][1] == -combo[i + 1][1] for i in range(length - 1)):
                continue
            out.append(format_word(parse_word(" ".join(f"{n}^{k}" for n, k in combo))))
    seen, uniq = set(), []
    for w in out:
        if w not in seen:
            seen.add(w)
            uniq.append(w)
    return uniq


def scan_transverse(
    F: FiniteSubset,
    generators: Mapping[str, Mat2],
    max_len: int = 4,
    n_cap: int = 64,
) -> Tuple[TransverseResult, Optional[str], str]:
    """Search short words for a usable ``(eta, delta)``.

    Returns the result with the words chosen for eta (None in the cyclic
    case) and delta.
    """
    hyps: List[Tuple[str, Mat2]] = []
    for w in _short_words(sorted(generators), max_len):
        m = evaluate_word(w, generators)
        if classify(m) is MoebiusClass.HYPERBOLIC:
            hyps.append((w, m))
    if not hyps:
        raise NonHyperbolic("no hyperbolic word of length <= %d" % max_len)
    last_error: Exception = CapExceeded("no transverse pair found")
    transverse = False
    for (we, e), (wd, d) in itertools.product(hyps, hyps):
        if same_axis(e, d):
            continue
        transverse = True
        try:
            return find_transverse_hyperbolic(F, e, d, n_cap), we, wd
        except CapExceeded as exc:
            last_error = exc
    if not transverse:
        wd, d = hyps[0]
        return find_transverse_hyperbolic(F, None, d, n_cap), None, wd
    raise last_error


def squeeze_constant_M(F_conj: Sequence[Mat2], r1_sq, r2_sq) -> Tuple[Fraction, Fraction]:
    """Uniform bound M and ``min (g'_u)_11^2`` over the conjugated subset.

    For z in the crown, ``|g21 x + g22 y|^2 <= r2^2 (g21^2 + g22^2)``, so
    ``M = r2^2 max(g21^2 + g22^2) max(1, max g'12^2)`` dominates both
    squared error terms of the combined inequality.
    """
    r2_sq = Fraction(r2_sq)
    row2 = max(upper(g.c * g.c + g.d * g.d) for g in F_conj)
    corner12 = max(upper(g.b * g.b) for g in F_conj)
    M = r2_sq * row2 * max(Fraction(1), corner12)
    min_corner: Optional[Fraction] = None
    for g in F_conj:
        if g.a == 0:
            raise VanishingCorner(f"(g_u)_11 vanishes for {g!r}", g)
        sq = g.a * g.a
        bits = 64
        lo = lower(sq, bits)
        while lo <= 0:
            bits *= 2
            lo = lower(sq, bits)
        min_corner = lo if min_corner is None or lo < min_corner else min_corner
    return M, min_corner


def squeeze_bound(M, min_corner_sq, r2_sq) -> Fraction:
    """Rational upper bound of ``(r2 + sqrt(M))^2 / min_corner^2 + M``."""
    M, r2_sq = Fraction(M), Fraction(r2_sq)
    cross = 2 * sqrt_upper(r2_sq * M)
    return (r2_sq + M + cross) / Fraction(min_corner_sq) + M


def min_squeeze_power(lambda_sq, M, min_corner_sq, r1_sq, r2_sq, cap: int = 10_000) -> int:
    """Least ``n >= 1`` with ``lambda_sq^n r1_sq > bound``."""
    lambda_sq = Fraction(lambda_sq)
    if lambda_sq <= 1:
        raise ValueError("lambda_sq must exceed 1")
    bound = squeeze_bound(M, min_corner_sq, r2_sq)
    r1_sq = Fraction(r1_sq)
    n, val = 1, lambda_sq * r1_sq
    while val <= bound:
        n += 1
        val *= lambda_sq
        if n > cap:
            raise CapExceeded("squeeze power above cap")
    return n


def _frobenius_sq(m: Mat2) -> Fraction:
    return upper(m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d)


def frame_crown(c: Crown, u: Mat2) -> Crown:
    """A crown in frame u containing the crown c.

    With ``w = u c.frame^-1`` and ``||w^-1||_F = ||w||_F`` for unimodular w,
    norms change by at most the Frobenius norm.
    """
    if c.frame == u:
        return c
    w = u @ c.frame.inverse()
    f = _frobenius_sq(w)
    return Crown(c.r1_sq / f, c.r2_sq * f, u)


def hull_radii(c: Crown, sides: int) -> Tuple[Fraction, Fraction]:
    """Exact extreme squared norms of the frame-u hull, measured in frame u."""
    std = crown_hull(Crown(c.r1_sq, c.r2_sq), sides)
    return (
        min(p.min_norm_sq() for p in std.polygons),
        max(p.max_norm_sq() for p in std.polygons),
    )


@dataclass(frozen=True)
class SqueezeCertificate:
    gamma: Mat2
    base: Mat2
    n: int
    lambda_sq: Fraction
    M: Fraction
    min_corner_sq: Fraction
    margin: Fraction
    frame: Mat2
    r1_sq: Fraction
    r2_sq: Fraction
    hull_sides: int
    hull_r1_sq: Fraction
    hull_r2_sq: Fraction
    subset: FiniteSubset
    pair_empty: Tuple[Tuple[str, str, bool], ...]
    transverse_n: int = 0
    eta_word: Optional[str] = None
    delta_word: Optional[str] = None

    @property
    def crown(self) -> Crown:
        return Crown(self.r1_sq, self.r2_sq, self.frame)

    @property
    def all_empty(self) -> bool:
        return all(flag for _, _, flag in self.pair_empty)

    def hull(self) -> RegionSet:
        return crown_hull(self.crown, self.hull_sides)


def _lambda_sq_lower(lam) -> Fraction:
    sq = lam * lam
    bits = 64
    lo = lower(sq, bits)
    while lo <= 1:
        bits *= 2
        lo = lower(sq, bits)
    return lo


def check_triples(gamma: Mat2, subset: FiniteSubset, hull: RegionSet) -> Tuple[Tuple[str, str, bool], ...]:
    """Exact emptiness of ``gamma g gamma h Hull n gamma g Hull n Hull`` per pair."""
    flags = []
    pairs = subset.elements
    cache: Dict[str, RegionSet] = {}
    for wg, g in pairs:
        gg = gamma @ g
        if wg not in cache:
            cache[wg] = hull.intersect(hull.image(gg))
        base = cache[wg]
        for wh, h in pairs:
            if base.is_empty(strict=True):
                flags.append((wg, wh, True))
                continue
            triple = base.intersect(hull.image(gg @ gamma @ h))
            flags.append((wg, wh, triple.is_empty(strict=True)))
    return tuple(flags)


def squeeze_witness(
    F: FiniteSubset,
    C: Crown,
    *,
    eta: Optional[Mat2] = None,
    delta: Optional[Mat2] = None,
    generators: Optional[Mapping[str, Mat2]] = None,
    hull_sides: int = 8,
    max_hull_sides: int = 64,
    n_cap: int = 64,
) -> SqueezeCertificate:
    """Run the full squeezing pipeline and return a checked certificate.

    Supply either ``delta`` (with ``eta``, or alone for a cyclic group) or
    ``generators`` for a short-word scan.
    """
    if not 0 < C.r1_sq < C.r2_sq:
        raise DegenerateCrown("need 0 < r1_sq < r2_sq")
    eta_word = delta_word = None
    if delta is not None:
        tr = find_transverse_hyperbolic(F, eta, delta, n_cap)
    elif generators is not None:
        tr, eta_word, delta_word = scan_transverse(F, generators, n_cap=n_cap)
    else:
        raise ValueError("need delta or generators to locate a transverse hyperbolic element")
    h = tr.gamma
    u, lam = diagonalize(h)
    lambda_sq = _lambda_sq_lower(lam)
    work = frame_crown(C, u)
    S = F.symmetrized()
    F_conj = [u @ g @ u.inverse() for g in S.matrices()]

    sides = hull_sides
    failed: Tuple = ()
    while sides <= max_hull_sides:
        h1, h2 = hull_radii(work, sides)
        M, min_corner = squeeze_constant_M(F_conj, h1, h2)
        n = min_squeeze_power(lambda_sq, M, min_corner, h1, h2)
        margin = lambda_sq**n * h1 - squeeze_bound(M, min_corner, h2)
        gamma = h**n
        flags = check_triples(gamma, S, crown_hull(work, sides))
        if all(f for _, _, f in flags):
            return SqueezeCertificate(
                gamma=gamma,
                base=h,
                n=n,
                lambda_sq=lambda_sq,
                M=M,
                min_corner_sq=min_corner,
                margin=margin,
                frame=u,
                r1_sq=work.r1_sq,
                r2_sq=work.r2_sq,
                hull_sides=sides,
                hull_r1_sq=h1,
                hull_r2_sq=h2,
                subset=S,
                pair_empty=flags,
                transverse_n=tr.n,
                eta_word=eta_word,
                delta_word=delta_word,
            )
        failed = tuple((g, hh) for g, hh, f in flags if not f)
        sides *= 2
    raise HullCheckFailed(f"polygon triple check failed up to {max_hull_sides} sides", failed)


def verify_squeeze(cert: SqueezeCertificate) -> Dict[str, object]:
    """Recompute every claim of a certificate from its own data."""
    problems: List[str] = []
    S = cert.subset
    u = cert.frame
    if cert.gamma != cert.base**cert.n:
        problems.append("gamma != base^n")
    try:
        u_check, lam = diagonalize(cert.base)
    except NonHyperbolic:
        problems.append("base is not hyperbolic")
        lam = None
    if lam is not None:
        recon = u.inverse() @ Mat2(lam, 0, 0, 1 / lam) @ u
        if recon != cert.base:
            problems.append("frame does not diagonalize the base")
        if not cert.lambda_sq <= lam * lam:
            problems.append("lambda_sq is not a lower bound")
    h1, h2 = hull_radii(cert.crown, cert.hull_sides)
    if (h1, h2) != (cert.hull_r1_sq, cert.hull_r2_sq):
        problems.append("hull radii mismatch")
    F_conj = [u @ g @ u.inverse() for g in S.matrices()]
    try:
        M, min_corner = squeeze_constant_M(F_conj, h1, h2)
    except VanishingCorner:
        problems.append("vanishing corner")
        M, min_corner = None, None
    if M is not None:
        if M > cert.M or min_corner < cert.min_corner_sq:
            problems.append("M or min_corner does not dominate the recomputed values")
        margin = cert.lambda_sq**cert.n * h1 - squeeze_bound(cert.M, cert.min_corner_sq, h2)
        if margin != cert.margin:
            problems.append("margin mismatch")
        if margin <= 0:
            problems.append("margin is not positive")
    flags = check_triples(cert.gamma, S, cert.hull())
    bad = [(g, h) for g, h, f in flags if not f]
    if bad:
        problems.append(f"non-empty triples: {bad}")
    if flags != cert.pair_empty:
        problems.append("recorded pair flags differ")
    return {"ok": not problems, "problems": problems, "nonempty_pairs": bad}
