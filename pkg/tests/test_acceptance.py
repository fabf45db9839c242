"""One check per acceptance criterion; each prints a PASS/FAIL line."""

import json
import random
import time
from fractions import Fraction

import numpy as np

from planecert import serialize as ser
from planecert.circle import Arc, CircleSet
from planecert.cli import main
from planecert.crossed import (
    Coefficient,
    FormalElement,
    adjoint,
    bump,
    elementary,
    isometry_pair,
    nilpotent_factorization,
    product,
    scaling_check,
)
from planecert.oracle import GridSpec, brute_min_power, evaluate, falsify_empty, realize_numeric
from planecert.paradox import ParadoxItem, contractive_pair, paradoxical_family, shrink_arc, verify_paradoxical_family
from planecert.projective import Mat2, MoebiusClass, ProjPoint, act_proj, classify, fixed_points, proj_sin2
from planecert.regions import Cone, Crown, RegionSet, enclosing_crown, rect
from planecert.scalar import compare
from planecert.witness import FiniteSubset, find_transverse_hyperbolic, squeeze_witness, verify_squeeze

from conftest import A, ACCEPTANCE_LINES, B, GENS, TWO_GEN_WORDS

SQUARE = RegionSet.of(rect(1, Fraction(-1, 2), 2, Fraction(1, 2)))


def report(number, title, ok, seconds, limit, detail=""):
    ok = bool(ok) and (limit is None or seconds < limit)
    budget = "no limit" if limit is None else f"limit {limit}s"
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  ({seconds:.2f}s, {budget}) {detail}".rstrip()
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def _random_unimodular(rng):
    m = Mat2(1, 0, 0, 1)
    for _ in range(rng.randint(1, 4)):
        q = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        m = m @ (Mat2(1, q, 0, 1) if rng.random() < 0.5 else Mat2(1, 0, q, 1))
    return m


def test_criterion_1_classification():
    t0 = time.perf_counter()
    canon = [
        (Mat2(1, 1, 0, 1), MoebiusClass.PARABOLIC),
        (Mat2(2, 0, 0, Fraction(1, 2)), MoebiusClass.HYPERBOLIC),
        (Mat2(0, -1, 1, 0), MoebiusClass.ELLIPTIC),
    ]
    ok = all(classify(g) is c for g, c in canon)
    rng = random.Random(1)
    bad = 0
    for i in range(1000):
        g, c = canon[i % 3]
        u = _random_unimodular(rng)
        bad += classify(u @ g @ u.inverse()) is not c
    dt = time.perf_counter() - t0
    report(1, "classification suite", ok and bad == 0, dt, 1, f"[{bad} misclassified of 1000 conjugates]")


def _random_hyperbolic(rng):
    while True:
        # ad - bc = 1 with a, c != 0 chosen freely; the trace usually has an irrational discriminant
        a = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
        b = rng.randint(1, 5)
        c = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
        if a == 0 or c == 0:
            continue
        m = Mat2(a, b, c, (1 + b * c) / a)
        if classify(m) is MoebiusClass.HYPERBOLIC:
            return m


def test_criterion_2_fixed_points():
    t0 = time.perf_counter()
    rng = random.Random(2)
    eps = Fraction(1, 10**12)  # sin^2 < 1e-12 means angle < 1e-6
    exact_fail = conv_fail = irrational = 0
    worst_steps = 0
    for _ in range(100):
        g = _random_hyperbolic(rng)
        fp = fixed_points(g)
        irrational += not fp.attracting.is_rational()
        if act_proj(g, fp.attracting) != fp.attracting or act_proj(g, fp.repelling) != fp.repelling:
            exact_fail += 1
        q = ProjPoint(1, 0) if ProjPoint(1, 0) != fp.repelling else ProjPoint(0, 1)
        for step in range(1, 201):
            q = act_proj(g, q)
            if compare(proj_sin2(q, fp.attracting), eps) < 0:
                worst_steps = max(worst_steps, step)
                break
        else:
            conv_fail += 1
    dt = time.perf_counter() - t0
    report(
        2,
        "fixed-point exactness",
        exact_fail == 0 and conv_fail == 0,
        dt,
        5,
        f"[{irrational}/100 irrational, max {worst_steps} steps]",
    )


def _squeeze_case(F, C, base, **kw):
    t0 = time.perf_counter()
    cert = squeeze_witness(F, C, **kw)
    check = verify_squeeze(cert)
    S = cert.subset.matrices()
    claims = [[cert.gamma @ g @ cert.gamma @ h, cert.gamma @ g] for g in S for h in S]
    rep = falsify_empty(claims, cert.crown, GridSpec(100, 0))
    n_min = brute_min_power(F, cert.crown, cert.base, GridSpec(100, 0), cap=cert.n)
    dt = time.perf_counter() - t0
    ok = cert.margin > 0 and cert.all_empty and check["ok"] and not rep.found and cert.n >= n_min
    return ok, dt, f"[n={cert.n}, n_min={n_min}, pairs={len(cert.pair_empty)}, oracle hits={len(rep.counterexamples)}]"


def test_criterion_3_squeezing():
    ok1, dt1, d1 = _squeeze_case(FiniteSubset.from_words({"a": A}, ["a", "a^-1"]), Crown(1, 4), A, delta=A)
    ok2, dt2, d2 = _squeeze_case(FiniteSubset.from_words(GENS, TWO_GEN_WORDS), Crown(1, 4), None, generators=GENS)
    report(3, "squeezing end-to-end, cyclic", ok1, dt1, 10, d1)
    report(3, "squeezing end-to-end, two generators", ok2, dt2, 10, d2)


def test_criterion_4_transverse():
    t0 = time.perf_counter()
    subsets = [
        FiniteSubset.from_words(GENS, TWO_GEN_WORDS),
        FiniteSubset.from_words(GENS, ["a", "b", "b^-1 a b", "a b a^-1"]),
        FiniteSubset.from_words(GENS, ["b^2", "a^-1 b", "b a^2", "a^3"]),
        # the quarter turn swaps the fixed points of b, forcing a conjugation
        FiniteSubset((("r", Mat2(0, -1, 1, 0)),)),
    ]
    ok, ns = True, []
    for F in subsets:
        res = find_transverse_hyperbolic(F, A, B, n_cap=8)
        ns.append(res.n)
        ok &= res.n <= 8 and res.separation > 0
        for _, g in F.symmetrized().elements:
            ok &= act_proj(g, res.attracting) != res.repelling
    dt = time.perf_counter() - t0
    report(4, "transverse hyperbolic witness", ok, dt, 2, f"[n values {ns}]")


def test_criterion_5_paradox():
    t0 = time.perf_counter()
    fam = paradoxical_family(A, B, 2, 2)
    cert = verify_paradoxical_family(fam)
    it = fam.items[0]
    bad = fam.with_item(0, ParadoxItem(it.t, shrink_arc(it.U, Fraction(1, 2)), it.label))
    bad_cert = verify_paradoxical_family(bad)
    w = bad_cert.witness
    uncovered = w is not None and not any(x.U.contains(w) for x in bad.items[: bad.n])
    ok = (
        cert.ok
        and cert.conditions["cover_first"]
        and cert.conditions["cover_last"]
        and cert.conditions["images_disjoint"]
        and cert.conditions["union_proper"]
        and not bad_cert.ok
        and uncovered
    )
    dt = time.perf_counter() - t0
    report(5, "paradoxical family", ok, dt, 2, f"[p={fam.power}, halved U1 fails at {w}]")


def test_criterion_6_scaling():
    t0 = time.perf_counter()
    cp = contractive_pair(A, U=Arc.slopes(-1, 1))
    x = elementary(cp.t, Coefficient.of_leaf(bump("f", Cone.over(cp.U), Cone(cp.image_closure()))))
    res = scaling_check(x)
    xsx, xxs = product(adjoint(x), x), product(x, adjoint(x))
    grid = GridSpec(100, 0, CircleSet.whole())
    lhs = realize_numeric(product(xsx, xxs), grid)
    rhs = realize_numeric(xxs, grid)
    exact = len(lhs.points) == 10**4 and np.array_equal(lhs.values["e"], rhs.values["e"])
    gap = abs(evaluate(xsx, res.witness_point)["e"] - evaluate(xxs, res.witness_point)["e"])
    dt = time.perf_counter() - t0
    report(6, "contractive pair / scaling element", res.is_scaling and exact and gap >= 0.5, dt, 2, f"[gap {gap}]")


def test_criterion_7_nilpotent():
    t0 = time.perf_counter()
    F = FiniteSubset.from_words({"a": A}, ["a"])
    cert = squeeze_witness(F, enclosing_crown(SQUARE), delta=A)
    z = FormalElement.coeff_at(Coefficient.of_leaf(bump("z", SQUARE, SQUARE)), A, "a")
    _, _, proof = nilpotent_factorization(z, cert)
    grid = GridSpec(100, 0, cert.crown)
    ta, tb = realize_numeric(proof["A_cube"], grid), realize_numeric(proof["B_cube"], grid)
    ok = proof["A_cube_empty"] and proof["B_cube_empty"] and ta.all_zero() and tb.all_zero() and len(ta.points) == 10**4
    dt = time.perf_counter() - t0
    report(7, "nilpotent factorization", ok, dt, 5, f"[n={cert.n}]")


def test_criterion_8_isometry():
    t0 = time.perf_counter()
    fam = paradoxical_family(A, B, 2, 2)
    _, _, proof = isometry_pair(fam)
    table = realize_numeric(proof["xstar_y"], GridSpec(100, 0, CircleSet.whole()))
    ok = (
        proof["xstar_y_pruned_terms"] == 0
        and len(table.points) == 10**4
        and table.max_abs() <= 1e-12
        and proof["xx_star_witness_nonempty"]
    )
    dt = time.perf_counter() - t0
    report(8, "isometry pair", ok, dt, 5, f"[max |x*y| = {table.max_abs()}]")


def test_criterion_9_serialization(tmp_path, capsys):
    t0 = time.perf_counter()
    certs = [
        squeeze_witness(FiniteSubset.from_words({"a": A}, ["a", "a^-1"]), Crown(1, 4), delta=A),
        squeeze_witness(FiniteSubset.from_words({"a": A}, ["a"]), enclosing_crown(SQUARE), delta=A),
        paradoxical_family(A, B, 2, 2),
        contractive_pair(A, U=Arc.slopes(-1, 1)),
    ]
    certs.append(verify_paradoxical_family(certs[2]))
    ok = True
    for c in certs:
        text = ser.dumps(c)
        ok &= ser.dumps(ser.loads(text)) == text and ser.loads(text) == c
    ok &= verify_squeeze(ser.loads(ser.dumps(certs[0])))["ok"]
    ok &= verify_squeeze(ser.loads(ser.dumps(certs[1])))["ok"]
    ok &= verify_paradoxical_family(ser.loads(ser.dumps(certs[2]))).ok
    ok &= ser.loads(ser.dumps(certs[3])).verify()
    good = tmp_path / "good.json"
    good.write_text(ser.dumps(certs[0]))
    ok &= main(["falsify", str(good)]) == 0
    doc = json.loads(good.read_text())
    doc["n"], doc["gamma"] = 1, [["2", "0"], ["0", "1/2"]]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    capsys.readouterr()
    code = main(["falsify", str(bad)])
    out = json.loads(capsys.readouterr().out)
    hits = out["oracle"]["counterexamples"]
    ok &= code == 1 and len(hits) > 0
    dt = time.perf_counter() - t0
    report(9, "serialization round trip and falsify", ok, dt, None, f"[{len(certs)} certificates; corrupted cert: exit {code}, {len(hits)} counterexamples]")
