"""Acceptance gate. Each criterion prints a single PASS/FAIL line (also collected in the terminal summary)."""

import random
import time

import pytest

from torsorext.catalog import EXAMPLES
from torsorext.cli import random_a
from torsorext.coeffs import CoeffScalar
from torsorext.document import Document
from torsorext.errors import DoesNotFactor, FinitenessGuardFailed
from torsorext.groebner import IdealPresentation, contains, ideal_equal, model_ideal, to_model
from torsorext.hopf import builtin, general_linear, verify_hopf
from torsorext.poly import DEGREVLEX, MultiPoly
from torsorext.schemes import (AffineAlgebra, Section, algebra, flat_closure, generic_fiber,
                               model_equal, neron_blowup, rename_algebra, section_lifts)
from torsorext.torsors import (blowup_torsor, extend_torsor, is_trivial_special_fiber,
                               m_torsor_roundtrip, verify_torsor)

from oracle import add, member, mul, random_poly
from test_groebner import _to_multi
from test_hopf import corrupted_controls


CRITERIA = []


def report(n, ok, detail, start, limit=None):
    elapsed = time.perf_counter() - start
    within = limit is None or elapsed < limit
    verdict = "PASS" if ok and within else "FAIL"
    bound = f" (limit {limit:g} s)" if limit else ""
    line = f"{verdict} criterion {n}: {detail} [{elapsed:.2f} s{bound}]"
    CRITERIA.append(line)
    print("\n" + line)
    assert ok, detail
    assert within, f"took {elapsed:.1f} s"


def doc(text):
    d = Document(text)
    return d, d.block("T")


def torsor_text(p, relation, command="blowup", group="builtin = Z/p\nbase = R\nvar = x", over="R",
                extra=""):
    return f"""torsor-problem v1
[problem]
p = {p}
command = {command}
target = T

[scheme X]
base = R
variables = y
relations =
flat = true
section = y=0

[group G]
{group}

[torsor T]
base = X
group = G
over = {over}
fibre = z
relations = {relation}
coaction.z = x_L + z_R
{extra}
"""


def test_criterion_1_example_blowup():
    start = time.perf_counter()
    _, T = doc(EXAMPLES["m-group"])
    B = blowup_torsor(T, {"y": 0})
    ok = (model_equal(B.total, algebra("R", ["x", "y"], ["pi*y^2 - y - x"], 2))
          and model_equal(B.group.algebra, algebra("R", ["g"], ["pi*g^2 - g"], 2))
          and verify_torsor(B).passed)
    report(1, ok, "blow-up of y^2 - y - pi*x gives pi*y^2 - y - x under pi*g^2 - g", start, 5)


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("gamma", [1, 2, 3])
def test_criterion_2_iterated_blowups(p, gamma):
    start = time.perf_counter()
    _, T = doc(torsor_text(p, f"z^{p} - z - pi^{gamma}*y", extra="embedding = additive"))
    for _ in range(gamma):
        T = blowup_torsor(T, {"z": 0})
    ok = model_equal(T.total, algebra("R", ["y", "z"], [f"pi^{gamma * (p - 1)}*z^{p} - z - y"], p))
    try:
        blowup_torsor(T, {"z": 0})
        guarded = False
    except FinitenessGuardFailed:
        guarded = True
    report(2, ok and guarded, f"p={p}, gamma={gamma}: {gamma} blow-ups reach pi^{gamma * (p - 1)}*z^{p} - z - y, "
           f"step {gamma + 1} hits the finiteness guard", start, 10)


@pytest.mark.parametrize("gamma", [-1, -3])
@pytest.mark.parametrize("rule", ["(1-gamma)/2", "ceil(-gamma/2)"])
def test_criterion_3_no_blowup_needed(gamma, rule):
    start = time.perf_counter()
    alpha = (1 - gamma) // 2 if rule == "(1-gamma)/2" else -(gamma // 2)
    d, T = doc(torsor_text(2, f"z^2 + z + pi^({gamma})*y", command="extend", over="K",
                           group="builtin = Z/p\nbase = K\nvar = x",
                           extra=f"point = y=0, z=0\nembedding = basis: 1, pi^{alpha}*x"))
    res = extend_torsor(d.block("X"), d.scheme_section("X"), T)
    total = algebra("R", ["y", "z12"], [f"z12^2 + pi^{alpha}*z12 + pi^{2 * alpha + gamma}*y"], 2)
    group = algebra("R", ["x12"], [f"x12^2 + pi^{alpha}*x12"], 2)
    ok = res.count == 0 and model_equal(res.total, total) and model_equal(res.group.algebra, group)
    guarded = True
    if gamma % 2 and alpha == (1 - gamma) // 2:
        try:
            blowup_torsor(res.torsor, {"z12": 0})
            guarded = False
        except FinitenessGuardFailed:
            pass
    report(3, ok and guarded, f"gamma={gamma}, alpha={alpha} ({rule}): 0 blow-ups, exact model, "
           "further blow-up refused", start, 10)


def test_criterion_4_one_blowup():
    start = time.perf_counter()
    d, T = doc(EXAMPLES["extend-blowup"])
    res = extend_torsor(d.block("X"), d.scheme_section("X"), T, names=d.names("T"))
    total = rename_algebra(algebra("R", ["y", "z12", "w"], ["z12^2 + z12 + w", "pi*w - y"], 2), {"w": "t"})
    ok = (res.count == 1
          and model_equal(res.base, algebra("R", ["y", "t"], ["pi*t - y"], 2))
          and model_equal(res.total, total)
          and model_equal(res.group.algebra, algebra("R", ["x12"], ["x12^2 - x12"], 2))
          and verify_torsor(res.torsor).passed)
    further = res.further_blowup()
    trivial = is_trivial_special_fiber(further.torsor, further.group_correspondence())
    report(4, ok and trivial, "one blow-up to pi*t - y, (Z/2)_R model verifies, "
           "next blow-up has trivial special fibre", start, 10)


def test_criterion_5_roundtrip_fuzz():
    start = time.perf_counter()
    bad = []
    for p in (2, 3, 5):
        rng = random.Random(p)
        for _ in range(200):
            a = random_a(rng, p, 4, 3)
            if not m_torsor_roundtrip(a, algebra("R", ["x"], [], p, flat=True), p):
                bad.append((p, str(a)))
    report(5, not bad, f"600 random a, mismatches: {bad[:3]}", start, 300)


def test_criterion_6_hopf_suite():
    start = time.perf_counter()
    groups = [builtin("Z/p", p, base=b) for p in (2, 3, 5, 7, 11, 13) for b in ("K", "R")]
    groups += [builtin("M", p) for p in (2, 3, 5)]
    groups += [builtin("alpha", 2, alpha=a) for a in range(5)]
    groups += [builtin("GL", p, d=d) for p in (2, 3) for d in (1, 2, 3)]
    groups += [general_linear(2, 2, base="R")]
    failed = [G.name for G in groups if not verify_hopf(G).passed]
    caught = sum(not verify_hopf(H).passed for _, H in corrupted_controls())
    report(6, not failed and caught == 5,
           f"{len(groups) - len(failed)}/{len(groups)} builtins pass, {caught}/5 corrupted controls rejected", start)


def _random_r_poly(rng, names, degree, p=2):
    terms = {}
    for _ in range(rng.randint(1, 4)):
        mono = {}
        for _ in range(rng.randint(0, degree)):
            v = rng.choice(names)
            mono[v] = mono.get(v, 0) + 1
        coeff = CoeffScalar(tuple(rng.randrange(p) for _ in range(3)), (1,), p)
        key = tuple(sorted(mono.items(), key=lambda t: names.index(t[0])))
        terms[key] = terms.get(key, CoeffScalar.zero(p)) + coeff
    return MultiPoly(terms, p, tuple(names))


def test_criterion_7_flat_closure_properties():
    start = time.perf_counter()
    rng = random.Random(7)
    bad = 0
    for _ in range(100):
        names = ["x", "y", "z"][:rng.randint(1, 3)]
        gens = [g for g in (_random_r_poly(rng, names, 3) for _ in range(rng.randint(1, 3))) if not g.is_zero()]
        A = AffineAlgebra("R", tuple(names), tuple(gens), 2)
        C = flat_closure(A)
        J = model_ideal(list(C.relations), names, 2)
        ok = model_equal(flat_closure(C), C)
        ok = ok and all(contains(J, to_model(g)) for g in gens)
        gA, gC = generic_fiber(A), generic_fiber(C)
        ok = ok and ideal_equal(IdealPresentation(gA.all_relations(), gA.variables, DEGREVLEX, "K", 2),
                                IdealPresentation(gC.all_relations(), gC.variables, DEGREVLEX, "K", 2))
        bad += not ok
    report(7, bad == 0, f"100 random ideals over F_2[pi], {bad} violations", start, 120)


def _point(rng, names, p=2):
    return {v: CoeffScalar(tuple(rng.randrange(p) for _ in range(3)), (1,), p) for v in names}


def _through(rng, names, pts, p=2):
    """A relation vanishing at each of the given R-points."""
    f = MultiPoly.constant(CoeffScalar.one(p), p)
    for P in pts:
        v = rng.choice(names)
        f = f * (MultiPoly.var(v, p) - MultiPoly.constant(P[v], p))
    return f


def test_criterion_8_blowup_composition():
    start = time.perf_counter()
    rng = random.Random(8)
    bad, lifted_count = [], 0
    for i in range(50):
        names = ["u", "v"][:rng.randint(1, 2)]
        c = _point(rng, names)
        e, e2 = rng.randint(1, 2), rng.randint(1, 2)
        if rng.random() < 0.5:
            shift = {v: CoeffScalar.pi(2, e) * CoeffScalar(tuple(rng.randrange(2) for _ in range(2)), (1,), 2)
                     for v in names}
            s = {v: c[v] + shift[v] for v in names}
        else:
            s = _point(rng, names)
        rels = [_through(rng, names, [c, s])] if len(names) > 1 else []
        X = flat_closure(AffineAlgebra("R", tuple(names), tuple(rels), 2))
        xc, xs = Section(X, c).validate(), Section(X, s).validate()
        hits = all((s[v] - c[v]).valuation() >= e for v in names)
        blown = neron_blowup(X, xc, e, keep_old=False)
        try:
            lifted = section_lifts(xs, blown)
            lifts = True
        except DoesNotFactor:
            lifts = False
        ok = lifts == hits
        lifted_count += lifts
        if lifts:
            twice, _ = neron_blowup(blown[0], lifted, e2, keep_old=False)
            once, _ = neron_blowup(X, xs, e + e2, keep_old=False)
            ok = ok and model_equal(twice, once)
        if not ok:
            bad.append(i)
    report(8, not bad, f"50 (scheme, section) pairs, {lifted_count} lift, failures at {bad}", start)


def test_criterion_9_groebner_oracle():
    start = time.perf_counter()
    disagree = []
    for seed in range(100):
        rng = random.Random(1000 + seed)
        p = rng.choice([2, 3])
        n = rng.randint(1, 2)
        names = ["x", "y"][:n]
        gens = [g for g in (random_poly(rng, n, 2, p) for _ in range(rng.randint(1, 2))) if g]
        if not gens:
            continue
        I = IdealPresentation([_to_multi(g, names, p) for g in gens], tuple(names), DEGREVLEX, "k", p)
        f = random_poly(rng, n, 3, p)
        if rng.random() < 0.5:
            f = _combine(rng, gens, n, p)
        if contains(I, _to_multi(f, names, p)) != member(f, gens, n, p, 6):
            disagree.append(seed)
    report(9, not disagree, f"100 membership questions, disagreements at {disagree}", start)


def _combine(rng, gens, n, p):
    """A random element of the ideal, so that about half the questions have answer yes."""
    f = {}
    for g in gens:
        f = add(f, mul(random_poly(rng, n, 1, p), g, p), p)
    return f
