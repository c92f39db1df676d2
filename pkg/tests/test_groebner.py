import random

import pytest

from torsorext.coeffs import CoeffScalar
from torsorext.errors import ModelRingError, ResourceLimit
from torsorext.groebner import (IdealPresentation, LIMITS, contains, eliminate, from_model,
                                groebner_basis, ideal_equal, ideal_quotient, is_groebner,
                                is_pi_saturated, model_ideal, normal_form, saturate,
                                saturate_last_variable, set_limits, to_model)
from torsorext.poly import MonomialOrder, MultiPoly, parse

from oracle import member, random_poly


def ideal(gens, variables, p=2, order=None):
    polys = [parse(g, variables, p) for g in gens]
    return IdealPresentation(polys, tuple(variables), order or MonomialOrder(), "K", p)


def test_lex_basis():
    I = ideal(["x^2 - 1", "x*y - 1"], ["x", "y"], order=MonomialOrder("lex"))
    G = {str(g) for g in groebner_basis(I)}
    assert G == {"x + y", "y^2 + 1"}


def test_basis_is_groebner_and_reduced_form():
    I = ideal(["x^2 + pi*y", "y^2 + x"], ["x", "y"], p=3)
    G = groebner_basis(I)
    assert is_groebner(G, I)
    f = parse("x^3*y + y^5", ["x", "y"], 3)
    assert contains(I, f - normal_form(f, I))


def test_normal_form_example():
    I = ideal(["x^2 + pi*y", "y^2 + x"], ["x", "y"], p=2)
    nf = normal_form(parse("y^3", ["x", "y"], 2), I)
    assert contains(I, parse("y^3", ["x", "y"], 2) - nf)


def test_ideal_equal_scaling():
    I = ideal(["x^2 + x"], ["x"])
    J = ideal(["pi*x^2 + pi*x"], ["x"])
    assert ideal_equal(I, J)


def test_model_ring_round_trip():
    f = parse("pi^2*x + (1 + pi)*y", ["x", "y"], 2)
    assert from_model(to_model(f)) == f
    with pytest.raises(ModelRingError):
        to_model(parse("(1/pi)*x", ["x"], 2))
    with pytest.raises(ModelRingError):
        to_model(parse("(1/(1+pi))*x", ["x"], 2))


def test_saturation_variants_agree():
    J = model_ideal([parse("pi*x^2 + pi*x", ["x"], 2), parse("pi^2*y", ["y"], 2)], ["x", "y"], 2)
    pi = to_model(parse("pi*x", ["x"], 2)).substitute({"x": 1})
    S1 = saturate(J, pi)
    S2 = saturate_last_variable(J, "pi")
    assert ideal_equal(S1, S2)
    assert not is_pi_saturated(J)
    assert is_pi_saturated(S1)


def test_already_saturated():
    J = model_ideal([parse("pi*y^2 - y - x", ["x", "y"], 2)], ["x", "y"], 2)
    assert is_pi_saturated(J)


def test_elimination():
    I = ideal(["y - x^2"], ["x", "y"])
    assert eliminate(I, ["y"]).generators == ()
    I = ideal(["x - t^2", "y - t^3"], ["t", "x", "y"])
    E = eliminate(I, ["t"])
    assert ideal_equal(E, ideal(["x^3 - y^2"], ["x", "y"]))


def test_ideal_quotient():
    I = ideal(["x*y", "x^2"], ["x", "y"])
    Q = ideal_quotient(I, parse("x", ["x"], 2))
    assert ideal_equal(Q, ideal(["x", "y"], ["x", "y"]))


def test_unit_and_zero_ideal():
    assert ideal(["x", "x + 1"], ["x"]).is_unit_ideal()
    assert IdealPresentation([], ("x",), MonomialOrder(), "K", 2).is_zero_ideal()


def test_resource_limit():
    old = (LIMITS.degree_cap, LIMITS.size_cap)
    try:
        set_limits(degree_cap=3)
        I = ideal(["x^3 + y^2*z", "x*y^2 + z^3 + 1", "z^2*x + y"], ["x", "y", "z"], p=3)
        with pytest.raises(ResourceLimit):
            groebner_basis(I)
    finally:
        set_limits(*old)


def _to_multi(f, names, p):
    terms = {}
    for e, c in f.items():
        terms[tuple((v, k) for v, k in zip(names, e) if k)] = CoeffScalar.from_int(c, p)
    return MultiPoly(terms, p, tuple(names))


@pytest.mark.parametrize("seed", range(20))
def test_membership_agrees_with_oracle(seed):
    rng = random.Random(seed)
    p = rng.choice([2, 3])
    names = ["x", "y"]
    gens = [random_poly(rng, 2, 2, p) for _ in range(2)]
    gens = [g for g in gens if g]
    I = IdealPresentation([_to_multi(g, names, p) for g in gens], tuple(names), MonomialOrder(), "k", p)
    f = random_poly(rng, 2, 3, p)
    assert contains(I, _to_multi(f, names, p)) == member(f, gens, 2, p, 6)
