import warnings

import pytest

from torsorext.coeffs import CoeffScalar
from torsorext.errors import DoesNotFactor, InputError, NotFlat, NotFlatWarning, SectionInvalid
from torsorext.schemes import (AffineAlgebra, Section, algebra, flat_closure, generic_fiber,
                               is_finite_over, is_flat, model_equal, neron_blowup, origin,
                               section_lifts, special_fiber)


def test_blowup_of_affine_line():
    X = algebra("R", ["x"], [], 2, flat=True)
    Y, trace = neron_blowup(X, origin(X))
    assert model_equal(Y, algebra("R", ["x", "x'"], ["x - pi*x'"], 2))
    Y2, _ = neron_blowup(X, origin(X), e=2)
    assert model_equal(Y2, algebra("R", ["x", "x'"], ["x - pi^2*x'"], 2))
    assert any("substitute x" in line for line in trace.lines())


def test_blowup_e_zero_is_identity():
    X = algebra("R", ["x"], ["x^2 - x"], 3, flat=True)
    Y, _ = neron_blowup(X, origin(X), e=0)
    assert Y is X


def test_section_lifting():
    X = algebra("R", ["x"], [], 2, flat=True)
    blown = neron_blowup(X, origin(X))
    s = section_lifts(Section(X, {"x": CoeffScalar.pi(2)}), blown)
    assert s.assignments["x'"] == CoeffScalar.one(2)
    with pytest.raises(DoesNotFactor):
        section_lifts(Section(X, {"x": 1}), blown)


def test_invalid_sections():
    X = algebra("R", ["x"], ["x^2 - x"], 2, flat=True)
    with pytest.raises(SectionInvalid):
        Section(X, {"x": CoeffScalar.pi(2)}).validate()
    with pytest.raises(SectionInvalid):
        Section(X, {"x": CoeffScalar.pi(2, -1)}).validate()
    with pytest.raises(SectionInvalid):
        Section(X, {}).validate()


def test_nonflat_blowup_rejected():
    X = algebra("R", ["x"], ["pi*x"], 2)
    with pytest.raises(NotFlat):
        neron_blowup(X, origin(X))


def test_flat_closure_examples():
    A = algebra("R", ["x"], ["pi*x^2 + pi*x"], 2)
    assert not is_flat(A)
    C = flat_closure(A)
    assert C.flat and model_equal(C, algebra("R", ["x"], ["x^2 + x"], 2))
    B = algebra("R", ["x", "y"], ["pi*y", "x*y - pi"], 2)
    C = flat_closure(B)
    assert C.ideal().is_unit_ideal()  # empty generic fibre


def test_special_fiber_and_finiteness():
    A = flat_closure(algebra("R", ["x", "y"], ["y^2 - y - pi*x"], 2))
    S = special_fiber(A)
    assert S.base == "k"
    assert is_finite_over(S, ["x"])
    M = algebra("R", ["x", "y"], ["pi*y^2 - y - x"], 2, flat=True)
    assert is_finite_over(special_fiber(M), ["x"])
    assert not is_finite_over(special_fiber(algebra("R", ["x", "y"], ["pi*y + x"], 2, flat=True)), ["x"])


def test_naive_special_fiber_warns():
    A = algebra("R", ["x"], ["pi*x"], 2)
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        S = special_fiber(A)
    assert S.naive and any(issubclass(x.category, NotFlatWarning) for x in w)


def test_generic_fiber():
    A = algebra("R", ["x"], ["pi*x - 1"], 2, flat=True)
    assert generic_fiber(A).base == "K"


def test_pi_as_variable_rejected():
    with pytest.raises(InputError):
        AffineAlgebra("R", ("pi",), (), 2)
