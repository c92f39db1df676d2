import pytest

from torsorext.catalog import EXAMPLES
from torsorext.coeffs import CoeffScalar
from torsorext.document import Document
from torsorext.errors import (EmbeddingMissing, FinitenessGuardFailed, InputError, MaxBlowupsExceeded,
                              PointMissing, SectionInvalid)
from torsorext.hopf import builtin
from torsorext.poly import parse
from torsorext.schemes import algebra, generic_fiber, model_equal
from torsorext.torsors import (blowup_torsor, constant_torsor, extend_torsor, is_trivial_special_fiber,
                               m_torsor_from, m_torsor_roundtrip, standard_torsor, verify_torsor)


def load(key, label="T"):
    doc = Document(EXAMPLES[key])
    return doc, doc.block(label)


def test_trivial_torsor_verifies():
    X = algebra("R", ["y"], [], 3, flat=True)
    T = standard_torsor(X, builtin("Z/p", 3, base="R"), "z", "z^3 - z")
    assert verify_torsor(T).passed


def test_example_torsor_verifies():
    _, T = load("m-group")
    assert verify_torsor(T).passed


def test_wrong_coaction_fails():
    X = algebra("R", ["y"], [], 2, flat=True)
    T = standard_torsor(X, builtin("Z/p", 2, base="R"), "z", "z^2 - z - pi*y")
    bad = T.__class__(T.base, T.group, T.total, {"z": parse("z_R", ["z_R"], 2)}, None,
                      T.embedding, T.total_images)
    assert not verify_torsor(bad).passed


def test_blowup_zero_is_identity():
    _, T = load("iterate")
    assert blowup_torsor(T, e=0) is T


def test_iterated_blowup_and_guard():
    _, T = load("iterate")
    T1 = blowup_torsor(T, {"z": 0})
    assert model_equal(T1.total, algebra("R", ["y", "z"], ["pi*z^2 - z - pi*y"], 2))
    assert model_equal(T1.group.algebra, algebra("R", ["x"], ["pi*x^2 - x"], 2))
    T2 = blowup_torsor(T1, {"z": 0})
    assert model_equal(T2.total, algebra("R", ["y", "z"], ["pi^2*z^2 - z - y"], 2))
    assert verify_torsor(T2).passed
    with pytest.raises(FinitenessGuardFailed) as exc:
        blowup_torsor(T2, {"z": 0})
    assert exc.value.fiber is not None
    assert len(T2.history) == 2


def test_bad_section():
    _, T = load("iterate")
    # the finiteness guard is checked first
    with pytest.raises((SectionInvalid, FinitenessGuardFailed)):
        blowup_torsor(T, {"z": "y"})
    with pytest.raises(SectionInvalid):
        blowup_torsor(T, {"w": 0})


def test_extend_example():
    doc, T = load("extend-blowup")
    X = doc.block("X")
    res = extend_torsor(X, doc.scheme_section("X"), T, names=doc.names("T"))
    assert res.count == 1
    assert res.report.passed
    assert res.generic_fiber_matches()
    further = res.further_blowup()
    assert is_trivial_special_fiber(further.torsor, further.group_correspondence())


def test_extend_without_blowups():
    doc, T = load("extend-scaled")
    res = extend_torsor(doc.block("X"), doc.scheme_section("X"), T)
    assert res.count == 0 and res.report.passed


def test_extend_errors():
    doc, T = load("extend-scaled")
    X = doc.block("X")
    x = doc.scheme_section("X")
    with pytest.raises(PointMissing):
        extend_torsor(X, x, T.__class__(T.base, T.group, T.total, T.coaction, None, T.embedding,
                                        T.total_images))
    with pytest.raises(PointMissing):
        extend_torsor(X, x, T.__class__(T.base, T.group, T.total, T.coaction,
                                        {"y": CoeffScalar.zero(2), "z": CoeffScalar.pi(2)},
                                        T.embedding, T.total_images))
    with pytest.raises(MaxBlowupsExceeded):
        d4, T4 = load("extend-blowup")
        extend_torsor(d4.block("X"), d4.scheme_section("X"), T4, max_blowups=0)


def test_embedding_missing():
    doc, T = load("extend-scaled")
    G = builtin("GL", 2, d=1)
    Y = algebra("K", ["y", "z"], ["z - 1"], 2)
    T2 = T.__class__(T.base, G, Y, {"z": parse("x11_L*z_R", ["x11_L", "z_R"], 2)},
                     {"y": CoeffScalar.zero(2), "z": CoeffScalar.one(2)})
    with pytest.raises((EmbeddingMissing, InputError)):
        extend_torsor(doc.block("X"), doc.scheme_section("X"), T2)


@pytest.mark.parametrize("a", ["-x", "0", "x^2 + pi*x", "1 + x^3"])
def test_m_torsor_roundtrip(a):
    for p in (2, 3):
        f = parse(a, ["x", "y"], p)
        if f.is_zero():
            assert m_torsor_roundtrip(f, algebra("R", ["x"], [], p, flat=True), p)
        else:
            assert m_torsor_roundtrip(f)


def test_m_torsor_verifies():
    T = m_torsor_from(parse("x^2 + pi*x", ["x"], 3))
    assert verify_torsor(T).passed


def test_blowup_keeps_generic_fibre():
    T = constant_torsor(parse("x", ["x"], 3))
    B = blowup_torsor(T, {"y": 0})
    assert generic_fiber(B.total).base == "K"
    assert model_equal(B.total, m_torsor_from(parse("x", ["x"], 3)).total)


def test_deterministic():
    a = [str(blowup_torsor(load("iterate")[1], {"z": 0}).total) for _ in range(2)]
    assert a[0] == a[1]
