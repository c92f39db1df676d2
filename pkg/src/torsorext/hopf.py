"""Hopf-algebra presentations of affine group schemes.

Tensor powers are realised by copying the generators with the suffixes
``_L``, ``_M`` and ``_R``; every Hopf identity becomes an ideal-membership
question answered by the Groebner engine.
"""

import itertools
from dataclasses import dataclass, field

from .coeffs import CoeffScalar
from .errors import (DimensionMismatch, DivisionByZero, IllFormedMap, InputError, NotABasis,
                     NotFlat, StructureMapNotTransportable, UnsupportedParameters)
from .groebner import (IdealPresentation, contains, groebner_basis, leading_monomial,
                       normal_form)
from .linalg import adjugate, determinant, inverse
from .poly import DEGREVLEX, MonomialOrder, MultiPoly, as_poly
from .schemes import AffineAlgebra, _blowup_relations, flat_closure, is_flat

L, M, R = "_L", "_M", "_R"


def tag(f, names, suffix):
    return f.rename({v: v + suffix for v in names})


def retag(f, names, old, new):
    return f.rename({v + old: v + new for v in names})


def tensor_ideal(A, suffixes):
    """Ideal of A (x) ... (x) A over the same base, one copy per suffix."""
    rels = []
    variables = []
    for s in suffixes:
        variables += [v + s for v in A.variables]
        rels += [tag(r, A.variables, s) for r in A.all_relations()]
    fld = "k" if A.base == "k" else "K"
    return IdealPresentation(rels, variables, DEGREVLEX, fld, A.p)


@dataclass(frozen=True)
class HopfAlgebra:
    """Coordinate ring of an affine group scheme with Delta, epsilon, S on generators.

    ``comult[v]`` is a polynomial in the ``_L``/``_R`` copies of the generators,
    ``counit[v]`` a scalar and ``antipode[v]`` a polynomial in the generators.
    """

    algebra: AffineAlgebra
    comult: dict
    counit: dict
    antipode: dict
    name: str = ""

    @property
    def p(self):
        return self.algebra.p

    @property
    def variables(self):
        return self.algebra.variables

    def unit_section(self):
        from .schemes import Section
        return Section(self.algebra, dict(self.counit))

    def __str__(self):
        lines = [str(self.algebra)]
        for v in self.variables:
            lines.append(f"  Delta({v}) = {self.comult[v]}")
            lines.append(f"  eps({v}) = {self.counit[v]}")
            lines.append(f"  S({v}) = {self.antipode[v]}")
        return "\n".join(lines)


@dataclass
class HopfReport:
    checks: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return all(self.checks.values())

    def record(self, name, ok, detail=""):
        self.checks[name] = self.checks.get(name, True) and ok
        if not ok:
            self.failures.append(f"{name}: {detail}")

    def lines(self):
        return [f"{'PASS' if ok else 'FAIL'} {name}" for name, ok in self.checks.items()]


def _check_defined(H):
    for v in H.variables:
        if v not in H.comult or v not in H.counit or v not in H.antipode:
            raise InputError(f"structure maps are missing generator {v!r}")


def verify_hopf(H):
    """Check well-definedness, coassociativity, counit and antipode axioms."""
    _check_defined(H)
    A = H.algebra
    names = A.variables
    p = A.p
    I1 = A.ideal()
    I2 = tensor_ideal(A, (L, R))
    I3 = tensor_ideal(A, (L, M, R))
    report = HopfReport()
    comult = {v: as_poly(H.comult[v], p) for v in names}
    anti = {v: as_poly(H.antipode[v], p) for v in names}
    counit = {v: (CoeffScalar.from_int(c, p) if isinstance(c, int) else c) for v, c in H.counit.items()}

    for r in A.all_relations():
        if not contains(I2, r.substitute(comult)):
            raise IllFormedMap(f"comultiplication does not preserve relation {r}")
        if not contains(I1, r.substitute(anti)):
            raise IllFormedMap(f"antipode does not preserve relation {r}")
        if not r.evaluate(counit).is_zero():
            raise IllFormedMap(f"counit does not preserve relation {r}")

    if A.base == "R":
        ok = all(f.has_integral_coefficients() for f in list(comult.values()) + list(anti.values()))
        ok = ok and all(c.valuation() >= 0 for c in counit.values())
        report.record("integral structure maps", ok, "structure map with a coefficient outside R")
        report.record("flat over R", A.flat or is_flat(A), "defining ideal has pi-torsion")

    first_to_LM = {v + L: retag(comult[v], names, R, M) for v in names}
    second_to_MR = {v + R: retag(retag(comult[v], names, R, "_R2"), names, L, M).rename(
        {w + "_R2": w + R for w in names}) for v in names}
    for v in names:
        d = comult[v]
        left = d.substitute(first_to_LM)
        right = d.substitute(second_to_MR)
        report.record("coassociativity", contains(I3, left - right), f"generator {v}")

        x = MultiPoly.var(v, p)
        lc = d.substitute({**{w + L: counit[w] for w in names}, **{w + R: MultiPoly.var(w, p) for w in names}})
        report.record("left counit", contains(I1, lc - x), f"generator {v}")
        rc = d.substitute({**{w + L: MultiPoly.var(w, p) for w in names}, **{w + R: counit[w] for w in names}})
        report.record("right counit", contains(I1, rc - x), f"generator {v}")

        la = d.substitute({**{w + L: anti[w] for w in names}, **{w + R: MultiPoly.var(w, p) for w in names}})
        report.record("left antipode", contains(I1, la - counit[v]), f"generator {v}")
        ra = d.substitute({**{w + L: MultiPoly.var(w, p) for w in names}, **{w + R: anti[w] for w in names}})
        report.record("right antipode", contains(I1, ra - counit[v]), f"generator {v}")
    return report


# -- catalogue ----------------------------------------------------------------

def _additive(A, var, name):
    p = A.p
    x = MultiPoly.var(var, p)
    return HopfAlgebra(A, {var: MultiPoly.var(var + L, p) + MultiPoly.var(var + R, p)},
                       {var: CoeffScalar.zero(p)}, {var: -x}, name)


def gl_names(d, prefix="x", det_name=None):
    entries = [f"{prefix}{i}{j}" for i in range(1, d + 1) for j in range(1, d + 1)]
    return entries, det_name or f"D{prefix}"


def matrix_of(d, prefix, p):
    return [[MultiPoly.var(f"{prefix}{i}{j}", p) for j in range(1, d + 1)] for i in range(1, d + 1)]


def general_linear(d, p, base="K", prefix="x", det_name=None):
    if not 1 <= d <= 9:
        raise UnsupportedParameters("GL(d) supported for 1 <= d <= 9")
    entries, D = gl_names(d, prefix, det_name)
    X = matrix_of(d, prefix, p)
    det = determinant(X)
    adj = adjugate(X)
    Dv = MultiPoly.var(D, p)
    A = AffineAlgebra(base, tuple(entries) + (D,), (), p, ((D, det),), base == "R")
    comult, counit, anti = {}, {}, {}
    for i in range(d):
        for j in range(d):
            v = f"{prefix}{i + 1}{j + 1}"
            comult[v] = sum((MultiPoly.var(f"{prefix}{i + 1}{r + 1}{L}", p) * MultiPoly.var(f"{prefix}{r + 1}{j + 1}{R}", p)
                             for r in range(d)), MultiPoly.zero(p))
            counit[v] = CoeffScalar.from_int(int(i == j), p)
            anti[v] = Dv * adj[i][j]
    comult[D] = MultiPoly.var(D + L, p) * MultiPoly.var(D + R, p)
    counit[D] = CoeffScalar.one(p)
    anti[D] = det
    return HopfAlgebra(A, comult, counit, anti, f"GL({d})")


def builtin(name, p, base="K", var="x", **params):
    """Catalogue: ``Z/p``, ``M``, ``alpha``, ``GL``.

    * ``Z/p``: the constant group, K[x]/(x^p - x) or over R, additive law.
    * ``M``: R[x]/(pi^(p-1) x^p - x), the Neron blow-up of (Z/p)_R at the unit.
    * ``alpha``: R[x]/(x^2 + pi^alpha x) for p = 2 (parameter ``alpha``).
    * ``GL``: GL(d) (parameter ``d``).
    """
    from .poly import parse
    key = name.replace(" ", "").lower()
    if key in ("z/p", "z/pz", "constant", "zp"):
        if base not in ("K", "R"):
            raise UnsupportedParameters("Z/p is available over K or R")
        A = AffineAlgebra(base, (var,), (parse(f"{var}^{p} - {var}", [var], p),), p, (), base == "R")
        return _additive(A, var, f"(Z/{p}Z)_{base}")
    if key == "m":
        A = AffineAlgebra("R", (var,), (parse(f"pi^{p - 1}*{var}^{p} - {var}", [var], p),), p, (), True)
        return _additive(A, var, f"M({p})")
    if key in ("alpha", "alpha-family"):
        alpha = int(params.get("alpha", 0))
        if p != 2 or alpha < 0:
            raise UnsupportedParameters("alpha-family needs p = 2 and alpha >= 0")
        A = AffineAlgebra("R", (var,), (parse(f"{var}^2 + pi^{alpha}*{var}", [var], p),), p, (), True)
        return _additive(A, var, f"alpha({alpha})")
    if key in ("gl", "gl(d)"):
        return general_linear(int(params.get("d", 1)), p, base, params.get("prefix", "x"))
    raise UnsupportedParameters(f"unknown builtin group {name!r}")


# -- group Neron blow-up --------------------------------------------------------

def _transport(f, old_value, e, bindings, I, what):
    """pi^-e * (f(bindings) - old_value), made R-integral modulo the ideal if needed."""
    p = f.p
    g = (f.substitute(bindings) - old_value).scale_pi(-e)
    if g.has_integral_coefficients():
        return g
    g2 = normal_form(g, I)
    if g2.has_integral_coefficients():
        return g2
    raise StructureMapNotTransportable(f"{what} has a coefficient of negative valuation: {g}")


def blowup_group(G, e=1):
    """Neron blow-up of an R-group at the unit of its special fibre, e times."""
    if e == 0:
        return G
    A = G.algebra
    if A.base != "R":
        raise InputError("blowup_group needs a group over R")
    if not A.flat and not is_flat(A):
        raise NotFlat("group is not flat over R")
    p = A.p
    names = A.variables
    pe = CoeffScalar.pi(p, e)
    shifts = {v: MultiPoly.constant(G.counit[v], p) for v in names}
    blown, _ = _blowup_relations(A, shifts, e, {}, keep_old=False)
    blown = flat_closure(blown)
    I1 = blown.ideal()
    I2 = tensor_ideal(blown, (L, R))
    b1 = {v: shifts[v] + MultiPoly.var(v, p) * pe for v in names}
    b2 = {}
    for s in (L, R):
        for v in names:
            b2[v + s] = shifts[v] + MultiPoly.var(v + s, p) * pe
    comult = {v: _transport(G.comult[v], shifts[v], e, b2, I2, f"Delta({v})") for v in names}
    anti = {v: _transport(G.antipode[v], shifts[v], e, b1, I1, f"S({v})") for v in names}
    counit = {v: CoeffScalar.zero(p) for v in names}
    return HopfAlgebra(blown, comult, counit, anti, f"{G.name}^{{1}} (e={e})")


# -- embeddings into GL_d -------------------------------------------------------

@dataclass(frozen=True)
class GroupEmbedding:
    """Images of the GL_d coordinates x_ij (and det-inverse) in a group algebra."""

    d: int
    images: dict
    prefix: str = "x"
    det_name: str = "Dx"

    def matrix(self):
        return [[self.images[f"{self.prefix}{i}{j}"] for j in range(1, self.d + 1)]
                for i in range(1, self.d + 1)]

    def entry_names(self):
        return [f"{self.prefix}{i}{j}" for i in range(1, self.d + 1) for j in range(1, self.d + 1)]

    def lines(self):
        return [f"{k} -> {v}" for k, v in self.images.items()]


def standard_monomials(A):
    """k- or K-basis of a zero-dimensional quotient as a list of monomial tuples."""
    I = A.ideal()
    lms = [leading_monomial(g, I.variables, I.order) for g in groebner_basis(I)]
    bounds = {}
    for v in A.variables:
        pure = [m[v] for m in lms if m and set(m) == {v}]
        if not pure:
            raise DimensionMismatch(f"{A} is not finite over its base (no pure power of {v})")
        bounds[v] = min(pure)
    out = []
    for exps in itertools.product(*[range(bounds[v]) for v in A.variables]):
        d = dict(zip(A.variables, exps))
        if any(all(d.get(v, 0) >= e for v, e in m.items()) for m in lms if m):
            continue
        out.append(tuple(sorted((v, e) for v, e in d.items() if e)))
    return out


def _coordinates(f, mons, p):
    return [f.terms.get(m, CoeffScalar.zero(p)) for m in mons]


def regular_embedding(C, basis, prefix="x", det_name=None):
    """Matrix coefficients of Delta on a K-basis: Delta(b_j) = sum_i c_ij (x) b_i."""
    A = C.algebra
    p = A.p
    det_name = det_name or f"D{prefix}"
    basis = [as_poly(b, p) for b in basis]
    I1 = A.ideal()
    mons = standard_monomials(A)
    d = len(mons)
    if len(basis) != d:
        raise DimensionMismatch(f"group algebra has dimension {d}, basis has {len(basis)} elements")
    rows = [_coordinates(normal_form(b, I1), mons, p) for b in basis]
    try:
        minv = inverse(rows, p)
    except DivisionByZero:
        raise NotABasis("basis elements are linearly dependent modulo the ideal") from None
    names = A.variables
    I2 = tensor_ideal(A, (L, R))
    comult = {v: as_poly(C.comult[v], p) for v in names}
    to_base = {v + L: v for v in names}
    c = [[MultiPoly.zero(p) for _ in range(d)] for _ in range(d)]
    for j, b in enumerate(basis):
        delta = normal_form(b.substitute(comult), I2)
        by_right = {}
        for m, coeff in delta.terms.items():
            left = tuple((v, e) for v, e in m if v.endswith(L))
            right = tuple((v[: -len(R)], e) for v, e in m if v.endswith(R))
            part = by_right.setdefault(right, MultiPoly.zero(p))
            by_right[right] = part + MultiPoly({left: coeff}, p)
        for right, poly in by_right.items():
            k = mons.index(right)
            for i in range(d):
                if minv[k][i]:
                    c[i][j] = c[i][j] + poly.rename(to_base) * minv[k][i]
    c = [[normal_form(x, I1) for x in row] for row in c]
    images = {f"{prefix}{i + 1}{j + 1}": c[i][j] for i in range(d) for j in range(d)}
    images[det_name] = invert_in(A, determinant(c))
    return GroupEmbedding(d, images, prefix, det_name)


def invert_in(A, h):
    """Inverse of h in the quotient ring (Rabinowitsch variable eliminated first)."""
    p = A.p
    t = "_inv"
    while t in A.variables:
        t += "_"
    order = MonomialOrder.block([t], A.variables)
    I = IdealPresentation(A.all_relations() + (MultiPoly.var(t, p) * h - 1,), (t,) + A.variables,
                          order, "k" if A.base == "k" else "K", p)
    for g in groebner_basis(I):
        lm = leading_monomial(g, I.variables, order)
        if lm == {t: 1}:
            rest = g - MultiPoly.var(t, p)
            if t not in rest.used_variables():
                return -rest
    raise NotABasis(f"{h} is not a unit in the group algebra")


def check_embedding(C, emb):
    """Delta-compatibility, counit and antipode identities of the embedding images."""
    A = C.algebra
    p = A.p
    names = A.variables
    I1 = A.ideal()
    I2 = tensor_ideal(A, (L, R))
    comult = {v: as_poly(C.comult[v], p) for v in names}
    anti = {v: as_poly(C.antipode[v], p) for v in names}
    counit = dict(C.counit)
    X = emb.matrix()
    d = emb.d
    out = {"delta": True, "counit": True, "antipode": True}
    for i in range(d):
        for j in range(d):
            lhs = X[i][j].substitute(comult)
            rhs = sum((tag(X[i][r], names, L) * tag(X[r][j], names, R) for r in range(d)), MultiPoly.zero(p))
            out["delta"] &= contains(I2, lhs - rhs)
            out["counit"] &= X[i][j].evaluate(counit) == CoeffScalar.from_int(int(i == j), p)
            s = sum((X[i][r].substitute(anti) * X[r][j] for r in range(d)), MultiPoly.zero(p))
            out["antipode"] &= contains(I1, s - int(i == j))
    return out
