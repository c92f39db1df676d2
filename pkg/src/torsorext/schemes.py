"""Affine schemes over R, K and k: fibres, flat closure, Neron blow-ups."""

import warnings
from dataclasses import dataclass, field

from .coeffs import CoeffScalar
from .errors import (DoesNotFactor, InputError, ModelRingError, NotFlat, NotFlatWarning,
                     SectionInvalid)
from .groebner import (IdealPresentation, from_model, groebner_basis, is_pi_saturated,
                       leading_monomial, model_ideal, saturate, set_pi_zero, to_model)
from .poly import DEGREVLEX, PI, MonomialOrder, MultiPoly, as_poly

BASES = ("R", "K", "k")


@dataclass(frozen=True)
class AffineAlgebra:
    """Presentation base[variables] / relations, with inverted elements.

    Each inverted element ``h`` is realised by a named variable ``D`` from
    ``variables`` together with the relation ``D*h - 1``.
    """

    base: str
    variables: tuple
    relations: tuple
    p: int
    inverted: tuple = ()
    flat: bool = False
    naive: bool = False

    def __post_init__(self):
        if self.base not in BASES:
            raise InputError(f"unknown base tag {self.base!r}")
        object.__setattr__(self, "variables", tuple(self.variables))
        rels = tuple(r.with_variables(self.variables) for r in self.relations if not r.is_zero())
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "inverted", tuple((n, as_poly(h, self.p)) for n, h in self.inverted))
        names = set(self.variables)
        if PI in names:
            raise InputError("'pi' cannot be a variable name")
        for r in self.all_relations():
            bad = r.used_variables() - names
            if bad:
                raise InputError(f"relation {r} uses undeclared variables {sorted(bad)}")
        for n, _ in self.inverted:
            if n not in names:
                raise InputError(f"inverse variable {n!r} not declared")
        if self.base == "R":
            for r in self.all_relations():
                to_model(r)
        elif self.base == "k":
            for r in self.all_relations():
                if not all(c.is_constant() for c in r.terms.values()):
                    raise InputError(f"relation {r} of an algebra over k involves pi")

    def all_relations(self):
        extra = tuple(MultiPoly.var(n, self.p) * h - 1 for n, h in self.inverted)
        return self.relations + tuple(r for r in extra if r not in self.relations)

    def ideal(self, order=DEGREVLEX):
        """Defining ideal over the field (K, or k for special fibres)."""
        fld = "k" if self.base == "k" else "K"
        return IdealPresentation(self.all_relations(), self.variables, order, fld, self.p)

    def model_ideal(self):
        """Defining ideal in the model ring k[variables, pi] (requires base R)."""
        if self.base != "R":
            raise InputError("model ring only defined for algebras over R")
        return model_ideal(self.all_relations(), self.variables, self.p)

    def replace(self, **kw):
        d = dict(base=self.base, variables=self.variables, relations=self.relations, p=self.p,
                 inverted=self.inverted, flat=self.flat, naive=self.naive)
        d.update(kw)
        return AffineAlgebra(**d)

    def __str__(self):
        rels = ", ".join(str(r) for r in self.all_relations())
        return f"{self.base}[{', '.join(self.variables)}]/({rels})"


def algebra(base, variables, relations, p, inverted=(), flat=False):
    """Convenience constructor parsing string relations."""
    from .poly import parse
    rels = [parse(r, variables, p) if isinstance(r, str) else r for r in relations]
    inv = [(n, parse(h, variables, p) if isinstance(h, str) else h) for n, h in inverted]
    return AffineAlgebra(base, tuple(variables), tuple(rels), p, tuple(inv), flat)


@dataclass(frozen=True)
class Section:
    """An R-point: ``assignments`` maps every variable to a value of valuation >= 0."""

    target: AffineAlgebra
    assignments: dict

    def __post_init__(self):
        p = self.target.p
        conv = {}
        for v, c in self.assignments.items():
            conv[v] = CoeffScalar.from_int(c, p) if isinstance(c, int) else c
        object.__setattr__(self, "assignments", conv)

    def validate(self):
        missing = set(self.target.variables) - set(self.assignments)
        if missing:
            raise SectionInvalid(f"section misses values for {sorted(missing)}")
        for v, c in self.assignments.items():
            if c.valuation() < 0:
                raise SectionInvalid(f"value {c} for {v} is not in R")
        for r in self.target.all_relations():
            if not r.evaluate(self.assignments).is_zero():
                raise SectionInvalid(f"relation {r} does not vanish at the section")
        for n, _ in self.target.inverted:
            if self.assignments[n].valuation() != 0:
                raise SectionInvalid(f"inverted element {n} is not a unit at the section")
        return self

    def special_point(self):
        return {v: c.residue() for v, c in self.assignments.items()}


def origin(A):
    return Section(A, {v: 0 for v in A.variables})


@dataclass
class BlowupTrace:
    """Record of one (possibly e-fold) Neron blow-up at the special fibre of a section."""

    center: object
    steps: int
    substitutions: list = field(default_factory=list)   # (old, new, shift, e)
    exponents: list = field(default_factory=list)        # pi-normalisation exponent per relation
    keep_old: bool = True
    saturation_added: int = 0

    def replay(self, A):
        out, _ = _blowup_relations(A, {old: shift for old, _, shift, _ in self.substitutions},
                                   self.steps, {old: new for old, new, _, _ in self.substitutions},
                                   self.keep_old)
        return out

    def lines(self):
        out = [f"neron blow-up, e = {self.steps}"]
        for old, new, shift, e in self.substitutions:
            out.append(f"  substitute {old} -> ({shift}) + pi^{e}*{new}")
        if self.exponents:
            out.append(f"  pi-normalisation exponents: {self.exponents}")
        if self.saturation_added:
            out.append(f"  saturation added {self.saturation_added} generators")
        return out


def generic_fiber(A):
    return A.replace(base="K", flat=False, naive=False)


def special_fiber(A):
    """Set pi = 0 in the model presentation."""
    if A.base != "R":
        raise InputError("special fibre needs an algebra over R")
    naive = not A.flat
    if naive:
        warnings.warn("special fibre of a presentation not known to be flat; returning the naive fibre",
                      NotFlatWarning, stacklevel=2)
    rels = []
    for r in A.all_relations():
        r0 = set_pi_zero(to_model(r))
        if not r0.is_zero():
            rels.append(r0)
    return AffineAlgebra("k", A.variables, tuple(rels), A.p, (), False, naive)


def is_flat(A):
    if A.base != "R":
        return True
    return is_pi_saturated(A.model_ideal())


def _pi_var(p):
    return MultiPoly({((PI, 1),): CoeffScalar.one(p)}, p)


def _content_free(f):
    """Strip the largest power of pi dividing a model-ring polynomial."""
    k = min(dict(m).get(PI, 0) for m in f.terms)
    if not k:
        return f
    terms = {}
    for m, c in f.terms.items():
        d = dict(m)
        d[PI] -= k
        terms[tuple(sorted((v, e) for v, e in d.items() if e))] = c
    return MultiPoly(terms, f.p, f.variables)


def saturate_model(J):
    """pi-saturation of a model ideal, with a shortcut for principal ideals."""
    if len(J.generators) == 1:
        return J.with_generators([_content_free(J.generators[0])])
    return saturate(J, _pi_var(J.p))


def flat_closure(A):
    """Replace the relations by their pi-saturation; the generic fibre is unchanged."""
    if A.base != "R":
        raise InputError("flat closure needs an algebra over R")
    J = A.model_ideal()
    S = saturate_model(J)
    gens = S.generators if len(S.generators) == 1 else groebner_basis(S)
    rels = tuple(from_model(g) for g in gens)
    return AffineAlgebra("R", A.variables, rels, A.p, A.inverted, True, False)


def _blowup_relations(A, shifts, e, names, keep_old):
    """Substitute old = shift + pi^e * new in the relations and renormalise."""
    p = A.p
    pe = CoeffScalar.pi(p, e)
    bindings = {}
    new_vars = list(A.variables)
    extra = []
    for old in A.variables:
        if old not in shifts:
            continue
        new = names.get(old, old + "'") if keep_old else old
        if keep_old:
            if new in new_vars:
                raise InputError(f"blow-up variable {new!r} already exists")
            new_vars.append(new)
        shift = as_poly(shifts[old], p)
        bindings[old] = shift + MultiPoly.var(new, p) * pe
        if keep_old:
            extra.append(MultiPoly.var(new, p) * pe - (MultiPoly.var(old, p) - shift))
    rels = []
    exps = []
    for r in A.all_relations():
        rr = r.substitute(bindings)
        if rr.is_zero():
            exps.append(None)
            continue
        rr, m = rr.pi_normalize()
        exps.append(m)
        rels.append(rr)
    out = AffineAlgebra("R", tuple(new_vars), tuple(rels + extra), p, (), False)
    return out, exps


def neron_blowup(X, x, e=1, names=None, keep_old=True, variables=None):
    """Neron blow-up of ``X`` e times at the special fibre of the section ``x``.

    With ``keep_old`` the new coordinates t' are adjoined with relations
    ``pi^e t' - (t - a)``; otherwise every coordinate is rescaled in place.
    ``variables`` restricts which coordinates are blown up (default: all).
    """
    x.validate()
    if x.target is not X and x.target != X:
        raise SectionInvalid("section belongs to a different scheme")
    if X.base != "R":
        raise InputError("Neron blow-up needs an algebra over R")
    names = dict(names or {})
    blown = list(variables) if variables is not None else list(X.variables)
    trace = BlowupTrace(x, e, keep_old=keep_old)
    if e == 0:
        return X, trace
    if e < 0:
        raise InputError("blow-up exponent must be >= 0")
    if not X.flat and not is_flat(X):
        raise NotFlat("Neron blow-up needs a flat scheme; take flat_closure first")
    p = X.p
    shifts = {v: MultiPoly.constant(x.assignments[v], p) for v in blown}
    out, exps = _blowup_relations(X, shifts, e, names, keep_old)
    for v in blown:
        new = names.get(v, v + "'") if keep_old else v
        trace.substitutions.append((v, new, str(shifts[v]), e))
    trace.exponents = exps
    closed = flat_closure(out)
    trace.saturation_added = max(0, len(closed.relations) - len(out.all_relations()))
    return closed, trace


def section_lifts(x, blown):
    """Lift an R-point through a Neron blow-up (the universal property)."""
    X2, trace = blown
    p = x.target.p
    center = trace.center
    vals = dict(x.assignments)
    if trace.steps == 0:
        return Section(X2, vals).validate()
    for old, new, _, e in trace.substitutions:
        diff = x.assignments[old] - center.assignments[old]
        lifted = diff * CoeffScalar.pi(p, -e)
        if lifted.valuation() < 0:
            raise DoesNotFactor(
                f"the special fibre of the point misses the centre along {old} "
                f"({old} - centre has valuation {diff.valuation()} < {e})")
        if trace.keep_old:
            vals[new] = lifted
        else:
            vals[old] = lifted
    if not trace.keep_old:
        for n, h in X2.inverted:
            vals[n] = h.evaluate(vals).inverse()
    return Section(X2, vals).validate()


def is_finite_over(A, base_variables):
    """Pure-power leading-monomial certificate for module-finiteness over the base.

    Uses a block order with the fibre variables above the base variables.
    """
    base_variables = [v for v in A.variables if v in set(base_variables)]
    fibre = [v for v in A.variables if v not in set(base_variables)]
    if not fibre:
        return True
    order = MonomialOrder.block(fibre, base_variables)
    I = IdealPresentation(A.all_relations(), tuple(fibre) + tuple(base_variables), order,
                          "k" if A.base == "k" else "K", A.p)
    found = set()
    for g in groebner_basis(I):
        lm = leading_monomial(g, I.variables, order)
        if len(lm) == 1:
            (v,) = lm
            if v in fibre:
                found.add(v)
    return found == set(fibre)


def rename_algebra(A, mapping):
    return AffineAlgebra(A.base, tuple(mapping.get(v, v) for v in A.variables),
                         tuple(r.rename(mapping) for r in A.relations), A.p,
                         tuple((mapping.get(n, n), h.rename(mapping)) for n, h in A.inverted),
                         A.flat, A.naive)


def model_equal(A, B):
    """Exact equality of the defining ideals over R (model ring)."""
    from .groebner import ideal_equal
    if set(A.variables) != set(B.variables):
        return False
    I = A.model_ideal()
    J = B.model_ideal()
    J = IdealPresentation(J.generators, I.variables, J.order, "k", J.p)
    return ideal_equal(I, J)


def check_r_integral(f):
    try:
        to_model(f)
    except ModelRingError:
        return False
    return True
