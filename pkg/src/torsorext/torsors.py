"""Torsor presentations, their verification, Neron blow-ups and the extension loop.

Conventions
-----------
A torsor ``Y -> X`` is stored with the base coordinates shared: the total
algebra's variables are the base variables followed by the fibre variables, and
its relations contain the base relations.  The coaction ``rho`` maps each fibre
variable to a polynomial in the group variables tagged ``_L`` and the total
variables tagged ``_R``; base variables are coinvariant (``b -> b_R``).
"""

import os
from dataclasses import dataclass, field, replace
from math import comb

from .coeffs import CoeffScalar
from .errors import (EmbeddingMissing, FinitenessGuardFailed, InputError, MaxBlowupsExceeded,
                     NoEmbedding, NotFlat, PointMissing, SectionInvalid)
from .groebner import (IdealPresentation, _linear_pivot, contains, eliminate,
                       ideal_equal, normal_form, set_pi_zero, to_model)
from .hopf import (L, M, R, GroupEmbedding, HopfAlgebra, HopfReport, _transport, blowup_group,
                   builtin, regular_embedding, retag, tag, verify_hopf)
from .linalg import adjugate, determinant
from .poly import DEGREVLEX, MonomialOrder, MultiPoly, as_poly, parse
from .schemes import (AffineAlgebra, BlowupTrace, Section, _blowup_relations, flat_closure,
                      is_finite_over, is_flat, neron_blowup, section_lifts, special_fiber)

DEFAULT_MAX_BLOWUPS = 32


def max_blowups_default():
    try:
        return int(os.environ.get("TORSOR_MAX_BLOWUPS", DEFAULT_MAX_BLOWUPS))
    except ValueError:
        return DEFAULT_MAX_BLOWUPS


@dataclass
class TorsorPresentation:
    base: AffineAlgebra
    group: HopfAlgebra
    total: AffineAlgebra
    coaction: dict
    point: object = None
    embedding: GroupEmbedding = None
    total_images: dict = None
    history: list = field(default_factory=list)

    def __post_init__(self):
        missing = set(self.base.variables) - set(self.total.variables)
        if missing:
            raise InputError(f"total algebra lacks base variables {sorted(missing)}")
        p = self.total.p
        self.coaction = {v: as_poly(f, p) for v, f in self.coaction.items()}
        for v in self.fibre_variables:
            if v not in self.coaction:
                raise InputError(f"coaction missing for fibre variable {v!r}")

    @property
    def p(self):
        return self.total.p

    @property
    def fibre_variables(self):
        base = set(self.base.variables)
        return tuple(v for v in self.total.variables if v not in base)

    def rho(self):
        """Coaction on every total variable (base variables are coinvariant)."""
        p = self.p
        out = {b: MultiPoly.var(b + R, p) for b in self.base.variables}
        out.update(self.coaction)
        return out

    def __str__(self):
        lines = [f"base:  {self.base}", f"group: {self.group.algebra}", f"total: {self.total}"]
        for v, f in self.coaction.items():
            lines.append(f"  rho({v}) = {f}")
        return "\n".join(lines)


class TorsorReport(HopfReport):
    pass


# -- tensor rings ------------------------------------------------------------

class _Fibre:
    """Generic fibre (over K) or special fibre (over k) of the ideals and maps."""

    def __init__(self, special):
        self.special = special
        self.field = "k" if special else "K"

    def rels(self, A):
        if not self.special:
            return list(A.all_relations())
        if A.base == "k":
            return list(A.all_relations())
        out = []
        for r in A.all_relations():
            r0 = set_pi_zero(to_model(r))
            if not r0.is_zero():
                out.append(r0)
        return out

    def red(self, f):
        return set_pi_zero(to_model(f)) if self.special else f

    def ideal(self, gens, variables, p):
        return IdealPresentation([g for g in gens if not g.is_zero()], tuple(variables), DEGREVLEX,
                                 self.field, p)


def _ideal_CB(T, fib, group_tags=(L,)):
    """Ideal of C (x) ... (x) C (x) B: group copies with the given tags, total tagged _R."""
    p = T.p
    gens, variables = [], []
    for s in group_tags:
        variables += [g + s for g in T.group.variables]
        gens += [tag(r, T.group.variables, s) for r in fib.rels(T.group.algebra)]
    variables += [v + R for v in T.total.variables]
    gens += [tag(r, T.total.variables, R) for r in fib.rels(T.total)]
    return fib.ideal(gens, variables, p)


def _ideal_BB(T, fib):
    """Ideal of B (x)_A B: fibre variables tagged _L/_R, base variables shared as _R."""
    p = T.p
    base = T.base.variables
    fibre = T.fibre_variables
    left = {v: v + L for v in fibre}
    left.update({b: b + R for b in base})
    gens = [r.rename(left) for r in fib.rels(T.total)]
    gens += [tag(r, T.total.variables, R) for r in fib.rels(T.total)]
    variables = [v + L for v in fibre] + [v + R for v in T.total.variables]
    return fib.ideal(gens, variables, p)


def _left_copy(T, f):
    """Total polynomial -> B (x)_A B, first factor."""
    m = {v: v + L for v in T.fibre_variables}
    m.update({b: b + R for b in T.base.variables})
    return f.rename(m)


# -- Psi' -----------------------------------------------------------------------

def _gl_coordinates(G, emb):
    """Express each group generator as a polynomial in fresh GL coordinates."""
    p = G.p
    names = emb.entry_names() + [emb.det_name]
    fresh = {n: f"_gl_{n}" for n in names}
    gens = list(G.algebra.all_relations())
    for n in names:
        gens.append(MultiPoly.var(fresh[n], p) - as_poly(emb.images[n], p))
    order = MonomialOrder.block(G.variables, [fresh[n] for n in names])
    I = IdealPresentation(gens, tuple(G.variables) + tuple(fresh[n] for n in names), order, "K", p)
    out = {}
    for g in G.variables:
        nf = normal_form(MultiPoly.var(g, p), I)
        if nf.used_variables() & set(G.variables):
            raise NoEmbedding(f"group coordinate {g} is not a function of the embedding")
        out[g] = nf
    return out, fresh


def _psi_prime(T):
    """Psi'(g (x) 1) for every group generator g, in the coordinates of B (x)_A B."""
    emb = T.embedding
    imgs = T.total_images
    p = T.p
    d = emb.d
    Z = [[as_poly(imgs[f"{emb.prefix}{i}{j}"], p) for j in range(1, d + 1)] for i in range(1, d + 1)]
    det = determinant(Z)
    dz = as_poly(imgs[emb.det_name], p)
    adj = adjugate(Z)
    right = lambda f: tag(f, T.total.variables, R)
    left = lambda f: _left_copy(T, f)
    coords, fresh = _gl_coordinates(T.group, emb)
    values = {}
    for i in range(d):
        for j in range(d):
            s = MultiPoly.zero(p)
            for r in range(d):
                s = s + left(Z[i][r]) * right(dz * adj[r][j])
            values[fresh[f"{emb.prefix}{i + 1}{j + 1}"]] = s
    values[fresh[emb.det_name]] = left(dz) * right(det)
    return {g + L: coords[g].substitute(values) for g in T.group.variables}


def _integral(f):
    return f.has_integral_coefficients()


def verify_torsor(T, require_embedding=True):
    """Comodule axioms, embedding compatibility and bijectivity of Psi on generators.

    Over R every check is repeated on the special fibre, after testing that the
    group and total algebras are flat and all maps are R-integral.
    """
    if T.embedding is None or T.total_images is None:
        if require_embedding:
            raise NoEmbedding("torsor verification needs an embedding into GL_d")
    report = TorsorReport()
    over_R = T.total.base == "R"
    p = T.p
    rho = T.rho()
    G = T.group

    if over_R:
        report.record("total flat over R", T.total.flat or is_flat(T.total), "total has pi-torsion")
        report.record("group flat over R", G.algebra.flat or is_flat(G.algebra), "group has pi-torsion")
        report.record("integral coaction", all(_integral(f) for f in T.coaction.values()),
                      "coaction with a coefficient outside R")
    hrep = verify_hopf(G)
    report.record("group Hopf axioms", hrep.passed, "; ".join(hrep.failures))

    psi_prime = None
    if T.embedding is not None and T.total_images is not None:
        psi_prime = _psi_prime(T)
        I_BB = _ideal_BB(T, _Fibre(False))
        fixed = {}
        for g, f in psi_prime.items():
            if not _integral(f):
                f2 = normal_form(f, I_BB)
                if _integral(f2):
                    f = f2
            fixed[g] = f
        psi_prime = fixed
        if over_R:
            report.record("integral inverse map", all(_integral(f) for f in psi_prime.values()),
                          "Psi' has a coefficient outside R")

    fibres = [_Fibre(False)]
    if over_R and report.passed:
        fibres.append(_Fibre(True))
    for fib in fibres:
        pre = "special fibre: " if fib.special else ""
        _check_fibre(T, rho, psi_prime, fib, report, pre)
    return report


def _check_fibre(T, rho, psi_prime, fib, report, pre):
    p = T.p
    G = T.group
    red = fib.red
    full_rho = {v + R: rho[v] for v in T.total.variables}
    I_CB = _ideal_CB(T, fib)
    I_B = fib.ideal([tag(r, T.total.variables, R) for r in fib.rels(T.total)],
                    [v + R for v in T.total.variables], p)

    for r in T.total.all_relations():
        img = red(tag(r, T.total.variables, R).substitute(full_rho))
        report.record(pre + "coaction is a ring map", contains(I_CB, img), f"relation {r}")

    I_CCB = _ideal_CB(T, fib, (L, M))
    comult = {g: G.comult[g] for g in G.variables}
    delta_LM = {g + L: retag(as_poly(comult[g], p), G.variables, R, M) for g in G.variables}
    rho_MR = {v + R: retag(rho[v], G.variables, L, M) for v in T.total.variables}
    counit_L = {g + L: G.counit[g] for g in G.variables}
    for v in T.fibre_variables + T.base.variables:
        f = rho[v]
        a = red(f.substitute(delta_LM))
        b = red(f.substitute(rho_MR))
        report.record(pre + "coassociativity of the coaction", contains(I_CCB, a - b), f"variable {v}")
        c = red(f.substitute(counit_L))
        report.record(pre + "counit of the coaction", contains(I_B, c - MultiPoly.var(v + R, p)),
                      f"variable {v}")
    for b in T.base.variables:
        if b in T.coaction:
            ok = contains(I_CB, red(T.coaction[b] - MultiPoly.var(b + R, p)))
            report.record(pre + "base is coinvariant", ok, f"variable {b}")

    if psi_prime is None:
        return
    emb = T.embedding
    d = emb.d
    X = emb.matrix()
    Z = [[as_poly(T.total_images[f"{emb.prefix}{i}{j}"], p) for j in range(1, d + 1)]
         for i in range(1, d + 1)]
    for i in range(d):
        for j in range(d):
            lhs = tag(Z[i][j], T.total.variables, R).substitute(full_rho)
            rhs = sum((tag(as_poly(X[i][r], p), G.variables, L) * tag(Z[r][j], T.total.variables, R)
                       for r in range(d)), MultiPoly.zero(p))
            report.record(pre + "coaction matches the embedding", contains(I_CB, red(lhs - rhs)),
                          f"entry ({i + 1},{j + 1})")
    dz = as_poly(T.total_images[emb.det_name], p)
    lhs = tag(dz, T.total.variables, R).substitute(full_rho)
    rhs = tag(as_poly(emb.images[emb.det_name], p), G.variables, L) * tag(dz, T.total.variables, R)
    report.record(pre + "coaction matches the embedding", contains(I_CB, red(lhs - rhs)), "determinant")

    I_BB = _ideal_BB(T, fib)
    psi = {v + L: rho[v] for v in T.fibre_variables}
    for r in G.algebra.all_relations():
        img = red(tag(r, G.variables, L).substitute(psi_prime))
        report.record(pre + "inverse map is well defined", contains(I_BB, img), f"group relation {r}")
    for g in G.variables:
        back = red(psi_prime[g + L].substitute(psi))
        report.record(pre + "Psi o Psi' = id", contains(I_CB, back - MultiPoly.var(g + L, p)), f"generator {g}")
    for v in T.fibre_variables:
        back = red(rho[v].substitute(psi_prime))
        report.record(pre + "Psi' o Psi = id", contains(I_BB, back - MultiPoly.var(v + L, p)), f"generator {v}")


# -- standard presentations ---------------------------------------------------------

def additive_embedding(G, scale=1, total_var=None, shift=0):
    """Regular embedding of a one-variable additive group on the basis (scale*g)^j, j < p.

    With ``total_var`` also returns the torsor-side images obtained by replacing
    g with ``total_var - shift`` (the orbit map through the point total_var = shift).
    """
    p = G.p
    (g,) = G.variables
    s = as_poly(scale, p)
    base = MultiPoly.var(g, p) * s
    images = {}
    for i in range(p):
        for j in range(p):
            images[f"x{i + 1}{j + 1}"] = base ** (j - i) * comb(j, i) if j >= i else MultiPoly.zero(p)
    images["Dx"] = MultiPoly.constant(1, p)
    emb = GroupEmbedding(p, images)
    if total_var is None:
        return emb
    t = MultiPoly.var(total_var, p) - as_poly(shift, p)
    timgs = {k: v.substitute({g: t}) for k, v in images.items()}
    return emb, timgs


def _is_additive(G):
    if len(G.variables) != 1:
        return False
    (g,) = G.variables
    p = G.p
    return as_poly(G.comult[g], p) == MultiPoly.var(g + L, p) + MultiPoly.var(g + R, p)


def standard_torsor(base, group, fibre_var, relation, group_var=None, scale=1, shift=0):
    """Torsor base[fibre]/(relation) under an additive one-variable group, rho(t) = g + t.

    Attaches the additive embedding with basis (scale*g)^j.
    """
    p = base.p
    rel = parse(relation, list(base.variables) + [fibre_var], p) if isinstance(relation, str) else relation
    total = AffineAlgebra(base.base, tuple(base.variables) + (fibre_var,), tuple(base.relations) + (rel,),
                          p, (), False)
    if total.base == "R":
        total = flat_closure(total)
    (g,) = group.variables
    coaction = {fibre_var: MultiPoly.var(g + L, p) + MultiPoly.var(fibre_var + R, p)}
    emb, timgs = additive_embedding(group, scale, fibre_var, shift)
    return TorsorPresentation(base, group, total, coaction, None, emb, timgs)


# -- Neron blow-up of a torsor ----------------------------------------------------------

def _section_valid(T, shifts):
    Ys = special_fiber(T.total)
    Xs = special_fiber(T.base)
    I = IdealPresentation(Xs.all_relations(), Xs.variables, DEGREVLEX, "k", T.p)
    for r in Ys.all_relations():
        f = set_pi_zero(to_model(r.substitute(shifts)))
        if not contains(I, f):
            return r
    return None


def blowup_torsor(T, section=None, e=1, verify=False):
    """Neron blow-up of an R-torsor at a trivial subtorsor of its special fibre.

    ``section`` maps each fibre variable to its value (an R-polynomial in the base
    variables) along a section of Y_s -> X_s; the default is 0.  The group is
    blown up at its unit.  Raises FinitenessGuardFailed when the blown-up special
    fibre is not finite over X_s.
    """
    if e == 0:
        return T
    if e < 0:
        raise InputError("blow-up exponent must be >= 0")
    if T.total.base != "R":
        raise InputError("torsor blow-up needs a torsor over R")
    if not (T.total.flat or is_flat(T.total)):
        raise NotFlat("total space is not flat over R")
    p = T.p
    section = dict(section or {})
    shifts = {}
    for v in T.fibre_variables:
        val = section.get(v, 0)
        if isinstance(val, str):
            val = parse(val, list(T.base.variables), p)
        val = as_poly(val, p)
        if val.used_variables() - set(T.base.variables):
            raise SectionInvalid(f"section value for {v} involves non-base variables")
        if not val.has_integral_coefficients():
            raise SectionInvalid(f"section value for {v} is not over R")
        shifts[v] = val
    unknown = set(section) - set(T.fibre_variables)
    if unknown:
        raise SectionInvalid(f"section names unknown fibre variables {sorted(unknown)}")

    raw, exps = _blowup_relations(T.total, shifts, e, {}, keep_old=False)
    Y2 = flat_closure(raw)
    fibre = special_fiber(Y2)
    if not is_finite_over(fibre, T.base.variables):
        raise FinitenessGuardFailed(
            "special fibre of the blown-up torsor is not finite over the special fibre of the base",
            fiber=fibre)
    bad = _section_valid(T, shifts)
    if bad is not None:
        raise SectionInvalid(f"section does not lie on the special fibre (relation {bad})")

    G2 = blowup_group(T.group, e)
    pe = CoeffScalar.pi(p, e)
    G = T.group
    bind = {g + L: MultiPoly.constant(G.counit[g], p) + MultiPoly.var(g + L, p) * pe for g in G.variables}
    for v in T.fibre_variables:
        bind[v + R] = tag(shifts[v], T.base.variables, R) + MultiPoly.var(v + R, p) * pe
    T2 = TorsorPresentation(T.base, G2, Y2, {v: MultiPoly.zero(p) for v in T.fibre_variables})
    I_CB = _ideal_CB(T2, _Fibre(False))
    coaction = {}
    for v in T.fibre_variables:
        old = tag(shifts[v], T.base.variables, R)
        coaction[v] = _transport(T.coaction[v], old, e, bind, I_CB, f"rho({v})")
    emb, timgs = None, None
    if T.embedding is not None:
        gb = {g: MultiPoly.constant(G.counit[g], p) + MultiPoly.var(g, p) * pe for g in G.variables}
        emb = GroupEmbedding(T.embedding.d, {k: as_poly(f, p).substitute(gb) for k, f in T.embedding.images.items()},
                             T.embedding.prefix, T.embedding.det_name)
    if T.total_images is not None:
        tb = {v: shifts[v] + MultiPoly.var(v, p) * pe for v in T.fibre_variables}
        timgs = {k: as_poly(f, p).substitute(tb) for k, f in T.total_images.items()}
    point = None
    if isinstance(T.point, dict):
        point = dict(T.point)
        for v in T.fibre_variables:
            point[v] = (point[v] - shifts[v].evaluate(point)) * pe.inverse()
    trace = BlowupTrace(section, e, [(v, v, str(shifts[v]), e) for v in T.fibre_variables], exps, False,
                        max(0, len(Y2.relations) - len(raw.all_relations())))
    out = TorsorPresentation(T.base, G2, Y2, coaction, point, emb, timgs, list(T.history) + [trace])
    if verify:
        rep = verify_torsor(out)
        if not rep.passed:
            raise InputError("blown-up torsor failed verification: " + "; ".join(rep.failures))
    return out


# -- M-torsors -------------------------------------------------------------------

def _a_base(a, base, p):
    if base is None:
        names = sorted(a.used_variables()) or ["x"]
        base = AffineAlgebra("R", tuple(names), (), p, (), True)
    if not a.has_integral_coefficients():
        raise InputError("a must have coefficients in R")
    return base


def m_torsor_from(a, base=None, p=None, fibre_var="y", group_var="g"):
    """The M(p)-torsor base[y]/(pi^(p-1) y^p - y + a)."""
    p = p or a.p
    a = as_poly(a, p)
    base = _a_base(a, base, p)
    G = builtin("M", p, var=group_var)
    y = MultiPoly.var(fibre_var, p)
    rel = y ** p * CoeffScalar.pi(p, p - 1) - y + a
    return standard_torsor(base, G, fibre_var, rel, scale=CoeffScalar.pi(p, 1))


def constant_torsor(a, base=None, p=None, fibre_var="y", group_var="g"):
    """The (Z/p)_R-torsor base[y]/(y^p - y + pi*a)."""
    p = p or a.p
    a = as_poly(a, p)
    base = _a_base(a, base, p)
    G = builtin("Z/p", p, base="R", var=group_var)
    y = MultiPoly.var(fibre_var, p)
    rel = y ** p - y + a * CoeffScalar.pi(p, 1)
    return standard_torsor(base, G, fibre_var, rel)


def m_torsor_roundtrip(a, base=None, p=None):
    """Blow up the (Z/p)_R-torsor attached to a and compare with the M-torsor form."""
    p = p or a.p
    a = as_poly(a, p)
    T = constant_torsor(a, base, p)
    B = blowup_torsor(T, {"y": 0})
    target = m_torsor_from(a, T.base, p)
    from .schemes import model_equal
    return model_equal(B.total, target.total) and model_equal(B.group.algebra, target.group.algebra)


# -- extension --------------------------------------------------------------------

def _chase(f):
    """Multiply by a unit of R so that the coefficients are integral, pi-adic content 0."""
    p = f.p
    units = []
    for c in f.terms.values():
        k = 0
        while c.den[k] == 0:
            k += 1
        u = c.den[k:]
        if u != (1,) and u not in units:
            units.append(u)
    for u in units:
        f = f * CoeffScalar(u, (1,), p)
    return f.pi_normalize()[0]


def _simplify(A, candidates, subs=None):
    """Substitute away candidate variables that satisfy v = h with h integral."""
    subs = dict(subs or {})
    rels = list(A.relations)
    variables = list(A.variables)
    progress = True
    while progress:
        progress = False
        for v in [c for c in candidates if c in variables]:
            for idx, r in enumerate(rels):
                h = _linear_pivot(r, v, "k")
                if h is None or not h.has_integral_coefficients():
                    continue
                rels = [x.substitute({v: h}) for j, x in enumerate(rels) if j != idx]
                rels = [x for x in rels if not x.is_zero()]
                subs = {k: s.substitute({v: h}) for k, s in subs.items()}
                subs[v] = h
                variables.remove(v)
                progress = True
                break
    out = AffineAlgebra(A.base, tuple(variables), tuple(rels), A.p, (), A.flat, A.naive)
    return out, subs


def _gl_names(d, prefix, det_name):
    return [f"{prefix}{i}{j}" for i in range(1, d + 1) for j in range(1, d + 1)], det_name


@dataclass
class ExtensionResult:
    base: AffineAlgebra
    group: HopfAlgebra
    total: AffineAlgebra
    torsor: TorsorPresentation
    blowups: list
    report: TorsorReport
    section: Section
    log: list
    state: object = None

    @property
    def count(self):
        return len(self.blowups)

    def group_correspondence(self):
        """Group GL coordinate -> total GL coordinate (x_ij -> z_ij)."""
        return dict(self.state.correspondence)

    def generic_fiber_matches(self):
        return self.state.generic_fiber_matches(self)

    def further_blowup(self):
        """One more base blow-up at the lifted section, regardless of the stop criterion."""
        return self.state.further(self)

    def lines(self):
        out = [f"blow-ups: {self.count}", f"X' = {self.base}", f"G' = {self.group.algebra}",
               f"Y' = {self.total}"]
        for v, f in self.torsor.coaction.items():
            out.append(f"  rho({v}) = {f}")
        return out


class _Extender:
    def __init__(self, X, x, T, names, max_blowups):
        self.X0 = X
        self.T = T
        self.p = X.p
        self.names = dict(names or {})
        self.max_blowups = max_blowups
        self.log = []
        d = T.embedding.d
        taken = set(T.total.variables) | set(X.variables)
        zp = "z"
        while taken & set(_gl_names(d, zp, "D" + zp)[0] + ["D" + zp]):
            zp += "_"
        self.zs, self.dz = _gl_names(d, zp, "D" + zp)
        self.xs, self.dx = _gl_names(d, "x", "Dx")
        self.d = d
        self.correspondence = dict(zip(self.xs + [self.dx], self.zs + [self.dz]))
        self.inverse_corr = {v: k for k, v in self.correspondence.items()}

    # B' over R in GL coordinates
    def initial_total(self):
        T, p = self.T, self.p
        emb = T.embedding
        imgs = T.total_images
        Z = [[as_poly(imgs[f"{emb.prefix}{i}{j}"], p) for j in range(1, self.d + 1)] for i in range(1, self.d + 1)]
        gens = list(T.total.all_relations())
        for k, z in enumerate(self.zs):
            i, j = divmod(k, self.d)
            gens.append(MultiPoly.var(z, p) - Z[i][j])
        Zv = [[MultiPoly.var(self.zs[i * self.d + j], p) for j in range(self.d)] for i in range(self.d)]
        gens.append(MultiPoly.var(self.dz, p) * determinant(Zv) - 1)
        variables = tuple(T.total.variables) + tuple(self.zs) + (self.dz,)
        I = IdealPresentation(gens, variables, DEGREVLEX, "K", p)
        E = eliminate(I, T.fibre_variables)
        rels = [_chase(g) for g in E.generators]
        self.log.append(f"eliminated fibre variables {list(T.fibre_variables)}; "
                        f"{len(rels)} relations in GL coordinates")
        B = AffineAlgebra("R", tuple(self.X0.variables) + tuple(self.zs) + (self.dz,),
                          tuple(self.X0.relations) + tuple(rels), p)
        return B

    def close(self, B, subs):
        B, subs = _simplify(B, self.zs + [self.dz], subs)
        before = len(B.relations)
        B = flat_closure(B)
        self.log.append(f"flat closure: {before} -> {len(B.relations)} relations")
        B, subs = _simplify(B, self.zs + [self.dz], subs)
        return B.replace(flat=True), subs

    def fibre_group(self, B, subs, section):
        """C' = B' (x)_A R through the section, in x-coordinates."""
        p = self.p
        vals = {v: MultiPoly.constant(c, p) for v, c in section.assignments.items()}
        ren = self.inverse_corr
        kept = [v for v in B.variables if v in ren]
        rels = []
        for r in B.relations:
            f = r.substitute(vals).rename(ren)
            if not f.is_zero():
                rels.append(f)
        C = AffineAlgebra("R", tuple(ren[v] for v in kept), tuple(rels), p)
        gsubs = {ren[k]: h.substitute(vals).rename(ren) for k, h in subs.items()}
        return C, gsubs

    def hopf(self, C, gsubs):
        p, d = self.p, self.d
        C2, more = _simplify(C, self.xs + [self.dx], gsubs)
        gsubs = more
        full = {v: MultiPoly.var(v, p) for v in self.xs + [self.dx]}
        full.update(gsubs)
        X = [[full[self.xs[i * d + j]] for j in range(d)] for i in range(d)]
        XL = [[tag(f, C2.variables, L) for f in row] for row in X]
        XR = [[tag(f, C2.variables, R) for f in row] for row in X]
        det = determinant(X)
        adj = adjugate(X)
        comult, counit, anti = {}, {}, {}
        for v in C2.variables:
            if v == self.dx:
                comult[v] = tag(full[v], C2.variables, L) * tag(full[v], C2.variables, R)
                counit[v] = CoeffScalar.one(p)
                anti[v] = det
                continue
            k = self.xs.index(v)
            i, j = divmod(k, d)
            comult[v] = sum((XL[i][r] * XR[r][j] for r in range(d)), MultiPoly.zero(p))
            counit[v] = CoeffScalar.from_int(int(i == j), p)
            anti[v] = full[self.dx] * adj[i][j]
        G = HopfAlgebra(C2.replace(flat=True), comult, counit, anti, "closure of G in GL_d")
        emb = GroupEmbedding(d, {v: full[v] for v in self.xs + [self.dx]}, "x", self.dx)
        return G, emb, full

    def torsor(self, X, B, subs, G, gfull):
        p, d = self.p, self.d
        tfull = {v: MultiPoly.var(v, p) for v in self.zs + [self.dz]}
        tfull.update(subs)
        fibre = [v for v in B.variables if v not in X.variables]
        coaction = {}
        for v in fibre:
            if v == self.dz:
                coaction[v] = tag(gfull[self.dx], G.variables, L) * tag(tfull[v], B.variables, R)
                continue
            k = self.zs.index(v)
            i, j = divmod(k, d)
            coaction[v] = sum((tag(gfull[self.xs[i * d + r]], G.variables, L) *
                               tag(tfull[self.zs[r * d + j]], B.variables, R) for r in range(d)),
                              MultiPoly.zero(p))
        timgs = {self.xs[k]: tfull[z] for k, z in enumerate(self.zs)}
        timgs[self.dx] = tfull[self.dz]
        emb = GroupEmbedding(d, {v: gfull[v] for v in self.xs + [self.dx]}, "x", self.dx)
        return TorsorPresentation(X, G, B, coaction, None, emb, timgs)

    def attempt(self, X, B, subs, section):
        C, gsubs = self.fibre_group(B, subs, section)
        if not is_flat(C):
            self.log.append(f"C' = {C} is not flat over R")
            return None
        G, _, gfull = self.hopf(C, gsubs)
        T = self.torsor(X, B, subs, G, gfull)
        rep = verify_torsor(T)
        if not rep.passed:
            self.log.append("torsor checks failed: " + "; ".join(rep.failures[:3]))
            return None
        return T, rep

    def blowup(self, X, B, section, frontier):
        names = {v: self.names.get(v, v + "'") for v in frontier}
        X2, trace = neron_blowup(X, section, 1, names=names, variables=frontier)
        shifts = {v: MultiPoly.constant(section.assignments[v], self.p) for v in frontier}
        B2, exps = _blowup_relations(B, shifts, 1, names, keep_old=True)
        self.log.extend(trace.lines())
        self.log.append(f"  total pi-normalisation exponents: {exps}")
        x2 = section_lifts(section, (X2, trace))
        return X2, B2, x2, [names[v] for v in frontier], trace

    def run(self, x):
        B, subs = self.close(self.initial_total(), {})
        X = self.X0
        frontier = list(X.variables)
        traces = []
        while True:
            got = self.attempt(X, B, subs, x)
            if got is not None:
                T, rep = got
                return self.result(X, T, rep, x, traces, B, subs, frontier)
            if len(traces) >= self.max_blowups:
                raise MaxBlowupsExceeded(f"no torsor model after {self.max_blowups} blow-ups")
            X, B, x, frontier, trace = self.blowup(X, B, x, frontier)
            B, subs = self.close(B, subs)
            traces.append(trace)

    def result(self, X, T, rep, x, traces, B, subs, frontier):
        self._last = (B, subs, frontier)
        return ExtensionResult(X, T.group, T.total, T, list(traces), rep, x, list(self.log), self)

    def further(self, res):
        B, subs, frontier = self._last
        X, B, x, frontier, trace = self.blowup(res.base, B, res.section, frontier)
        B, subs = self.close(B, subs)
        got = self.attempt(X, B, subs, x)
        if got is None:
            raise InputError("further blow-up did not give a torsor")
        T, rep = got
        child = _Extender.__new__(_Extender)
        child.__dict__.update(self.__dict__)
        child.log = list(self.log)
        return child.result(X, T, rep, x, res.blowups + [trace], B, subs, frontier)

    def generic_fiber_matches(self, res):
        p = self.p
        T = self.T
        kept = [v for v in res.total.variables if v in self.zs or v == self.dz]
        emb = T.embedding
        imgs = T.total_images
        Zimg = {z: as_poly(imgs[f"{emb.prefix}{k // self.d + 1}{k % self.d + 1}"], p)
                for k, z in enumerate(self.zs)}
        Zimg[self.dz] = as_poly(imgs[emb.det_name], p)
        gens = list(T.total.all_relations()) + [MultiPoly.var(z, p) - Zimg[z] for z in kept]
        I1 = eliminate(IdealPresentation(gens, tuple(T.total.variables) + tuple(kept), DEGREVLEX, "K", p),
                       T.fibre_variables)
        aux = [v for v in res.total.variables if v not in self.X0.variables and v not in kept]
        I2 = eliminate(res.total.ideal(), aux)
        J2 = IdealPresentation(I2.generators, I1.variables, DEGREVLEX, "K", p)
        return ideal_equal(I1, J2)


def extend_torsor(X, x, T, embedding=None, total_images=None, max_blowups=None, names=None):
    """Find a torsor model over a Neron blow-up of X at the special fibre of x.

    ``T`` is a torsor over the generic fibre of X, pointed over x; the embedding
    of its group into GL_d (with the torsor-side images) defaults to the additive
    regular embedding for one-variable additive groups.
    """
    if max_blowups is None:
        max_blowups = max_blowups_default()
    x.validate()
    if set(X.variables) != set(T.base.variables):
        raise InputError("torsor base and X have different coordinates")
    emb = embedding or T.embedding
    timgs = total_images or T.total_images
    if T.point is None:
        raise PointMissing("extension needs a K-point of the torsor over the section")
    point = dict(T.point.assignments if isinstance(T.point, Section) else T.point)
    point = {k: (CoeffScalar.from_int(v, X.p) if isinstance(v, int) else v) for k, v in point.items()}
    for b in X.variables:
        if point.get(b) != x.assignments[b]:
            raise PointMissing(f"the point does not lie over the section (coordinate {b})")
    for r in T.total.all_relations():
        if not r.evaluate(point).is_zero():
            raise PointMissing(f"the point does not satisfy {r}")
    if emb is None or timgs is None:
        if _is_additive(T.group) and len(T.fibre_variables) == 1:
            (fv,) = T.fibre_variables
            p = X.p
            (g,) = T.group.variables
            basis = [MultiPoly.var(g, p) ** j for j in range(p)]
            emb = regular_embedding(T.group, basis)
            timgs = {k: as_poly(f, p).substitute({g: MultiPoly.var(fv, p) - point[fv]})
                     for k, f in emb.images.items()}
        else:
            raise EmbeddingMissing("no embedding into GL_d given and no default applies")
    T = replace(T, embedding=emb, total_images=timgs)
    d = emb.d
    ident = CoeffScalar.one(X.p)
    for i in range(1, d + 1):
        for j in range(1, d + 1):
            v = as_poly(timgs[f"{emb.prefix}{i}{j}"], X.p).evaluate(point)
            if v != (ident if i == j else CoeffScalar.zero(X.p)):
                raise InputError("the torsor-side images must send the point to the identity matrix")
    ext = _Extender(X, x, T, names, max_blowups)
    return ext.run(x)


def is_trivial_special_fiber(T, correspondence):
    """Y_s equals G_s x X_s as presentations, with group coordinates renamed by ``correspondence``."""
    fib = _Fibre(True)
    gens = [r.rename(correspondence) for r in fib.rels(T.group.algebra)]
    gens += fib.rels(T.base)
    I = fib.ideal(gens, T.total.variables, T.p)
    J = fib.ideal(fib.rels(T.total), T.total.variables, T.p)
    return ideal_equal(I, J)
