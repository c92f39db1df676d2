"""Buchberger-based ideal arithmetic.

Two coefficient regimes share one engine:

* ``field="K"``: coefficients in K = F_p(pi); pi lives inside the scalars.
  Used for generic-fibre questions.
* ``field="k"``: coefficients in F_p and ``pi`` is an ordinary variable of the
  model ring k[pi, x_1, ..., x_n].  Used for flatness (pi-torsion), flat
  closure and special fibres.  :func:`to_model` / :func:`from_model` move
  polynomials between the regimes.
"""

import heapq
import logging
import os
from dataclasses import dataclass

from .coeffs import CoeffScalar
from .errors import InputError, ModelRingError, ResourceLimit, ZeroPolynomial
from .poly import DEGREVLEX, PI, MonomialOrder, MultiPoly

log = logging.getLogger(__name__)


@dataclass
class Limits:
    degree_cap: int = 60
    size_cap: int = 5000


def _env_int(name, default):
    try:
        return int(os.environ.get(name, default))
    except ValueError:
        return default


LIMITS = Limits(_env_int("TORSOR_GB_DEGREE_CAP", 60), _env_int("TORSOR_GB_SIZE_CAP", 5000))

# basis sizes of every computation, for the CLI trace
STATS = []


def set_limits(degree_cap=None, size_cap=None):
    if degree_cap is not None:
        LIMITS.degree_cap = int(degree_cap)
    if size_cap is not None:
        LIMITS.size_cap = int(size_cap)


# -- regime conversion ------------------------------------------------------

def to_model(f, clear_denominators=False):
    """Rewrite a polynomial with R-coefficients in k[pi, ...].

    With ``clear_denominators`` the polynomial is first multiplied by the least
    power of pi making all coefficients integral.  Denominators that are not
    powers of pi are rejected.
    """
    p = f.p
    if clear_denominators and f.terms:
        v = f.min_valuation()
        if v < 0:
            f = f.scale_pi(-v)
    out = {}
    for m, c in f.terms.items():
        if c.valuation() < 0:
            raise ModelRingError(f"coefficient {c} of {f} has negative valuation")
        if c.den != (1,):
            raise ModelRingError(
                f"coefficient {c} of {f} has a denominator that is not a power of pi")
        d = dict(m)
        for i, a in enumerate(c.num):
            if a:
                mm = dict(d)
                if i:
                    mm[PI] = mm.get(PI, 0) + i
                key = tuple(sorted(mm.items()))
                out[key] = CoeffScalar.from_int(a, p)
    variables = tuple(v for v in f.variables if v != PI)
    if any(PI in dict(m) for m in out):
        variables = variables + (PI,)
    return MultiPoly(out, p, variables)


def from_model(f):
    """Map the model-ring variable ``pi`` back to the uniformizer scalar."""
    p = f.p
    out = {}
    for m, c in f.terms.items():
        d = dict(m)
        k = d.pop(PI, 0)
        key = tuple(sorted(d.items()))
        c = c.shift(k)
        s = out.get(key)
        out[key] = c if s is None else s + c
    return MultiPoly(out, p, tuple(v for v in f.variables if v != PI))


def set_pi_zero(f):
    """Reduce a model-ring polynomial modulo pi."""
    return MultiPoly({m: c for m, c in f.terms.items() if PI not in dict(m)}, f.p,
                     tuple(v for v in f.variables if v != PI))


# -- engine -----------------------------------------------------------------

class _Engine:
    """Dense-exponent view of a polynomial ring with a fixed monomial order."""

    def __init__(self, variables, order, field, p):
        self.variables = tuple(variables)
        self.n = len(self.variables)
        self.pos = {v: i for i, v in enumerate(self.variables)}
        self.order = order
        self.field = field
        self.p = p
        self.key = order.key_function(self.variables)
        self._keycache = {}
        if field == "k":
            self.one = 1
            self.submul = lambda a, q, c: (a - q * c) % p
            self.div = lambda a, b: a * pow(b, p - 2, p) % p
            self.neg = lambda a: -a % p
        else:
            self.one = CoeffScalar.one(p)
            self.submul = lambda a, q, c: a - q * c
            self.div = lambda a, b: a / b
            self.neg = lambda a: -a

    def k(self, e):
        r = self._keycache.get(e)
        if r is None:
            r = self.key(e)
            self._keycache[e] = r
        return r

    def negkey(self, e):
        k = self.k(e)
        return _Neg(k)

    def convert(self, f):
        out = {}
        for m, c in f.terms.items():
            e = [0] * self.n
            for v, x in m:
                if v not in self.pos:
                    raise InputError(f"variable {v!r} not in ambient ring {self.variables}")
                e[self.pos[v]] = x
            if self.field == "k":
                if not c.is_constant():
                    raise ModelRingError(f"coefficient {c} is not in F_{self.p}; use to_model()")
                c = c.constant_value()
            out[tuple(e)] = c
        return out

    def back(self, d):
        terms = {}
        for e, c in d.items():
            m = tuple(sorted((self.variables[i], x) for i, x in enumerate(e) if x))
            terms[m] = CoeffScalar.from_int(c, self.p) if self.field == "k" else c
        return MultiPoly(terms, self.p, self.variables)

    def sort(self, d):
        """Sorted term list, leading term first."""
        return sorted(d.items(), key=lambda t: self.k(t[0]), reverse=True)

    def monic(self, terms):
        lc = terms[0][1]
        if lc == self.one:
            return terms
        return [(e, self.div(c, lc)) for e, c in terms]

    def reduce(self, d, basis, lms):
        """Full normal form of dict ``d`` modulo sorted monic term lists."""
        work = dict(d)
        heap = [(self.negkey(e), e) for e in work]
        heapq.heapify(heap)
        rem = {}
        submul = self.submul
        while heap:
            _, e = heapq.heappop(heap)
            c = work.pop(e, None)
            if not c:
                continue
            red = None
            for idx, lm in enumerate(lms):
                if all(a <= b for a, b in zip(lm, e)):
                    red = basis[idx]
                    break
            if red is None:
                rem[e] = c
                continue
            lm = red[0][0]
            shift = tuple(b - a for a, b in zip(lm, e))
            for e2, c2 in red[1:]:
                ee = tuple(a + b for a, b in zip(e2, shift))
                old = work.get(ee)
                if old is None:
                    new = submul(0 if self.field == "k" else CoeffScalar.zero(self.p), c, c2)
                    heapq.heappush(heap, (self.negkey(ee), ee))
                else:
                    new = submul(old, c, c2)
                if new:
                    work[ee] = new
                else:
                    work.pop(ee, None)
        return rem

    def spoly(self, f, g):
        lf, lg = f[0][0], g[0][0]
        lcm = tuple(max(a, b) for a, b in zip(lf, lg))
        sf = tuple(a - b for a, b in zip(lcm, lf))
        sg = tuple(a - b for a, b in zip(lcm, lg))
        out = {}
        for e, c in f[1:]:
            out[tuple(a + b for a, b in zip(e, sf))] = c
        for e, c in g[1:]:
            ee = tuple(a + b for a, b in zip(e, sg))
            old = out.get(ee)
            new = self.submul(old if old is not None else (0 if self.field == "k" else CoeffScalar.zero(self.p)), self.one, c)
            if new:
                out[ee] = new
            else:
                out.pop(ee, None)
        return out

    def buchberger(self, polys):
        """Reduced Groebner basis of a list of term dicts (normal strategy, Gebauer-Moeller)."""
        store = []
        alive = []
        pairs = []
        lm = lambda i: store[i][0][0]

        def lcm(a, b):
            return tuple(max(x, y) for x, y in zip(a, b))

        def divides(a, b):
            return all(x <= y for x, y in zip(a, b))

        def coprime(a, b):
            return all(not x or not y for x, y in zip(a, b))

        def update(h):
            nonlocal pairs, alive
            hl = lm(h)
            cand = [(g, lcm(hl, lm(g))) for g in alive]
            keep = []
            for idx, (g, l) in enumerate(cand):
                if coprime(hl, lm(g)):
                    keep.append((g, l, True))
                    continue
                dominated = False
                for g2, l2 in cand[idx + 1:]:
                    if divides(l2, l):
                        dominated = True
                        break
                if not dominated:
                    for g2, l2, _ in keep:
                        if divides(l2, l):
                            dominated = True
                            break
                if not dominated:
                    keep.append((g, l, False))
            new_pairs = [(g, h, l) for g, l, cp in keep if not cp]
            # drop duplicate lcms among the new pairs (keep the first)
            seen = set()
            uniq = []
            for g, hh, l in new_pairs:
                if l not in seen:
                    seen.add(l)
                    uniq.append((g, hh, l))
            old = []
            for (a, b, l) in pairs:
                if (divides(hl, l) and lcm(lm(a), hl) != l and lcm(lm(b), hl) != l):
                    continue
                old.append((a, b, l))
            pairs = old + uniq
            alive = [g for g in alive if not divides(hl, lm(g))] + [h]

        def add(terms):
            deg = max(sum(e) for e, _ in terms)
            if deg > LIMITS.degree_cap:
                raise ResourceLimit(f"Groebner basis degree {deg} exceeds cap {LIMITS.degree_cap}")
            if len(store) >= LIMITS.size_cap:
                raise ResourceLimit(f"Groebner basis size exceeds cap {LIMITS.size_cap}")
            store.append(self.monic(terms))
            update(len(store) - 1)

        inputs = [self.sort(d) for d in polys if d]
        inputs.sort(key=lambda t: self.k(t[0][0]))
        for terms in inputs:
            lms = [lm(i) for i in alive]
            r = self.reduce(dict(terms), [store[i] for i in alive], lms)
            if r:
                add(self.sort(r))
        while pairs:
            best = min(range(len(pairs)),
                       key=lambda i: (sum(pairs[i][2]), self.k(pairs[i][2]), pairs[i][0], pairs[i][1]))
            a, b, _ = pairs.pop(best)
            s = self.spoly(store[a], store[b])
            if not s:
                continue
            r = self.reduce(s, [store[i] for i in alive], [lm(i) for i in alive])
            if r:
                add(self.sort(r))
        # interreduce
        basis = [store[i] for i in alive]
        basis.sort(key=lambda t: self.k(t[0][0]))
        out = []
        for i, f in enumerate(basis):
            others = basis[:i] + basis[i + 1:]
            tail = self.reduce(dict(f[1:]), others, [g[0][0] for g in others])
            terms = [f[0]] + self.sort(tail)
            out.append(terms)
        out.sort(key=lambda t: self.k(t[0][0]), reverse=True)
        return out


class _Neg:
    """Reverses comparison so heapq (a min-heap) pops the largest key."""

    __slots__ = ("k",)

    def __init__(self, k):
        self.k = k

    def __lt__(self, other):
        return self.k > other.k

    def __eq__(self, other):
        return self.k == other.k


# -- ideals -----------------------------------------------------------------

class IdealPresentation:
    """A finitely generated ideal in a fixed ambient ring with a cached reduced basis."""

    def __init__(self, generators, variables, order=DEGREVLEX, field="K", p=None):
        if field not in ("K", "k"):
            raise InputError(f"unknown coefficient regime {field!r}")
        gens = [g for g in generators if not g.is_zero()]
        if p is None:
            if not generators:
                raise InputError("characteristic needed for an empty generator list")
            p = generators[0].p
        self.p = p
        self.variables = tuple(variables)
        for g in gens:
            bad = g.used_variables() - set(self.variables)
            if bad:
                raise InputError(f"generator {g} uses variables {sorted(bad)} outside {self.variables}")
        self.generators = tuple(g.with_variables(self.variables) for g in gens)
        self.order = order
        self.field = field
        self._basis = None
        self._engine = None

    def __repr__(self):
        gens = ", ".join(str(g) for g in self.generators)
        return f"IdealPresentation(<{gens}> in {self.field}[{', '.join(self.variables)}])"

    @property
    def engine(self):
        if self._engine is None:
            self._engine = _Engine(self.variables, self.order, self.field, self.p)
        return self._engine

    def with_order(self, order):
        return IdealPresentation(self.generators, self.variables, order, self.field, self.p)

    def with_generators(self, generators):
        return IdealPresentation(generators, self.variables, self.order, self.field, self.p)

    def extend(self, variables=(), generators=()):
        vs = self.variables + tuple(v for v in variables if v not in self.variables)
        return IdealPresentation(self.generators + tuple(generators), vs, self.order, self.field, self.p)

    def _raw_basis(self):
        if self._basis is None:
            eng = self.engine
            raw = eng.buchberger([eng.convert(g) for g in self.generators])
            self._basis = raw
            STATS.append(len(raw))
            log.debug("groebner basis of size %d in %s", len(raw), self.variables)
        return self._basis

    def is_zero_ideal(self):
        return not self.generators

    def is_unit_ideal(self):
        b = self._raw_basis()
        return len(b) == 1 and not any(b[0][0][0])


def groebner_basis(I):
    """Reduced Groebner basis of ``I`` w.r.t. ``I.order`` as a tuple of MultiPoly."""
    eng = I.engine
    return tuple(eng.back(dict(t)) for t in I._raw_basis())


def leading_monomial(f, variables, order=DEGREVLEX):
    terms = f.sorted_terms(order, variables)
    return dict(terms[0][0]) if terms else None


def normal_form(f, I):
    eng = I.engine
    raw = I._raw_basis()
    r = eng.reduce(eng.convert(f), raw, [t[0][0] for t in raw])
    return eng.back(r)


def contains(I, f):
    return normal_form(f, I).is_zero()


def ideal_equal(I, J):
    if set(I.variables) != set(J.variables):
        raise InputError("ideal_equal needs the same ambient variables")
    if I.field != J.field:
        raise InputError("ideal_equal needs the same coefficient regime")
    J2 = J if J.variables == I.variables else IdealPresentation(J.generators, I.variables, J.order, J.field, J.p)
    return all(contains(J2, g) for g in I.generators) and all(contains(I, g) for g in J2.generators)


def is_groebner(polys, I):
    """Buchberger criterion: every S-polynomial of ``polys`` reduces to zero."""
    eng = I.engine
    basis = [eng.monic(eng.sort(eng.convert(f))) for f in polys if f]
    lms = [t[0][0] for t in basis]
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            s = eng.spoly(basis[i], basis[j])
            if s and eng.reduce(s, basis, lms):
                return False
    return True


def _fresh(name, taken):
    while name in taken:
        name += "_"
    return name


def _linear_pivot(g, v, field):
    """If g = c*v + h with v not in h and c a usable unit, return h/-c."""
    lin = None
    for m, c in g.terms.items():
        d = dict(m)
        if v in d:
            if d != {v: 1} or lin is not None:
                return None
            lin = c
    if lin is None:
        return None
    if field == "k" and not lin.is_constant():
        return None
    rest = g - MultiPoly({((v, 1),): lin}, g.p)
    return rest * (-lin).inverse()


def eliminate(I, drop):
    """I intersected with the subring on the remaining variables."""
    drop = [v for v in I.variables if v in set(drop)]
    bad = set(drop) - set(I.variables)
    if bad:
        raise InputError(f"cannot eliminate {sorted(bad)}: not ambient")
    keep = tuple(v for v in I.variables if v not in set(drop))
    out_order = I.order if I.order.kind == "lex" else DEGREVLEX
    if not drop:
        return IdealPresentation(I.generators, keep, out_order, I.field, I.p)
    gens = list(I.generators)
    remaining = list(drop)
    progress = True
    while progress:
        progress = False
        for v in list(remaining):
            for idx, g in enumerate(gens):
                h = _linear_pivot(g, v, I.field)
                if h is not None:
                    gens = [x.substitute({v: h}) for j, x in enumerate(gens) if j != idx]
                    gens = [x for x in gens if not x.is_zero()]
                    remaining.remove(v)
                    progress = True
                    break
    if not remaining:
        return IdealPresentation(gens, keep, out_order, I.field, I.p)
    order = MonomialOrder.block(remaining, keep)
    J = IdealPresentation(gens, remaining + list(keep), order, I.field, I.p)
    survivors = [g for g in groebner_basis(J) if not (g.used_variables() & set(remaining))]
    return IdealPresentation(survivors, keep, out_order, I.field, I.p)


def saturate(I, f):
    """(I : f^infinity) by the Rabinowitsch trick."""
    if f.is_zero():
        raise ZeroPolynomial("saturation by zero")
    if I.is_zero_ideal():
        return I
    tau = _fresh("_tau", set(I.variables))
    t = MultiPoly.var(tau, I.p)
    J = IdealPresentation(I.generators + (t * f - 1,), (tau,) + I.variables, I.order, I.field, I.p)
    E = eliminate(J, [tau])
    return IdealPresentation(E.generators, I.variables, I.order, I.field, I.p)


def saturate_last_variable(I, var):
    """(I : var^infinity) by dividing a degrevlex basis (var smallest) by var-powers.

    This is an independent route to :func:`saturate` for the special case of a
    variable; the test-suite cross-checks the two.
    """
    variables = tuple(v for v in I.variables if v != var) + (var,)
    J = IdealPresentation(I.generators, variables, DEGREVLEX, I.field, I.p)
    out = []
    for g in groebner_basis(J):
        k = min(dict(m).get(var, 0) for m in g.terms)
        if k:
            terms = {}
            for m, c in g.terms.items():
                d = dict(m)
                d[var] -= k
                terms[tuple(sorted((v, e) for v, e in d.items() if e))] = c
            g = MultiPoly(terms, g.p, g.variables)
        out.append(g)
    return IdealPresentation(out, I.variables, I.order, I.field, I.p)


def _exact_divide(h, f, I):
    eng = I.engine
    hd = eng.convert(h)
    ft = eng.sort(eng.convert(f))
    lm, lc = ft[0]
    q = {}
    while hd:
        e, c = max(hd.items(), key=lambda t: eng.k(t[0]))
        if not all(a <= b for a, b in zip(lm, e)):
            raise InputError(f"{f} does not divide {h}")
        s = tuple(b - a for a, b in zip(lm, e))
        qc = eng.div(c, lc)
        q[s] = qc
        for e2, c2 in ft:
            ee = tuple(a + b for a, b in zip(e2, s))
            old = hd.get(ee)
            new = eng.submul(old if old is not None else (0 if eng.field == "k" else CoeffScalar.zero(eng.p)), qc, c2)
            if new:
                hd[ee] = new
            else:
                hd.pop(ee, None)
    return eng.back(q)


def ideal_quotient(I, f):
    """(I : f) = {g : g*f in I}, via I cap <f> computed by elimination."""
    if f.is_zero():
        raise ZeroPolynomial("ideal quotient by zero")
    if f.is_constant():
        return I
    if I.is_zero_ideal():
        return I
    t = _fresh("_t", set(I.variables))
    tv = MultiPoly.var(t, I.p)
    gens = [tv * g for g in I.generators] + [(1 - tv) * f]
    J = IdealPresentation(gens, (t,) + I.variables, I.order, I.field, I.p)
    inter = eliminate(J, [t])
    quo = [_exact_divide(g, f, I) for g in inter.generators]
    return IdealPresentation(quo, I.variables, I.order, I.field, I.p)


def model_ideal(polys, variables, p, clear_denominators=False):
    """Ideal in k[variables, pi] generated by R-integral polynomials."""
    gens = [to_model(f, clear_denominators) for f in polys]
    return IdealPresentation(gens, tuple(v for v in variables if v != PI) + (PI,), DEGREVLEX, "k", p)


def is_pi_saturated(J):
    """Flatness over R of a model-ring ideal: (J : pi) == J."""
    pi = MultiPoly({((PI, 1),): CoeffScalar.one(J.p)}, J.p)
    return ideal_equal(ideal_quotient(J, pi), J)
