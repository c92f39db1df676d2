"""Sparse multivariate polynomials over K = F_p(pi).

A monomial is a tuple of ``(name, exponent)`` pairs sorted by name with no zero
exponents, so polynomials built in different ambient rings compare equal when
they are equal.  The name ``pi`` is reserved: in expressions it denotes the
uniformizer (a scalar), never a variable.
"""

import re
from dataclasses import dataclass

from .coeffs import INF, CoeffScalar
from .errors import InputError, PolySyntaxError, UndeclaredVariable, ZeroPolynomial

PI = "pi"
MAX_EXPONENT = 1 << 16

ONE_MONO = ()


def mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    for e in d.values():
        if e > MAX_EXPONENT:
            raise InputError(f"exponent {e} exceeds cap {MAX_EXPONENT}")
    return tuple(sorted(d.items()))


def mono_degree(m):
    return sum(e for _, e in m)


def mono_from_dict(d):
    for v, e in d.items():
        if e < 0:
            raise InputError(f"negative exponent for {v}")
        if e > MAX_EXPONENT:
            raise InputError(f"exponent {e} exceeds cap {MAX_EXPONENT}")
    return tuple(sorted((v, e) for v, e in d.items() if e))


@dataclass(frozen=True)
class MonomialOrder:
    """degrevlex, lex, or a block order (front block >> back block).

    Each block of a block order is compared by degrevlex.  Variable precedence
    inside a block (and for plain orders) follows the ``variables`` tuple of the
    ring the order is used in.
    """

    kind: str = "degrevlex"
    front: tuple = ()
    back: tuple = ()

    def __post_init__(self):
        if self.kind not in ("degrevlex", "lex", "block"):
            raise InputError(f"unknown monomial order {self.kind!r}")

    @classmethod
    def block(cls, front, back):
        return cls("block", tuple(front), tuple(back))

    def key_function(self, variables):
        """Return ``key(exps)`` on exponent tuples aligned with ``variables``.

        A larger key is a larger monomial.
        """
        n = len(variables)
        if self.kind == "lex":
            return lambda e: e
        if self.kind == "degrevlex":
            rev = tuple(range(n - 1, -1, -1))
            return lambda e: (sum(e), tuple(-e[i] for i in rev))
        pos = {v: i for i, v in enumerate(variables)}
        front = [pos[v] for v in variables if v in set(self.front)]
        back = [i for i in range(n) if i not in set(front)]
        rf = front[::-1]
        rb = back[::-1]

        def key(e):
            return (sum(e[i] for i in front), tuple(-e[i] for i in rf),
                    sum(e[i] for i in back), tuple(-e[i] for i in rb))

        return key

    def compare(self, m1, m2, variables=None):
        """Three-way comparison of two monomials given as name -> exponent maps."""
        m1 = dict(m1)
        m2 = dict(m2)
        if variables is None:
            variables = list(self.front) + list(self.back)
            for v in list(m1) + list(m2):
                if v not in variables:
                    variables.append(v)
        key = self.key_function(tuple(variables))
        k1 = key(tuple(m1.get(v, 0) for v in variables))
        k2 = key(tuple(m2.get(v, 0) for v in variables))
        return (k1 > k2) - (k1 < k2)


DEGREVLEX = MonomialOrder()


def compare(m1, m2, order=DEGREVLEX, variables=None):
    return order.compare(m1, m2, variables)


class MultiPoly:
    """Polynomial with CoeffScalar coefficients.

    ``variables`` is the declared ambient ordering used for printing and as the
    default monomial order; it does not take part in equality.
    """

    __slots__ = ("terms", "p", "variables")

    def __init__(self, terms, p, variables=()):
        self.terms = {m: c for m, c in terms.items() if c}
        self.p = p
        used = set()
        for m in self.terms:
            used.update(v for v, _ in m)
        declared = tuple(variables)
        extra = sorted(used - set(declared))
        self.variables = declared + tuple(extra)

    # constructors
    @classmethod
    def zero(cls, p, variables=()):
        return cls({}, p, variables)

    @classmethod
    def constant(cls, c, p, variables=()):
        if isinstance(c, int):
            c = CoeffScalar.from_int(c, p)
        return cls({ONE_MONO: c}, p, variables)

    @classmethod
    def var(cls, name, p, variables=None):
        if name == PI:
            raise InputError("'pi' is the uniformizer, not a variable")
        return cls({((name, 1),): CoeffScalar.one(p)}, p, variables or (name,))

    @classmethod
    def monomial(cls, mono, coeff, p, variables=()):
        if isinstance(mono, dict):
            mono = mono_from_dict(mono)
        if isinstance(coeff, int):
            coeff = CoeffScalar.from_int(coeff, p)
        return cls({mono: coeff}, p, variables)

    def with_variables(self, variables):
        return MultiPoly(self.terms, self.p, variables)

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.p != self.p:
                raise InputError("mixed characteristics")
            return other
        if isinstance(other, (int, CoeffScalar)):
            return MultiPoly.constant(other, self.p)
        return NotImplemented

    def _merge_vars(self, other):
        if other.variables == self.variables or not other.variables:
            return self.variables
        seen = list(self.variables)
        for v in other.variables:
            if v not in seen:
                seen.append(v)
        return tuple(seen)

    # predicates and accessors
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and ONE_MONO in self.terms)

    def constant_term(self):
        return self.terms.get(ONE_MONO, CoeffScalar.zero(self.p))

    def used_variables(self):
        out = set()
        for m in self.terms:
            out.update(v for v, _ in m)
        return out

    def total_degree(self):
        return max((mono_degree(m) for m in self.terms), default=-1)

    def degree(self, var):
        return max((dict(m).get(var, 0) for m in self.terms), default=-1)

    def coefficient(self, mono):
        if isinstance(mono, dict):
            mono = mono_from_dict(mono)
        return self.terms.get(mono, CoeffScalar.zero(self.p))

    def min_valuation(self):
        return min((c.valuation() for c in self.terms.values()), default=INF)

    def has_integral_coefficients(self):
        return all(c.valuation() >= 0 for c in self.terms.values())

    # arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            out[m] = c if s is None else s + c
        return MultiPoly(out, self.p, self._merge_vars(other))

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly({m: -c for m, c in self.terms.items()}, self.p, self.variables)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, CoeffScalar)):
            if isinstance(other, int):
                other = CoeffScalar.from_int(other, self.p)
            if not other:
                return MultiPoly.zero(self.p, self.variables)
            return MultiPoly({m: c * other for m, c in self.terms.items()}, self.p, self.variables)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                c = c1 * c2
                s = out.get(m)
                out[m] = c if s is None else s + c
        return MultiPoly(out, self.p, self._merge_vars(other))

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = MultiPoly.constant(1, self.p, self.variables)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale_pi(self, k):
        """Multiply every coefficient by pi^k."""
        return MultiPoly({m: c.shift(k) for m, c in self.terms.items()}, self.p, self.variables)

    def __truediv__(self, other):
        if isinstance(other, int):
            other = CoeffScalar.from_int(other, self.p)
        if isinstance(other, MultiPoly) and other.is_constant():
            other = other.constant_term()
        if not isinstance(other, CoeffScalar):
            return NotImplemented
        inv = other.inverse()
        return self * inv

    # comparison
    def __eq__(self, other):
        if isinstance(other, (int, CoeffScalar)):
            other = MultiPoly.constant(other, self.p)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.p == other.p and self.terms == other.terms

    def __hash__(self):
        return hash((self.p, frozenset(self.terms.items())))

    # substitution
    def substitute(self, bindings):
        """Simultaneous substitution ``var -> MultiPoly | CoeffScalar | int``."""
        if not bindings:
            return self
        p = self.p
        conv = {}
        for v, val in bindings.items():
            if v == PI:
                raise InputError("cannot substitute for the uniformizer 'pi'")
            conv[v] = val if isinstance(val, MultiPoly) else MultiPoly.constant(val, p)
        variables = [v for v in self.variables if v not in conv]
        for val in conv.values():
            for v in val.variables:
                if v not in variables:
                    variables.append(v)
        power_cache = {}

        def power(v, e):
            key = (v, e)
            if key not in power_cache:
                power_cache[key] = conv[v] ** e
            return power_cache[key]

        out = MultiPoly.zero(p, variables)
        acc = {}
        for m, c in self.terms.items():
            kept = tuple((v, e) for v, e in m if v not in conv)
            term = MultiPoly({kept: c}, p)
            for v, e in m:
                if v in conv:
                    term = term * power(v, e)
            for mm, cc in term.terms.items():
                s = acc.get(mm)
                acc[mm] = cc if s is None else s + cc
        out = MultiPoly(acc, p, variables)
        return out

    def rename(self, mapping):
        """Rename variables (a bijective relabelling, no expansion needed)."""
        out = {}
        for m, c in self.terms.items():
            d = {}
            for v, e in m:
                w = mapping.get(v, v)
                d[w] = d.get(w, 0) + e
            mm = tuple(sorted(d.items()))
            s = out.get(mm)
            out[mm] = c if s is None else s + c
        return MultiPoly(out, self.p, tuple(mapping.get(v, v) for v in self.variables))

    def evaluate(self, point):
        """Evaluate at a full assignment ``var -> CoeffScalar``; returns CoeffScalar."""
        total = CoeffScalar.zero(self.p)
        for m, c in self.terms.items():
            t = c
            for v, e in m:
                if v not in point:
                    raise UndeclaredVariable(f"no value for {v}")
                val = point[v]
                if isinstance(val, int):
                    val = CoeffScalar.from_int(val, self.p)
                t = t * val ** e
            total = total + t
        return total

    def pi_normalize(self):
        """Return ``(f / pi^m, m)`` with m the least coefficient valuation."""
        if not self.terms:
            raise ZeroPolynomial("cannot pi-normalize the zero polynomial")
        m = self.min_valuation()
        return self.scale_pi(-m), m

    def map_coefficients(self, fn):
        return MultiPoly({m: fn(c) for m, c in self.terms.items()}, self.p, self.variables)

    # printing
    def sorted_terms(self, order=DEGREVLEX, variables=None):
        variables = tuple(variables or self.variables)
        key = order.key_function(variables)
        pos = {v: i for i, v in enumerate(variables)}

        def exps(m):
            e = [0] * len(variables)
            for v, k in m:
                e[pos[v]] = k
            return tuple(e)

        return sorted(self.terms.items(), key=lambda t: key(exps(t[0])), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in self._ordered(m))
            if not mono:
                parts.append(f"({c})" if c.needs_parens() else str(c))
            elif c.is_one():
                parts.append(mono)
            else:
                cs = f"({c})" if c.needs_parens() else str(c)
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts)

    def _ordered(self, m):
        pos = {v: i for i, v in enumerate(self.variables)}
        return sorted(m, key=lambda t: pos.get(t[0], len(pos)))

    def __repr__(self):
        return f"MultiPoly({self}, p={self.p})"


def as_poly(value, p, variables=()):
    if isinstance(value, MultiPoly):
        return value
    return MultiPoly.constant(value, p, variables)


# -- parser -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9']*)|(\*\*|[-+*/^()]))")


def _tokenize(text):
    pos = 0
    out = []
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolySyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(("num", int(m.group(1)), start))
        elif m.group(2):
            out.append(("id", m.group(2), start))
        else:
            op = m.group(3)
            out.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    out.append(("end", None, n))
    return out


class _Parser:
    def __init__(self, text, variables, p):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.variables = None if variables is None else tuple(variables)
        self.p = p

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise PolySyntaxError(msg, tok[2], self.text)

    def expect(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            self.error(f"expected {op!r}", t)

    def parse(self):
        if self.peek()[0] == "end":
            self.error("empty expression")
        value = self.expr()
        if self.peek()[0] != "end":
            self.error("unexpected token")
        return value

    def expr(self):
        value = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            tok = self.take()
            rhs = self.unary()
            if tok[1] == "*":
                value = value * rhs
            else:
                if not rhs.is_constant():
                    self.error("division by a non-scalar", tok)
                if rhs.is_zero():
                    self.error("division by zero", tok)
                value = value / rhs.constant_term()
        return value

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            value = self.unary()
            return -value if tok[1] == "-" else value
        return self.power()

    def exponent(self):
        tok = self.peek()
        sign = 1
        if tok[0] == "op" and tok[1] == "(":
            self.take()
            if self.peek()[0] == "op" and self.peek()[1] in "+-":
                sign = -1 if self.take()[1] == "-" else 1
            t = self.take()
            if t[0] != "num":
                self.error("expected integer exponent", t)
            self.expect(")")
            return sign * t[1]
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            sign = -1
        t = self.take()
        if t[0] != "num":
            self.error("expected integer exponent", t)
        return sign * t[1]

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            tok = self.take()
            e = self.exponent()
            if e > MAX_EXPONENT:
                self.error(f"exponent exceeds cap {MAX_EXPONENT}", tok)
            if e < 0:
                if not base.is_constant() or base.is_zero():
                    self.error("negative exponent on a non-scalar", tok)
                return MultiPoly.constant(base.constant_term() ** e, self.p)
            return base ** e
        return base

    def atom(self):
        tok = self.take()
        kind, val, _ = tok
        if kind == "num":
            return MultiPoly.constant(val % self.p, self.p)
        if kind == "id":
            if val == PI:
                return MultiPoly.constant(CoeffScalar.pi(self.p), self.p)
            if self.variables is not None and val not in self.variables:
                raise UndeclaredVariable(f"undeclared variable {val!r} at position {tok[2]}")
            return MultiPoly.var(val, self.p)
        if kind == "op" and val == "(":
            value = self.expr()
            self.expect(")")
            return value
        self.error("unexpected token", tok)


def parse(text, variables=None, p=2):
    """Parse a polynomial expression.

    ``variables`` lists the declared variable names (``None`` accepts any
    identifier).  Integers are read modulo p; ``pi`` is the uniformizer.
    """
    result = _Parser(str(text), variables, p).parse()
    return result.with_variables(tuple(variables) if variables is not None else result.variables)


def parse_scalar(text, p):
    f = parse(text, (), p)
    return f.constant_term()
