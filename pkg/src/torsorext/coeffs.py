"""Exact arithmetic in K = F_p(pi), the fraction field of the local ring R.

R is modelled as F_p[pi] localised at (pi): an element of K lies in R exactly
when its pi-adic valuation is non-negative.  Elements are reduced fractions
num/den of univariate polynomials in pi, stored as tuples of residues
(constant term first) with a monic denominator.
"""

import math

from .errors import DivisionByZero, InputError, NegativeValuation

INF = math.inf

_SMALL_PRIMES = [q for q in range(2, 98) if all(q % d for d in range(2, int(q ** 0.5) + 1))]


def check_prime(p):
    if p not in _SMALL_PRIMES:
        raise InputError(f"residue characteristic must be a prime 2 <= p <= 97, got {p!r}")
    return p


class PrimeField:
    """The residue field F_p."""

    __slots__ = ("p",)

    def __init__(self, p):
        self.p = check_prime(p)

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def __call__(self, n):
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        a %= self.p
        if not a:
            raise DivisionByZero("0 has no inverse in F_%d" % self.p)
        return pow(a, self.p - 2, self.p)


# -- univariate polynomials in pi over F_p: tuples, low degree first ---------

def _trim(c):
    n = len(c)
    while n and not c[n - 1]:
        n -= 1
    return tuple(c[:n])


def _padd(a, b, p):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, v in enumerate(b):
        out[i] = (out[i] + v) % p
    return _trim(out)


def _pneg(a, p):
    return tuple(-v % p for v in a)


def _pmul(a, b, p):
    if not a or not b:
        return ()
    if len(a) == 1:
        c = a[0]
        return tuple(c * v % p for v in b)
    if len(b) == 1:
        c = b[0]
        return tuple(c * v % p for v in a)
    out = [0] * (len(a) + len(b) - 1)
    for i, u in enumerate(a):
        if u:
            for j, v in enumerate(b):
                out[i + j] += u * v
    return _trim([v % p for v in out])


def _pdivmod(a, b, p):
    if not b:
        raise DivisionByZero("polynomial division by zero")
    inv = pow(b[-1], p - 2, p)
    rem = list(a)
    db = len(b) - 1
    if len(rem) <= db:
        return (), tuple(rem)
    quo = [0] * (len(rem) - db)
    for k in range(len(rem) - 1, db - 1, -1):
        c = rem[k] * inv % p
        if c:
            quo[k - db] = c
            for j, v in enumerate(b):
                rem[k - db + j] = (rem[k - db + j] - c * v) % p
    return _trim(quo), _trim(rem[:db])


def _pgcd(a, b, p):
    while b:
        a, b = b, _pdivmod(a, b, p)[1]
    return a


def _ord(a):
    for i, v in enumerate(a):
        if v:
            return i
    return INF


def _pstr(a):
    terms = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if not c:
            continue
        if i == 0:
            terms.append(str(c))
        else:
            mono = "pi" if i == 1 else f"pi^{i}"
            terms.append(mono if c == 1 else f"{c}*{mono}")
    return "+".join(terms) if terms else "0"


class CoeffScalar:
    """An element num/den of F_p(pi) in canonical reduced form.

    Instances are immutable and hashable; two representations of the same field
    element always normalise to identical (num, den) pairs.
    """

    __slots__ = ("num", "den", "p", "_hash")

    def __init__(self, num, den=(1,), p=2, _normalized=False):
        if not _normalized:
            num = _trim([v % p for v in num])
            den = _trim([v % p for v in den])
            if not den:
                raise DivisionByZero("zero denominator")
            if not num:
                den = (1,)
            elif den != (1,):
                g = _pgcd(num, den, p)
                if len(g) > 1:
                    num = _pdivmod(num, g, p)[0]
                    den = _pdivmod(den, g, p)[0]
                lead = den[-1]
                if lead != 1:
                    inv = pow(lead, p - 2, p)
                    num = tuple(v * inv % p for v in num)
                    den = tuple(v * inv % p for v in den)
        self.num = num
        self.den = den
        self.p = p
        self._hash = None

    # constructors
    @classmethod
    def from_int(cls, n, p):
        n %= p
        return cls((n,) if n else (), (1,), p, _normalized=True)

    @classmethod
    def pi(cls, p, power=1):
        if power >= 0:
            return cls((0,) * power + (1,), (1,), p, _normalized=True)
        return cls((1,), (0,) * (-power) + (1,), p, _normalized=True)

    @classmethod
    def zero(cls, p):
        return cls((), (1,), p, _normalized=True)

    @classmethod
    def one(cls, p):
        return cls((1,), (1,), p, _normalized=True)

    def _coerce(self, other):
        if isinstance(other, CoeffScalar):
            if other.p != self.p:
                raise InputError(f"mixed characteristics {self.p} and {other.p}")
            return other
        if isinstance(other, int):
            return CoeffScalar.from_int(other, self.p)
        return NotImplemented

    # predicates
    def is_zero(self):
        return not self.num

    def is_one(self):
        return self.num == (1,) and self.den == (1,)

    def is_constant(self):
        """True when the element lies in F_p."""
        return self.den == (1,) and len(self.num) <= 1

    def is_polynomial(self):
        return self.den == (1,)

    def __bool__(self):
        return bool(self.num)

    def valuation(self):
        if not self.num:
            return INF
        return _ord(self.num) - _ord(self.den)

    def residue(self):
        """Value at pi = 0, an integer in [0, p)."""
        v = self.valuation()
        if v < 0:
            raise NegativeValuation(f"{self} has valuation {v} < 0")
        if v > 0:
            return 0
        return self.num[0] * pow(self.den[0], self.p - 2, self.p) % self.p

    def constant_value(self):
        if not self.is_constant():
            raise InputError(f"{self} is not an element of F_{self.p}")
        return self.num[0] if self.num else 0

    # arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        if self.den == other.den:
            if self.den == (1,):
                return CoeffScalar(_padd(self.num, other.num, p), (1,), p, _normalized=True)
            return CoeffScalar(_padd(self.num, other.num, p), self.den, p)
        num = _padd(_pmul(self.num, other.den, p), _pmul(other.num, self.den, p), p)
        return CoeffScalar(num, _pmul(self.den, other.den, p), p)

    __radd__ = __add__

    def __neg__(self):
        return CoeffScalar(_pneg(self.num, self.p), self.den, self.p, _normalized=True)

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
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        if self.den == (1,) and other.den == (1,):
            return CoeffScalar(_pmul(self.num, other.num, p), (1,), p, _normalized=True)
        return CoeffScalar(_pmul(self.num, other.num, p), _pmul(self.den, other.den, p), p)

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise DivisionByZero("inverse of zero in K")
        return CoeffScalar(self.den, self.num, self.p)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = CoeffScalar.one(self.p)
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def shift(self, k):
        """Multiply by pi^k."""
        if not self.num or not k:
            return self
        if k > 0:
            if self.den[0]:
                return CoeffScalar((0,) * k + self.num, self.den, self.p, _normalized=True)
            return self * CoeffScalar.pi(self.p, k)
        return self * CoeffScalar.pi(self.p, k)

    # comparison / hashing
    def __eq__(self, other):
        if isinstance(other, int):
            other = CoeffScalar.from_int(other, self.p)
        if not isinstance(other, CoeffScalar):
            return NotImplemented
        return self.p == other.p and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den, self.p))
        return self._hash

    def __repr__(self):
        return f"CoeffScalar({self}, p={self.p})"

    def __str__(self):
        n = _pstr(self.num)
        if self.den == (1,):
            return n
        d = _pstr(self.den)
        if len([v for v in self.num if v]) > 1:
            n = f"({n})"
        if len([v for v in self.den if v]) > 1:
            d = f"({d})"
        return f"{n}/{d}"

    def needs_parens(self):
        return len([v for v in self.num if v]) > 1 or self.den != (1,)
