"""Brute-force ideal membership over F_p, independent of the package.

Polynomials are dicts {exponent tuple: int mod p}.  ``f`` is in the ideal
generated by ``gens`` with a degree-``D`` certificate iff the linear system
sum_i h_i * g_i = f, with deg(h_i * g_i) <= D, has a solution mod p.
"""

import itertools


def monomials(nvars, maxdeg):
    out = []
    for d in range(maxdeg + 1):
        for e in itertools.product(range(d + 1), repeat=nvars):
            if sum(e) == d:
                out.append(e)
    return out


def degree(f):
    return max((sum(e) for e in f), default=-1)


def mul_mono(f, m, p):
    return {tuple(a + b for a, b in zip(e, m)): c % p for e, c in f.items()}


def add(f, g, p):
    out = dict(f)
    for e, c in g.items():
        out[e] = (out.get(e, 0) + c) % p
    return {e: c for e, c in out.items() if c}


def mul(f, g, p):
    out = {}
    for e1, c1 in f.items():
        for e2, c2 in g.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = (out.get(e, 0) + c1 * c2) % p
    return {e: c for e, c in out.items() if c}


def solve_mod_p(rows, rhs, p):
    """Is the system rows * u = rhs consistent over F_p?"""
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    ncols = len(rows[0]) if rows else 0
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] % p), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], p - 2, p)
        m[r] = [v * inv % p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] % p:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[r])]
        r += 1
    return all(any(v % p for v in row[:-1]) or row[-1] % p == 0 for row in m)


def member(f, gens, nvars, p, bound):
    """True iff f has a membership certificate of degree <= bound."""
    if not f:
        return True
    if degree(f) > bound:
        return False
    mons = monomials(nvars, bound)
    index = {e: i for i, e in enumerate(mons)}
    columns = []
    for g in gens:
        dg = degree(g)
        if dg < 0:
            continue
        for m in monomials(nvars, bound - dg):
            columns.append(mul_mono(g, m, p))
    if not columns:
        return False
    rows = [[0] * len(columns) for _ in mons]
    for j, col in enumerate(columns):
        for e, c in col.items():
            rows[index[e]][j] = c
    rhs = [0] * len(mons)
    for e, c in f.items():
        rhs[index[e]] = c
    return solve_mod_p(rows, rhs, p)


def random_poly(rng, nvars, maxdeg, p, terms=3):
    f = {}
    for _ in range(terms):
        d = rng.randint(0, maxdeg)
        e = [0] * nvars
        for _ in range(d):
            e[rng.randrange(nvars)] += 1
        e = tuple(e)
        f[e] = (f.get(e, 0) + rng.randrange(1, p)) % p
    return {e: c for e, c in f.items() if c}
