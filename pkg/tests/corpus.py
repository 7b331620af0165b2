"""Seeded random branches and singular fields shared by the property suites."""
from __future__ import annotations

import random
from math import gcd

from gmpy2 import mpq

from planebranch.puiseux import PuiseuxParam, prepare, semigroup
from planebranch.series import BiPoly, TSeries
from planebranch.vfield import Invariant, VectorField, contact_exponent

COEFFS = (1, -1, 2, -2, 3, mpq(1, 2), mpq(-1, 3))


def random_branch(rng: random.Random, max_n: int = 6, extra_trunc: int = 0) -> PuiseuxParam:
    """Prepared polynomial branch (t^n, t^m + ...) with 2 <= n <= max_n."""
    n = rng.randint(2, max_n)
    m = rng.choice([k for k in range(n + 1, 3 * n) if k % n])
    terms = {m: rng.choice(COEFFS)}
    g = gcd(n, m)
    e = m
    while g > 1:
        e = rng.randint(e + 1, e + n)
        if e % g:
            g = gcd(g, e)
            terms[e] = rng.choice(COEFFS)
    for _ in range(rng.randint(0, 2)):
        k = rng.randint(m + 1, e + n + 2)
        terms[k] = rng.choice(COEFFS)
    probe = PuiseuxParam(n, TSeries(terms, max(terms) + 1))
    c = semigroup(prepare(probe).param).conductor
    K = max(c + 2 * n + 4, max(terms) + 1) + extra_trunc
    return PuiseuxParam(n, TSeries(terms, K))


def random_poly(rng: random.Random, max_deg: int, density: float) -> BiPoly:
    terms = {}
    for d in range(1, max_deg + 1):
        for i in range(d + 1):
            if rng.random() < density:
                terms[(i, d - i)] = mpq(rng.choice(COEFFS))
    return BiPoly(terms)


def random_field(rng: random.Random, max_deg: int = 3, nilpotent: bool = False) -> VectorField:
    while True:
        A = random_poly(rng, max_deg, 0.3)
        B = random_poly(rng, max_deg, 0.3)
        if nilpotent:
            # linear part [[0, b], [0, 0]] or vanishing
            A = BiPoly({k: c for k, c in A.terms.items() if sum(k) > 1 or k == (0, 1)})
            B = BiPoly({k: c for k, c in B.terms.items() if sum(k) > 1})
        if A.terms or B.terms:
            return VectorField(A, B)


def branch_field_pairs(seed: int, count: int, max_n: int = 6):
    """(branch, field, contact) with finite contact and enough truncation for blow-ups."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        phi = random_branch(rng, max_n)
        X = random_field(rng)
        ce = contact_exponent(X, phi.with_y(TSeries(phi.y.terms, phi.trunc + 60)))
        if isinstance(ce, Invariant) or ce > 40:
            continue
        need = ce + 3 * phi.n + 4
        if need > phi.trunc:
            phi = phi.with_y(TSeries(phi.y.terms, need))
        out.append((phi, X, ce))
    return out
