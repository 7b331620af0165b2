"""Puiseux parametrizations (t^n, y(t)) of plane branches and their basic data."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from math import gcd

from gmpy2 import mpq

from .errors import TruncationError
from .scalars import DEFAULT_ORDER, CyclotomicField, field
from .series import (INF, AtLeast, BiPoly, TSeries, invert_param,
                     nth_root_series, reparametrize)


class PuiseuxParam:
    """Branch parametrization ``x = t^n``, ``y = y(t)`` known up to ``y.trunc``.

    ``fld`` is the coefficient field; its deterministic root branch is used
    whenever a renormalization needs an n-th root.
    """

    __slots__ = ("n", "y", "fld")

    def __init__(self, n: int, y: TSeries, fld: CyclotomicField | None = None):
        if n < 1:
            raise ValueError("multiplicity must be positive")
        if y.trunc == INF:
            raise ValueError("PuiseuxParam needs a finite truncation")
        if y.terms and min(y.terms) < n:
            raise ValueError(
                f"ord y = {min(y.terms)} < n = {n}: branch tangent to the y-axis")
        self.n = n
        self.y = y
        self.fld = fld or field(DEFAULT_ORDER)

    @classmethod
    def from_terms(cls, n: int, terms, trunc: int | None = None,
                   fld: CyclotomicField | None = None) -> PuiseuxParam:
        """Build from ``{exp: coef}`` or ``[(exp, coef)]``.

        Without ``trunc`` the truncation is ``c + 2n + 4`` (c the conductor),
        raised if necessary so every given term is kept.
        """
        fld = fld or field(DEFAULT_ORDER)
        terms = dict(terms)
        terms = {int(e): fld(c) for e, c in terms.items()}
        if trunc is None:
            top = max((e for e, c in terms.items() if c), default=n)
            probe = cls(n, TSeries(terms, top + 1), fld)
            c = semigroup(prepare(probe)[0]).conductor
            trunc = max(c + 2 * n + 4, top + 1)
        return cls(n, TSeries(terms, trunc), fld)

    @property
    def trunc(self):
        return self.y.trunc

    @property
    def x(self) -> TSeries:
        return TSeries({self.n: mpq(1)})

    def support(self) -> list[int]:
        return self.y.exponents()

    def coeff(self, i: int):
        return self.y.coeff(i)

    def first_exponent(self) -> int | None:
        """First exponent of y not divisible by n (m for a prepared branch)."""
        for e in self.y.exponents():
            if e % self.n:
                return e
        return None

    def is_prepared(self) -> bool:
        m = self.y.ord()
        return isinstance(m, int) and m > self.n and m % self.n != 0

    def is_smooth(self) -> bool:
        return self.n == 1

    def irreducible_up_to_trunc(self) -> bool:
        g = self.n
        for e in self.y.exponents():
            g = gcd(g, e)
        return g == 1

    def with_y(self, y: TSeries) -> PuiseuxParam:
        return PuiseuxParam(self.n, y, self.fld)

    def truncate(self, K: int) -> PuiseuxParam:
        return PuiseuxParam(self.n, self.y.truncate(K), self.fld)

    def exact_y(self) -> TSeries:
        """y read as an exact polynomial (oracle interpretation)."""
        return TSeries(self.y.terms)

    def __eq__(self, other):
        if not isinstance(other, PuiseuxParam):
            return NotImplemented
        return self.n == other.n and self.y == other.y

    def __hash__(self):
        return hash((self.n, self.y))

    def __repr__(self):
        return f"PuiseuxParam(n={self.n}, y={self.y!r})"


@dataclass(frozen=True)
class HeadFlow:
    """Flow exp(-a x^k d/dy) removing the term a t^(kn)."""

    k: int
    a: object

    def describe(self) -> str:
        return f"exp(-({self.a}) x^{self.k} d/dy)"


@dataclass
class Prepared:
    param: PuiseuxParam
    log: list[HeadFlow] = dc_field(default_factory=list)
    smooth: bool = False

    def __iter__(self):
        return iter((self.param, self.log, self.smooth))

    def __getitem__(self, i):
        return (self.param, self.log, self.smooth)[i]


def prepare(phi: PuiseuxParam) -> Prepared:
    """Remove the head terms a t^(kn) preceding the first non-multiple exponent.

    Each removal is the diffeomorphism (x, y - a x^k), logged as a flow.
    For n = 1 every term is a head term and the result is the Smooth outcome
    (y = 0).
    """
    n = phi.n
    log = []
    terms = dict(phi.y.terms)
    for e in sorted(terms):
        if e % n:
            break
        log.append(HeadFlow(e // n, terms.pop(e)))
    out = phi.with_y(TSeries(terms, phi.trunc))
    smooth = n == 1
    if not smooth and not out.y.terms:
        raise TruncationError(
            f"no exponent prime to n={n} below truncation {phi.trunc}")
    return Prepared(out, log, smooth)


@dataclass(frozen=True)
class SemigroupData:
    generators: tuple[int, ...]
    conductor: int
    char_exponents: tuple[int, ...]

    @property
    def g(self) -> int:
        return len(self.char_exponents) - 1

    def gcds(self) -> list[int]:
        es = [self.char_exponents[0]]
        for b in self.char_exponents[1:]:
            es.append(gcd(es[-1], b))
        return es

    def contains(self, v: int) -> bool:
        return in_semigroup(v, self.generators)


def characteristic_exponents(phi: PuiseuxParam) -> tuple[int, ...]:
    """beta_0 = n, then each exponent that lowers the running gcd."""
    n = phi.n
    betas = [n]
    e = n
    for k in phi.y.exponents():
        if e == 1:
            break
        if k % e:
            betas.append(k)
            e = gcd(e, k)
    if e != 1:
        raise TruncationError(
            f"gcd chain stops at {e} below truncation {phi.trunc}: "
            "irreducibility not certified")
    return tuple(betas)


def semigroup(phi: PuiseuxParam) -> SemigroupData:
    """Semigroup generators and conductor from the characteristic exponents."""
    betas = characteristic_exponents(phi)
    n = betas[0]
    es = [n]
    for b in betas[1:]:
        es.append(gcd(es[-1], b))
    gens = [n]
    if len(betas) > 1:
        gens.append(betas[1])
    for q in range(1, len(betas) - 1):
        nq = es[q - 1] // es[q]
        gens.append(nq * gens[q] + betas[q + 1] - betas[q])
    c = sum((es[q - 1] // es[q] - 1) * gens[q] for q in range(1, len(betas))) - n + 1
    return SemigroupData(tuple(gens), c, betas)


def in_semigroup(v: int, gens) -> bool:
    if v < 0:
        return False
    reach = [False] * (v + 1)
    reach[0] = True
    for k in range(1, v + 1):
        reach[k] = any(k >= g and reach[k - g] for g in gens)
    return reach[v]


def gap_conductor(gens) -> int:
    """Conductor by brute-force enumeration of the gaps of <gens>."""
    if 1 in gens:
        return 0
    limit = sum(gens) * max(gens) + 1
    reach = [False] * (limit + 1)
    reach[0] = True
    for k in range(1, limit + 1):
        reach[k] = any(k >= g and reach[k - g] for g in gens)
    last_gap = max(k for k in range(limit + 1) if not reach[k])
    return last_gap + 1


def euclid_multiplicities(char_exponents, depth: int) -> list[int]:
    """Multiplicity sequence from the characteristic exponents (Euclid)."""
    betas = list(char_exponents)
    out: list[int] = []
    e_prev = betas[0]
    b_prev = 0
    for b in betas[1:]:
        a, r = b - b_prev, e_prev
        while r:
            q, rem = divmod(a, r)
            out.extend([r] * q)
            a, r = r, rem
        e_prev = gcd(e_prev, b)
        b_prev = b
    while len(out) < depth:
        out.append(1)
    return out[:depth]


@dataclass
class StrictTransform:
    """Strict transform in the x-chart, moved to the chart origin.

    The new coordinates are ``(y/x - shift, x)`` scaled by ``1/scale`` on the
    first slot when ``swapped``, else ``(x, y/x - shift)``.
    """

    param: PuiseuxParam
    shift: object
    swapped: bool
    scale: object


def strict_transform_data(phi: PuiseuxParam) -> StrictTransform:
    n = phi.n
    ybar = phi.y.shift(-n)
    a = ybar.terms.get(0, 0)
    if a:
        ybar = ybar - TSeries({0: a})
    k = ybar.ord()
    if isinstance(k, AtLeast):
        if n == 1:
            return StrictTransform(phi.with_y(ybar), a, False, mpq(1))
        raise TruncationError("strict transform not determined at this truncation")
    if k >= n:
        return StrictTransform(phi.with_y(ybar), a, False, mpq(1))
    # tangent to the divisor: swap so the divisor becomes the y-axis
    c = ybar.terms[k]
    X = ybar.scale(1 / c)
    tau = nth_root_series(X, k, phi.fld)
    back = invert_param(tau)
    newy = TSeries({n: mpq(1)}).compose(back)
    newy = newy.truncate(min(newy.trunc, back.trunc + n - 1))
    return StrictTransform(PuiseuxParam(k, newy, phi.fld), a, True, c)


def strict_transform(phi: PuiseuxParam) -> PuiseuxParam:
    """Strict transform after one blow-up, renormalized to (t^n', ...)."""
    return strict_transform_data(phi).param


def mult_sequence(phi: PuiseuxParam, depth: int, check: bool = True) -> list[int]:
    """Multiplicities at the first ``depth`` infinitely near points."""
    out = []
    cur = phi
    for _ in range(depth):
        out.append(cur.n)
        if cur.n == 1:
            out.extend([1] * (depth - len(out)))
            break
        cur = strict_transform(cur)
    if check and phi.n > 1:
        ref = euclid_multiplicities(characteristic_exponents(phi), depth)
        if ref != out:
            from .errors import CrossCheckError
            raise CrossCheckError(f"blow-up multiplicities {out} != Euclid {ref}")
    return out


def implicitize(phi: PuiseuxParam) -> BiPoly:
    """Monic equation f(x, y) of the branch, y read as an exact polynomial.

    f is the characteristic polynomial of multiplication by y(t) on
    K[x][t]/(t^n - x), which equals the resultant in t of (x - t^n, y - y(t)).
    """
    n = phi.n
    one = mpq(1)
    # column j: y(t) * t^j reduced with t^n = x
    M = [[BiPoly() for _ in range(n)] for _ in range(n)]
    for j in range(n):
        for e, c in phi.y.terms.items():
            s = e + j
            M[s % n][j] = M[s % n][j] + BiPoly({(s // n, 0): c})
    # Faddeev-LeVerrier
    coeffs = [BiPoly() for _ in range(n + 1)]
    coeffs[n] = BiPoly.const(one)
    Mk = [[BiPoly() for _ in range(n)] for _ in range(n)]
    for k in range(1, n + 1):
        prev = Mk
        Mk = _matmul(M, prev)
        for i in range(n):
            Mk[i][i] = Mk[i][i] + coeffs[n - k + 1]
        AM = _matmul(M, Mk)
        tr = BiPoly()
        for i in range(n):
            tr = tr + AM[i][i]
        coeffs[n - k] = tr.scale(mpq(-1, k))
    f = BiPoly()
    for k, ck in enumerate(coeffs):
        f = f + ck * BiPoly({(0, k): one})
    return f


def _matmul(A, B):
    n = len(A)
    out = [[BiPoly() for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = BiPoly()
            for k in range(n):
                if A[i][k].terms and B[k][j].terms:
                    acc = acc + A[i][k] * B[k][j]
            out[i][j] = acc
    return out


def evaluate_on(g: BiPoly, phi: PuiseuxParam, exact: bool = True) -> TSeries:
    """g(t^n, y(t)); with ``exact`` the data are read as polynomials."""
    y = phi.exact_y() if exact else phi.y
    return g.compose(phi.x, y)


def intersection(phi: PuiseuxParam, g: BiPoly, exact: bool = True):
    """(Gamma, g=0) at the origin: ord_t g(phi(t)), or AtLeast."""
    s = evaluate_on(g, phi, exact)
    if exact and s.trunc == INF and not s.terms:
        return AtLeast(INF)
    return s.ord()


def roots_of_unity(n: int, fld: CyclotomicField) -> list:
    """All xi in the field with xi^n = 1, in ascending zeta power."""
    out = []
    for k in range(fld.order):
        z = fld.zeta(k)
        if z ** n == 1 and z not in out:
            out.append(z)
    for z in list(out):
        if -z not in out and (-z) ** n == 1:
            out.append(-z)
    return out


def branch_equal(p1: PuiseuxParam, p2: PuiseuxParam, upto: int | None = None):
    """xi with y1(xi t) == y2(t) below the common truncation, else None.

    The search runs over every n-th root of unity of the field, in order.
    """
    if p1.n != p2.n:
        return None
    for xi in roots_of_unity(p1.n, p1.fld):
        if p1.y.rescale_variable(xi).agrees(p2.y, upto):
            return xi
    return None


def renormalize(xs: TSeries, ys: TSeries, fld: CyclotomicField) -> PuiseuxParam:
    """Rewrite a parametrization (x(t), y(t)) in the form (tau^n, y(tau)).

    tau = x(t)^(1/n) with the field's root branch for the leading coefficient.
    """
    n = xs.ord()
    if isinstance(n, AtLeast):
        raise TruncationError("x(t) vanishes to the truncation")
    if xs.trunc == INF and len(xs.terms) == 1 and xs.terms[n] == 1:
        return PuiseuxParam(n, ys, fld)
    if xs.trunc == INF:
        raise ValueError("renormalization of an exact non-monomial x(t) needs a truncation")
    return PuiseuxParam(n, reparametrize(xs, ys, n, fld), fld)


def swap_axes(xs: TSeries, ys: TSeries, fld: CyclotomicField) -> PuiseuxParam:
    """Renormalize after exchanging x and y when the branch is tangent to x = 0."""
    ox, oy = xs.valuation(), ys.valuation()
    if oy < ox:
        xs, ys = ys, xs
    return renormalize(xs, ys, fld)
