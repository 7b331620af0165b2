"""Truncated series in t, truncated polynomials in (x, y), and polynomials in eps.

Coefficients may be any exact ring element supporting ``+ - *`` and ``bool``:
rationals (:class:`gmpy2.mpq`), :class:`~planebranch.scalars.Scalar`, or
:class:`EpsPoly`.  A truncation ``K`` means every exponent ``>= K`` is unknown;
``math.inf`` marks an exact (polynomial) object.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

from gmpy2 import mpq

from .scalars import CyclotomicField, Scalar, field, field_of

INF = math.inf


@dataclass(frozen=True)
class AtLeast:
    """Order not attained below ``bound`` (the truncation was reached)."""

    bound: float

    def __str__(self):
        return f"AtLeast({self.bound})"


def is_finite(v) -> bool:
    return not isinstance(v, AtLeast)


def lower_bound(v) -> float:
    return v.bound if isinstance(v, AtLeast) else v


def _scalar_field(c, default: CyclotomicField | None = None) -> CyclotomicField:
    if isinstance(c, EpsPoly):
        c = c.constant()
    if isinstance(c, Scalar):
        return field(c.field_order)
    return default or field(1)


def coef_nth_root(c, n: int, fld: CyclotomicField | None = None):
    """n-th root of a coefficient with the deterministic branch of ``fld``."""
    if isinstance(c, EpsPoly):
        return c.nth_root(n, fld)
    return (fld or _scalar_field(c)).nth_root(c, n)


def _mul_terms(a: dict, b: dict, T) -> dict:
    out: dict = {}
    if len(a) > len(b):
        a, b = b, a
    bi = sorted(b.items())
    for ea, ca in a.items():
        for eb, cb in bi:
            e = ea + eb
            if e >= T:
                break
            if e in out:
                out[e] = out[e] + ca * cb
            else:
                out[e] = ca * cb
    return {e: c for e, c in out.items() if c}


def _clean(terms: dict, T) -> dict:
    return {e: (mpq(c) if isinstance(c, int) else c)
            for e, c in terms.items() if c and e < T}


class TSeries:
    """Sparse truncated power series ``sum c_e t^e + O(t^trunc)``."""

    __slots__ = ("terms", "trunc")

    def __init__(self, terms=None, trunc=INF):
        if terms is None:
            terms = {}
        elif not isinstance(terms, dict):
            terms = dict(terms)
        if trunc != INF:
            trunc = int(trunc)
        for e in terms:
            if e < 0:
                raise ValueError("negative exponent in TSeries")
        self.terms = _clean(terms, trunc)
        self.trunc = trunc

    @classmethod
    def _raw(cls, terms: dict, trunc) -> TSeries:
        obj = object.__new__(cls)
        obj.terms = terms
        obj.trunc = trunc
        return obj

    @classmethod
    def monomial(cls, e: int, c=1, trunc=INF) -> TSeries:
        return cls({e: mpq(c) if isinstance(c, int) else c}, trunc)

    # -- inspection --------------------------------------------------------
    def ord(self):
        if self.terms:
            return min(self.terms)
        return AtLeast(self.trunc)

    def valuation(self) -> float:
        """Lower bound for the order (ord, or the truncation if all vanish)."""
        return min(self.terms) if self.terms else self.trunc

    def leading(self):
        return self.terms[min(self.terms)]

    def coeff(self, e: int):
        if e >= self.trunc:
            raise ValueError(f"coefficient t^{e} beyond truncation {self.trunc}")
        return self.terms.get(e, 0)

    def exponents(self) -> list[int]:
        return sorted(self.terms)

    def items(self):
        return sorted(self.terms.items())

    def is_zero(self) -> bool:
        return not self.terms

    def is_exact(self) -> bool:
        return self.trunc == INF

    def degree(self) -> int:
        return max(self.terms) if self.terms else -1

    def __repr__(self):
        body = " + ".join(f"({c})*t^{e}" for e, c in self.items()) or "0"
        if self.trunc != INF:
            body += f" + O(t^{self.trunc})"
        return f"TSeries({body})"

    def __eq__(self, other):
        if not isinstance(other, TSeries):
            return NotImplemented
        return self.trunc == other.trunc and self.terms == other.terms

    def __hash__(self):
        return hash((frozenset(self.terms.items()), self.trunc))

    def agrees(self, other: TSeries, upto=None) -> bool:
        """Equal below the common truncation (and ``upto`` if given)."""
        T = min(self.trunc, other.trunc)
        if upto is not None:
            T = min(T, upto)
        keys = set(self.terms) | set(other.terms)
        return all(self.terms.get(e, 0) == other.terms.get(e, 0)
                   for e in keys if e < T)

    # -- ring operations ---------------------------------------------------
    def truncate(self, K) -> TSeries:
        K = min(K, self.trunc)
        return TSeries._raw({e: c for e, c in self.terms.items() if e < K}, K)

    def with_trunc(self, K) -> TSeries:
        return self.truncate(K)

    def __add__(self, other):
        if not isinstance(other, TSeries):
            other = TSeries({0: other}) if other else TSeries()
        T = min(self.trunc, other.trunc)
        out = {e: c for e, c in self.terms.items() if e < T}
        for e, c in other.terms.items():
            if e < T:
                out[e] = out[e] + c if e in out else c
        return TSeries._raw({e: c for e, c in out.items() if c}, T)

    __radd__ = __add__

    def __neg__(self):
        return TSeries._raw({e: -c for e, c in self.terms.items()}, self.trunc)

    def __sub__(self, other):
        if not isinstance(other, TSeries):
            other = TSeries({0: other}) if other else TSeries()
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> TSeries:
        if not c:
            return TSeries._raw({}, self.trunc)
        return TSeries._raw(
            {e: v for e, v in ((e, a * c) for e, a in self.terms.items()) if v},
            self.trunc)

    def __mul__(self, other):
        if not isinstance(other, TSeries):
            return self.scale(other)
        T = min(self.trunc + other.valuation(), other.trunc + self.valuation())
        return TSeries._raw(_mul_terms(self.terms, other.terms, T), T)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if k < 0:
            return self.reciprocal() ** (-k)
        result = TSeries({0: mpq(1)})
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift(self, k: int) -> TSeries:
        """Multiply by t^k; negative k divides (requires valuation >= -k)."""
        if k < 0 and self.valuation() < -k:
            raise ValueError(f"cannot divide by t^{-k}: order too small")
        return TSeries._raw({e + k: c for e, c in self.terms.items()},
                            self.trunc + k)

    def derivative(self) -> TSeries:
        return TSeries._raw({e - 1: c * e for e, c in self.terms.items() if e},
                            self.trunc - 1)

    def map_coeffs(self, f: Callable) -> TSeries:
        return TSeries({e: f(c) for e, c in self.terms.items()}, self.trunc)

    def rescale_variable(self, c) -> TSeries:
        """Substitute t -> c t."""
        out = {}
        for e, a in sorted(self.terms.items()):
            out[e] = a * (c ** e) if e else a
        return TSeries(out, self.trunc)

    def reciprocal(self) -> TSeries:
        """1/s for a series with nonzero constant term."""
        c0 = self.terms.get(0)
        if not c0:
            raise ZeroDivisionError("series has no constant term")
        K = self.trunc
        if K == INF:
            raise ValueError("reciprocal of an exact series needs a truncation")
        inv0 = 1 / c0
        w = [inv0]
        items = [(e, c) for e, c in self.terms.items() if e]
        for k in range(1, K):
            acc = 0
            for e, c in items:
                if e <= k and w[k - e]:
                    acc = acc + c * w[k - e]
            w.append(-(acc * inv0) if acc else 0)
        return TSeries({k: c for k, c in enumerate(w)}, K)

    # -- composition -------------------------------------------------------
    def compose(self, inner: TSeries) -> TSeries:
        """Substitute ``t -> inner(t)``; inner must have positive order."""
        if inner.terms and min(inner.terms) < 1:
            raise ValueError("inner series must have order >= 1")
        v = inner.valuation()
        T = self.trunc * v if self.trunc != INF else INF
        for e in self.terms:
            if e >= 1:
                T = min(T, inner.trunc + (e - 1) * v if e > 1 else inner.trunc)
        out: dict = {}
        if 0 in self.terms:
            out[0] = self.terms[0]
        if not inner.terms:
            return TSeries(out, T)
        power = {0: mpq(1)}
        exps = sorted(e for e in self.terms if e >= 1)
        cur = 0
        for e in exps:
            if e * v >= T:
                break
            while cur < e:
                power = _mul_terms(power, inner.terms, T)
                cur += 1
            c = self.terms[e]
            for k, pc in power.items():
                out[k] = out[k] + c * pc if k in out else c * pc
        return TSeries(out, T)

    def __call__(self, inner: TSeries) -> TSeries:
        return self.compose(inner)

    def nth_root_series(self, n: int, fld: CyclotomicField | None = None) -> TSeries:
        """r with r**n == self; leading coefficient via the field's root branch."""
        return nth_root_series(self, n, fld)

    def invert_param(self) -> TSeries:
        return invert_param(self)


def nth_root_series(a: TSeries, n: int, fld: CyclotomicField | None = None) -> TSeries:
    """Solve ``r**n = a`` with the deterministic leading-coefficient branch."""
    if n < 1:
        raise ValueError("root order must be positive")
    if not a.terms:
        raise ValueError("root of a series with unknown order")
    o = min(a.terms)
    if o % n:
        raise ValueError(f"order {o} not divisible by {n}")
    c = a.terms[o]
    lead = coef_nth_root(c, n, fld)
    if n == 1:
        return a
    if a.trunc == INF:
        if len(a.terms) == 1:
            return TSeries({o // n: lead})
        raise ValueError("root of an exact non-monomial series needs a truncation")
    M = a.trunc - o  # h = a / (c t^o) known mod t^M
    inv_c = 1 / c
    h = {e - o: v * inv_c for e, v in a.terms.items() if e - o}
    alpha = mpq(1, n)
    w = [mpq(1)]
    hs = sorted(h.items())
    for k in range(1, M):
        acc = 0
        for j, hj in hs:
            if j > k:
                break
            wk = w[k - j]
            if wk:
                acc = acc + hj * wk * ((alpha + 1) * j - k)
        w.append(acc * mpq(1, k) if acc else 0)
    k0 = o // n
    return TSeries({k0 + k: wk * lead for k, wk in enumerate(w) if wk},
                   k0 + M)


def invert_param(s: TSeries) -> TSeries:
    """Compositional inverse of a series of order exactly 1 (Lagrange inversion)."""
    if not s.terms or min(s.terms) != 1:
        raise ValueError("invert_param needs a series of order 1")
    if s.trunc == INF:
        if len(s.terms) == 1:
            return TSeries({1: 1 / s.terms[1]})
        raise ValueError("inverse of an exact nonlinear series needs a truncation")
    K = s.trunc
    q = s.shift(-1)  # s/t, unit, known mod t^(K-1)
    h = q.reciprocal()
    out = {}
    p = TSeries({0: mpq(1)}, K - 1)
    for k in range(1, K):
        p = p * h
        c = p.terms.get(k - 1)
        if c:
            out[k] = c * mpq(1, k)
    return TSeries(out, K)


def _power_prefix(v: list, alpha, M: int) -> list:
    """First M coefficients of V^alpha for a dense V with V[0] == 1 (Miller)."""
    w = [mpq(1)]
    nz = [(i, vi) for i, vi in enumerate(v) if i and vi]
    ap1 = alpha + 1
    for j in range(1, M):
        acc = 0
        for i, vi in nz:
            if i > j:
                break
            wj = w[j - i]
            if wj:
                acc = acc + vi * wj * (ap1 * i - j)
        w.append(acc * mpq(1, j) if acc else 0)
    return w


def reparametrize(xs: TSeries, ys: TSeries, n: int,
                  fld: CyclotomicField | None = None) -> TSeries:
    """y as a series in tau where tau^n = x(t), tau = t (c + ...)^(1/n).

    Equal to ``ys.compose(invert_param(nth_root_series(xs, n)))`` with the
    same root branch, computed by Lagrange-Buermann:
    [tau^k] y = (1/k) [t^(k-1)] y'(t) r^(-k) V(t)^(-k/n), x = c t^n V, r^n = c.
    """
    if not xs.terms or min(xs.terms) != n:
        raise ValueError(f"x(t) must have order {n}")
    c = xs.terms[n]
    r = coef_nth_root(c, n, fld)
    if n == 1 and xs.trunc == INF and len(xs.terms) == 1:
        return ys.rescale_variable(1 / r) if r != 1 else ys
    oy = min((e for e in ys.terms if e), default=ys.trunc)
    T = min(ys.trunc, xs.trunc - n + oy)
    if T == INF:
        raise ValueError("reparametrization of exact series needs a truncation")
    T = int(T)
    inv_c = 1 / c
    v = [0] * T
    for e, a in xs.terms.items():
        if e - n < T:
            v[e - n] = a * inv_c
    dy = [0] * T
    for e, a in ys.terms.items():
        if 1 <= e <= T:
            dy[e - 1] = a * e
    rinv = 1 / r
    rk = mpq(1)
    out = {}
    for k in range(1, T):
        rk = rinv * rk
        M = k - oy + 1  # dy vanishes below t^(oy-1)
        if M <= 0:
            continue
        w = _power_prefix(v, mpq(-k, n), M)
        acc = 0
        for i in range(M):
            if dy[k - 1 - i] and w[i]:
                acc = acc + dy[k - 1 - i] * w[i]
        if acc:
            out[k] = acc * rk * mpq(1, k)
    if ys.terms.get(0):
        out[0] = ys.terms[0]
    return TSeries(out, T)


class BiPoly:
    """Sparse truncated polynomial in (x, y); ``trunc`` bounds the total degree."""

    __slots__ = ("terms", "trunc")

    def __init__(self, terms=None, trunc=INF):
        if terms is None:
            terms = {}
        elif not isinstance(terms, dict):
            terms = {(i, j): c for i, j, c in terms}
        if trunc != INF:
            trunc = int(trunc)
        out = {}
        for (i, j), c in terms.items():
            if i < 0 or j < 0:
                raise ValueError("negative exponent in BiPoly")
            if isinstance(c, int):
                c = mpq(c)
            if c and i + j < trunc:
                out[(i, j)] = c
        self.terms = out
        self.trunc = trunc

    @classmethod
    def _raw(cls, terms, trunc) -> BiPoly:
        obj = object.__new__(cls)
        obj.terms = terms
        obj.trunc = trunc
        return obj

    @classmethod
    def x(cls) -> BiPoly:
        return cls({(1, 0): mpq(1)})

    @classmethod
    def y(cls) -> BiPoly:
        return cls({(0, 1): mpq(1)})

    @classmethod
    def const(cls, c) -> BiPoly:
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, i: int, j: int, c=1) -> BiPoly:
        return cls({(i, j): c})

    def __repr__(self):
        body = " + ".join(f"({c})*x^{i}*y^{j}" for (i, j), c in self.items()) or "0"
        if self.trunc != INF:
            body += f" + O({self.trunc})"
        return f"BiPoly({body})"

    def items(self):
        return sorted(self.terms.items())

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self.trunc == other.trunc and self.terms == other.terms

    def __hash__(self):
        return hash((frozenset(self.terms.items()), self.trunc))

    def agrees(self, other: BiPoly, upto=None) -> bool:
        T = min(self.trunc, other.trunc)
        if upto is not None:
            T = min(T, upto)
        keys = set(self.terms) | set(other.terms)
        return all(self.terms.get(k, 0) == other.terms.get(k, 0)
                   for k in keys if sum(k) < T)

    def coeff(self, i: int, j: int):
        return self.terms.get((i, j), 0)

    def ord(self):
        if self.terms:
            return min(i + j for i, j in self.terms)
        return AtLeast(self.trunc)

    def valuation(self):
        return min(i + j for i, j in self.terms) if self.terms else self.trunc

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((i + j for i, j in self.terms), default=-1)

    def homogeneous(self, d: int) -> dict:
        return {k: c for k, c in self.terms.items() if sum(k) == d}

    def truncate(self, D) -> BiPoly:
        D = min(D, self.trunc)
        return BiPoly._raw({k: c for k, c in self.terms.items() if sum(k) < D}, D)

    def __add__(self, other):
        if not isinstance(other, BiPoly):
            other = BiPoly.const(other)
        T = min(self.trunc, other.trunc)
        out = {k: c for k, c in self.terms.items() if sum(k) < T}
        for k, c in other.terms.items():
            if sum(k) < T:
                out[k] = out[k] + c if k in out else c
        return BiPoly._raw({k: c for k, c in out.items() if c}, T)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly._raw({k: -c for k, c in self.terms.items()}, self.trunc)

    def __sub__(self, other):
        if not isinstance(other, BiPoly):
            other = BiPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> BiPoly:
        if not c:
            return BiPoly._raw({}, self.trunc)
        return BiPoly._raw(
            {k: v for k, v in ((k, a * c) for k, a in self.terms.items()) if v},
            self.trunc)

    def __mul__(self, other):
        if not isinstance(other, BiPoly):
            return self.scale(other)
        T = min(self.trunc + other.valuation(), other.trunc + self.valuation())
        out: dict = {}
        for (i, j), a in self.terms.items():
            for (k, l), b in other.terms.items():
                if i + j + k + l >= T:
                    continue
                key = (i + k, j + l)
                out[key] = out[key] + a * b if key in out else a * b
        return BiPoly._raw({k: c for k, c in out.items() if c}, T)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        result = BiPoly.const(mpq(1))
        for _ in range(k):
            result = result * self
        return result

    def dx(self) -> BiPoly:
        return BiPoly._raw({(i - 1, j): c * i for (i, j), c in self.terms.items() if i},
                           self.trunc - 1)

    def dy(self) -> BiPoly:
        return BiPoly._raw({(i, j - 1): c * j for (i, j), c in self.terms.items() if j},
                           self.trunc - 1)

    def map_coeffs(self, f: Callable) -> BiPoly:
        return BiPoly({k: f(c) for k, c in self.terms.items()}, self.trunc)

    def swap(self) -> BiPoly:
        return BiPoly._raw({(j, i): c for (i, j), c in self.terms.items()}, self.trunc)

    def substitute_monomial(self, xmap: tuple[int, int], ymap: tuple[int, int],
                            scale_x=None, scale_y=None) -> BiPoly:
        """Exact substitution x -> x^a y^b, y -> x^c y^d (with optional scalars)."""
        if self.trunc != INF:
            raise ValueError("monomial substitution requires an exact polynomial")
        (a, b), (c, d) = xmap, ymap
        out: dict = {}
        for (i, j), v in self.terms.items():
            if scale_x is not None and i:
                v = v * scale_x ** i
            if scale_y is not None and j:
                v = v * scale_y ** j
            key = (a * i + c * j, b * i + d * j)
            out[key] = out[key] + v if key in out else v
        return BiPoly._raw({k: v for k, v in out.items() if v}, INF)

    def translate_y(self, a) -> BiPoly:
        """Exact substitution y -> y + a."""
        if self.trunc != INF:
            raise ValueError("translation requires an exact polynomial")
        if not a:
            return self
        out: dict = {}
        for (i, j), v in self.terms.items():
            binom = 1
            apow = [mpq(1)]
            for _ in range(j):
                apow.append(apow[-1] * a)
            for k in range(j + 1):
                # C(j,k) y^k a^(j-k)
                key = (i, k)
                w = v * apow[j - k] * binom
                out[key] = out[key] + w if key in out else w
                binom = binom * (j - k) // (k + 1)
        return BiPoly._raw({k: v for k, v in out.items() if v}, INF)

    def compose(self, xs: TSeries, ys: TSeries) -> TSeries:
        """Substitute the pair (x(t), y(t)), both of positive order."""
        for s in (xs, ys):
            if s.terms and min(s.terms) < 1:
                raise ValueError("substituted series must have order >= 1")
        vx, vy = xs.valuation(), ys.valuation()
        T = self.trunc * min(vx, vy) if self.trunc != INF else INF
        for (i, j) in self.terms:
            if i:
                T = min(T, xs.trunc + (i - 1) * vx + j * vy)
            if j:
                T = min(T, ys.trunc + i * vx + (j - 1) * vy)
        xp = _PowerCache(xs.terms, T)
        yp = _PowerCache(ys.terms, T)
        out: dict = {}
        for (i, j), c in self.terms.items():
            if i * vx + j * vy >= T:
                continue
            px = xp.get(i)
            py = yp.get(j)
            prod = _mul_terms(px, py, T) if (i and j) else (px if j == 0 else py)
            for e, v in prod.items():
                w = c * v
                out[e] = out[e] + w if e in out else w
        return TSeries(out, T)

    def compose_bi(self, P: BiPoly, Q: BiPoly) -> BiPoly:
        """Substitute x -> P(x,y), y -> Q(x,y) (both without constant term)."""
        vP, vQ = P.valuation(), Q.valuation()
        if vP < 1 or vQ < 1:
            raise ValueError("substituted polynomials must vanish at the origin")
        T = self.trunc * min(vP, vQ) if self.trunc != INF else INF
        for (i, j) in self.terms:
            if i:
                T = min(T, P.trunc + (i - 1) * vP + j * vQ)
            if j:
                T = min(T, Q.trunc + i * vP + (j - 1) * vQ)
        pp = [BiPoly.const(mpq(1))]
        qp = [BiPoly.const(mpq(1))]
        out = BiPoly._raw({}, T)
        for (i, j), c in sorted(self.terms.items()):
            if i * vP + j * vQ >= T:
                continue
            while len(pp) <= i:
                pp.append((pp[-1] * P).truncate(T))
            while len(qp) <= j:
                qp.append((qp[-1] * Q).truncate(T))
            out = out + (pp[i] * qp[j]).truncate(T).scale(c)
        return out.truncate(T)


class _PowerCache:
    def __init__(self, base: dict, T):
        self.base = base
        self.T = T
        self.powers = [{0: mpq(1)}]

    def get(self, k: int) -> dict:
        while len(self.powers) <= k:
            self.powers.append(_mul_terms(self.powers[-1], self.base, self.T))
        return self.powers[k]


class EpsPoly:
    """Element of R[eps]/(eps^(D+1)) with R the scalar field; ``coeffs[k]`` is eps^k."""

    __slots__ = ("coeffs", "D")

    def __init__(self, coeffs: Iterable, D: int):
        cs = [mpq(c) if isinstance(c, int) else c for c in list(coeffs)[: D + 1]]
        cs += [0] * (D + 1 - len(cs))
        self.coeffs = tuple(cs)
        self.D = D

    @classmethod
    def _raw(cls, coeffs: tuple, D: int) -> EpsPoly:
        obj = object.__new__(cls)
        obj.coeffs = coeffs
        obj.D = D
        return obj

    @classmethod
    def const(cls, c, D: int) -> EpsPoly:
        return cls([c], D)

    @classmethod
    def eps(cls, D: int) -> EpsPoly:
        return cls([0, mpq(1)], D)

    def constant(self):
        return self.coeffs[0]

    def degree(self) -> int:
        for k in range(self.D, -1, -1):
            if self.coeffs[k]:
                return k
        return -1

    def is_constant(self) -> bool:
        return not any(self.coeffs[1:])

    def __bool__(self):
        return any(bool(c) for c in self.coeffs)

    def __repr__(self):
        return f"EpsPoly({[str(c) for c in self.coeffs]}, D={self.D})"

    def _lift(self, other):
        if isinstance(other, EpsPoly):
            return other
        if isinstance(other, (TSeries, BiPoly)):
            return None
        if isinstance(other, int):
            other = mpq(other)
        return EpsPoly._raw((other,) + (0,) * self.D, self.D)

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        D = min(self.D, o.D)
        return EpsPoly._raw(tuple(a + b for a, b in zip(self.coeffs[: D + 1],
                                                        o.coeffs[: D + 1])), D)

    __radd__ = __add__

    def __neg__(self):
        return EpsPoly._raw(tuple(-a for a in self.coeffs), self.D)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, EpsPoly):
            if isinstance(other, (TSeries, BiPoly)):
                return NotImplemented
            return EpsPoly._raw(tuple(a * other if a else 0 for a in self.coeffs),
                                self.D)
        D = min(self.D, other.D)
        out = [0] * (D + 1)
        for i in range(D + 1):
            a = self.coeffs[i]
            if not a:
                continue
            for j in range(D + 1 - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] = out[i + j] + a * b
        return EpsPoly._raw(tuple(out), D)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = EpsPoly.const(mpq(1), self.D)
        for _ in range(k):
            result = result * self
        return result

    def inverse(self) -> EpsPoly:
        c0 = self.coeffs[0]
        if not c0:
            raise ZeroDivisionError("eps-polynomial with zero constant term")
        inv0 = 1 / c0
        w = [inv0]
        for k in range(1, self.D + 1):
            acc = 0
            for j in range(1, k + 1):
                if self.coeffs[j] and w[k - j]:
                    acc = acc + self.coeffs[j] * w[k - j]
            w.append(-(acc * inv0) if acc else 0)
        return EpsPoly._raw(tuple(w), self.D)

    def __truediv__(self, other):
        if isinstance(other, EpsPoly):
            return self * other.inverse()
        return self * (1 / other)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def nth_root(self, n: int, fld: CyclotomicField | None = None) -> EpsPoly:
        c0 = self.coeffs[0]
        if not c0:
            raise ValueError("root of an eps-polynomial with zero constant term")
        lead = (fld or _scalar_field(c0)).nth_root(c0, n)
        inv0 = 1 / c0
        h = [c * inv0 if c else 0 for c in self.coeffs]
        alpha = mpq(1, n)
        w = [mpq(1)]
        for k in range(1, self.D + 1):
            acc = 0
            for j in range(1, k + 1):
                if h[j] and w[k - j]:
                    acc = acc + h[j] * w[k - j] * ((alpha + 1) * j - k)
            w.append(acc * mpq(1, k) if acc else 0)
        return EpsPoly._raw(tuple(c * lead if c else 0 for c in w), self.D)

    def __eq__(self, other):
        o = self._lift(other) if not isinstance(other, EpsPoly) else other
        if o is None:
            return NotImplemented
        D = min(self.D, o.D)
        return all(a == b for a, b in zip(self.coeffs[: D + 1], o.coeffs[: D + 1]))

    def __hash__(self):
        return hash(self.coeffs)


def eval_eps_zero(s: TSeries) -> TSeries:
    """Set eps = 0 in a series with EpsPoly coefficients."""
    return TSeries({e: c.constant() if isinstance(c, EpsPoly) else c
                    for e, c in s.terms.items()}, s.trunc)


__all__ = [
    "AtLeast", "BiPoly", "EpsPoly", "INF", "TSeries", "coef_nth_root",
    "eval_eps_zero", "field_of", "invert_param", "reparametrize", "is_finite", "lower_bound",
    "nth_root_series",
]
