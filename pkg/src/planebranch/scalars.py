"""Exact arithmetic in cyclotomic fields Q(zeta_L).

Rational elements are plain :class:`gmpy2.mpq` values in every field (the
fast path); irrational elements are :class:`Scalar` instances holding the
coordinates of a residue modulo the L-th cyclotomic polynomial in the power
basis 1, z, ..., z^(phi-1).  This keeps the representation canonical.

Text encoding (exact round trip)::

    scalar := term (("+" | "-") term)*
    term   := rational ["*" zpow] | zpow
    zpow   := "z" ["^" digits]
    rational := digits ["/" digits]

``z`` stands for zeta_L = exp(2 pi i / L).
"""
from __future__ import annotations

import cmath
import re
from fractions import Fraction
from functools import lru_cache
from math import gcd

import gmpy2
from gmpy2 import mpq

DEFAULT_ORDER = 12

_RATIONAL_TYPES = (int, Fraction, type(mpq(0)), type(gmpy2.mpz(0)))


class NotRepresentable(ArithmeticError):
    """An algebraic number needed by a computation is not in the field."""


class FieldMismatch(ValueError):
    """Operands live in cyclotomic fields of different order."""


def _divisors(L: int) -> list[int]:
    return [d for d in range(1, L + 1) if L % d == 0]


@lru_cache(maxsize=None)
def cyclotomic_polynomial(L: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_L, lowest degree first."""
    if L < 1:
        raise ValueError("cyclotomic order must be positive")
    num = [-1] + [0] * (L - 1) + [1]
    for d in _divisors(L)[:-1]:
        num = _exact_div(num, cyclotomic_polynomial(d))
    return tuple(num)


def _exact_div(num: list[int], den: tuple[int, ...]) -> list[int]:
    # den is monic
    num = list(num)
    dd = len(den) - 1
    out = [0] * (len(num) - dd)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + dd]
        out[k] = c
        if c:
            for i, di in enumerate(den):
                num[k + i] -= c * di
    if any(num[:dd]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def _z_powers(L: int) -> tuple[tuple[int, ...], ...]:
    """Coordinates of z^k, 0 <= k < max(L, 2 phi - 1), reduced mod Phi_L."""
    phi_poly = cyclotomic_polynomial(L)
    phi = len(phi_poly) - 1
    rows = []
    cur = [1] + [0] * (phi - 1)
    for _ in range(max(L, 2 * phi - 1)):
        rows.append(tuple(cur))
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(phi):
                cur[i] -= top * phi_poly[i]
    return tuple(rows)


def _to_mpq(x) -> mpq:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


class Scalar:
    """Element of Q(zeta_L), L >= 2, in canonical reduced form."""

    __slots__ = ("_c", "_L")

    def __init__(self, coeffs, field_order: int = DEFAULT_ORDER):
        if field_order < 2:
            raise ValueError("use mpq for the rational field")
        rows = _z_powers(field_order)
        phi = len(rows[0])
        acc = [mpq(0)] * phi
        for k, c in enumerate(coeffs):
            c = _to_mpq(c)
            if c:
                row = rows[k % field_order]
                for i in range(phi):
                    if row[i]:
                        acc[i] += c * row[i]
        self._c = tuple(acc)
        self._L = field_order

    @classmethod
    def _raw(cls, c: tuple, L: int) -> Scalar:
        obj = object.__new__(cls)
        obj._c = c
        obj._L = L
        return obj

    @property
    def coeffs(self) -> tuple:
        return self._c

    @property
    def field_order(self) -> int:
        return self._L

    def is_rational(self) -> bool:
        return not any(self._c[1:])

    def to_rational(self) -> mpq:
        if not self.is_rational():
            raise NotRepresentable(f"{self} is not rational")
        return self._c[0]

    def _coerce(self, other):
        if isinstance(other, Scalar):
            if other._L != self._L:
                raise FieldMismatch(
                    f"field orders differ: {self._L} vs {other._L}")
            return other._c
        if isinstance(other, _RATIONAL_TYPES):
            return (_to_mpq(other),) + (mpq(0),) * (len(self._c) - 1)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _mk(tuple(a + b for a, b in zip(self._c, o)), self._L)

    __radd__ = __add__

    def __neg__(self):
        return _mk(tuple(-a for a in self._c), self._L)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _mk(tuple(a - b for a, b in zip(self._c, o)), self._L)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _mk(tuple(b - a for a, b in zip(self._c, o)), self._L)

    def __mul__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            q = _to_mpq(other)
            return _mk(tuple(a * q for a in self._c), self._L)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _mk(_mul_coords(self._c, o, self._L), self._L)

    __rmul__ = __mul__

    def inverse(self) -> Scalar:
        if not any(self._c):
            raise ZeroDivisionError("division by zero in Q(zeta)")
        if self.is_rational():
            return 1 / self._c[0]
        return _mk(_inverse_coords(self._c, self._L), self._L)

    def __truediv__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            q = _to_mpq(other)
            if not q:
                raise ZeroDivisionError("division by zero in Q(zeta)")
            return _mk(tuple(a / q for a in self._c), self._L)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * (1 / _mk(o, self._L))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _mk(o, self._L) * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        result = _mk((mpq(1),) + (mpq(0),) * (len(self._c) - 1),
                             self._L)
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __bool__(self):
        return any(self._c)

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except FieldMismatch:
            return False
        if o is None:
            return NotImplemented
        return self._c == o

    def __hash__(self):
        if self.is_rational():
            return hash(self._c[0])
        return hash((self._c, self._L))

    def __repr__(self):
        return f"Scalar({format_scalar(self)!r}, L={self._L})"

    def __str__(self):
        return format_scalar(self)


def _mk(c: tuple, L: int):
    # rationals are always stored as mpq, whatever the field order
    if not any(c[1:]):
        return c[0]
    obj = object.__new__(Scalar)
    obj._c = c
    obj._L = L
    return obj


def _mul_coords(a: tuple, b: tuple, L: int) -> tuple:
    phi = len(a)
    prod = [mpq(0)] * (2 * phi - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    prod[i + j] += ai * bj
    if phi == 1:
        return (prod[0],)
    rows = _z_powers(L)
    out = prod[:phi]
    for k in range(phi, 2 * phi - 1):
        c = prod[k]
        if c:
            row = rows[k]
            for i in range(phi):
                if row[i]:
                    out[i] += c * row[i]
    return tuple(out)


def _inverse_coords(a: tuple, L: int) -> tuple:
    # solve M x = e_0 where column j of M holds a * z^j
    phi = len(a)
    rows = _z_powers(L)
    cols = [_mul_coords(a, rows[j], L) for j in range(phi)]
    m = [[cols[j][i] for j in range(phi)] + [mpq(int(i == 0))]
         for i in range(phi)]
    for col in range(phi):
        piv = next(r for r in range(col, phi) if m[r][col])
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [v * inv for v in m[col]]
        for r in range(phi):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [v - f * w for v, w in zip(m[r], m[col])]
    return tuple(m[i][phi] for i in range(phi))


class CyclotomicField:
    """The field Q(zeta_L) with L fixed; elements are mpq (L=1) or Scalar."""

    def __init__(self, order: int = DEFAULT_ORDER):
        if order < 1:
            raise ValueError("cyclotomic order must be positive")
        self.order = order
        self.degree = len(cyclotomic_polynomial(order)) - 1

    def __repr__(self):
        return f"CyclotomicField({self.order})"

    def __eq__(self, other):
        return isinstance(other, CyclotomicField) and other.order == self.order

    def __hash__(self):
        return hash(("CyclotomicField", self.order))

    def __call__(self, x):
        """Coerce ``x`` (int, rational, string, or element) into the field."""
        if isinstance(x, str):
            return self.parse(x)
        if isinstance(x, Scalar):
            if x.field_order == self.order:
                return x
            if x.is_rational():
                return self(x.to_rational())
            raise FieldMismatch(
                f"cannot move {x} from order {x.field_order} to {self.order}")
        q = _to_mpq(x)
        return q

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def zeta(self, k: int = 1):
        """zeta_L ** k."""
        if self.order == 1:
            return mpq(1)
        row = _z_powers(self.order)[k % self.order]
        return _mk(tuple(mpq(v) for v in row), self.order)

    def is_rational(self, s) -> bool:
        return not isinstance(s, Scalar) or s.is_rational()

    def rational(self, s) -> mpq:
        return s.to_rational() if isinstance(s, Scalar) else mpq(s)

    def root_of_unity_index(self, s) -> int | None:
        """k with s == zeta_L^k, or None; -1 is detected for odd L too."""
        for k in range(self.order):
            if self.zeta(k) == s:
                return k
        return None

    def rotation(self, s) -> Fraction | None:
        """Rational p/q in [0,1) with s == exp(2 pi i p/q), if s is a root of unity."""
        k = self.root_of_unity_index(s)
        if k is not None:
            return Fraction(k, self.order)
        if self.order % 2:
            k = self.root_of_unity_index(-s)
            if k is not None:
                return (Fraction(k, self.order) + Fraction(1, 2)) % 1
        return None

    def nth_root(self, s, n: int):
        """Deterministic n-th root of ``s``.

        Candidates are ``q * zeta_L**k`` with q rational; k runs upward from 0
        and the first k for which ``s * zeta_L**(-k n)`` has a rational n-th
        root wins.  That root is the positive one for even n and the real one
        for odd n.  Raises
        :class:`NotRepresentable` when no candidate works.
        """
        if n < 1:
            raise ValueError("root order must be positive")
        s = self(s)
        if not s:
            return s
        if n == 1:
            return s
        for k in range(self.order):
            w = s * self.zeta(-k * n)
            if not self.is_rational(w):
                continue
            q = _rational_root(self.rational(w), n)
            if q is not None:
                return self(q) * self.zeta(k) if k else self(q)
        raise NotRepresentable(
            f"{format_scalar(s)} has no {n}-th root in Q(zeta_{self.order})")

    def parse(self, text: str):
        return parse_scalar(text, self.order)

    def format(self, s) -> str:
        return format_scalar(self(s))

    def to_complex(self, s) -> complex:
        """Display-only floating point value."""
        s = self(s)
        if not isinstance(s, Scalar):
            return complex(float(s))
        w = cmath.exp(2j * cmath.pi / self.order)
        return sum(float(c) * w ** k for k, c in enumerate(s.coeffs))


@lru_cache(maxsize=None)
def field(order: int = DEFAULT_ORDER) -> CyclotomicField:
    return CyclotomicField(order)


def field_of(s, default: int = 1) -> CyclotomicField:
    if isinstance(s, Scalar):
        return field(s.field_order)
    return field(default)


def root_of_unity(k: int, L: int, field_order: int | None = None):
    """zeta_L ** k inside Q(zeta_F), F = field_order (defaults to L)."""
    F = L if field_order is None else field_order
    if F % L:
        raise FieldMismatch(f"{L} does not divide the field order {F}")
    return field(F).zeta(k * (F // L))


def nth_root(s, n: int, field_order: int | None = None):
    F = field_order if field_order is not None else field_of(s).order
    return field(F).nth_root(s, n)


def _rational_root(q: mpq, n: int) -> mpq | None:
    if q < 0:
        if n % 2 == 0:
            return None
        r = _rational_root(-q, n)
        return None if r is None else -r
    num, ok1 = gmpy2.iroot(q.numerator, n)
    den, ok2 = gmpy2.iroot(q.denominator, n)
    if ok1 and ok2:
        return mpq(num, den)
    return None


def format_rational(q) -> str:
    q = _to_mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_scalar(s) -> str:
    if not isinstance(s, Scalar):
        return format_rational(s)
    parts = []
    for k, c in enumerate(s.coeffs):
        if not c:
            continue
        if k == 0:
            body = format_rational(abs(c))
        else:
            zp = "z" if k == 1 else f"z^{k}"
            body = zp if abs(c) == 1 else f"{format_rational(abs(c))}*{zp}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += sign + body
    return out


_TERM = re.compile(
    r"\s*([+-])?\s*(?:(\d+)(?:\s*/\s*(\d+))?)?\s*(\*)?\s*(z(?:\s*\^\s*(\d+))?)?\s*")


def parse_scalar(text: str, field_order: int = DEFAULT_ORDER):
    """Inverse of :func:`format_scalar` (also accepts whitespace)."""
    F = field(field_order)
    text = text.strip()
    if not text:
        raise ValueError("empty scalar")
    total = F(0)
    pos = 0
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        sign, num, den, star, zpart, zexp = m.groups()
        if m.end() == pos or (num is None and zpart is None):
            raise ValueError(f"cannot parse scalar {text!r} at {pos}")
        if sign is None and not first:
            raise ValueError(f"missing operator in {text!r} at {pos}")
        if star and (num is None or zpart is None):
            raise ValueError(f"dangling '*' in {text!r}")
        if den is not None and int(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        coef = mpq(int(num), int(den) if den else 1) if num else mpq(1)
        if sign == "-":
            coef = -coef
        if zpart:
            k = int(zexp) if zexp else 1
            total = total + F(coef) * F.zeta(k)
        else:
            total = total + F(coef)
        pos = m.end()
        first = False
    return total


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)
