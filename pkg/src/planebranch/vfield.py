"""Singular plane vector fields, their dual 1-forms, contact orders and jet flows."""
from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .errors import NotNilpotent
from .puiseux import PuiseuxParam, evaluate_on, implicitize, renormalize
from .series import INF, AtLeast, BiPoly, TSeries


@dataclass(frozen=True)
class Invariant:
    """Infinite contact: the branch looks invariant up to ``bound``."""

    bound: float

    def __str__(self):
        return f"Invariant(>={self.bound})"


def _poly(p) -> BiPoly:
    if isinstance(p, BiPoly):
        return p
    return BiPoly(p)


class VectorField:
    """X = A(x,y) d/dx + B(x,y) d/dy."""

    __slots__ = ("A", "B")

    def __init__(self, A, B):
        self.A = _poly(A)
        self.B = _poly(B)

    @classmethod
    def zero(cls) -> VectorField:
        return cls(BiPoly(), BiPoly())

    def __repr__(self):
        return f"VectorField(A={self.A!r}, B={self.B!r})"

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.A == other.A and self.B == other.B

    def __hash__(self):
        return hash((self.A, self.B))

    def agrees(self, other: VectorField, upto=None) -> bool:
        return self.A.agrees(other.A, upto) and self.B.agrees(other.B, upto)

    def __add__(self, other: VectorField) -> VectorField:
        return VectorField(self.A + other.A, self.B + other.B)

    def __sub__(self, other: VectorField) -> VectorField:
        return VectorField(self.A - other.A, self.B - other.B)

    def scale(self, c) -> VectorField:
        return VectorField(self.A.scale(c), self.B.scale(c))

    __rmul__ = scale
    __mul__ = scale

    def truncate(self, D) -> VectorField:
        return VectorField(self.A.truncate(D), self.B.truncate(D))

    def __call__(self, g: BiPoly) -> BiPoly:
        """Derivative X(g) = A g_x + B g_y."""
        out = BiPoly()
        if self.A.terms:
            out = out + self.A * g.dx()
        if self.B.terms:
            out = out + self.B * g.dy()
        if not self.A.terms and not self.B.terms:
            out = BiPoly({}, g.trunc)
        return out

    def linear_part(self):
        A, B = self.A, self.B
        return ((A.coeff(1, 0), A.coeff(0, 1)), (B.coeff(1, 0), B.coeff(0, 1)))

    def is_singular(self) -> bool:
        return not self.A.coeff(0, 0) and not self.B.coeff(0, 0)

    def multiplicity(self):
        oa, ob = self.A.valuation(), self.B.valuation()
        return min(oa, ob)

    def dual_form(self) -> OneForm:
        return OneForm(-self.B, self.A)

    def swap(self) -> VectorField:
        """The same field in the coordinates (y, x)."""
        return VectorField(self.B.swap(), self.A.swap())


class OneForm:
    """omega = P dx + Q dy."""

    __slots__ = ("P", "Q")

    def __init__(self, P, Q):
        self.P = _poly(P)
        self.Q = _poly(Q)

    def __repr__(self):
        return f"OneForm(P={self.P!r}, Q={self.Q!r})"

    def __eq__(self, other):
        if not isinstance(other, OneForm):
            return NotImplemented
        return self.P == other.P and self.Q == other.Q

    def __hash__(self):
        return hash((self.P, self.Q))

    def pullback(self, phi: PuiseuxParam, exact: bool = False) -> TSeries:
        """Coefficient of dt in phi^* omega."""
        y = phi.exact_y() if exact else phi.y
        x = phi.x
        out = TSeries({}, INF)
        if self.P.terms:
            out = out + self.P.compose(x, y) * x.derivative()
        if self.Q.terms:
            out = out + self.Q.compose(x, y) * y.derivative()
        if not self.P.terms and not self.Q.terms:
            out = TSeries({}, INF)
        return out


def upsilon(omega: OneForm, phi: PuiseuxParam, exact: bool = False):
    """ord_t of the pulled back form plus one (AtLeast when it vanishes)."""
    s = omega.pullback(phi, exact)
    o = s.ord()
    if isinstance(o, AtLeast):
        return AtLeast(o.bound + 1)
    return o + 1


def contact_exponent(X: VectorField, phi: PuiseuxParam, exact: bool = False):
    """upsilon of the dual form minus n; Invariant when the pullback vanishes."""
    u = upsilon(X.dual_form(), phi, exact)
    if isinstance(u, AtLeast):
        return Invariant(u.bound - phi.n)
    return u - phi.n


def tangency_order(X: VectorField, phi: PuiseuxParam):
    """(X(f), f) with f the implicit equation of the (polynomial) branch."""
    f = implicitize(phi)
    s = evaluate_on(X(f), phi, exact=True)
    o = s.ord()
    if isinstance(o, AtLeast):
        return Invariant(o.bound)
    return o


def iterated_tangency(X: VectorField, phi: PuiseuxParam, k: int) -> list:
    """[(X^j(f), f) for j = 1..k]; the minimum is the intersection with the deformation."""
    f = implicitize(phi)
    out = []
    g = f
    for _ in range(k):
        g = X(g)
        o = evaluate_on(g, phi, exact=True).ord()
        out.append(Invariant(o.bound) if isinstance(o, AtLeast) else o)
    return out


def is_nilpotent(X: VectorField) -> bool:
    (a, b), (c, d) = X.linear_part()
    return X.is_singular() and not (a + d) and not (a * d - b * c)


def is_prepared(X: VectorField, phi: PuiseuxParam | None = None) -> bool:
    """Linear part has a01 = 0 or b10 = 0 (branch tangent to y = 0)."""
    (_, a01), (b10, _) = X.linear_part()
    return not a01 or not b10


class JetDiffeo:
    """Map (x, y) -> (P, Q) known modulo degree N+1 (N = None: exact)."""

    __slots__ = ("P", "Q", "N")

    def __init__(self, P, Q, N: int | None = None):
        P, Q = _poly(P), _poly(Q)
        if N is not None:
            P, Q = P.truncate(N + 1), Q.truncate(N + 1)
        if P.coeff(0, 0) or Q.coeff(0, 0):
            raise ValueError("jet must fix the origin")
        self.P, self.Q, self.N = P, Q, N

    @classmethod
    def identity(cls, N: int | None = None) -> JetDiffeo:
        return cls(BiPoly.x(), BiPoly.y(), N)

    def __repr__(self):
        return f"JetDiffeo(P={self.P!r}, Q={self.Q!r}, N={self.N})"

    def __eq__(self, other):
        if not isinstance(other, JetDiffeo):
            return NotImplemented
        return self.P == other.P and self.Q == other.Q

    def __hash__(self):
        return hash((self.P, self.Q))

    def agrees(self, other: JetDiffeo, upto=None) -> bool:
        return self.P.agrees(other.P, upto) and self.Q.agrees(other.Q, upto)

    def linear_part(self):
        P, Q = self.P, self.Q
        return ((P.coeff(1, 0), P.coeff(0, 1)), (Q.coeff(1, 0), Q.coeff(0, 1)))

    def is_invertible(self) -> bool:
        (a, b), (c, d) = self.linear_part()
        return bool(a * d - b * c)

    def is_unipotent(self) -> bool:
        (a, b), (c, d) = self.linear_part()
        return a + d == 2 and a * d - b * c == 1

    def pull(self, g: BiPoly) -> BiPoly:
        """g o Phi."""
        return g.compose_bi(self.P, self.Q)

    def compose(self, inner: JetDiffeo) -> JetDiffeo:
        """self o inner."""
        N = _min_n(self.N, inner.N)
        return JetDiffeo(self.P.compose_bi(inner.P, inner.Q),
                         self.Q.compose_bi(inner.P, inner.Q), N)


def _min_n(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _iterate_cap(N: int) -> int:
    return (N + 1) * (N + 2)


def jet_exp(X: VectorField, N: int) -> JetDiffeo:
    """N-jet of the time-one flow of a nilpotent field.

    Sums X^j(x)/j! and X^j(y)/j!; X acts nilpotently on N-jets so the sums stop.
    """
    if not X.is_singular() or not is_nilpotent(X):
        raise NotNilpotent("exp on jets needs a singular nilpotent field")
    Xt = X.truncate(N + 1)
    comps = []
    for g0 in (BiPoly.x(), BiPoly.y()):
        g = g0.truncate(N + 1)
        total = g
        fact = mpq(1)
        for j in range(1, _iterate_cap(N) + 1):
            g = Xt(g).truncate(N + 1)
            if not g.terms:
                break
            fact = fact * j
            total = total + g.scale(1 / fact)
        else:
            raise ArithmeticError("exp series did not terminate on the jet space")
        comps.append(total)
    return JetDiffeo(comps[0], comps[1], N)


def jet_log(Phi: JetDiffeo) -> VectorField:
    """Nilpotent field X with jet_exp(X, N) == Phi (log of Phi^* - Id)."""
    if Phi.N is None:
        raise ValueError("jet_log needs a finite jet order")
    if not Phi.is_unipotent():
        raise NotNilpotent("jet_log needs a unipotent jet")
    N = Phi.N
    comps = []
    for g0 in (BiPoly.x(), BiPoly.y()):
        g = g0.truncate(N + 1)
        total = BiPoly({}, N + 1)
        for k in range(1, _iterate_cap(N) + 1):
            g = (Phi.pull(g) - g).truncate(N + 1)
            if not g.terms:
                break
            total = total + g.scale(mpq((-1) ** (k + 1), k))
        else:
            raise ArithmeticError("log series did not terminate on the jet space")
        comps.append(total)
    return VectorField(comps[0], comps[1])


def apply_diffeo(Phi: JetDiffeo, phi: PuiseuxParam, renorm: bool = True):
    """Image of the branch under Phi, renormalized to (t^n, ...).

    With ``renorm=False`` the raw pair (x(t), y(t)) is returned.
    """
    xs = Phi.P.compose(phi.x, phi.y)
    ys = Phi.Q.compose(phi.x, phi.y)
    if not renorm:
        return xs, ys
    ox, oy = xs.valuation(), ys.valuation()
    if oy < ox:
        raise ValueError("the jet sends the tangent line of the branch to the y-axis")
    K = min(xs.trunc, ys.trunc, phi.trunc)
    return renormalize(xs.truncate(K), ys.truncate(K), phi.fld)


def conjugate_linear(X: VectorField, M) -> VectorField:
    """Push X forward by the linear map w = M v."""
    (a, b), (c, d) = [[mpq(v) if isinstance(v, int) else v for v in row] for row in M]
    det = a * d - b * c
    inv = ((d / det, -b / det), (-c / det, a / det))
    (p, q), (r, s) = inv
    # substitute v = M^{-1} w into the components, then apply M
    P = BiPoly({(1, 0): p, (0, 1): q})
    Q = BiPoly({(1, 0): r, (0, 1): s})
    A = X.A.compose_bi(P, Q) if X.A.terms else BiPoly()
    B = X.B.compose_bi(P, Q) if X.B.terms else BiPoly()
    return VectorField(A.scale(a) + B.scale(b), A.scale(c) + B.scale(d))


def linear_jet(M, N: int | None = None) -> JetDiffeo:
    (a, b), (c, d) = M
    return JetDiffeo(BiPoly({(1, 0): a, (0, 1): b}), BiPoly({(1, 0): c, (0, 1): d}), N)
