"""Flow deformations, contact-exponent sets, Zariski's lambda and normal forms."""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field as dc_field

from gmpy2 import mpq

from .errors import CrossCheckError, NotNilpotent, NotRepresentable, TruncationError
from .puiseux import (HeadFlow, PuiseuxParam, branch_equal, prepare, roots_of_unity,
                      semigroup)
from .scalars import lcm
from .series import AtLeast, BiPoly, EpsPoly, TSeries, reparametrize
from .vfield import (Invariant, OneForm, VectorField, apply_diffeo,
                     contact_exponent, is_nilpotent, jet_exp, upsilon)

DEFAULT_EPS_DEGREE = 4
EPS_DEGREE_CAP = 32


class AffinityError(AssertionError):
    """The flow coefficient a_j(eps) of a nilpotent witness is not affine."""


class NoWitness(RuntimeError):
    """No nilpotent field with the requested contact exponent was found."""


@dataclass
class DeformedParam:
    """(t^n, sum a_i(eps) t^i) with a_i in Q(zeta)[eps]/(eps^(D+1))."""

    n: int
    coeffs: dict
    trunc: int
    D: int

    def coeff(self, i: int) -> EpsPoly:
        if i >= self.trunc:
            raise ValueError(f"t^{i} beyond truncation {self.trunc}")
        c = self.coeffs.get(i)
        return c if c is not None else EpsPoly([], self.D)

    def at_zero(self) -> dict:
        return {i: c.constant() for i, c in self.coeffs.items() if c.constant()}

    def first_nonconstant(self) -> int | None:
        for i in sorted(self.coeffs):
            if not self.coeffs[i].is_constant():
                return i
        return None


def _flow_series(X: VectorField, g0: BiPoly, phi: PuiseuxParam, D: int, deg: int) -> list:
    """[X^j(g0)(phi(t)) for j = 0..D], the X^j truncated at total degree ``deg``."""
    out = []
    g = g0.truncate(deg)
    Xt = X.truncate(deg)
    for j in range(D + 1):
        out.append(g.compose(phi.x, phi.y) if g.terms else TSeries({}, phi.trunc))
        if j < D:
            g = Xt(g).truncate(deg)
    return out


def _eps_combine(parts: list, D: int, K: int) -> TSeries:
    """sum_j eps^j/j! parts[j] as a series with EpsPoly coefficients."""
    fact = [mpq(1)]
    for j in range(1, D + 1):
        fact.append(fact[-1] * j)
    exps = set()
    T = K
    for s in parts:
        exps |= set(s.terms)
        T = min(T, s.trunc)
    terms = {}
    for e in exps:
        if e >= T:
            continue
        cs = [s.terms.get(e, 0) / fact[j] if s.terms.get(e) else 0
              for j, s in enumerate(parts)]
        terms[e] = EpsPoly(cs, D)
    return TSeries(terms, T)


def deform(phi: PuiseuxParam, X: VectorField, D: int = DEFAULT_EPS_DEGREE,
           trunc: int | None = None) -> DeformedParam:
    """Puiseux data of exp(eps X)(Gamma) as polynomials in a formal eps.

    The flow is applied to both coordinates as a Taylor series in eps and the
    first coordinate is renormalized to t^n over the ring of eps-polynomials.
    Because eps is formal, the leading coefficient of x(t) is always a unit
    and no preparation of X is needed.
    """
    if not X.is_singular():
        raise ValueError("deformation needs a singular field")
    K = phi.trunc if trunc is None else min(trunc, phi.trunc)
    phi = phi.truncate(K)
    n = phi.n
    deg = -(-K // n) + 1
    xs = _eps_combine(_flow_series(X, BiPoly.x(), phi, D, deg), D, K)
    ys = _eps_combine(_flow_series(X, BiPoly.y(), phi, D, deg), D, K)
    lead = xs.terms.get(n)
    if lead is None or min(xs.terms) != n:
        raise TruncationError("deformed x(t) lost its order")
    y = reparametrize(xs, ys, n, phi.fld)
    T = min(y.trunc, K)
    coeffs = {e: c for e, c in y.terms.items() if e < T}
    return DeformedParam(n, coeffs, T, D)


def contact_exponent_deformation(phi: PuiseuxParam, X: VectorField,
                                 D: int = DEFAULT_EPS_DEGREE, cap: int = EPS_DEGREE_CAP):
    """Least exponent whose coefficient moves under the flow; Invariant if none.

    The t-truncation grows until a moving coefficient shows up.  Then the
    eps-degree is doubled, looking only below the current answer, until the
    answer is stable (a larger eps-degree can only lower it).
    """
    K = phi.trunc
    T = min(K, 2 * phi.n + 2)
    while True:
        j = deform(phi, X, D, trunc=T).first_nonconstant()
        if j is not None or T >= K:
            break
        T = min(K, 2 * T)
    if j is None:
        while D < cap:
            D = min(2 * D, cap)
            j = deform(phi, X, D, trunc=K).first_nonconstant()
            if j is not None:
                break
        if j is None:
            return Invariant(K)
    while D < cap:
        D = min(2 * D, cap)
        lower = deform(phi, X, D, trunc=max(j, phi.n + 1)).first_nonconstant()
        if lower is None or lower >= j:
            return j
        j = lower
    return j


def lambda_invariant(phi: PuiseuxParam):
    """upsilon(m y dx - n x dy) - n on a prepared branch; None for lambda = infinity."""
    if not phi.is_prepared():
        raise ValueError("lambda_invariant needs a prepared parametrization")
    n, m = phi.n, phi.y.ord()
    omega = OneForm(BiPoly({(0, 1): mpq(m)}), BiPoly({(1, 0): mpq(-n)}))
    u = upsilon(omega, phi)
    if isinstance(u, AtLeast):
        return None
    return u - n


# -- value sets of differential forms ------------------------------------------

@dataclass
class _Row:
    vec: dict
    comb: dict


def _monomial_forms(phi: PuiseuxParam, V: int, nilpotent_only: bool):
    """(kind, a, b) for x^a y^b dx / dy with a+b >= 1 and leading value < V."""
    n = phi.n
    my = phi.y.valuation()
    out = []
    for kind in ("dx", "dy"):
        for b in range(0, V):
            for a in range(0, V):
                if a + b < 1:
                    continue
                if nilpotent_only and kind == "dy" and (a, b) == (1, 0):
                    continue
                lead = n * a + my * b + (n if kind == "dx" else my)
                if lead > V:
                    break
                out.append((kind, a, b))
            if my * b > V:
                break
    return out


def _form_of(kind: str, a: int, b: int) -> OneForm:
    mono = BiPoly({(a, b): mpq(1)})
    return OneForm(mono, BiPoly()) if kind == "dx" else OneForm(BiPoly(), mono)


def _field_from_comb(comb: dict) -> VectorField:
    # omega = -B dx + A dy
    A, B = {}, {}
    for (kind, a, b), c in comb.items():
        if kind == "dx":
            B[(a, b)] = -c
        else:
            A[(a, b)] = c
    return VectorField(BiPoly(A), BiPoly(B))


class ValueSet:
    """Echelon basis of pulled-back monomial forms, by leading t-order."""

    def __init__(self, phi: PuiseuxParam, bound: int, nilpotent_only: bool = False):
        n = phi.n
        V = bound + n  # largest upsilon of interest
        if V > phi.trunc:
            raise TruncationError(
                f"contact bound {bound} needs truncation >= {V}, have {phi.trunc}")
        self.phi = phi
        self.bound = bound
        self.pivots: dict[int, _Row] = {}
        for key in _monomial_forms(phi, V, nilpotent_only):
            s = _form_of(*key).pullback(phi)
            vec = {e: c for e, c in s.terms.items() if e < V}
            self._insert(vec, {key: mpq(1)})

    def _insert(self, vec: dict, comb: dict):
        while vec:
            e = min(vec)
            row = self.pivots.get(e)
            if row is None:
                self.pivots[e] = _Row(vec, comb)
                return
            f = vec[e] / row.vec[e]
            vec = _axpy(vec, row.vec, -f)
            comb = _axpy(comb, row.comb, -f)

    def upsilons(self) -> list[int]:
        return sorted(e + 1 for e in self.pivots)

    def contacts(self) -> list[int]:
        n = self.phi.n
        return sorted(v - n for v in self.upsilons() if 1 <= v - n <= self.bound)

    def witness(self, j: int) -> VectorField | None:
        row = self.pivots.get(j + self.phi.n - 1)
        if row is None:
            return None
        return _field_from_comb(row.comb)


def _axpy(u: dict, v: dict, f) -> dict:
    out = dict(u)
    for k, c in v.items():
        w = out.get(k, 0) + f * c
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out


def contact_set(phi: PuiseuxParam, bound: int, nilpotent_only: bool = False) -> set:
    """Contact exponents in [1, bound] of singular fields with the branch.

    With ``nilpotent_only`` the linear part a10 is forced to vanish; above m
    this is exactly the nilpotency condition, so the result is the set of
    nilpotent contact exponents intersected with (m, bound].
    """
    vs = ValueSet(phi, bound, nilpotent_only)
    out = set(vs.contacts())
    if nilpotent_only:
        m = phi.y.valuation()
        out = {j for j in out if j > m}
    return out


# -- elimination ----------------------------------------------------------------

@dataclass
class Step:
    j: int
    witness: VectorField
    s0: object
    source: str  # "monomial" | "echelon"
    slope: object
    N: int


def monomial_witnesses(n: int, m: int, j: int) -> list[VectorField]:
    """Nilpotent monomial fields x^(p-1) y^q d/dy, x^p y^(q-1) d/dx with pn + qm = j + n."""
    out = []
    target = j + n
    for p in range(target // n, -1, -1):
        rest = target - p * n
        if rest % m:
            continue
        q = rest // m
        if (p, q) in ((1, 0), (0, 1), (1, 1)):
            continue
        if p >= 1:
            out.append(VectorField(BiPoly(), BiPoly({(p - 1, q): mpq(1)})))
        if q >= 1:
            out.append(VectorField(BiPoly({(p, q - 1): mpq(1)}), BiPoly()))
    return out


def find_witness(phi: PuiseuxParam, j: int):
    n, m = phi.n, phi.y.ord()
    for X in monomial_witnesses(n, m, j):
        if is_nilpotent(X) and contact_exponent(X, phi) == j:
            return X, "monomial"
    vs = ValueSet(phi, j, nilpotent_only=True)
    X = vs.witness(j)
    if X is None:
        raise NoWitness(f"no nilpotent field with contact {j}")
    if not is_nilpotent(X):
        raise NoWitness(f"echelon witness for {j} is not nilpotent")
    return X, "echelon"


def eliminate_term(phi: PuiseuxParam, j: int, witness: VectorField | None = None,
                   D: int = DEFAULT_EPS_DEGREE):
    """Remove t^j by the time-s0 flow of a nilpotent field with contact j.

    Returns (new branch, Step).  Coefficients below j are untouched.
    """
    if witness is None:
        X, source = find_witness(phi, j)
    else:
        X, source = witness, "given"
    if not is_nilpotent(X):
        raise NotNilpotent("elimination witness must be nilpotent")
    ce = contact_exponent(X, phi)
    if ce != j:
        raise NoWitness(f"witness has contact {ce}, expected {j}")
    aj = phi.y.coeff(j)
    dp = deform(phi, X, max(D, 2), trunc=j + 1)
    poly = dp.coeff(j)
    if poly.degree() != 1 or poly.constant() != aj:
        raise AffinityError(f"a_{j}(eps) is not affine with nonzero slope: {poly}")
    slope = poly.coeffs[1]
    N = -(-phi.trunc // phi.n)
    if not aj:
        return phi, Step(j, X, mpq(0), source, slope, N)
    s0 = -aj / slope
    Phi = jet_exp(X.scale(s0), N)
    new = apply_diffeo(Phi, phi)
    new = new.truncate(phi.trunc)
    if not new.y.agrees(phi.y, upto=j) or new.y.coeff(j):
        raise CrossCheckError(f"elimination of t^{j} disturbed lower terms")
    return new, Step(j, X, s0, source, slope, N)


# -- normal form ------------------------------------------------------------------

@dataclass
class Scaling:
    mode: str
    u: object = None
    v_pow_m: object = None
    constraints: dict = dc_field(default_factory=dict)
    numeric: dict = dc_field(default_factory=dict)


@dataclass
class NormalFormReport:
    input: PuiseuxParam
    prepared: PuiseuxParam
    head_flows: list
    output: PuiseuxParam
    n: int
    m: int | None
    lam: int | None
    c: int
    generators: tuple
    contact_set: list
    nilpotent_window: list
    window: int
    cofinal: int
    steps: list = dc_field(default_factory=list)
    unscaled: PuiseuxParam | None = None
    scaling: Scaling | None = None


def _window(phi: PuiseuxParam, c: int) -> int:
    """Upper end of the elimination range.

    Exact polynomial data are reduced term by term up to the last given
    exponent; beyond what the truncation can certify only the conductor bound
    remains (exponents >= c are dropped as co-final anyway).
    """
    last = max(phi.y.exponents(), default=0)
    return max(c, min(last + 1, phi.trunc - phi.n + 1))


def normal_form(phi: PuiseuxParam, scale: str = "exact") -> NormalFormReport:
    """Prepare, eliminate every eliminable exponent ascending, truncate, scale.

    ``scale`` is "exact" (roots must exist in the field), "skip" (leave the
    coefficients and record the constraints) or "numeric" (as skip, plus a
    floating-point rendering of u and v^m).
    """
    if scale not in ("exact", "skip", "numeric"):
        raise ValueError(f"unknown scale mode {scale!r}")
    prep = prepare(phi)
    cur = prep.param
    if prep.smooth:
        out = PuiseuxParam(1, TSeries({}, cur.trunc), cur.fld)
        return NormalFormReport(phi, cur, prep.log, out, 1, None, None, 0, (1,),
                                [], [], 0, 0, [], out, Scaling(scale, mpq(1), mpq(1)))
    sg = semigroup(cur)
    n, c = cur.n, sg.conductor
    m = cur.y.ord()
    W = _window(cur, c)
    if W - 1 + n > cur.trunc:
        raise TruncationError(
            f"normal form needs truncation >= {W - 1 + n}, have {cur.trunc}")
    lam_full = ValueSet(cur, max(c, W - 1))
    full = [j for j in lam_full.contacts() if n <= j <= c]
    nil = sorted(contact_set(cur, W - 1, nilpotent_only=True))
    nilset = set(nil)
    lam = None
    steps = []
    for j in range(m + 1, W):
        if not cur.y.coeff(j):
            continue
        if j in nilset:
            cur, step = eliminate_term(cur, j)
            steps.append(step)
        elif lam is None:
            lam = j
    T = max(c, m + 1, (lam + 1) if lam is not None else 0)
    unscaled = cur.with_y(TSeries({e: v for e, v in cur.y.terms.items() if e < T},
                                  cur.trunc))
    if lam is not None:
        check = lambda_invariant(unscaled)
        if check != lam:
            raise CrossCheckError(f"lambda by elimination {lam} != formula {check}")
    out, scaling = _scale(unscaled, m, lam, scale)
    return NormalFormReport(phi, prep.param, prep.log, out, n, m, lam, c,
                            sg.generators, full, nil, W, T, steps, unscaled, scaling)


def _scale(phi: PuiseuxParam, m: int, lam, mode: str):
    am = phi.y.coeff(m)
    fld = phi.fld
    if lam is None:
        ratio = None
        u = mpq(1)
    else:
        ratio = phi.y.coeff(lam) / am
        try:
            u = fld.nth_root(ratio, lam - m)
        except NotRepresentable:
            if mode == "exact":
                raise
            u = None
    if u is None:
        cons = {"u^(lambda-m)": ratio, "v^m*u^(-m)": 1 / am}
        numeric = {}
        if mode == "numeric":
            r = fld.to_complex(ratio)
            un = cmath.exp(cmath.log(r) / (lam - m))
            numeric = {"u": un, "v^m": un ** m / fld.to_complex(am)}
        return phi, Scaling(mode, None, None, cons, numeric)
    vm = u ** m / am
    terms = {}
    for e, a in phi.y.terms.items():
        terms[e] = a * vm / (u ** e)
    return phi.with_y(TSeries(terms, phi.trunc)), Scaling(mode, u, vm)


def replay(report: NormalFormReport) -> PuiseuxParam:
    """Re-run the recorded transcript from the input branch."""
    cur = report.input
    terms = dict(cur.y.terms)
    for hf in report.head_flows:
        e = hf.k * cur.n
        if terms.get(e) != hf.a:
            raise CrossCheckError(f"head flow {hf.describe()} does not match input")
        terms.pop(e)
    cur = cur.with_y(TSeries(terms, cur.trunc))
    for st in report.steps:
        if not st.s0:
            continue
        Phi = jet_exp(st.witness.scale(st.s0), st.N)
        cur = apply_diffeo(Phi, cur).truncate(cur.trunc)
    T = report.cofinal
    cur = cur.with_y(TSeries({e: v for e, v in cur.y.terms.items() if e < T}, cur.trunc))
    sc = report.scaling
    if sc is not None and sc.u is not None and report.n > 1:
        terms = {e: a * sc.v_pow_m / (sc.u ** e) for e, a in cur.y.terms.items()}
        cur = cur.with_y(TSeries(terms, cur.trunc))
    return cur


def moduli_equivalent(r1: NormalFormReport, r2: NormalFormReport) -> bool:
    """Same (n, m, lambda, Lambda) and a_i' = u^(i-m) a_i for some u^(lambda-m) = 1."""
    if (r1.n, r1.m, r1.lam, r1.c) != (r2.n, r2.m, r2.lam, r2.c):
        return False
    if list(r1.contact_set) != list(r2.contact_set):
        return False
    if r1.n == 1:
        return True
    y1, y2 = r1.output.y, r2.output.y
    if r1.lam is None:
        return y1.agrees(y2)
    k = r1.lam - r1.m
    fld = r1.output.fld
    if (lcm(2, fld.order)) % k:
        raise NotRepresentable(
            f"field Q(zeta_{fld.order}) lacks the {k}-th roots of unity; "
            f"use cyclotomic order {lcm(fld.order, k)}")
    T = min(r1.cofinal, r2.cofinal, y1.trunc, y2.trunc)
    for u in roots_of_unity(k, fld):
        if all(y2.coeff(i) == u ** (i - r1.m) * y1.coeff(i) for i in range(r1.m, T)):
            return True
    return False


__all__ = [
    "AffinityError", "DeformedParam", "NoWitness", "NormalFormReport", "Scaling",
    "Step", "ValueSet", "branch_equal", "contact_exponent_deformation",
    "contact_set", "deform", "eliminate_term", "find_witness", "lambda_invariant",
    "moduli_equivalent", "monomial_witnesses", "normal_form", "replay", "HeadFlow",
]
