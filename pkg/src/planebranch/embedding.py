"""Resonances of diffeomorphism jets, the 2-jet stabilizer system of a branch,
and certificates that a branch class is not complete."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import gcd

from gmpy2 import mpq

from .errors import Unverifiable
from .puiseux import PuiseuxParam
from .scalars import format_scalar
from .series import BiPoly
from .vfield import JetDiffeo, VectorField, apply_diffeo

OBSTRUCTED = "Obstructed"
NOT_OBSTRUCTED = "NotObstructed"
NON_RESONANT = "NonResonant"

NONRESONANCE_BOUND = 12


@dataclass(frozen=True)
class EigenPair:
    """Eigenvalues exp(2 pi i r1), exp(2 pi i r2) given by rotations r in [0, 1)."""

    r1: Fraction
    r2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "r1", Fraction(self.r1) % 1)
        object.__setattr__(self, "r2", Fraction(self.r2) % 1)

    @classmethod
    def from_scalars(cls, lam1, lam2, fld) -> EigenPair:
        r1, r2 = fld.rotation(lam1), fld.rotation(lam2)
        if r1 is None or r2 is None:
            raise ValueError("eigenvalues must be roots of unity of the field")
        return cls(r1, r2)

    def rotation(self, target: int) -> Fraction:
        return self.r1 if target == 1 else self.r2

    def swapped(self) -> EigenPair:
        return EigenPair(self.r2, self.r1)


def monomial_name(mono) -> str:
    i, j, target = mono
    parts = []
    if i:
        parts.append("x" if i == 1 else f"x^{i}")
    if j:
        parts.append("y" if j == 1 else f"y^{j}")
    return ("".join(parts) or "1") + f" e{target}"


def is_resonant(e: EigenPair, mono) -> bool:
    i, j, target = mono
    return (i * e.r1 + j * e.r2 - e.rotation(target)) % 1 == 0


def resonant_monomials(e: EigenPair, degree: int) -> list:
    """All (i, j, target) with 2 <= i+j <= degree and lambda1^i lambda2^j = lambda_target."""
    if degree < 2:
        raise ValueError("degree must be at least 2")
    out = []
    for d in range(2, degree + 1):
        for i in range(d, -1, -1):
            j = d - i
            for target in (1, 2):
                if is_resonant(e, (i, j, target)):
                    out.append((i, j, target))
    return out


def _strong_row(mono):
    """(a, b) with a*alpha + b*beta = 0 the strong-resonance condition."""
    i, j, target = mono
    if target == 1:
        return (i - 1, j)
    return (i, j - 1)


def _ext_gcd(a: int, b: int):
    if b == 0:
        return (abs(a), (1 if a >= 0 else -1), 0)
    g, x, y = _ext_gcd(b, a % b)
    return (g, y, x - (a // b) * y)


@dataclass
class ResonanceCertificate:
    eigen: EigenPair
    present: list
    verdict: str
    rows: list = dc_field(default_factory=list)   # [a, b, rhs]: a k1 + b k2 = rhs over Z
    rank: int = 0
    solution: tuple | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "rotations": [str(self.eigen.r1), str(self.eigen.r2)],
            "present": [[i, j, f"e{t}"] for i, j, t in self.present],
            "present_names": [monomial_name(m) for m in self.present],
            "verdict": self.verdict,
            "system": {
                "unknowns": ["k1", "k2"],
                "meaning": "alpha = 2 pi i (r1 + k1), beta = 2 pi i (r2 + k2); "
                           "each row [a, b, rhs] reads a*k1 + b*k2 = rhs",
                "rows": [[a, b, str(c)] for a, b, c in self.rows],
                "rank": self.rank,
            },
            "solution": list(self.solution) if self.solution is not None else None,
            "note": self.note,
        }


def _integer_solution(rows, e: EigenPair):
    """(rank, (k1, k2) or None) for the system sum of strong conditions over Z."""
    nz = [(a, b) for a, b in rows if a or b]
    if not nz:
        return 0, (0, 0)
    a0, b0 = nz[0]
    rank = 1
    for a, b in nz[1:]:
        if a0 * b - b0 * a:
            rank = 2
            break
    if rank == 2:
        # only alpha = beta = 0: needs both rotations integral
        if e.r1 == 0 and e.r2 == 0:
            return 2, (0, 0)
        return 2, None
    rhs = -(a0 * e.r1 + b0 * e.r2)
    if rhs.denominator != 1:
        return 1, None
    R = rhs.numerator
    g, x, y = _ext_gcd(a0, b0)
    if R % g:
        return 1, None
    return 1, (x * (R // g), y * (R // g))


def obstruction(e: EigenPair, present) -> ResonanceCertificate:
    """Decide whether every choice of logarithms leaves a weak present resonance.

    The strong conditions form an integer linear system in (k1, k2); the verdict
    is Obstructed exactly when it has no integer solution.
    """
    present = sorted({tuple(m) for m in present}, key=lambda m: (-(m[0] + m[1]), -m[0], m[2]))
    for mono in present:
        if not is_resonant(e, mono):
            raise ValueError(f"{monomial_name(mono)} is not resonant for {e}")
    if not present:
        res = resonant_monomials(e, NONRESONANCE_BOUND)
        if res:
            return ResonanceCertificate(e, [], NOT_OBSTRUCTED, note="no present resonant monomials")
        return ResonanceCertificate(
            e, [], NON_RESONANT,
            note=f"no resonances up to degree {NONRESONANCE_BOUND}")
    rows = [_strong_row(m) for m in present]
    full = []
    for a, b in rows:
        rhs = -(a * e.r1 + b * e.r2)
        full.append([a, b, rhs])
    rank, sol = _integer_solution(rows, e)
    verdict = OBSTRUCTED if sol is None else NOT_OBSTRUCTED
    note = ("no integer logarithm choice makes every present resonance strong"
            if sol is None else "all present resonances strong for the given (k1, k2)")
    return ResonanceCertificate(e, present, verdict, full, rank, sol, note)


# -- stabilizer ---------------------------------------------------------------

JET2_UNKNOWNS = ("a20", "a11", "a02", "b20", "b11", "b02")
_MONOS = ((2, 0), (1, 1), (0, 2))


def rref(rows: list[list]) -> list[list]:
    """Reduced row echelon form over the scalar field, zero rows dropped."""
    M = [list(r) for r in rows if any(r)]
    if not M:
        return []
    ncols = len(M[0])
    piv_row = 0
    for col in range(ncols):
        pr = next((r for r in range(piv_row, len(M)) if M[r][col]), None)
        if pr is None:
            continue
        M[piv_row], M[pr] = M[pr], M[piv_row]
        inv = 1 / M[piv_row][col]
        M[piv_row] = [v * inv for v in M[piv_row]]
        for r in range(len(M)):
            if r != piv_row and M[r][col]:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[piv_row])]
        piv_row += 1
        if piv_row == len(M):
            break
    return [r for r in M if any(r)]


def nullspace(rows: list[list], ncols: int) -> list[list]:
    R = rref(rows)
    pivots = []
    for r in R:
        pivots.append(next(i for i, v in enumerate(r) if v))
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [mpq(0)] * ncols
        v[f] = mpq(1)
        for r, p in zip(R, pivots):
            v[p] = -r[f]
        basis.append(v)
    return basis


@dataclass
class StabilizerSystem:
    rows: list            # coefficient rows over JET2_UNKNOWNS
    orders: list          # t-order of each row
    cutoff: int
    dimension: int
    basis: list

    def to_dict(self) -> dict:
        return {
            "unknowns": list(JET2_UNKNOWNS),
            "cutoff": self.cutoff,
            "equations": [{"t_order": o, "row": [format_scalar(c) for c in r]}
                          for o, r in zip(self.orders, self.rows)],
            "dimension": self.dimension,
            "basis": [[format_scalar(c) for c in v] for v in self.basis],
        }


def stabilizer_jet2(phi: PuiseuxParam) -> StabilizerSystem:
    """Linear conditions on the second jet of a field with vanishing linear part
    whose dual form pulls back to zero along the branch.

    Only t-orders below the first possible contribution of degree >= 3 terms
    are used (x^3 dx, order 4n - 1), so the system is exact for 2-jets.
    """
    n = phi.n
    cutoff = 4 * n - 1
    if phi.trunc < cutoff - n + 1:
        raise Unverifiable(f"stabilizer system needs truncation >= {cutoff - n + 1}")
    cols = []
    # omega = -B dx + A dy; A coefficients pair with dy, B with -dx
    for kind in ("A", "B"):
        for a, b in _MONOS:
            mono = BiPoly({(a, b): mpq(1)})
            if kind == "A":
                s = mono.compose(phi.x, phi.y) * phi.y.derivative()
            else:
                s = (mono.compose(phi.x, phi.y) * phi.x.derivative()).scale(-1)
            if s.trunc < cutoff:
                raise Unverifiable("pullback truncation below the stabilizer cutoff")
            cols.append(s)
    orders = sorted({e for s in cols for e in s.terms if e < cutoff})
    rows, used = [], []
    for o in orders:
        r = [s.terms.get(o, mpq(0)) for s in cols]
        if any(r):
            rows.append(r)
            used.append(o)
    basis = nullspace(rows, 6)
    return StabilizerSystem(rows, used, cutoff, len(basis), basis)


@dataclass
class LinearStabilizer:
    trivial: bool
    reason: str

    def to_dict(self) -> dict:
        return {"trivial": self.trivial, "reason": self.reason}


def linear_stabilizer_trivial(phi: PuiseuxParam) -> LinearStabilizer:
    """Whether every linear map preserving the branch is the identity.

    Preserving the tangent cone kills the lower-left entry.  The upper-right
    entry b first acts at exponent 2m - n; when that exponent is absent from
    the support, b must vanish.  A diagonal map (a, d) then preserves the
    branch iff a = w^n, d = w^m with w^g = 1, g the gcd of the support
    differences, so it is trivial iff g divides gcd(n, m).
    """
    S = phi.support()
    if not phi.is_prepared():
        raise Unverifiable("linear stabilizer needs a prepared branch")
    n, m = phi.n, S[0]
    k = 2 * m - n
    if k >= phi.trunc:
        raise Unverifiable(f"exponent {k} beyond truncation {phi.trunc}")
    if k in S:
        raise Unverifiable(f"exponent {k} is in the support; off-diagonal term undecided")
    g = 0
    for e in S:
        g = gcd(g, e - m)
    if g == 0:
        return LinearStabilizer(False, "monomial branch: a torus of diagonal maps preserves it")
    if gcd(n, m) % g == 0:
        return LinearStabilizer(True, f"off-diagonal killed at t^{k}; support gcd {g} divides gcd(n,m)")
    return LinearStabilizer(False, f"support gcd {g} admits nontrivial diagonal symmetries")


# -- completeness --------------------------------------------------------------

@dataclass
class CompletenessCertificate:
    certified: bool
    linear: LinearStabilizer
    stabilizer: StabilizerSystem
    resonance: ResonanceCertificate
    witness_x: object = None
    witness_y: object = None
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "certified": self.certified,
            "message": self.message,
            "linear_stabilizer": self.linear.to_dict(),
            "stabilizer_jet2": self.stabilizer.to_dict(),
            "resonance": self.resonance.to_dict(),
            "witness": None if self.witness_x is None else {
                "x": [[e, format_scalar(c)] for e, c in self.witness_x.items()],
                "y": [[e, format_scalar(c)] for e, c in self.witness_y.items()],
                "trunc": self.witness_y.trunc,
            },
        }


def jet_eigenpair(Phi: JetDiffeo, fld) -> EigenPair:
    (a, b), (c, d) = Phi.linear_part()
    if b or c:
        raise ValueError("linear part must be diagonal")
    return EigenPair.from_scalars(a, d, fld)


def present_resonances(Phi: JetDiffeo, e: EigenPair) -> list:
    """Resonant monomials with nonzero coefficient in the degree-2 part of Phi."""
    out = []
    for target, comp in ((1, Phi.P), (2, Phi.Q)):
        for (i, j), c in comp.terms.items():
            if i + j == 2 and c and is_resonant(e, (i, j, target)):
                out.append((i, j, target))
    return out


def completeness_obstruction(phi: PuiseuxParam, Phi: JetDiffeo) -> CompletenessCertificate:
    """Certificate that the class of phi is not complete, witnessed by Phi(phi).

    Requires a trivial linear stabilizer, a trivial 2-jet stabilizer system and
    an obstructed set of resonances in the 2-jet of Phi.
    """
    fld = phi.fld
    e = jet_eigenpair(Phi, fld)
    lin = linear_stabilizer_trivial(phi)
    stab = stabilizer_jet2(phi)
    res = obstruction(e, present_resonances(Phi, e))
    ok = lin.trivial and stab.dimension == 0 and res.verdict == OBSTRUCTED
    if ok:
        xs, ys = apply_diffeo(Phi, phi, renorm=False)
        msg = "class of the branch is non-complete; witness is the image branch"
        return CompletenessCertificate(True, lin, stab, res, xs.truncate(phi.trunc),
                                       ys.truncate(phi.trunc), msg)
    why = []
    if not lin.trivial:
        why.append("linear stabilizer nontrivial")
    if stab.dimension:
        why.append(f"2-jet stabilizer has dimension {stab.dimension}")
    if res.verdict != OBSTRUCTED:
        why.append(f"resonance verdict {res.verdict}")
    return CompletenessCertificate(False, lin, stab, res, message="; ".join(why))


def field_from_jet_rows(v) -> VectorField:
    """Second-jet field from a vector over JET2_UNKNOWNS."""
    A = {m: c for m, c in zip(_MONOS, v[:3]) if c}
    B = {m: c for m, c in zip(_MONOS, v[3:]) if c}
    return VectorField(BiPoly(A), BiPoly(B))
