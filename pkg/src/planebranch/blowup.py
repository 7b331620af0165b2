"""Point blow-ups of vector fields along a branch and the path they share."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .errors import CrossCheckError, TruncationError
from .puiseux import (PuiseuxParam, characteristic_exponents,
                      euclid_multiplicities, semigroup, strict_transform_data)
from .series import INF, BiPoly
from .vfield import VectorField, contact_exponent, is_nilpotent


class NotSingular(ValueError):
    """The blown-up centre was a regular point of the field."""


class PathTooLong(ArithmeticError):
    """max_depth exceeded: the branch looks invariant for the field."""


def _exact(p: BiPoly) -> BiPoly:
    if p.trunc != INF:
        raise ValueError("blow-ups act on exact polynomial fields")
    return p


def pullback_field(X: VectorField, chart: str = "x", translate=0) -> VectorField:
    """True pull-back of X by one blow-up of the origin.

    x-chart (x, y) = (x', x'y'): A' = A(x', x'y'), B' = (B(x', x'y') - y' A(x', x'y'))/x'.
    The y-chart is the mirror image.  Afterwards y' (x' in the y-chart) is
    shifted by ``translate`` so that the point of interest becomes the origin.
    """
    A, B = _exact(X.A), _exact(X.B)
    if chart == "y":
        return pullback_field(X.swap(), "x", translate).swap()
    if chart != "x":
        raise ValueError("chart must be 'x' or 'y'")
    if A.coeff(0, 0) or B.coeff(0, 0):
        raise NotSingular("blow-up centre is not a singular point of the field")
    Ab = A.substitute_monomial((1, 0), (1, 1))
    Bb = B.substitute_monomial((1, 0), (1, 1))
    num = Bb - Ab * BiPoly.y()
    if any(i == 0 for i, _ in num.terms):
        raise NotSingular("division by the divisor equation is not exact")
    Bn = BiPoly({(i - 1, j): c for (i, j), c in num.terms.items()})
    if translate:
        Ab, Bn = Ab.translate_y(translate), Bn.translate_y(translate)
    return VectorField(Ab, Bn)


def _swap_scaled(X: VectorField, c) -> VectorField:
    """Field in coordinates (u, v) = (y/c, x)."""
    A = X.A.substitute_monomial((0, 1), (1, 0), scale_y=c)
    B = X.B.substitute_monomial((0, 1), (1, 0), scale_y=c)
    return VectorField(B.scale(1 / c), A)


def _regular(X: VectorField) -> bool:
    return bool(X.A.coeff(0, 0)) or bool(X.B.coeff(0, 0))


def divisor_invariant(X: VectorField, axis: str) -> bool:
    """The local divisor {x=0} ('x') or {y=0} ('y') is invariant for X."""
    if axis == "x":
        return all(i > 0 for i, _ in X.A.terms)
    return all(j > 0 for _, j in X.B.terms)


@dataclass
class PathStep:
    mult: int
    field: VectorField
    branch: PuiseuxParam
    divisors: list = dc_field(default_factory=list)  # (divisor id, axis)


@dataclass
class SharedPath:
    mults: list[int]
    N: int
    last_point_free: bool
    last_point_singular_for_X: bool = False
    last_point_singular_for_curve: bool = False
    corner_checked: bool = True
    nilpotent_checked: bool | None = None
    steps: list[PathStep] = dc_field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "mults": list(self.mults),
            "N": self.N,
            "last_point_free": self.last_point_free,
            "last_point_singular_for_X": self.last_point_singular_for_X,
            "last_point_singular_for_curve": self.last_point_singular_for_curve,
            "nilpotent_checked": self.nilpotent_checked,
        }


def default_max_depth(phi: PuiseuxParam) -> int:
    if phi.n == 1:
        return phi.trunc
    chars = characteristic_exponents(phi)
    seq = euclid_multiplicities(chars, 10 ** 4)
    to_ones = next(i for i, v in enumerate(seq) if v == 1)
    return to_ones + semigroup(phi).conductor + 2


def _restricted_on_new_divisor(X: VectorField):
    """(mu0, mu1, mu2) of the field along the divisor of the x-chart blow-up."""
    A1 = {k: c for k, c in X.A.terms.items() if sum(k) == 1}
    B1 = {k: c for k, c in X.B.terms.items() if sum(k) == 1}
    a10, a01 = A1.get((1, 0), 0), A1.get((0, 1), 0)
    b10, b01 = B1.get((1, 0), 0), B1.get((0, 1), 0)
    # B_1(1, s) - s A_1(1, s)
    return (b10, b01 - a10, -a01)


def _single_zero(mu):
    """Position of the unique zero on the projective line, or None if not unique."""
    mu0, mu1, mu2 = mu
    if mu2:
        if mu1 * mu1 - 4 * mu0 * mu2:
            return None
        return ("finite", -mu1 / (2 * mu2))
    if not mu1 and mu0:
        return ("infinity", None)
    return None


def shared_path(X: VectorField, phi: PuiseuxParam, max_depth: int | None = None,
                check: bool = True) -> SharedPath:
    """Blow up along the branch until the pulled-back field is regular.

    Every centre is moved to a chart origin; the branch is kept transversal
    to the chart's x = 0 axis.  Verifies that the last point is not a corner
    and, for nilpotent X, that the last divisor is free with a single singular
    point of the field, distinct from the last point.
    """
    if not X.is_singular():
        raise NotSingular("the field must be singular at the origin")
    if max_depth is None:
        ce = contact_exponent(X, phi)
        # the path has N <= contact + 1 since every multiplicity is >= 1
        max_depth = default_max_depth(phi)
        if isinstance(ce, int):
            max_depth = max(max_depth, ce + 2)
    nilp = is_nilpotent(X)
    steps: list[PathStep] = []
    mults: list[int] = []
    divisors: list = []
    cur_X, cur_phi = X, phi
    prev_divisors: list = []
    restricted = None
    last_shift = None
    for depth in range(max_depth + 1):
        steps.append(PathStep(cur_phi.n, cur_X, cur_phi, list(divisors)))
        mults.append(cur_phi.n)
        if check:
            for _, axis in divisors:
                if not divisor_invariant(cur_X, axis):
                    raise CrossCheckError("exceptional divisor is not invariant")
        if _regular(cur_X):
            break
        if depth == max_depth:
            raise PathTooLong(
                f"field still singular after {max_depth} blow-ups: "
                f"branch invariant up to depth {max_depth}")
        if cur_phi.trunc <= cur_phi.n + 1:
            raise TruncationError("truncation exhausted along the shared path")
        st = strict_transform_data(cur_phi)
        restricted = _restricted_on_new_divisor(cur_X)
        last_shift = st.shift
        newX = pullback_field(cur_X, "x", st.shift)
        # divisors through the new point: the new one is x' = 0; an old y = 0
        # divisor passes through iff the shift is zero
        new_div = [(depth + 1, "x")]
        for d, axis in divisors:
            if axis == "y" and not st.shift:
                new_div.append((d, "y"))
        prev_divisors = divisors
        if st.swapped:
            newX = _swap_scaled(newX, st.scale)
            new_div = [(d, "y" if a == "x" else "x") for d, a in new_div]
        divisors = new_div
        cur_X, cur_phi = newX, st.param
    N = len(mults) - 1
    if len(divisors) > 1:
        raise CrossCheckError("shared path ends at a corner of the divisor")
    free = N <= 1 or len(prev_divisors) <= 1
    nil_ok = None
    if check and nilp and N >= 1:
        nil_ok = True
        z = _single_zero(restricted)
        if z is None or not free:
            raise CrossCheckError("nilpotent field: last divisor not free or "
                                  "not a single singular point on it")
        # the point of the branch on E_N sits at y' = shift in the x-chart
        if z[0] == "finite" and z[1] == last_shift:
            raise CrossCheckError("last point coincides with the singular point")
        if N > 1:
            # the corner E_N & E_(N-1) is at y' = 0 if E_(N-1) was {y=0}, else at infinity
            old_axes = [a for _, a in prev_divisors]
            corner = ("finite", 0) if "y" in old_axes else ("infinity", None)
            if (z[0], z[1] if z[0] == "finite" else None) != corner:
                raise CrossCheckError("singular point of E_N is not the corner")
    return SharedPath(mults, N, free, False, cur_phi.n > 1, True, nil_ok, steps)


def noether_intersection(path: SharedPath) -> int:
    """sum of n_i^2 over i < N: intersection of the branch with its deformation."""
    return sum(v * v for v in path.mults[: path.N])


def contact_from_path(path: SharedPath) -> int:
    """n_(N-1) + sum_(j=1)^(N-1) n_j."""
    if path.N < 1:
        raise ValueError("empty shared path")
    m = path.mults
    return m[path.N - 1] + sum(m[1: path.N])


def upsilon_from_path(path: SharedPath) -> int:
    """n_(N-1) + sum_(j=0)^(N-1) n_j."""
    if path.N < 1:
        raise ValueError("empty shared path")
    m = path.mults
    return m[path.N - 1] + sum(m[: path.N])
