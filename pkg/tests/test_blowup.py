from __future__ import annotations


import pytest

from corpus import branch_field_pairs
from planebranch.blowup import (
    NotSingular, PathTooLong, SharedPath, contact_from_path, noether_intersection,
    pullback_field, shared_path, upsilon_from_path,
)
from planebranch.puiseux import PuiseuxParam
from planebranch.series import BiPoly
from planebranch.vfield import VectorField, contact_exponent, upsilon

P = PuiseuxParam.from_terms
CUSP = P(2, {3: 1}, trunc=12)
SMOOTH = P(1, {}, trunc=12)
G0 = P(6, {7: 1, 10: 1, 11: 1}, trunc=40)


def field(A=None, B=None) -> VectorField:
    return VectorField(BiPoly(A or {}), BiPoly(B or {}))


def test_pullback_examples():
    assert pullback_field(field({(1, 0): 1}, {(0, 1): 1})) == field({(1, 0): 1})
    assert pullback_field(field(B={(1, 0): 1})) == field(B={(0, 0): 1})
    assert pullback_field(field(B={(2, 0): 1})) == field(B={(1, 0): 1})


def test_pullback_y_chart_mirrors_x_chart():
    X = field({(0, 2): 1}, {(1, 1): 3})
    assert pullback_field(X, "y") == pullback_field(X.swap(), "x").swap()


def test_pullback_requires_singular_centre():
    with pytest.raises(NotSingular):
        pullback_field(field({(0, 0): 1}))


def test_translation_moves_point_to_origin():
    X = field({(1, 0): 1}, {(0, 1): 2})
    Y = pullback_field(X, "x", translate=1)
    # y' -> y' + 1 turns x'y' into x'(y'+1)
    assert Y.B.coeff(0, 0) == 1 and Y.B.coeff(0, 1) == 1


def test_shared_path_examples():
    X = field(B={(1, 0): 1})
    path = shared_path(X, CUSP)
    assert path.mults == [2, 1] and path.N == 1
    assert noether_intersection(path) == 4
    assert contact_from_path(path) == 2
    assert upsilon_from_path(path) == upsilon(X.dual_form(), CUSP)
    assert path.last_point_free and path.nilpotent_checked
    path = shared_path(field(B={(2, 0): 1}), SMOOTH)
    assert path.mults == [1, 1, 1] and path.N == 2
    assert contact_from_path(path) == 2 and noether_intersection(path) == 2


def test_noether_sum_by_hand():
    assert noether_intersection(SharedPath([2, 1], 1, True)) == 4
    assert noether_intersection(SharedPath([1, 1, 1], 2, True)) == 2
    assert noether_intersection(SharedPath([6, 1, 1], 2, True)) == 37


def test_shared_path_on_g0():
    # x d/dy has contact 6 = n_0: one blow-up separates
    X = field(B={(1, 0): 1})
    path = shared_path(X, G0)
    assert path.mults == [6, 1] and path.N == 1
    assert contact_from_path(path) == 6
    assert noether_intersection(path) == 36
    path = shared_path(field(B={(2, 0): 1}), G0)
    assert path.N == 12 and contact_from_path(path) == 12


def test_invariant_branch_exceeds_depth():
    euler = field({(1, 0): 2}, {(0, 1): 3})
    with pytest.raises(PathTooLong):
        shared_path(euler, CUSP, max_depth=4)


def test_regular_field_rejected():
    with pytest.raises(NotSingular):
        shared_path(field({(0, 0): 1}), CUSP)


def test_three_contact_computations_agree():
    for phi, X, ce in branch_field_pairs(31, 40, 5):
        path = shared_path(X, phi)
        assert contact_from_path(path) == ce == contact_exponent(X, phi)
        assert upsilon_from_path(path) == ce + phi.n
        assert path.mults[path.N] >= 1
        assert all(a >= b for a, b in zip(path.mults, path.mults[1:]))
