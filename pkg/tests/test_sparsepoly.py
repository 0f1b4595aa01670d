"""Sparse polynomial representation and serialization."""

from fractions import Fraction as F

import pytest

from linforms.sparsepoly import SparsePoly, product_of_linear_forms


def test_arithmetic():
    x = SparsePoly.variable(2, 0)
    y = SparsePoly.variable(2, 1)
    p = (x + y) * (x - y)
    assert p == SparsePoly(2, {(2, 0): 1, (0, 2): -1})
    assert (p - p).is_zero()
    assert p.scale(F(1, 2)).terms[(2, 0)] == F(1, 2)


def test_power_and_degree():
    x = SparsePoly.variable(1, 0)
    assert (x**5).degree() == 5
    assert SparsePoly.constant(3, 4).degree() == 0
    assert SparsePoly.zero(2).degree() == -1


def test_no_zero_coefficients_stored():
    p = SparsePoly(2, {(1, 0): 1, (0, 1): 0})
    assert (0, 1) not in p.terms


def test_evaluate_and_derivative():
    p = SparsePoly(2, {(2, 1): 3, (0, 2): -1})  # 3 x1^2 x2 - x2^2
    assert p.evaluate((2, 5)) == 60 - 25
    assert p.derivative(0) == SparsePoly(2, {(1, 1): 6})
    assert p.derivative(1) == SparsePoly(2, {(2, 0): 3, (0, 1): -2})


def test_homogeneity():
    assert SparsePoly(2, {(2, 0): 1, (1, 1): 2}).is_homogeneous()
    assert not SparsePoly(2, {(2, 0): 1, (0, 1): 2}).is_homogeneous()


def test_graded_lex_serialization_order():
    p = SparsePoly(2, {(0, 1): 2, (2, 0): 1, (1, 0): -3})
    lines = p.to_text().splitlines()
    assert lines == ["1 2 0", "-3 1 0", "2 0 1"]


def test_text_round_trip():
    p = SparsePoly(3, {(1, 2, 0): F(-7, 3), (0, 0, 4): 5})
    assert SparsePoly.from_text(p.to_text()) == p


def test_from_text_ignores_comments_and_merges():
    text = "# comment\n2 1 0\n3 1 0\n"
    assert SparsePoly.from_text(text) == SparsePoly(2, {(1, 0): 5})


def test_from_text_errors():
    with pytest.raises(ValueError):
        SparsePoly.from_text("")
    with pytest.raises(ValueError):
        SparsePoly.from_text("1 2\n1 2 3\n")
    with pytest.raises(ValueError):
        SparsePoly.from_text("x 1 1")
    with pytest.raises(ValueError):
        SparsePoly.from_text("1 -2 0")


def test_product_of_linear_forms_matches_naive():
    forms = [((1, 2, -1), 2), ((0, 1, 1), 1)]
    fast = product_of_linear_forms(forms, 3)
    naive = SparsePoly.constant(3, 1)
    for coeffs, mult in forms:
        lin = SparsePoly.from_linear(coeffs)
        for _ in range(mult):
            naive = naive * lin
    assert fast == naive


def test_product_of_linear_forms_rational_coefficients():
    forms = [((F(1, 2), F(-2, 3)), 2)]
    fast = product_of_linear_forms(forms, 2)
    lin = SparsePoly.from_linear((F(1, 2), F(-2, 3)))
    assert fast == lin * lin
