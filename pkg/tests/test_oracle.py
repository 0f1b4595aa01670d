"""Black-box oracles: evaluation, parsing, derivatives, degree, homogeneity."""

import threading
from fractions import Fraction as F

import pytest

from linforms.errors import ParseError, ZeroPolynomial
from linforms.forms import Factorization, LinearForm
from linforms.oracle import (
    CircuitOracle,
    ProductOracle,
    RandomSource,
    SparsePolyOracle,
    check_homogeneous,
    circuit_gradient,
    estimate_degree,
    gradient_at,
    parse_expression,
    partial_derivative_at,
)
from linforms.sparsepoly import SparsePoly, product_of_linear_forms

F1_FORMS = [((1, 1, 1, 1), 1), ((1, 2, 2, 1), 1)]


def f1_oracle() -> ProductOracle:
    fact = Factorization(
        1, tuple((LinearForm(c), m) for c, m in F1_FORMS)
    )
    return ProductOracle(fact)


# --- evaluation --------------------------------------------------------------


def test_evaluate_product():
    o = SparsePolyOracle(SparsePoly(2, {(1, 1): 1}))
    assert o.evaluate((3, 5)) == 15


def test_evaluate_zero_of_difference_of_squares():
    o = SparsePolyOracle(SparsePoly(2, {(2, 0): 1, (0, 2): -1}))
    assert o.evaluate((1, 1)) == 0


def test_evaluate_f1_derived():
    o = f1_oracle()
    # independent route: expand the product and evaluate the expansion
    expansion = product_of_linear_forms(F1_FORMS, 4)
    assert expansion.evaluate((1, 0, 0, 1)) == 4
    assert o.evaluate((1, 0, 0, 1)) == 4


def test_evaluate_arity_mismatch():
    o = SparsePolyOracle(SparsePoly(2, {(1, 1): 1}))
    with pytest.raises(ValueError):
        o.evaluate((1, 2, 3))


def test_call_counter_counts_every_evaluation():
    o = f1_oracle()
    assert o.calls == 0
    for k in range(5):
        o.evaluate((k, 1, 0, 1))
    assert o.calls == 5


def test_call_counter_concurrent_increments():
    o = SparsePolyOracle(SparsePoly(2, {(1, 1): 1}))

    def worker():
        for _ in range(200):
            o.evaluate((2, 3))

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert o.calls == 1600


def test_evaluate_is_pure():
    o = f1_oracle()
    assert o.evaluate((2, -1, 3, 5)) == o.evaluate((2, -1, 3, 5))


# --- parsing -----------------------------------------------------------------


def test_parse_product():
    c = parse_expression("x1*x2")
    assert c.evaluate((F(2), F(3))) == 6
    assert any(g.op == "mul" for g in c.gates)


def test_parse_square():
    c = parse_expression("(x1+x2)^2")
    assert c.evaluate((F(1), F(2))) == 9


def test_parse_difference_of_squares():
    c = parse_expression("x1^2 - x2^2")
    assert c.evaluate((F(1), F(2))) == -3


def test_parse_rational_literals_and_unary_minus():
    c = parse_expression("-x1 + 3/4*x2")
    assert c.evaluate((F(4), F(8))) == 2


def test_parse_power_uses_repeated_squaring():
    c = parse_expression("x1^8")
    assert sum(1 for g in c.gates if g.op == "mul") == 3
    assert c.evaluate((F(2),)) == 256


def test_parse_power_zero():
    c = parse_expression("x1^0")
    assert c.evaluate((F(7),)) == 1


def test_parse_syntax_error_carries_position():
    with pytest.raises(ParseError) as info:
        parse_expression("x1 + ")
    assert info.value.position == 5


def test_parse_unknown_variable():
    with pytest.raises(ParseError):
        parse_expression("x1 + y2")
    with pytest.raises(ParseError):
        parse_expression("x0 + x1")


def test_parse_rejects_non_literal_exponent():
    with pytest.raises(ParseError):
        parse_expression("x1^x2")


def test_parse_var_count_from_max_index():
    assert parse_expression("x3 + x1").n_vars == 3


# --- derivatives -------------------------------------------------------------


def test_partial_derivative_square():
    o = SparsePolyOracle(SparsePoly(1, {(2,): 1}))
    assert partial_derivative_at(o, 0, (3,)) == 6


def test_partial_derivative_product():
    o = SparsePolyOracle(SparsePoly(2, {(1, 1): 1}))
    assert partial_derivative_at(o, 0, (2, 5)) == 5


def test_partial_derivative_derived_symbolically():
    poly = SparsePoly(2, {(2, 1): 1})  # x1^2 x2
    o = SparsePolyOracle(poly)
    expected = poly.derivative(1).evaluate((2, 7))  # symbolic oracle: x1^2
    assert expected == 4
    assert partial_derivative_at(o, 1, (2, 7)) == expected


def test_partial_derivative_costs_exactly_d_plus_1_calls():
    o = f1_oracle()  # degree 2
    partial_derivative_at(o, 2, (1, 1, 1, 1))
    assert o.calls == 3


def test_circuit_gradient_examples():
    assert circuit_gradient(parse_expression("x1*x2"), (F(2), F(5))) == (5, 2)
    assert circuit_gradient(parse_expression("x1^2 - x2^2"), (F(1), F(2))) == (2, -4)


def test_circuit_gradient_f1_cross_checked():
    c = parse_expression("(x1+x2+x3+x4)*(x1+2*x2+2*x3+x4)")
    point = (F(1), F(0), F(0), F(0))
    grad = circuit_gradient(c, point)
    assert grad == (2, 3, 3, 2)
    # finite-difference cross-check through the counting black box
    o = CircuitOracle(c)
    assert grad == tuple(partial_derivative_at(o, i, point) for i in range(4))


def test_circuit_gradient_makes_no_oracle_calls():
    o = CircuitOracle(parse_expression("(x1+x2)^3"))
    gradient_at(o, (F(1), F(2)))
    assert o.calls == 0


def test_gradient_agreement_random_circuits():
    rng = RandomSource(99, 64)
    for _ in range(10):
        n = rng.integer_between(2, 4)
        forms = []
        for _ in range(n):
            coeffs = [rng.integer_between(-3, 3) for _ in range(n)]
            if not any(coeffs):
                coeffs[0] = 1
            forms.append((tuple(coeffs), rng.integer_between(1, 2)))
        text = "*".join(
            "(" + "+".join(f"{c}*x{i+1}" for i, c in enumerate(cs)) + ")^" + str(m)
            for cs, m in forms
        )
        circuit = parse_expression(text)
        o = CircuitOracle(circuit)
        for _ in range(3):
            point = rng.point(n)
            assert circuit_gradient(circuit, point) == tuple(
                partial_derivative_at(o, i, point) for i in range(n)
            )


# --- degree and homogeneity ---------------------------------------------------


def test_estimate_degree_monomial():
    o = SparsePolyOracle(SparsePoly(2, {(2, 1): 1}))
    o.degree_bound = 5
    assert estimate_degree(o, RandomSource(0, 1000)) == 3


def test_estimate_degree_constant():
    o = SparsePolyOracle(SparsePoly(2, {(0, 0): 7}))
    o.degree_bound = 4
    assert estimate_degree(o, RandomSource(0, 1000)) == 0


def test_estimate_degree_derived_from_expansion():
    # (x1+x2)^3 (x1-x2) expanded by the independent route
    expansion = product_of_linear_forms([((1, 1), 3), ((1, -1), 1)], 2)
    assert expansion.degree() == 4
    o = SparsePolyOracle(expansion)
    o.degree_bound = 10
    assert estimate_degree(o, RandomSource(1, 10000)) == 4


def test_estimate_degree_zero_polynomial():
    o = SparsePolyOracle(SparsePoly.zero(2))
    o.degree_bound = 3
    with pytest.raises(ZeroPolynomial):
        estimate_degree(o, RandomSource(0, 1000))


def test_check_homogeneous_examples():
    rng = RandomSource(4, 1000)
    assert check_homogeneous(
        SparsePolyOracle(SparsePoly(2, {(2, 0): 1, (0, 2): -1})), 2, rng
    )
    assert not check_homogeneous(
        SparsePolyOracle(SparsePoly(2, {(2, 0): 1, (0, 1): 1})), 2, rng
    )
    # x1 x2 (x1 + x2), expanded independently
    expansion = product_of_linear_forms([((1, 0), 1), ((0, 1), 1), ((1, 1), 1)], 2)
    assert check_homogeneous(SparsePolyOracle(expansion), 3, rng)


def test_determinism_fixed_seed():
    def run():
        rng = RandomSource(123, 5000)
        o = f1_oracle()
        d = estimate_degree(o, rng)
        return d, rng.point(4), o.calls

    assert run() == run()


# --- Schwartz-Zippel soundness harness ---------------------------------------


def test_schwartz_zippel_zero_fraction_within_bound():
    degree = 5
    bound = 100 * degree  # |S| >= 100 d
    rng = RandomSource(2024, bound)
    trials = 1000
    zeros = 0
    for _ in range(trials):
        n = rng.integer_between(2, 3)
        terms = {}
        for _ in range(rng.integer_between(1, 4)):
            exps = [0] * n
            total = rng.integer_between(0, degree)
            for _ in range(total):
                exps[rng.integer_between(0, n - 1)] += 1
            terms[tuple(exps)] = rng.integer_between(1, 9)
        poly = SparsePoly(n, terms)
        if poly.is_zero():
            continue
        if poly.evaluate(rng.point(n)) == 0:
            zeros += 1
    p_bound = degree / bound
    sigma = (p_bound * (1 - p_bound) / trials) ** 0.5
    assert zeros / trials <= p_bound + 3 * sigma
