"""Hyperplane identification: probes, grouping, multiplicities."""

from fractions import Fraction as F

import pytest

from conftest import dependent_instance
from linforms.errors import (
    GroupingFailed,
    NotSplitOverQ,
    RootFormMismatch,
)
from linforms.exactmath import UniPoly
from linforms.forms import Factorization, LinearForm
from linforms.hyper import (
    LineProbe,
    _probe_line,
    collect_intersection_points,
    factor_hyperplane,
    identify_hyperplanes,
    multiplicities_and_lambda,
)
from linforms.oracle import ProductOracle, RandomSource, SparsePolyOracle
from linforms.sparsepoly import SparsePoly
from linforms.verify import expand_product


def triple_form_oracle():
    # x1 x2 (x1 + x2)
    return ProductOracle(
        Factorization(
            1,
            ((LinearForm((1, 0)), 1), (LinearForm((0, 1)), 1), (LinearForm((1, 1)), 1)),
        )
    )


def test_probe_line_fixed_example():
    # f(a + t v) with a = (1,2), v = (1,1) is (1+t)(2+t)(3+2t): expand the
    # restriction independently and compare
    o = triple_form_oracle()
    probe = _probe_line(o, (1, 2), (1, 1), 3)
    expected = UniPoly([1, 1]) * UniPoly([2, 1]) * UniPoly([3, 2])
    assert probe.restriction == expected
    assert probe.roots == ((F(-2), 1), (F(-3, 2), 1), (F(-1), 1))
    assert probe.points == (
        (F(-1), F(0)),
        (F(-1, 2), F(1, 2)),
        (F(0), F(1)),
    )


def test_probe_line_two_roots():
    o = ProductOracle(
        Factorization(1, ((LinearForm((1, 0)), 1), (LinearForm((0, 1)), 1)))
    )
    probe = _probe_line(o, (1, 1), (1, 2), 2)
    assert [t for t, _ in probe.roots] == [F(-1), F(-1, 2)]


def test_probe_line_rejects_irrational():
    o = SparsePolyOracle(SparsePoly(2, {(2, 0): 1, (0, 2): 1}))
    with pytest.raises(NotSplitOverQ):
        _probe_line(o, (1, 2), (1, 1), 2)


def test_collect_consistency_and_counts():
    fact, oracle, rng = dependent_instance(31, 4, 5)
    probes = collect_intersection_points(oracle, rng, fact.degree())
    k = len({form.coeffs for form, _ in fact.factors})
    assert len(probes) == 3  # n - 1
    for probe in probes:
        assert len(probe.roots) == k
        assert sum(m for _, m in probe.roots) == fact.degree()
        for point in probe.points:
            assert oracle.evaluate(point) == 0


def test_identify_singleton_groups_n2():
    o = triple_form_oracle()
    rng = RandomSource(3, 10000)
    probes = collect_intersection_points(o, rng, 3)
    forms = identify_hyperplanes(probes, o, rng)
    assert {f.coeffs for f in forms} == {(F(1), F(0)), (F(0), F(1)), (F(1), F(1))}


def test_identify_coordinate_hyperplanes_n3():
    fact = Factorization(
        1,
        (
            (LinearForm((1, 0, 0)), 1),
            (LinearForm((0, 1, 0)), 1),
            (LinearForm((0, 0, 1)), 1),
        ),
    )
    o = ProductOracle(fact)
    rng = RandomSource(5, 10000)
    probes = collect_intersection_points(o, rng, 3)
    forms = identify_hyperplanes(probes, o, rng)
    assert {f.coeffs for f in forms} == {
        (F(1), F(0), F(0)),
        (F(0), F(1), F(0)),
        (F(0), F(0), F(1)),
    }


def test_identify_rejects_rank_deficient_group():
    # hand-built degenerate probes for x1 x2 x3: the only cross-probe
    # match of (4, 0, 1) is its own multiple (8, 0, 2), so the grouped
    # points span a line instead of a hyperplane and the rank check fires
    fact = Factorization(
        1,
        (
            (LinearForm((1, 0, 0)), 1),
            (LinearForm((0, 1, 0)), 1),
            (LinearForm((0, 0, 1)), 1),
        ),
    )
    o = ProductOracle(fact)
    dummy = UniPoly([1])
    probe_a = LineProbe(
        (1, 1, 1),
        (1, 0, 0),
        dummy,
        ((F(1), 1), (F(2), 1), (F(3), 1)),
        ((F(4), F(0), F(1)), (F(0), F(5), F(1)), (F(2), F(3), F(0))),
    )
    probe_b = LineProbe(
        (1, 1, 1),
        (0, 1, 0),
        dummy,
        ((F(1), 1), (F(2), 1), (F(3), 1)),
        ((F(8), F(0), F(2)), (F(0), F(5), F(1)), (F(5), F(6), F(0))),
    )
    rng = RandomSource(9, 10000)
    with pytest.raises(GroupingFailed):
        identify_hyperplanes([probe_a, probe_b], o, rng)


def test_multiplicities_and_lambda_examples():
    o = triple_form_oracle()
    rng = RandomSource(7, 10000)
    probes = collect_intersection_points(o, rng, 3)
    forms = identify_hyperplanes(probes, o, rng)
    fact = multiplicities_and_lambda(o, probes[0], forms, rng)
    assert fact.scale == 1
    assert all(m == 1 for _, m in fact.factors)


def test_multiplicities_monomial():
    fact_in = Factorization(1, ((LinearForm((1, 0)), 2), (LinearForm((0, 1)), 1)))
    o = ProductOracle(fact_in)
    rng = RandomSource(11, 10000)
    probes = collect_intersection_points(o, rng, 3)
    forms = identify_hyperplanes(probes, o, rng)
    out = multiplicities_and_lambda(o, probes[0], forms, rng)
    assert {(f.coeffs, m) for f, m in out.factors} == {((1, 0), 2), ((0, 1), 1)}
    assert out.scale == 1


def test_multiplicities_scaled_cube():
    # 5 (x1 + x2)^3
    fact_in = Factorization(5, ((LinearForm((1, 1)), 3),))
    o = ProductOracle(fact_in)
    rng = RandomSource(13, 10000)
    probes = collect_intersection_points(o, rng, 3)
    forms = identify_hyperplanes(probes, o, rng)
    out = multiplicities_and_lambda(o, probes[0], forms, rng)
    assert out.scale == 5
    assert out.factors == ((LinearForm((1, 1)), 3),)


def test_multiplicities_rejects_unmatched_form():
    o = triple_form_oracle()
    rng = RandomSource(15, 10000)
    probes = collect_intersection_points(o, rng, 3)
    wrong_form = LinearForm((1, 7))  # vanishes at none of the probe points
    with pytest.raises(RootFormMismatch):
        multiplicities_and_lambda(o, probes[0], [wrong_form], rng)


def test_factor_hyperplane_examples():
    out = factor_hyperplane(triple_form_oracle(), RandomSource(17, 10000))
    assert {f.coeffs for f, _ in out.factors} == {
        (F(1), F(0)),
        (F(0), F(1)),
        (F(1), F(1)),
    }
    o = SparsePolyOracle(SparsePoly(2, {(2, 0): 1, (0, 2): 1}))
    with pytest.raises(NotSplitOverQ):
        factor_hyperplane(o, RandomSource(19, 10000))


def test_factor_hyperplane_round_trip_dependent():
    fact, oracle, rng = dependent_instance(23, 4, 5)
    out = factor_hyperplane(oracle, rng, degree=fact.degree())
    assert expand_product(out) == expand_product(fact)


def test_factor_hyperplane_deterministic_line_test():
    fact, oracle, rng = dependent_instance(27, 4, 6)
    out = factor_hyperplane(
        oracle, rng, degree=fact.degree(), deterministic_line_test=True
    )
    assert expand_product(out) == expand_product(fact)


def test_forms_partition_collected_points():
    # each form vanishes on exactly n-1 collected points; no sharing
    fact, oracle, rng = dependent_instance(29, 4, 4)
    probes = collect_intersection_points(oracle, rng, fact.degree())
    forms = identify_hyperplanes(probes, oracle, rng)
    points = [p for probe in probes for p in probe.points]
    for form in forms:
        assert sum(1 for p in points if form.evaluate(p) == 0) == 3
    for p in points:
        assert sum(1 for form in forms if form.evaluate(p) == 0) == 1


def test_call_count_bound():
    fact, oracle, rng = dependent_instance(33, 5, 8)
    d = fact.degree()
    k = len(fact.factors)
    factor_hyperplane(oracle, rng, degree=d)
    assert oracle.calls <= 8 * (d * 5 + k * k * 5) + 10
