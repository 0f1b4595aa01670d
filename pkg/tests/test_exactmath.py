"""Exact linear algebra and univariate polynomial kernels."""

from fractions import Fraction as F

import pytest

from linforms.errors import IrrationalEigenvalues, NotDiagonalizable
from linforms.exactmath import (
    RatMatrix,
    UniPoly,
    char_poly,
    commute_family,
    eigen_decomposition,
    interpolate_at_integers,
    invert,
    is_diagonalizable_over_closure,
    nullspace,
    rank,
    rational_roots_with_multiplicity,
    reduced_row_space,
    simultaneous_diagonalize,
    solve_unique,
    squarefree_part,
)
from linforms.oracle import RandomSource


def rand_matrix(rng, n, bound=5):
    return RatMatrix(
        [[rng.integer_between(-bound, bound) for _ in range(n)] for _ in range(n)]
    )


# --- UniPoly basics ---------------------------------------------------------


def test_unipoly_arithmetic_roundtrip():
    p = UniPoly([2, -3, 1])  # t^2 - 3t + 2
    q = UniPoly([-1, 1])  # t - 1
    quotient, remainder = p.divmod(q)
    assert remainder.is_zero()
    assert quotient == UniPoly([-2, 1])
    assert q * quotient == p
    assert p(F(1)) == 0 and p(F(2)) == 0 and p(F(3)) == 2


def test_unipoly_zero_handling():
    assert UniPoly([0, 0]).is_zero()
    assert UniPoly([1]).degree() == 0
    with pytest.raises(ValueError):
        UniPoly([]).monic()


def test_interpolate_at_integers():
    p = UniPoly([F(1, 2), 0, -3, 1])
    values = [p(t) for t in range(5)]
    assert interpolate_at_integers(values) == p
    assert interpolate_at_integers([7]) == UniPoly([7])


# --- nullspace / solve ------------------------------------------------------


def test_nullspace_identity_empty():
    assert nullspace(RatMatrix.identity(3)) == []


def test_nullspace_zero_matrix_full():
    basis = nullspace(RatMatrix.zero(2, 2))
    assert basis == [(F(1), F(0)), (F(0), F(1))]


def test_nullspace_rank_one():
    basis = nullspace(RatMatrix([[1, 1], [2, 2]]))
    assert len(basis) == 1
    (v,) = basis
    # spans {(1, -1)} up to scaling
    assert v[0] * (-1) == v[1] * 1


def test_nullspace_vectors_are_exact_kernel_and_independent():
    rng = RandomSource(42, 100)
    for _ in range(25):
        m = RatMatrix(
            [[rng.integer_between(-9, 9) for _ in range(5)] for _ in range(3)]
        )
        basis = nullspace(m)
        for v in basis:
            assert all(x == 0 for x in m.apply(v))
        assert len(basis) == 5 - rank(m)
        if basis:
            assert len(reduced_row_space(basis)) == len(basis)


def test_solve_unique_and_invert():
    m = RatMatrix([[2, 1], [1, 3]])
    x = solve_unique(m, [F(5), F(10)])
    assert m.apply(x) == (F(5), F(10))
    assert m @ invert(m) == RatMatrix.identity(2)
    with pytest.raises(ValueError):
        solve_unique(RatMatrix([[1, 1], [2, 2]]), [1, 2])
    with pytest.raises(ValueError):
        solve_unique(RatMatrix([[1, 1], [2, 2]]), [1, 3])


# --- characteristic polynomial ----------------------------------------------


def test_char_poly_examples():
    assert char_poly(RatMatrix.diagonal([1, 2])) == UniPoly([2, -3, 1])
    assert char_poly(RatMatrix([[0, 1], [1, 0]])) == UniPoly([-1, 0, 1])
    # hand cofactor expansion: det([[-t, 1], [-1, -t]]) = t^2 + 1
    assert char_poly(RatMatrix([[0, 1], [-1, 0]])) == UniPoly([1, 0, 1])


def test_cayley_hamilton_random():
    rng = RandomSource(7, 100)
    for _ in range(30):
        n = rng.integer_between(1, 5)
        m = rand_matrix(rng, n)
        assert char_poly(m).eval_matrix(m).is_zero()


# --- squarefree part and rational roots --------------------------------------


def test_squarefree_part_examples():
    p = UniPoly([-1, 1]) ** 2 * UniPoly([-2, 1])
    assert squarefree_part(p) == UniPoly([-1, 1]) * UniPoly([-2, 1])
    assert squarefree_part(UniPoly([1, 0, 1])) == UniPoly([1, 0, 1])
    assert squarefree_part(UniPoly([F(-1, 2), 1]) ** 3) == UniPoly([F(-1, 2), 1])


def test_rational_roots_simple():
    assert rational_roots_with_multiplicity(UniPoly([2, -3, 1])) == [
        (F(1), 1),
        (F(2), 1),
    ]
    assert rational_roots_with_multiplicity(UniPoly([1, 0, 1])) == []


def test_rational_roots_with_multiplicities_derived():
    # expand (t - 1/2)^2 (t + 3) independently and recover the roots
    p = UniPoly([F(-1, 2), 1]) ** 2 * UniPoly([3, 1])
    assert p == UniPoly([F(3, 4), F(-11, 4), 2, 1])
    assert rational_roots_with_multiplicity(p) == [(F(-3), 1), (F(1, 2), 2)]


def test_rational_roots_zero_root_and_leftover():
    p = UniPoly([0, 0, -1, 1]) * UniPoly([1, 0, 1])  # t^2 (t-1) (t^2+1)
    roots = rational_roots_with_multiplicity(p)
    assert roots == [(F(0), 2), (F(1), 1)]
    quotient = p
    for r, m in roots:
        for _ in range(m):
            quotient, rem = quotient.divmod(UniPoly([-r, 1]))
            assert rem.is_zero()
    assert rational_roots_with_multiplicity(quotient) == []


def test_rational_roots_huge_coefficients():
    # roots with moderate height but ~200-bit polynomial coefficients
    roots = [(F(3, 7), 2), (F(-11, 5), 1), (F(40000), 1)]
    big = 10**40
    p = UniPoly([big])
    for r, m in roots:
        p = p * UniPoly([-r, 1]) ** m
    found = rational_roots_with_multiplicity(p)
    assert found == sorted(roots)


def test_rational_roots_multiplicity_sum_bounded():
    rng = RandomSource(3, 50)
    for _ in range(20):
        coeffs = [rng.integer_between(-6, 6) for _ in range(6)]
        if all(c == 0 for c in coeffs):
            continue
        p = UniPoly(coeffs)
        if p.is_zero() or p.degree() == 0:
            continue
        roots = rational_roots_with_multiplicity(p)
        assert sum(m for _, m in roots) <= p.degree()


# --- diagonalizability ------------------------------------------------------


def test_diagonalizable_over_closure_examples():
    assert not is_diagonalizable_over_closure(RatMatrix([[0, 1], [0, 0]]))
    assert is_diagonalizable_over_closure(RatMatrix([[0, 1], [-1, 0]]))
    assert is_diagonalizable_over_closure(RatMatrix.diagonal([3, 3, -1]))


def test_eigen_decomposition_diagonal():
    dec = eigen_decomposition(RatMatrix.diagonal([2, 1]))
    assert dec.eigenvalues == [(F(1), 1), (F(2), 1)]
    assert invert(dec.transition) @ RatMatrix.diagonal([2, 1]) @ dec.transition == dec.diagonal


def test_eigen_decomposition_swap():
    m = RatMatrix([[0, 1], [1, 0]])
    dec = eigen_decomposition(m)
    assert [v for v, _ in dec.eigenvalues] == [F(-1), F(1)]
    # hand solve: Ker(M - I) = span (1, 1), Ker(M + I) = span (1, -1)
    cols = list(zip(*dec.transition.data))
    assert (F(1), F(-1)) in cols and (F(1), F(1)) in cols


def test_eigen_decomposition_irrational():
    with pytest.raises(IrrationalEigenvalues) as info:
        eigen_decomposition(RatMatrix([[0, 1], [-1, 0]]))
    assert info.value.witness == UniPoly([1, 0, 1])


def test_eigen_decomposition_rejects_nilpotent():
    with pytest.raises(NotDiagonalizable):
        eigen_decomposition(RatMatrix([[0, 1], [0, 0]]))


def test_eigen_decomposition_repeated_eigenvalue():
    # conjugate diag(2, 2, 5) by an invertible integer matrix
    p = RatMatrix([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    m = p @ RatMatrix.diagonal([2, 2, 5]) @ invert(p)
    dec = eigen_decomposition(m)
    assert dec.eigenvalues == [(F(2), 2), (F(5), 1)]
    assert invert(dec.transition) @ m @ dec.transition == dec.diagonal


# --- commuting families -----------------------------------------------------


def test_commute_family_examples():
    assert commute_family([RatMatrix.diagonal([1, 2]), RatMatrix.diagonal([3, 4])])
    assert not commute_family(
        [RatMatrix([[0, 1], [0, 0]]), RatMatrix([[0, 0], [1, 0]])]
    )
    assert commute_family([RatMatrix([[0, 1], [1, 0]]), RatMatrix.identity(2)])


def test_simultaneous_diagonalize_single_diagonal():
    rng = RandomSource(1, 100)
    t = simultaneous_diagonalize([RatMatrix.diagonal([1, -1])], rng)
    # identity up to column order (eigenvalues are reported sorted)
    assert sorted(t.data) == sorted(RatMatrix.identity(2).data)
    assert (invert(t) @ RatMatrix.diagonal([1, -1]) @ t).is_diagonal()


def test_simultaneous_diagonalize_single_swap():
    rng = RandomSource(1, 100)
    t = simultaneous_diagonalize([RatMatrix([[0, 1], [1, 0]])], rng)
    ti = invert(t)
    assert (ti @ RatMatrix([[0, 1], [1, 0]]) @ t).is_diagonal()
    cols = list(zip(*t.data))
    assert (F(1), F(1)) in cols and (F(1), F(-1)) in cols


def test_simultaneous_diagonalize_family():
    rng = RandomSource(17, 1000)
    for trial in range(20):
        n = rng.integer_between(2, 5)
        # random conjugated diagonal family shares one eigenbasis
        while True:
            p = rand_matrix(rng, n, 4)
            if rank(p) == n:
                break
        pinv = invert(p)
        family = [
            p @ RatMatrix.diagonal([rng.integer_between(-4, 4) for _ in range(n)]) @ pinv
            for _ in range(3)
        ]
        t = simultaneous_diagonalize(family, rng)
        ti = invert(t)
        for b in family:
            assert (ti @ b @ t).is_diagonal()


def test_simultaneous_diagonalize_already_diagonal_family():
    rng = RandomSource(5, 1000)
    family = [RatMatrix.diagonal([1, 1, -2]), RatMatrix.diagonal([1, -2, 1])]
    t = simultaneous_diagonalize(family, rng)
    ti = invert(t)
    for b in family:
        assert (ti @ b @ t).is_diagonal()
