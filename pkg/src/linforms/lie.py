"""Computation of the Lie algebra of a polynomial from black-box access.

The Lie algebra g_f of the invariance group of f consists of the matrices
A with sum_{i,j} a_ij x_j df/dx_i = 0, i.e. the linear dependence
relations among the n^2 polynomials x_j df/dx_i.  Those relations are
recovered as the nullspace of the n^2 x n^2 matrix of evaluations at n^2
random points: every true relation lands in that nullspace for any choice
of points, so the computed space can only ever be too large; each
candidate basis member is therefore re-verified at fresh random points
and the draw is repeated in the (rare) degenerate case.

For a sparse-polynomial input the same relations can be read off
deterministically by collecting monomial coefficients
(``lie_algebra_basis_symbolic``), which serves as an independent
reference path in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import RetriesExhausted, ZeroPolynomial
from .exactmath import RatMatrix, nullspace, nullspace_fast, reduced_row_space
from .oracle import PolyOracle, RandomSource, gradient_at
from .sparsepoly import SparsePoly

MAX_BASIS_RETRIES = 4


@dataclass(frozen=True)
class LieBasis:
    """Linearly independent n x n matrices spanning the Lie algebra."""

    n: int
    matrices: tuple[RatMatrix, ...]

    def dimension(self) -> int:
        return len(self.matrices)

    def vectorized(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(
            tuple(x for row in m.data for x in row) for m in self.matrices
        )

    def span_canonical(self) -> tuple[tuple[Fraction, ...], ...]:
        return reduced_row_space(self.vectorized())


def span_equal(a: LieBasis, b: LieBasis) -> bool:
    return a.n == b.n and a.span_canonical() == b.span_canonical()


def _reshape(vector, n: int) -> RatMatrix:
    return RatMatrix([vector[i * n : (i + 1) * n] for i in range(n)])


def verify_lie_member(
    oracle: PolyOracle, b: RatMatrix, rng: RandomSource, trials: int
) -> bool:
    """Check sum_ij b_ij x_j df/dx_i = 0 at `trials` random points.

    Points come from the wide sampling interval so the check keeps its
    error bound even under a small configured sample set.
    """
    n = oracle.n_vars
    for _ in range(trials):
        a = rng.wide_point(n)
        grad = gradient_at(oracle, a)
        ba = b.apply(a)
        if sum((g * v for g, v in zip(grad, ba)), Fraction(0)) != 0:
            return False
    return True


def lie_algebra_basis(
    oracle: PolyOracle, rng: RandomSource, verify_trials: int = 1
) -> LieBasis:
    """Basis of the Lie algebra of the hidden polynomial.

    Draws n^2 random points, evaluates the n^2 products x_j df/dx_i at
    each, and returns the nullspace of the evaluation matrix reshaped to
    n x n matrices.  Candidates are verified at fresh points; a failed
    verification means the points were degenerate and the whole draw is
    retried.
    """
    n = oracle.n_vars
    for _ in range(MAX_BASIS_RETRIES):
        rows = []
        saw_nonzero = False
        for _ in range(n * n):
            a = rng.point(n)
            grad = gradient_at(oracle, a)
            row = [a[j] * grad[i] for i in range(n) for j in range(n)]
            if not saw_nonzero and any(row):
                saw_nonzero = True
            rows.append(row)
        if not saw_nonzero:
            # every x_j df/dx_i vanished: f is constant (or the points were
            # all terrible); the zero polynomial is rejected, a nonzero
            # constant legitimately has the full matrix space below
            if oracle.evaluate(rng.point(n)) == 0 and oracle.evaluate((0,) * n) == 0:
                raise ZeroPolynomial("the black box vanishes everywhere sampled")
        kernel = nullspace_fast(RatMatrix(rows))
        matrices = tuple(_reshape(v, n) for v in kernel)
        if all(verify_lie_member(oracle, m, rng, verify_trials) for m in matrices):
            return LieBasis(n, matrices)
    raise RetriesExhausted("random evaluation points stayed degenerate")


def lie_algebra_basis_symbolic(poly: SparsePoly) -> LieBasis:
    """Deterministic reference path: solve the defining relations by
    collecting monomial coefficients of the x_j df/dx_i."""
    if poly.is_zero():
        raise ZeroPolynomial("symbolic Lie algebra of the zero polynomial")
    n = poly.n_vars
    products = []
    support: set[tuple[int, ...]] = set()
    for i in range(n):
        di = poly.derivative(i)
        for j in range(n):
            p = di * SparsePoly.variable(n, j)
            products.append(p)
            support.update(p.terms)
    monomials = sorted(support)
    rows = [
        [products[col].terms.get(mono, Fraction(0)) for col in range(n * n)]
        for mono in monomials
    ]
    kernel = nullspace(RatMatrix(rows)) if rows else []
    return LieBasis(n, tuple(_reshape(v, n) for v in kernel))
