"""Factorization into products of linearly independent linear forms.

A homogeneous f equals scale * l_1^a_1 ... l_n^a_n with linearly
independent forms exactly when its Lie algebra looks like that of a
monomial: dimension n-1, commuting, diagonalizable over the closure (and
all traces zero in the equal-exponent case).  The first three steps
decide existence purely algebraically; the computation itself then
simultaneously diagonalizes the basis and reads the forms off the rows of
the inverse transition matrix.  Exponents come from the orthogonal of the
diagonalized algebra, or independently from the eigenvalues of the
distinguished centralizer element with trace d.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    IrrationalEigenvalues,
    NonIntegralExponents,
    SystemNotUnique,
    VerificationFailed,
    ZeroPolynomial,
)
from .exactmath import (
    RatMatrix,
    UniPoly,
    char_poly,
    commute_family,
    invert,
    is_diagonalizable_over_closure,
    nullspace,
    nullspace_fast,
    rank,
    rational_roots_with_multiplicity,
    reduced_row_space,
    simultaneous_diagonalize,
)
from .forms import Factorization, LinearForm, scale_from_oracle
from .lie import LieBasis, lie_algebra_basis
from .oracle import PolyOracle, RandomSource, TransformedOracle, gradient_at

# rejection reasons, in the order the checks run
DIMENSION = "dimension"
COMMUTATION = "commutation"
DIAGONALIZABILITY = "diagonalizability"
TRACE = "trace"


@dataclass(frozen=True)
class FactoredOverQ:
    factorization: Factorization


@dataclass(frozen=True)
class ExistsOverClosure:
    """A factorization exists over the algebraic closure but not over Q;
    ``witness`` is the irrational eigenvalue factor that blocks it."""

    witness: UniPoly


@dataclass(frozen=True)
class NotProduct:
    reason: str


FactorOutcome = FactoredOverQ | ExistsOverClosure | NotProduct


@dataclass(frozen=True)
class OrbitDecision:
    member: bool
    reason: str | None = None
    basis: LieBasis | None = None


def _structure_checks(
    basis: LieBasis, n: int, require_trace_zero: bool
) -> str | None:
    """Return the failed check, or None when all pass."""
    if basis.dimension() != n - 1:
        return DIMENSION
    if not commute_family(basis.matrices):
        return COMMUTATION
    if not all(is_diagonalizable_over_closure(b) for b in basis.matrices):
        return DIAGONALIZABILITY
    if require_trace_zero and not all(b.trace() == 0 for b in basis.matrices):
        return TRACE
    return None


def decide_orbit_membership(
    oracle: PolyOracle, equal_exponents: bool, rng: RandomSource
) -> OrbitDecision:
    """Existence of a suitable factorization over the closure, decided
    without computing any eigenvalue or factorization."""
    basis = lie_algebra_basis(oracle, rng)
    reason = _structure_checks(basis, oracle.n_vars, equal_exponents)
    if reason is not None:
        return OrbitDecision(False, reason, basis)
    return OrbitDecision(True, None, basis)


def _scale_constant(
    oracle: PolyOracle, forms: Sequence[LinearForm], exponents: Sequence[int], rng: RandomSource
) -> Fraction:
    return scale_from_oracle(oracle, tuple(zip(forms, exponents)), rng)


def _factor_via_diagonalization(
    oracle: PolyOracle,
    rng: RandomSource,
    equal_exponents: bool,
    degree: int | None,
) -> FactorOutcome:
    n = oracle.n_vars
    d = degree if degree is not None else oracle.degree_bound
    decision = decide_orbit_membership(oracle, equal_exponents, rng)
    if not decision.member:
        return NotProduct(decision.reason)
    basis = decision.basis
    if n == 1:
        form = LinearForm((Fraction(1),))
        scale = _scale_constant(oracle, [form], [d], rng)
        return FactoredOverQ(Factorization(scale, ((form, d),)).canonical())
    try:
        t = simultaneous_diagonalize(basis.matrices, rng)
    except IrrationalEigenvalues as exc:
        return ExistsOverClosure(exc.witness)
    a = invert(t)
    if equal_exponents:
        alpha = [d // n] * n
    else:
        diagonals = [(a @ b @ t).diagonal_entries() for b in basis.matrices]
        kernel = nullspace(RatMatrix(diagonals))
        if len(kernel) != 1:
            raise SystemNotUnique(
                f"diagonalized algebra has orthogonal of dimension {len(kernel)}"
            )
        direction = kernel[0]
        total = sum(direction, Fraction(0))
        if total == 0:
            raise NonIntegralExponents(direction)
        alpha_vec = [x * d / total for x in direction]
        if any(x.denominator != 1 or x <= 0 for x in alpha_vec):
            raise NonIntegralExponents(tuple(alpha_vec))
        alpha = [int(x) for x in alpha_vec]
    forms = [LinearForm(a.row(i)) for i in range(n)]
    scale = _scale_constant(oracle, forms, alpha, rng)
    fact = Factorization(scale, tuple(zip(forms, alpha))).canonical()
    return FactoredOverQ(fact)


def factor_equal_exponents(
    oracle: PolyOracle, rng: RandomSource, degree: int | None = None
) -> FactorOutcome:
    """Factor f = scale * (l_1 ... l_n)^a with independent forms.

    Requires n | deg f; rejection reasons follow the structure checks,
    including the trace-zero test specific to equal exponents.
    """
    d = degree if degree is not None else oracle.degree_bound
    if oracle.n_vars == 0 or d % oracle.n_vars != 0:
        raise ValueError("degree must be a multiple of the variable count")
    return _factor_via_diagonalization(oracle, rng, True, d)


def factor_independent_forms(
    oracle: PolyOracle, rng: RandomSource, degree: int | None = None
) -> FactorOutcome:
    """Factor f = scale * l_1^a_1 ... l_n^a_n with independent forms and
    exponents determined by the algorithm (all must come out as positive
    integers)."""
    return _factor_via_diagonalization(oracle, rng, False, degree)


def exponents_via_centralizer(basis: LieBasis, d: int) -> tuple[Fraction, ...]:
    """Exponent multiset from the centralizer, without diagonalizing.

    Solves the linear system Tr H = d, Tr(H B_i) = 0, H B_i = B_i H in
    the n^2 entries of H; the eigenvalues of the unique solution are the
    exponents, returned sorted with repetition.

    The (overdetermined) system is solved as the kernel of the augmented
    matrix [A | -b]: a unique solution corresponds to a one-dimensional
    kernel whose last coordinate is nonzero.
    """
    n = basis.n
    width = n * n + 1
    rows: list[list[Fraction]] = []

    def h_index(r: int, c: int) -> int:
        return r * n + c

    # Tr H = d
    row = [Fraction(0)] * width
    for i in range(n):
        row[h_index(i, i)] = Fraction(1)
    row[-1] = Fraction(-d)
    rows.append(row)
    for b in basis.matrices:
        # Tr(H B) = sum_{r,c} H[r][c] B[c][r] = 0
        row = [Fraction(0)] * width
        for r in range(n):
            for c in range(n):
                row[h_index(r, c)] = b.data[c][r]
        rows.append(row)
        # (H B - B H)[r][c] = sum_k H[r][k] B[k][c] - B[r][k] H[k][c] = 0
        for r in range(n):
            for c in range(n):
                row = [Fraction(0)] * width
                for k in range(n):
                    row[h_index(r, k)] += b.data[k][c]
                    row[h_index(k, c)] -= b.data[r][k]
                if any(row):
                    rows.append(row)
    kernel = nullspace_fast(RatMatrix(rows))
    if len(kernel) != 1 or kernel[0][-1] == 0:
        raise SystemNotUnique(
            f"augmented centralizer system has kernel dimension {len(kernel)}"
        )
    vec = kernel[0]
    solution = [x / vec[-1] for x in vec[:-1]]
    h = RatMatrix([solution[i * n : (i + 1) * n] for i in range(n)])
    roots = rational_roots_with_multiplicity(char_poly(h))
    total = sum(m for _, m in roots)
    if total != n:
        witness = char_poly(h)
        for r, m in roots:
            witness = witness // (UniPoly((-r, 1)) ** m)
        raise IrrationalEigenvalues(witness.monic())
    out: list[Fraction] = []
    for value, mult in roots:
        out.extend([value] * mult)
    return tuple(sorted(out))


def essential_variables_reduce(
    oracle: PolyOracle, rng: RandomSource
) -> tuple[RatMatrix, int, PolyOracle]:
    """Invertible change of variables after which f depends only on its
    first r coordinates, r = rank of the span of gradients.

    Returns (A, r, oracle for g(y) = f(A^-1 y)); the reduced oracle is
    checked probabilistically to ignore its last n - r coordinates.
    """
    n = oracle.n_vars
    gradients: list[tuple] = []
    stable = 0
    current_rank = 0
    while stable < 2 and len(gradients) < n + 2:
        gradients.append(gradient_at(oracle, rng.point(n)))
        r = rank(RatMatrix(gradients))
        if r == current_rank:
            stable += 1
        else:
            current_rank = r
            stable = 0
    if current_rank == 0:
        if oracle.evaluate(rng.point(n)) == 0 and oracle.evaluate((0,) * n) == 0:
            raise ZeroPolynomial("zero gradient and zero values")
    basis_rows = [list(row) for row in reduced_row_space(gradients)]
    r = len(basis_rows)
    # complete to an invertible matrix with standard basis rows
    rows = list(basis_rows)
    for j in range(n):
        if len(rows) == n:
            break
        candidate = [Fraction(1) if i == j else Fraction(0) for i in range(n)]
        if rank(RatMatrix(rows + [candidate])) > len(rows):
            rows.append(candidate)
    a = RatMatrix(rows)
    reduced = TransformedOracle(oracle, invert(a))
    for _ in range(4):
        base = rng.point(n)
        tail = list(base)
        for i in range(r, n):
            tail[i] = rng.integer()
        if reduced.evaluate(base) != reduced.evaluate(tail):
            raise VerificationFailed(
                "reduced oracle still depends on a trailing coordinate"
            )
    return a, r, reduced
