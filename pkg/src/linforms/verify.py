"""Independent ground-truth machinery for the factoring algorithms.

Brute-force expansion of form products into sparse polynomials, exact
factorization comparison after canonicalization, randomized oracle
equality, and a seeded instance generator.  Round-trip tests pit each
algorithm's output against these, so nothing here may share code with the
algorithms' own reconstruction paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactmath import RatMatrix, rank
from .forms import Factorization, LinearForm
from .oracle import PolyOracle, ProductOracle, RandomSource
from .sparsepoly import SparsePoly, product_of_linear_forms


def expand_product(fact: Factorization) -> SparsePoly:
    """Multiply out scale * prod form_i^mult_i, exactly."""
    n = fact.n_vars
    if n == 0:
        return SparsePoly(0, {(): fact.scale})
    return product_of_linear_forms(
        [(form.coeffs, mult) for form, mult in fact.factors], n, scale=fact.scale
    )


def factorizations_equivalent(f1: Factorization, f2: Factorization) -> bool:
    """Equality after canonical scaling, merging and sorting."""
    c1, c2 = f1.canonical(), f2.canonical()
    return c1.scale == c2.scale and c1.factors == c2.factors


def oracle_equal(
    o1: PolyOracle, o2: PolyOracle, trials: int, rng: RandomSource
) -> bool:
    """Probabilistic equality: agreement at `trials` random points."""
    if o1.n_vars != o2.n_vars:
        raise ValueError("oracles have different variable counts")
    for _ in range(trials):
        p = rng.point(o1.n_vars)
        if o1.evaluate(p) != o2.evaluate(p):
            return False
    return True


@dataclass(frozen=True)
class InstanceSpec:
    """Parameters for the random product-of-forms generator."""

    n: int
    k: int
    exponent_bound: int = 3
    coefficient_bound: int = 5
    independent: bool = False


def _random_form(spec: InstanceSpec, rng: RandomSource) -> tuple[int, ...]:
    b = spec.coefficient_bound
    while True:
        coeffs = tuple(rng.integer_between(-b, b) for _ in range(spec.n))
        if any(coeffs):
            return coeffs


def _proportional(u: tuple[int, ...], v: tuple[int, ...]) -> bool:
    return all(u[i] * v[j] == u[j] * v[i] for i in range(len(u)) for j in range(len(u)))


def generate_instance(
    spec: InstanceSpec,
    rng: RandomSource,
    exponents: tuple[int, ...] | None = None,
) -> tuple[Factorization, ProductOracle]:
    """Draw k pairwise non-proportional integer forms (invertible matrix
    when independent) plus exponents; return the canonical ground truth
    and a product oracle for it."""
    if spec.independent and spec.k != spec.n:
        raise ValueError("independent instances need k = n")
    if exponents is not None and len(exponents) != spec.k:
        raise ValueError("need one exponent per form")
    while True:
        forms = []
        for _ in range(spec.k):
            for _ in range(200):
                cand = _random_form(spec, rng)
                if not any(_proportional(cand, f) for f in forms):
                    forms.append(cand)
                    break
            else:
                break
        if len(forms) < spec.k:
            continue
        if spec.independent and rank(RatMatrix(forms)) != spec.n:
            continue
        break
    if exponents is None:
        exponents = tuple(
            rng.integer_between(1, spec.exponent_bound) for _ in range(spec.k)
        )
    fact = Factorization(
        Fraction(1),
        tuple((LinearForm(f), m) for f, m in zip(forms, exponents)),
    ).canonical()
    return fact, ProductOracle(fact, n_vars=spec.n)
