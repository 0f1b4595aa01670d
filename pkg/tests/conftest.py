"""Shared corpus builders for the test suite.

All randomness is seeded through RandomSource so every test is
reproducible bit for bit.
"""

from __future__ import annotations

from linforms.forms import Factorization
from linforms.oracle import ProductOracle, RandomSource
from linforms.verify import InstanceSpec, generate_instance


def independent_instance(
    seed: int, n: int, max_total_degree: int = 12, sample_bound: int = 512
) -> tuple[Factorization, ProductOracle, RandomSource]:
    """One product of n independent integer forms with exponent sum <= 12.

    Returns the canonical ground truth, a fresh product oracle and the
    (already advanced) random source for the algorithm under test.
    """
    rng = RandomSource(seed, sample_bound)
    extra = rng.integer_between(0, max(0, max_total_degree - n))
    exponents = [1] * n
    for _ in range(extra):
        exponents[rng.integer_between(0, n - 1)] += 1
    spec = InstanceSpec(n=n, k=n, coefficient_bound=5, independent=True)
    fact, oracle = generate_instance(spec, rng, exponents=tuple(exponents))
    return fact, oracle, rng


def dependent_instance(
    seed: int,
    n: int,
    k: int,
    max_total_degree: int = 12,
    sample_bound: int = 4096,
) -> tuple[Factorization, ProductOracle, RandomSource]:
    """One product of k pairwise non-proportional forms, degree <= 12."""
    rng = RandomSource(seed, sample_bound)
    extra = rng.integer_between(0, max(0, max_total_degree - k))
    exponents = [1] * k
    for _ in range(extra):
        exponents[rng.integer_between(0, k - 1)] += 1
    spec = InstanceSpec(n=n, k=k, coefficient_bound=5, independent=False)
    fact, oracle = generate_instance(spec, rng, exponents=tuple(exponents))
    return fact, oracle, rng
