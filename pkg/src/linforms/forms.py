"""Linear forms, factorizations and their canonical form.

A factorization is a nonzero scale constant together with (form,
multiplicity) pairs.  Outputs of the three factoring algorithms are only
defined up to permutation of the factors and rescaling of each form, so a
single canonicalization is shared by everything that needs to compare
results: each form is scaled so its first nonzero coefficient is 1 (the
scale moves into the constant), proportional forms are merged, and
factors are sorted lexicographically by coefficient vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class LinearForm:
    """A homogeneous degree-1 polynomial sum_i coeffs[i] * x_{i+1}."""

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Sequence):
        cs = tuple(_as_fraction(c) for c in coeffs)
        if all(c == 0 for c in cs):
            raise ValueError("zero linear form")
        object.__setattr__(self, "coeffs", cs)

    @property
    def n_vars(self) -> int:
        return len(self.coeffs)

    def evaluate(self, point: Sequence):
        return sum((c * x for c, x in zip(self.coeffs, point) if c != 0), Fraction(0))

    def canonical(self) -> tuple[Fraction, "LinearForm"]:
        """(scale, unit form) with the first nonzero coefficient 1."""
        for c in self.coeffs:
            if c != 0:
                return c, LinearForm(tuple(x / c for x in self.coeffs))
        raise AssertionError("unreachable: zero form")

    def __str__(self) -> str:
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            parts.append(f"{c}*x{i+1}" if c != 1 else f"x{i+1}")
        return " + ".join(parts)


@dataclass(frozen=True)
class Factorization:
    """scale * prod_i form_i ^ multiplicity_i."""

    scale: Fraction
    factors: tuple[tuple[LinearForm, int], ...]

    def __init__(self, scale, factors: Sequence[tuple[LinearForm, int]]):
        s = _as_fraction(scale)
        if s == 0:
            raise ValueError("zero scale constant")
        fs = tuple((form, int(mult)) for form, mult in factors)
        if any(mult < 1 for _, mult in fs):
            raise ValueError("multiplicities must be >= 1")
        object.__setattr__(self, "scale", s)
        object.__setattr__(self, "factors", fs)

    @property
    def n_vars(self) -> int:
        return self.factors[0][0].n_vars if self.factors else 0

    def degree(self) -> int:
        return sum(mult for _, mult in self.factors)

    def evaluate(self, point: Sequence):
        value = self.scale
        for form, mult in self.factors:
            value = value * form.evaluate(point) ** mult
        return value

    def canonical(self) -> "Factorization":
        """Scale each form to leading coefficient 1, merge proportional
        forms, sort factors lexicographically."""
        merged: dict[tuple[Fraction, ...], int] = {}
        scale = self.scale
        for form, mult in self.factors:
            c, unit = form.canonical()
            scale *= c**mult
            key = unit.coeffs
            merged[key] = merged.get(key, 0) + mult
        ordered = sorted(merged.items(), key=lambda kv: (kv[0], kv[1]))
        return Factorization(scale, tuple((LinearForm(k), m) for k, m in ordered))

    def __str__(self) -> str:
        factors = " * ".join(
            f"({form})^{mult}" if mult > 1 else f"({form})" for form, mult in self.factors
        )
        return f"{self.scale} * {factors}" if factors else str(self.scale)


def scale_from_oracle(oracle, factors: Sequence[tuple[LinearForm, int]], rng) -> Fraction:
    """The constant making oracle = scale * prod form^mult: one oracle
    call at a point where no form vanishes (all-ones first, then random
    points)."""
    n = oracle.n_vars
    product = Factorization(1, factors) if factors else None
    for attempt in range(33):
        point = (1,) * n if attempt == 0 else rng.point(n)
        denom = product.evaluate(point) if product else Fraction(1)
        if denom != 0:
            return Fraction(oracle.evaluate(point)) / denom
    raise ValueError("could not find a point avoiding all forms")
