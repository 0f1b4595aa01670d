"""Factorization by identifying the hyperplanes of the zero set.

If f is a product of linear forms its zero set is a union of hyperplanes.
Random lines through a common base point a (with f(a) != 0) intersect
each hyperplane in one point; the intersections are found as the rational
roots of the interpolated line restrictions.  Points lying on a common
hyperplane are grouped with a line-in-zero-set test (one call at a random
parameter, or k-1 deterministic calls), each group of n-1 points spans
the hyperplane whose equation is read off the one-dimensional orthogonal
complement, multiplicities come from the root multiplicities of the first
restriction, and the scale constant from one final call.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    GroupingFailed,
    InconsistentProbes,
    NotSplitOverQ,
    RootFormMismatch,
    VerificationFailed,
    ZeroPolynomial,
)
from .exactmath import (
    RatMatrix,
    UniPoly,
    interpolate_at_integers,
    nullspace,
    rank,
    rational_roots_with_multiplicity,
)
from .forms import Factorization, LinearForm, scale_from_oracle
from .oracle import PolyOracle, RandomSource

MAX_ATTEMPTS = 4


@dataclass(frozen=True)
class LineProbe:
    """One random line and its intersection with the zero set."""

    base: tuple[int, ...]
    direction: tuple[int, ...]
    restriction: UniPoly
    roots: tuple[tuple[Fraction, int], ...]  # (parameter, multiplicity)
    points: tuple[tuple[Fraction, ...], ...]


def _probe_line(
    oracle: PolyOracle, base: Sequence, direction: Sequence, d: int
) -> LineProbe:
    """Interpolate f along base + t*direction and find the rational roots.

    Raises NotSplitOverQ when the restriction has full degree but does
    not split over Q; callers must redraw when the degree drops (the
    direction lies on the zero set).
    """
    values = [
        oracle.evaluate([b + t * v for b, v in zip(base, direction)])
        for t in range(d + 1)
    ]
    restriction = interpolate_at_integers(values)
    roots = tuple(rational_roots_with_multiplicity(restriction)) if not restriction.is_zero() else ()
    if restriction.degree() == d and sum(m for _, m in roots) < d:
        raise NotSplitOverQ(
            "a full-degree line restriction does not split over Q"
        )
    points = tuple(
        tuple(Fraction(b) + t * v for b, v in zip(base, direction)) for t, _ in roots
    )
    return LineProbe(tuple(base), tuple(direction), restriction, roots, points)


def collect_intersection_points(
    oracle: PolyOracle, rng: RandomSource, degree: int | None = None
) -> list[LineProbe]:
    """n-1 probes through one base point, consistent across lines.

    All probes must show the same number of distinct roots with the same
    multiplicity multiset (which determines k); the base and the
    directions are checked linearly independent before probing.
    """
    n = oracle.n_vars
    d = degree if degree is not None else oracle.degree_bound
    for _ in range(MAX_ATTEMPTS):
        base = None
        for _ in range(16):
            candidate = rng.point(n)
            if oracle.evaluate(candidate) != 0:
                base = candidate
                break
        if base is None:
            raise ZeroPolynomial("could not find a base point off the zero set")
        directions = [rng.nonzero_point(n) for _ in range(n - 1)]
        if rank(RatMatrix([list(base)] + [list(v) for v in directions])) != n:
            continue
        probes = []
        degenerate = False
        for v in directions:
            probe = _probe_line(oracle, base, v, d)
            if probe.restriction.degree() != d:
                degenerate = True  # direction on the zero set; redraw
                break
            probes.append(probe)
        if degenerate:
            continue
        counts = {len(p.roots) for p in probes} or {0}
        multisets = {tuple(sorted(m for _, m in p.roots)) for p in probes} or {()}
        if len(counts) != 1 or len(multisets) != 1:
            continue
        return probes
    raise InconsistentProbes("probe lines kept disagreeing after retries")


def _line_in_zero_set(
    oracle: PolyOracle,
    p: Sequence,
    q: Sequence,
    k: int,
    rng: RandomSource,
    deterministic: bool,
) -> bool:
    """Is the line through p and q contained in Z(f)?

    f vanishes at p and q already; the restriction has at most k roots
    unless it is identically zero, so k-1 further zero values certify
    containment.  The default is the single-call variant at one random
    parameter.
    """
    if deterministic:
        ts = range(2, k + 1)
    else:
        while True:
            t = rng.integer()
            if t not in (0, 1):
                break
        ts = (t,)
    for t in ts:
        point = [t * a + (1 - t) * b for a, b in zip(p, q)]
        if oracle.evaluate(point) != 0:
            return False
    return True


def identify_hyperplanes(
    probes: Sequence[LineProbe],
    oracle: PolyOracle,
    rng: RandomSource,
    deterministic_line_test: bool = False,
) -> list[LinearForm]:
    """Group the k(n-1) intersection points into the k hyperplanes.

    Each hyperplane meets every probe line exactly once, so a group is
    one point per probe, gathered by the line-in-zero-set test against
    the group's first point; its span has a one-dimensional orthogonal
    complement, which is the (canonically scaled) linear form.
    """
    k = len(probes[0].roots) if probes else 0
    pool: list[tuple[int, tuple[Fraction, ...]]] = [
        (i, point) for i, probe in enumerate(probes) for point in probe.points
    ]
    forms: list[LinearForm] = []
    while pool:
        i0, p0 = pool.pop(0)
        group = [p0]
        for i in range(len(probes)):
            if i == i0:
                continue
            matches = [
                entry
                for entry in pool
                if entry[0] == i
                and _line_in_zero_set(
                    oracle, p0, entry[1], k, rng, deterministic_line_test
                )
            ]
            if len(matches) != 1:
                raise GroupingFailed(
                    f"point matched {len(matches)} candidates on probe {i}"
                )
            group.append(matches[0][1])
            pool.remove(matches[0])
        kernel = nullspace(RatMatrix(group))
        if len(kernel) != 1:
            raise GroupingFailed("grouped points do not span a hyperplane")
        forms.append(LinearForm(kernel[0]).canonical()[1])
    if len(forms) != k:
        raise GroupingFailed(f"found {len(forms)} hyperplanes, expected {k}")
    return forms


def multiplicities_and_lambda(
    oracle: PolyOracle,
    probe1: LineProbe,
    forms: Sequence[LinearForm],
    rng: RandomSource,
) -> Factorization:
    """Exponents from the first probe's root multiplicities plus the
    scale constant from one oracle call."""
    multiplicities = []
    for form in forms:
        hits = [
            mult
            for (_, mult), point in zip(probe1.roots, probe1.points)
            if form.evaluate(point) == 0
        ]
        if len(hits) != 1:
            raise RootFormMismatch(
                f"form vanishes at {len(hits)} of the first probe's roots"
            )
        multiplicities.append(hits[0])
    factors = tuple(zip(forms, multiplicities))
    scale = scale_from_oracle(oracle, factors, rng)
    return Factorization(scale, factors).canonical()


def factor_hyperplane(
    oracle: PolyOracle,
    rng: RandomSource,
    degree: int | None = None,
    deterministic_line_test: bool = False,
) -> Factorization:
    """Full pipeline with a global retry budget; the output is verified
    against the oracle at one random point."""
    n = oracle.n_vars
    d = degree if degree is not None else oracle.degree_bound
    if d == 0:
        value = oracle.evaluate((0,) * n)
        if value == 0:
            raise ZeroPolynomial("constant zero polynomial")
        return Factorization(value, ())
    if n == 1:
        value = oracle.evaluate((1,))
        if value == 0:
            raise ZeroPolynomial("univariate homogeneous with f(1) = 0")
        return Factorization(value, ((LinearForm((1,)), d),))
    last_error: Exception | None = None
    for _ in range(MAX_ATTEMPTS):
        try:
            probes = collect_intersection_points(oracle, rng, d)
            forms = identify_hyperplanes(
                probes, oracle, rng, deterministic_line_test
            )
            candidate = multiplicities_and_lambda(oracle, probes[0], forms, rng)
        except (GroupingFailed, RootFormMismatch, InconsistentProbes) as exc:
            last_error = exc
            continue
        point = rng.point(n)
        if oracle.evaluate(point) == candidate.evaluate(point):
            return candidate
        last_error = VerificationFailed(
            "random-point check rejected the hyperplane factorization"
        )
    raise last_error if last_error is not None else GroupingFailed("no attempt succeeded")
