"""Factorization from bivariate projections.

The input (after a random change of variables for n >= 4, or directly in
small dimension) is projected to n - 2 bivariate polynomials
g_j(x1, xj) = f(x1, 0, .., xj, .., 0, 1), each recovered densely by
interpolation on a (d+1) x (d+1) integer grid and factored into affine
factors a*x1 + b*xj + 1.  Under the genericity produced by the random
change of variables the x1-coefficients are distinct and nonzero, so
sorting by them aligns the factors across projections and the
n-variate forms can be reassembled coordinate by coordinate.

The affine factoring itself intersects two probe lines with the zero set
(rational root finding on the restrictions), groups intersection points
that lie on a common zero line via a midpoint evaluation, and certifies
the candidate factorization by exact re-expansion, so no probabilistic
error can leak out of this step.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import (
    InconsistentProjections,
    NotAffineProduct,
    VerificationFailed,
    ZeroPolynomial,
)
from .exactmath import (
    RatMatrix,
    UniPoly,
    interpolate_at_integers,
    invert,
    rank,
    rational_roots_with_multiplicity,
)
from .forms import Factorization, LinearForm
from .oracle import PolyOracle, RandomSource, TransformedOracle

MAX_ATTEMPTS = 4


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class BivariatePoly:
    """Dense bivariate polynomial; coeffs[a][b] multiplies x^a y^b."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Sequence]):
        self.coeffs = tuple(tuple(_as_fraction(c) for c in row) for row in coeffs)

    @classmethod
    def zero(cls, size: int) -> "BivariatePoly":
        return cls([[0] * size for _ in range(size)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, BivariatePoly):
            return NotImplemented
        return self._trimmed() == other._trimmed()

    def __hash__(self):
        return hash(self._trimmed())

    def _trimmed(self) -> tuple:
        out = []
        for a, row in enumerate(self.coeffs):
            for b, c in enumerate(row):
                if c != 0:
                    out.append((a, b, c))
        return tuple(out)

    def is_zero(self) -> bool:
        return not self._trimmed()

    def total_degree(self) -> int:
        return max((a + b for a, b, _ in self._trimmed()), default=-1)

    def constant_term(self) -> Fraction:
        return self.coeffs[0][0] if self.coeffs else Fraction(0)

    def evaluate(self, x, y) -> Fraction:
        # Horner in x, inner Horner in y
        acc = Fraction(0)
        for row in reversed(self.coeffs):
            inner = Fraction(0)
            for c in reversed(row):
                inner = inner * y + c
            acc = acc * x + inner
        return acc

    def top_form_value(self, ex, ey) -> Fraction:
        """Leading homogeneous part evaluated at a direction."""
        d = self.total_degree()
        total = Fraction(0)
        for a, b, c in self._trimmed():
            if a + b == d:
                total += c * _as_fraction(ex) ** a * _as_fraction(ey) ** b
        return total

    def restrict_line(self, base: tuple, direction: tuple) -> UniPoly:
        """Univariate restriction t -> self(base + t*direction)."""
        bx, by = _as_fraction(base[0]), _as_fraction(base[1])
        ex, ey = _as_fraction(direction[0]), _as_fraction(direction[1])
        size = len(self.coeffs)
        xpow = [UniPoly.constant(1)]
        ypow = [UniPoly.constant(1)]
        lx = UniPoly((bx, ex))
        ly = UniPoly((by, ey))
        for _ in range(size - 1):
            xpow.append(xpow[-1] * lx)
            ypow.append(ypow[-1] * ly)
        out = UniPoly()
        for a, b, c in self._trimmed():
            out = out + (xpow[a] * ypow[b]).scale(c)
        return out

    def shift(self, cx, cy) -> "BivariatePoly":
        """self(x + cx, y + cy), exact."""
        cx, cy = _as_fraction(cx), _as_fraction(cy)
        size = len(self.coeffs)
        # shift in y first, row by row
        rows = []
        for row in self.coeffs:
            p = UniPoly(row)
            rows.append(_unipoly_shift(p, cy, size))
        # now shift in x: accumulate (x + cx)^a over rows
        out = [[Fraction(0)] * size for _ in range(size)]
        xsh = [UniPoly.constant(1)]
        base = UniPoly((cx, 1))
        for _ in range(size - 1):
            xsh.append(xsh[-1] * base)
        for a, row in enumerate(rows):
            xs = xsh[a].coeffs
            for i, ci in enumerate(xs):
                if ci:
                    for b, cb in enumerate(row):
                        if cb:
                            out[i][b] += ci * cb
        return BivariatePoly(out)

    def mul(self, other: "BivariatePoly", size: int) -> "BivariatePoly":
        out = [[Fraction(0)] * size for _ in range(size)]
        for a1, b1, c1 in self._trimmed():
            for a2, b2, c2 in other._trimmed():
                out[a1 + a2][b1 + b2] += c1 * c2
        return BivariatePoly(out)


def _unipoly_shift(p: UniPoly, c: Fraction, size: int) -> list[Fraction]:
    """Coefficients of p(t + c), padded to `size`."""
    out = [Fraction(0)] * size
    if p.is_zero():
        return out
    shifted = UniPoly()
    power = UniPoly.constant(1)
    base = UniPoly((c, 1))
    for coeff in p.coeffs:
        if coeff:
            shifted = shifted + power.scale(coeff)
        power = power * base
    for i, coeff in enumerate(shifted.coeffs):
        out[i] = coeff
    return out


@dataclass(frozen=True)
class AffineFactorization:
    """scale * prod (a_i x + b_i y + 1)^{e_i} for a bivariate polynomial."""

    scale: Fraction
    factors: tuple[tuple[Fraction, Fraction, int], ...]

    def expand(self, size: int) -> BivariatePoly:
        grid = [[Fraction(0)] * size for _ in range(size)]
        grid[0][0] = self.scale
        poly = BivariatePoly(grid)
        for a, b, e in self.factors:
            lin = [[Fraction(0)] * size for _ in range(size)]
            lin[0][0] = Fraction(1)
            lin[1][0] = a
            lin[0][1] = b
            linear = BivariatePoly(lin)
            for _ in range(e):
                poly = poly.mul(linear, size)
        return poly


def interpolate_grid(eval_at: Callable[[int, int], object], d: int) -> BivariatePoly:
    """Dense coefficients from values on {0..d} x {0..d}.

    Successive univariate interpolation: rows over y, then columns over x;
    exactly (d+1)^2 evaluations.
    """
    size = d + 1
    row_polys = []
    for x in range(size):
        values = [eval_at(x, y) for y in range(size)]
        p = interpolate_at_integers(values)
        row = list(p.coeffs) + [Fraction(0)] * (size - len(p.coeffs))
        row_polys.append(row)
    coeffs = [[Fraction(0)] * size for _ in range(size)]
    for b in range(size):
        column = [row_polys[x][b] for x in range(size)]
        q = interpolate_at_integers(column)
        for a, c in enumerate(q.coeffs):
            coeffs[a][b] = c
    return BivariatePoly(coeffs)


def project_bivariate(oracle: PolyOracle, j: int, d: int) -> BivariatePoly:
    """Dense g_j(x1, xj) = f(x1, 0, ..., xj, ..., 0, 1) by interpolation.

    `j` is the 1-based variable index, 2 <= j <= n-1.
    """
    n = oracle.n_vars
    if not 2 <= j <= n - 1:
        raise ValueError("projection variable out of range")

    def eval_at(x: int, y: int):
        point = [0] * n
        point[0] = x
        point[j - 1] = y
        point[n - 1] = 1
        return oracle.evaluate(point)

    return interpolate_grid(eval_at, d)


def factor_bivariate_affine(
    g: BivariatePoly, rng: RandomSource | None = None
) -> AffineFactorization:
    """Factor g into affine factors with constant term 1, exactly.

    Requires g(0,0) != 0.  Intersects two probe lines with the zero set,
    identifies common zero lines by a midpoint evaluation, reads
    multiplicities off the root multiplicities and certifies the result
    by exact expansion.  Raises NotAffineProduct when g is not a product
    of rational affine forms.
    """
    if g.constant_term() == 0:
        raise ValueError("constant term must be nonzero")
    if rng is None:
        rng = RandomSource(0x05EC0FF, 1 << 16)
    d = g.total_degree()
    size = len(g.coeffs)
    if d <= 0:
        return AffineFactorization(g.constant_term(), ())

    def draw_probe():
        while True:
            direction = (rng.nonzero_integer(), rng.integer())
            if g.top_form_value(*direction) != 0:
                base = (rng.integer(), rng.integer())
                return base, direction

    last_error: Exception = NotAffineProduct("no probe attempt succeeded")
    for _ in range(MAX_ATTEMPTS):
        probes = []
        ok = True
        for _ in range(2):
            base, direction = draw_probe()
            restriction = g.restrict_line(base, direction)
            roots = rational_roots_with_multiplicity(restriction)
            if sum(m for _, m in roots) < restriction.degree():
                raise NotAffineProduct(
                    "a degree-preserving line restriction does not split over Q"
                )
            points = [
                (
                    (base[0] + t * direction[0], base[1] + t * direction[1]),
                    mult,
                )
                for t, mult in roots
            ]
            probes.append(points)
        pts1, pts2 = probes
        if len(pts1) != len(pts2) or sorted(m for _, m in pts1) != sorted(
            m for _, m in pts2
        ):
            last_error = NotAffineProduct("probe root patterns disagree")
            continue
        factors: list[tuple[Fraction, Fraction, int]] = []
        for p, mult in pts1:
            matches = [
                q
                for q, mq in pts2
                if mq == mult
                and g.evaluate((p[0] + q[0]) / 2, (p[1] + q[1]) / 2) == 0
            ]
            if len(matches) != 1:
                ok = False
                break
            q = matches[0]
            det = p[0] * q[1] - p[1] * q[0]
            if det == 0:
                ok = False
                break
            a = Fraction(p[1] - q[1], 1) / det
            b = Fraction(q[0] - p[0], 1) / det
            factors.append((a, b, mult))
        if not ok:
            last_error = NotAffineProduct("could not pair intersection points")
            continue
        if len({(a, b) for a, b, _ in factors}) != len(factors):
            last_error = NotAffineProduct("coincident candidate lines")
            continue
        candidate = AffineFactorization(g.constant_term(), tuple(factors))
        if candidate.expand(size) == g:
            return candidate
        last_error = NotAffineProduct("candidate expansion mismatch")
    raise last_error


def merge_projections(
    factorizations: Sequence[AffineFactorization],
) -> Factorization:
    """Reassemble the n-variate factorization from the n-2 projections.

    Valid when the x1-coefficients are distinct and nonzero and every
    x_n-coefficient is 1 (the situation produced by the random change of
    variables); everything else raises InconsistentProjections.
    """
    if not factorizations:
        raise ValueError("need at least one projection")
    n = len(factorizations) + 2
    k = len(factorizations[0].factors)
    if any(len(af.factors) != k for af in factorizations):
        raise InconsistentProjections("factor counts differ across projections")
    if len({af.scale for af in factorizations}) != 1:
        raise InconsistentProjections("scale constants differ across projections")
    if k == 0:
        return Factorization(factorizations[0].scale, ())
    ordered = []
    for af in factorizations:
        fs = sorted(af.factors, key=lambda f: f[0])
        a_values = [f[0] for f in fs]
        if any(a == 0 for a in a_values) or len(set(a_values)) != k:
            raise InconsistentProjections("x1-coefficients not distinct and nonzero")
        ordered.append(fs)
    reference = [(f[0], f[2]) for f in ordered[0]]
    for fs in ordered[1:]:
        if [(f[0], f[2]) for f in fs] != reference:
            raise InconsistentProjections(
                "x1-coefficient or exponent tuples disagree"
            )
    forms = []
    for i in range(k):
        coeffs = [Fraction(0)] * n
        coeffs[0] = ordered[0][i][0]
        for pos, fs in enumerate(ordered):
            coeffs[pos + 1] = fs[i][1]
        coeffs[n - 1] = Fraction(1)
        forms.append((LinearForm(coeffs), ordered[0][i][2]))
    return Factorization(factorizations[0].scale, tuple(forms))


def _verify_candidate(
    oracle: PolyOracle, candidate: Factorization, rng: RandomSource
) -> bool:
    point = rng.point(oracle.n_vars)
    return oracle.evaluate(point) == candidate.evaluate(point)


def _factor_univariate_homogeneous(
    oracle: PolyOracle, d: int, rng: RandomSource
) -> Factorization:
    """n = 2: read the factorization off the rational roots of f(t, 1)."""
    values = [oracle.evaluate((t, 1)) for t in range(d + 1)]
    u = interpolate_at_integers(values)
    if u.is_zero():
        raise ZeroPolynomial("f(t, 1) is identically zero")
    roots = rational_roots_with_multiplicity(u)
    m = u.degree()
    if sum(mult for _, mult in roots) < m:
        raise NotAffineProduct("f(t, 1) does not split over Q")
    factors = [(LinearForm((Fraction(1), -r)), mult) for r, mult in roots]
    if d - m > 0:
        factors.append((LinearForm((Fraction(0), Fraction(1))), d - m))
    return Factorization(u.leading(), tuple(factors)).canonical()


def _factor_trivariate(
    oracle: PolyOracle, d: int, rng: RandomSource
) -> Factorization:
    """n = 3: dehomogenize to g(x1, x2) = f(x1, x2, 1), random-shift so the
    constant term is nonzero, factor, shift back and rehomogenize with the
    missing power of x3."""
    g = interpolate_grid(
        lambda x, y: oracle.evaluate((x, y, 1)), d
    )
    if g.is_zero():
        raise ZeroPolynomial("f(x1, x2, 1) is identically zero")
    big = g.total_degree()
    if big == 0:
        # f = lam * x3^d
        return Factorization(
            g.constant_term(), ((LinearForm((0, 0, 1)), d),)
        ).canonical()
    shift = (0, 0)
    for _ in range(64):
        if g.evaluate(*shift) != 0:
            break
        shift = (rng.integer(), rng.integer())
    else:
        raise NotAffineProduct("could not find a nonvanishing shift point")
    h = g.shift(*shift)
    af = factor_bivariate_affine(h, rng)
    factors = []
    for a, b, e in af.factors:
        const = 1 - a * shift[0] - b * shift[1]
        factors.append((LinearForm((a, b, const)), e))
    if d - big > 0:
        factors.append((LinearForm((0, 0, 1)), d - big))
    return Factorization(af.scale, tuple(factors)).canonical()


def factor_general(
    oracle: PolyOracle, rng: RandomSource, degree: int | None = None
) -> Factorization:
    """Factor a homogeneous f into a product of (possibly dependent)
    linear forms over Q, or raise.

    For n <= 3 the problem is solved directly after dehomogenization; for
    n >= 4 a random invertible change of variables enforces the
    genericity needed for unique lifting, the projection pipeline runs on
    the composed oracle, and the result is pulled back and verified at a
    random point.
    """
    n = oracle.n_vars
    d = degree if degree is not None else oracle.degree_bound
    if d == 0:
        value = oracle.evaluate((0,) * n)
        if value == 0:
            raise ZeroPolynomial("constant zero polynomial")
        return Factorization(value, ())
    if n == 1:
        lam = oracle.evaluate((1,))
        if lam == 0:
            raise ZeroPolynomial("univariate homogeneous with f(1) = 0")
        out = Factorization(lam, ((LinearForm((1,)), d),))
    elif n == 2:
        out = _factor_univariate_homogeneous(oracle, d, rng)
    elif n == 3:
        out = _factor_trivariate(oracle, d, rng)
    else:
        out = _factor_multivariate(oracle, d, rng)
    if not _verify_candidate(oracle, out, rng):
        raise VerificationFailed("random-point check rejected the factorization")
    return out.canonical()


def _factor_multivariate(
    oracle: PolyOracle, d: int, rng: RandomSource
) -> Factorization:
    n = oracle.n_vars
    last_error: Exception | None = None
    for _ in range(MAX_ATTEMPTS):
        matrix = RatMatrix([[rng.integer() for _ in range(n)] for _ in range(n)])
        if rank(matrix) != n:
            continue
        composed = TransformedOracle(oracle, matrix)
        try:
            afs = [project_and_factor(composed, j, d, rng) for j in range(2, n)]
            merged = merge_projections(afs)
            if merged.degree() != d:
                raise InconsistentProjections(
                    "merged degree disagrees with the input degree"
                )
        except InconsistentProjections as exc:
            last_error = exc
            continue
        inv = invert(matrix)
        forms = []
        for form, mult in merged.factors:
            coeffs = tuple(
                sum(
                    (form.coeffs[k] * inv.data[k][j] for k in range(n)),
                    Fraction(0),
                )
                for j in range(n)
            )
            forms.append((LinearForm(coeffs), mult))
        candidate = Factorization(merged.scale, tuple(forms))
        if _verify_candidate(oracle, candidate, rng):
            return candidate
        last_error = VerificationFailed("pulled-back factorization failed its check")
    raise last_error if last_error is not None else NotAffineProduct(
        "no random change of variables succeeded"
    )


def project_and_factor(
    oracle: PolyOracle, j: int, d: int, rng: RandomSource
) -> AffineFactorization:
    """One projection plus its affine factorization."""
    g = project_bivariate(oracle, j, d)
    if g.constant_term() == 0:
        raise InconsistentProjections("projection has zero constant term")
    return factor_bivariate_affine(g, rng)
