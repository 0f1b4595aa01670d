"""Sparse multivariate polynomials over Q.

Terms are stored as a map from exponent tuples to nonzero Fraction
coefficients.  This is the ground-truth representation used by the
verification machinery: products of linear forms are expanded into it and
compared term by term.  Serialization is one term per line,
``coeff e1 e2 ... en``, in graded-lexicographic order (total degree
descending, then exponent tuple descending).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def grlex_key(exponents: tuple[int, ...]) -> tuple:
    return (sum(exponents), exponents)


class SparsePoly:
    """Multivariate polynomial as {exponent tuple: coefficient}."""

    __slots__ = ("n_vars", "terms")

    def __init__(self, n_vars: int, terms: Mapping[tuple[int, ...], object] | None = None):
        self.n_vars = n_vars
        clean: dict[tuple[int, ...], Fraction] = {}
        if terms:
            for exps, coeff in terms.items():
                c = _as_fraction(coeff)
                if c == 0:
                    continue
                e = tuple(int(v) for v in exps)
                if len(e) != n_vars:
                    raise ValueError("exponent tuple arity mismatch")
                clean[e] = c
        self.terms = clean

    # --- constructors ---

    @classmethod
    def _raw(cls, n_vars: int, terms: dict) -> "SparsePoly":
        """Internal fast constructor: trusts arity, exactness and the
        absence of zero coefficients."""
        poly = cls.__new__(cls)
        poly.n_vars = n_vars
        poly.terms = terms
        return poly

    @classmethod
    def zero(cls, n_vars: int) -> "SparsePoly":
        return cls(n_vars)

    @classmethod
    def constant(cls, n_vars: int, c) -> "SparsePoly":
        return cls(n_vars, {(0,) * n_vars: c})

    @classmethod
    def variable(cls, n_vars: int, i: int) -> "SparsePoly":
        e = [0] * n_vars
        e[i] = 1
        return cls(n_vars, {tuple(e): 1})

    @classmethod
    def from_linear(cls, coeffs: Sequence) -> "SparsePoly":
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            if c != 0:
                e = [0] * n
                e[i] = 1
                terms[tuple(e)] = c
        return cls(n, terms)

    # --- queries ---

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        degrees = {sum(e) for e in self.terms}
        return len(degrees) <= 1

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparsePoly)
            and self.n_vars == other.n_vars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.n_vars, frozenset(self.terms.items())))

    # --- arithmetic ---

    def __add__(self, other: "SparsePoly") -> "SparsePoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return SparsePoly(self.n_vars, out)

    def __neg__(self) -> "SparsePoly":
        return SparsePoly(self.n_vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "SparsePoly") -> "SparsePoly":
        return self + (-other)

    def scale(self, c) -> "SparsePoly":
        c = _as_fraction(c)
        if c == 0:
            return SparsePoly.zero(self.n_vars)
        return SparsePoly(self.n_vars, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other: "SparsePoly") -> "SparsePoly":
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s == 0:
                    out.pop(e, None)
                else:
                    out[e] = s
        return SparsePoly(self.n_vars, out)

    def __pow__(self, k: int) -> "SparsePoly":
        result = SparsePoly.constant(self.n_vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def derivative(self, i: int) -> "SparsePoly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return SparsePoly(self.n_vars, out)

    def evaluate(self, point: Sequence):
        """Exact value at a rational point."""
        if len(point) != self.n_vars:
            raise ValueError("point arity mismatch")
        # cache powers per variable
        max_exp = [0] * self.n_vars
        for e in self.terms:
            for i, k in enumerate(e):
                if k > max_exp[i]:
                    max_exp[i] = k
        powers = []
        for i in range(self.n_vars):
            row = [1]
            for _ in range(max_exp[i]):
                row.append(row[-1] * point[i])
            powers.append(row)
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    term = term * powers[i][k]
            total += term
        return total

    # --- ordering / serialization ---

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True)

    def to_text(self) -> str:
        lines = []
        for e, c in self.sorted_terms():
            lines.append(" ".join([str(c)] + [str(k) for k in e]))
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str, n_vars: int | None = None) -> "SparsePoly":
        terms: dict[tuple[int, ...], Fraction] = {}
        width = n_vars
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) < 2:
                raise ValueError(f"line {lineno}: need a coefficient and exponents")
            try:
                coeff = Fraction(parts[0])
                exps = tuple(int(x) for x in parts[1:])
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"line {lineno}: {exc}") from exc
            if any(k < 0 for k in exps):
                raise ValueError(f"line {lineno}: negative exponent")
            if width is None:
                width = len(exps)
            elif len(exps) != width:
                raise ValueError(f"line {lineno}: inconsistent variable count")
            terms[exps] = terms.get(exps, Fraction(0)) + coeff
        if width is None:
            raise ValueError("empty polynomial text")
        return cls(width, terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "SparsePoly(0)"
        bits = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"x{i+1}^{k}" if k > 1 else f"x{i+1}" for i, k in enumerate(e) if k)
            bits.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "SparsePoly(" + " + ".join(bits) + ")"


def product_of_linear_forms(
    forms: Iterable[tuple[Sequence, int]], n_vars: int, scale=1
) -> SparsePoly:
    """Expand scale * prod_i (c_i . x)^{m_i} exactly.

    Works in Z on primitive integer versions of the forms and applies the
    accumulated rational scale in one final pass, which keeps the inner
    loop in (fast) machine/big-int arithmetic.
    """
    total = _as_fraction(scale)
    acc: dict[tuple[int, ...], int] = {(0,) * n_vars: 1}
    for coeffs, mult in forms:
        fracs = [_as_fraction(c) for c in coeffs]
        if all(c == 0 for c in fracs):
            raise ValueError("zero linear form")
        den = math.lcm(*(c.denominator for c in fracs))
        ints = [int(c * den) for c in fracs]
        g = math.gcd(*(abs(c) for c in ints))
        prim = [c // g for c in ints]
        total *= Fraction(g, den) ** mult
        for _ in range(mult):
            nxt: dict[tuple[int, ...], int] = {}
            for e, c in acc.items():
                for i, w in enumerate(prim):
                    if w:
                        ne = list(e)
                        ne[i] += 1
                        key = tuple(ne)
                        s = nxt.get(key, 0) + c * w
                        if s:
                            nxt[key] = s
                        else:
                            nxt.pop(key, None)
            acc = nxt
    if total == 0:
        return SparsePoly.zero(n_vars)
    if total == 1:
        return SparsePoly._raw(n_vars, acc)
    return SparsePoly._raw(n_vars, {e: total * c for e, c in acc.items()})
