"""Exact rational univariate-polynomial and dense-matrix kernels.

Everything here is computed over Q with ``fractions.Fraction`` and no
tolerances: nullspaces, characteristic polynomials, squarefree parts,
rational roots with multiplicities, eigendecompositions and simultaneous
diagonalization of commuting families.

Implementation notes, where it matters for exactness or coefficient growth:

* Gaussian elimination is fraction-free (Bareiss): rows are first cleared
  to integers, the forward pass stays in Z with exact divisions, and only
  the final narrow back-substitutions return to Fraction.
* The characteristic polynomial uses the Faddeev-LeVerrier trace
  recurrence (valid in characteristic 0).
* Rational roots are found by root finding mod a small prime followed by
  Hensel lifting and rational reconstruction, then verified exactly.
  Enumerating divisors of the constant/leading coefficients is hopeless
  here: line restrictions of black-box values routinely have coefficients
  of hundreds of bits.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    IrrationalEigenvalues,
    NotDiagonalizable,
    RetriesExhausted,
)


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


# ---------------------------------------------------------------------------
# Univariate polynomials
# ---------------------------------------------------------------------------


class UniPoly:
    """Dense univariate polynomial over Q, coefficients from degree 0 up.

    The zero polynomial has an empty coefficient tuple; otherwise the
    leading coefficient is nonzero.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def constant(cls, c) -> "UniPoly":
        return cls((c,))

    @classmethod
    def variable(cls) -> "UniPoly":
        return cls((0, 1))

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        """Degree, with the convention deg 0 = -1."""
        return len(self.coeffs) - 1

    def leading(self) -> Fraction:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __eq__(self, other) -> bool:
        return isinstance(other, UniPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: "UniPoly") -> "UniPoly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return UniPoly(out)

    def __neg__(self) -> "UniPoly":
        return UniPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other) -> "UniPoly":
        if not isinstance(other, UniPoly):
            return self.scale(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return UniPoly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return UniPoly(out)

    __rmul__ = __mul__

    def scale(self, c) -> "UniPoly":
        c = _as_fraction(c)
        return UniPoly(tuple(c * x for x in self.coeffs))

    def __pow__(self, k: int) -> "UniPoly":
        result = UniPoly.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dv = other.coeffs
        dd = len(dv) - 1
        lead = dv[-1]
        if len(rem) - 1 < dd:
            return UniPoly(), UniPoly(rem)
        quo = [Fraction(0)] * (len(rem) - dd)
        for i in range(len(rem) - dd - 1, -1, -1):
            c = rem[i + dd] / lead
            if c:
                quo[i] = c
                for j in range(dd + 1):
                    rem[i + j] -= c * dv[j]
        return UniPoly(quo), UniPoly(rem)

    def __floordiv__(self, other: "UniPoly") -> "UniPoly":
        return self.divmod(other)[0]

    def __mod__(self, other: "UniPoly") -> "UniPoly":
        return self.divmod(other)[1]

    def derivative(self) -> "UniPoly":
        return UniPoly(tuple(k * c for k, c in enumerate(self.coeffs) if k))

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_matrix(self, m: "RatMatrix") -> "RatMatrix":
        """Substitute a square matrix for the variable (Horner)."""
        n = m.rows
        acc = RatMatrix.zero(n, n)
        for c in reversed(self.coeffs):
            acc = acc @ m + RatMatrix.identity(n).scale(c)
        return acc

    def monic(self) -> "UniPoly":
        if self.is_zero():
            raise ValueError("cannot normalize the zero polynomial")
        return self.scale(1 / self.leading())

    def primitive_integer(self) -> tuple[Fraction, list[int]]:
        """Write self = content * primitive with integer primitive coeffs,
        positive leading coefficient and coefficient gcd 1."""
        if self.is_zero():
            return Fraction(0), []
        den = math.lcm(*(c.denominator for c in self.coeffs))
        ints = [int(c * den) for c in self.coeffs]
        g = math.gcd(*(abs(c) for c in ints))
        if ints[-1] < 0:
            g = -g
        return Fraction(g, den), [c // g for c in ints]

    def __repr__(self) -> str:
        if self.is_zero():
            return "UniPoly(0)"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                parts.append(str(c))
            elif k == 1:
                parts.append(f"{c}*t")
            else:
                parts.append(f"{c}*t^{k}")
        return "UniPoly(" + " + ".join(parts) + ")"


def interpolate_at_integers(values: Sequence) -> UniPoly:
    """Interpolating polynomial through (0, v0), (1, v1), ..., (m, vm).

    Newton forward differences; exact in Q.
    """
    m = len(values)
    if m == 0:
        raise ValueError("need at least one value")
    diffs = [_as_fraction(v) for v in values]
    newton = [diffs[0]]
    for level in range(1, m):
        diffs = [diffs[i + 1] - diffs[i] for i in range(len(diffs) - 1)]
        newton.append(diffs[0])
    # expand sum_k newton[k] * t(t-1)...(t-k+1)/k!
    result = UniPoly.constant(newton[0])
    basis = UniPoly.constant(1)
    for k in range(1, m):
        basis = basis * UniPoly((-(k - 1), 1))
        if newton[k]:
            result = result + basis.scale(Fraction(newton[k], math.factorial(k)))
    return result


# ---------------------------------------------------------------------------
# Integer polynomial helpers (for gcd and rational roots)
# ---------------------------------------------------------------------------


def _int_trim(p: list[int]) -> list[int]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _int_derivative(p: list[int]) -> list[int]:
    return [k * c for k, c in enumerate(p) if k]


def _int_primitive(p: list[int]) -> list[int]:
    g = math.gcd(*(abs(c) for c in p)) if p else 1
    if p and p[-1] < 0:
        g = -g
    return [c // g for c in p] if p else p


def _int_pseudo_rem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder of a by b: rem(lc(b)^(da-db+1) * a, b), all in Z."""
    a = list(a)
    db = len(b) - 1
    lb = b[-1]
    while len(a) - 1 >= db and a:
        shift = len(a) - 1 - db
        la = a[-1]
        a = [c * lb for c in a]
        for j in range(db + 1):
            a[shift + j] -= la * b[j]
        _int_trim(a)
    return a


def _int_gcd(a: list[int], b: list[int]) -> list[int]:
    """Primitive gcd in Z[t] via the primitive pseudo-remainder sequence."""
    a = _int_primitive(_int_trim(list(a)))
    b = _int_primitive(_int_trim(list(b)))
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = _int_pseudo_rem(a, b)
        a, b = b, _int_primitive(r)
    return a


def poly_gcd(p: UniPoly, q: UniPoly) -> UniPoly:
    """Monic gcd in Q[t]."""
    if p.is_zero():
        return q.monic() if not q.is_zero() else UniPoly()
    if q.is_zero():
        return p.monic()
    _, pi = p.primitive_integer()
    _, qi = q.primitive_integer()
    g = _int_gcd(pi, qi)
    return UniPoly(g).monic()


def squarefree_part(p: UniPoly) -> UniPoly:
    """p / gcd(p, p'), monic."""
    if p.is_zero():
        raise ValueError("squarefree part of the zero polynomial")
    if p.degree() == 0:
        return UniPoly.constant(1)
    g = poly_gcd(p, p.derivative())
    return (p // g).monic()


# --- rational roots ---------------------------------------------------------


def _next_prime(n: int) -> int:
    def is_prime(k: int) -> bool:
        if k % 2 == 0:
            return k == 2
        f = 3
        while f * f <= k:
            if k % f == 0:
                return False
            f += 2
        return True

    n += 1
    while not is_prime(n):
        n += 1
    return n


def _mod_trim(p: list[int]) -> list[int]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _mod_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _mod_trim(out)


def _mod_rem(a: list[int], b: list[int], p: int) -> list[int]:
    a = list(a)
    db = len(b) - 1
    inv_lb = pow(b[-1], -1, p)
    while len(a) - 1 >= db and a:
        shift = len(a) - 1 - db
        c = a[-1] * inv_lb % p
        for j in range(db + 1):
            a[shift + j] = (a[shift + j] - c * b[j]) % p
        _mod_trim(a)
    return a


def _mod_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _mod_trim(list(a)), _mod_trim(list(b))
    while b:
        a, b = b, _mod_rem(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def _mod_pow_t(e: int, modulus: list[int], p: int) -> list[int]:
    """t^e mod (modulus, p)."""
    result = [1]
    base = _mod_rem([0, 1], modulus, p)
    while e:
        if e & 1:
            result = _mod_rem(_mod_mul(result, base, p), modulus, p)
        base = _mod_rem(_mod_mul(base, base, p), modulus, p)
        e >>= 1
    return result


def _roots_mod_p(f: list[int], p: int) -> list[int]:
    """Roots in F_p of an integer polynomial (nonzero mod p)."""
    f = _mod_trim([c % p for c in f])
    if len(f) <= 1:
        return []
    # linear-factor product: gcd(f, t^p - t)
    tp = _mod_pow_t(p, f, p)
    tp_minus_t = list(tp)
    while len(tp_minus_t) < 2:
        tp_minus_t.append(0)
    tp_minus_t[1] = (tp_minus_t[1] - 1) % p
    g = _mod_gcd(f, _mod_trim(tp_minus_t), p)
    roots: list[int] = []

    def exact_quotient(num: list[int], den: list[int]) -> list[int]:
        # num / den mod p, exact (den | num)
        num = list(num)
        out = [0] * (len(num) - len(den) + 1)
        inv = pow(den[-1], -1, p)
        for i in range(len(out) - 1, -1, -1):
            c = num[i + len(den) - 1] * inv % p
            out[i] = c
            for j in range(len(den)):
                num[i + j] = (num[i + j] - c * den[j]) % p
        return _mod_trim(out)

    def split(h: list[int], shift: int) -> None:
        # h is monic and splits into distinct linear factors mod p
        if len(h) <= 1:
            return
        if len(h) == 2:
            roots.append(-h[0] % p)
            return
        # deterministic sequence of shifts keeps runs reproducible
        a = shift
        while True:
            # d = gcd(h, (t+a)^((p-1)/2) - 1) separates quadratic residues
            e = (p - 1) // 2
            acc = [1]
            base = _mod_rem([a % p, 1], h, p)
            while e:
                if e & 1:
                    acc = _mod_rem(_mod_mul(acc, base, p), h, p)
                base = _mod_rem(_mod_mul(base, base, p), h, p)
                e >>= 1
            acc = list(acc) or [0]
            acc[0] = (acc[0] - 1) % p
            d = _mod_gcd(h, _mod_trim(acc), p)
            if 0 < len(d) - 1 < len(h) - 1:
                split(d, a + 1)
                split(exact_quotient(h, d), a + 1)
                return
            a += 1

    split(g, 1)
    return sorted(roots)


def _rational_reconstruct(c: int, modulus: int, num_bound: int, den_bound: int):
    """Find x/y with x/y = c (mod modulus), |x| <= num_bound, 0 < y <= den_bound."""
    r0, r1 = modulus, c % modulus
    s0, s1 = 0, 1
    while r1 > num_bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0:
        return None
    x, y = r1, s1
    if y < 0:
        x, y = -x, -y
    if y == 0 or y > den_bound:
        return None
    return Fraction(x, y)


def _rational_roots_squarefree(s: list[int]) -> list[Fraction]:
    """All rational roots of a squarefree primitive integer polynomial."""
    if len(s) <= 1:
        return []
    if len(s) == 2:
        return [Fraction(-s[0], s[1])]
    lc = abs(s[-1])
    height = max(abs(c) for c in s)
    den_bound = lc
    num_bound = lc + height  # |x| <= den * (1 + height/lc) <= lc + height
    target = 2 * num_bound * den_bound + 1

    sprime = _int_derivative(s)
    p = 4096
    while True:
        p = _next_prime(p)
        if s[-1] % p == 0:
            continue
        if _mod_trim([c % p for c in sprime]) and len(_mod_gcd(s, sprime, p)) == 1:
            break

    roots_p = _roots_mod_p(s, p)
    found: list[Fraction] = []
    for r in roots_p:
        # quadratic Hensel lift to modulus >= target
        mod = p
        rr = r
        while mod < target:
            mod = mod * mod
            fr = 0
            for c in reversed(s):
                fr = (fr * rr + c) % mod
            dfr = 0
            for c in reversed(sprime):
                dfr = (dfr * rr + c) % mod
            try:
                inv = pow(dfr, -1, mod)
            except ValueError:
                break  # derivative not invertible: cannot lift, skip
            rr = (rr - fr * inv) % mod
        else:
            cand = _rational_reconstruct(rr, mod, num_bound, den_bound)
            if cand is not None:
                acc = Fraction(0)
                for c in reversed(s):
                    acc = acc * cand + c
                if acc == 0:
                    found.append(cand)
    return found


def rational_roots_with_multiplicity(p: UniPoly) -> list[tuple[Fraction, int]]:
    """Every rational root of p with its exact multiplicity, sorted by value."""
    if p.is_zero():
        raise ValueError("rational roots of the zero polynomial")
    if p.degree() == 0:
        return []
    _, u = p.primitive_integer()
    # factor out t^v
    v = 0
    while u[v] == 0:
        v += 1
    u = u[v:]
    if len(u) >= 2:
        sf = _int_primitive(_squarefree_int(u))
    else:
        sf = []
    roots = _rational_roots_squarefree(sf) if sf else []
    result: list[tuple[Fraction, int]] = []
    if v:
        result.append((Fraction(0), v))
    rem = UniPoly(u)
    for r in roots:
        if r == 0:
            continue
        mult = 0
        lin = UniPoly((-r, 1))
        while True:
            q, rr = rem.divmod(lin)
            if rr.is_zero():
                rem = q
                mult += 1
            else:
                break
        if mult:
            result.append((r, mult))
    result.sort(key=lambda pair: pair[0])
    return result


def _squarefree_int(u: list[int]) -> list[int]:
    g = _int_gcd(u, _int_derivative(u))
    if len(g) == 1:
        return list(u)
    q, r = UniPoly(u).divmod(UniPoly(g))
    assert r.is_zero()
    _, qi = q.primitive_integer()
    return qi


def splits_completely(p: UniPoly, roots: list[tuple[Fraction, int]]) -> bool:
    """True iff the root multiplicities account for the whole degree."""
    return sum(m for _, m in roots) == p.degree()


# ---------------------------------------------------------------------------
# Dense rational matrices
# ---------------------------------------------------------------------------


class RatMatrix:
    """Dense matrix over Q, stored as a tuple of row tuples."""

    __slots__ = ("data",)

    def __init__(self, data: Iterable[Iterable]):
        self.data = tuple(tuple(_as_fraction(x) for x in row) for row in data)
        if self.data:
            w = len(self.data[0])
            if any(len(row) != w for row in self.data):
                raise ValueError("ragged rows")

    @property
    def rows(self) -> int:
        return len(self.data)

    @property
    def cols(self) -> int:
        return len(self.data[0]) if self.data else 0

    @classmethod
    def zero(cls, r: int, c: int) -> "RatMatrix":
        return cls([[0] * c for _ in range(r)])

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, values: Sequence) -> "RatMatrix":
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence]) -> "RatMatrix":
        return cls(list(zip(*columns)))

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __eq__(self, other) -> bool:
        return isinstance(other, RatMatrix) and self.data == other.data

    def __hash__(self):
        return hash(self.data)

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        return RatMatrix(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ]
        )

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return RatMatrix(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ]
        )

    def scale(self, c) -> "RatMatrix":
        c = _as_fraction(c)
        return RatMatrix([[c * x for x in row] for row in self.data])

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        bt = list(zip(*other.data))
        return RatMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in bt] for row in self.data]
        )

    def transpose(self) -> "RatMatrix":
        return RatMatrix(list(zip(*self.data)))

    def trace(self) -> Fraction:
        if not self.is_square():
            raise ValueError("trace of non-square matrix")
        return sum((self.data[i][i] for i in range(self.rows)), Fraction(0))

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.data for x in row)

    def is_diagonal(self) -> bool:
        return all(
            x == 0 for i, row in enumerate(self.data) for j, x in enumerate(row) if i != j
        )

    def diagonal_entries(self) -> tuple[Fraction, ...]:
        return tuple(self.data[i][i] for i in range(self.rows))

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.data[i]

    def apply(self, vec: Sequence) -> tuple[Fraction, ...]:
        return tuple(
            sum((_as_fraction(a) * _as_fraction(x) for a, x in zip(row, vec)), Fraction(0))
            for row in self.data
        )

    def __repr__(self) -> str:
        return "RatMatrix([" + ", ".join(str(list(map(str, r))) for r in self.data) + "])"


# --- elimination ------------------------------------------------------------


def _integer_rows(m: RatMatrix) -> list[list[int]]:
    out = []
    for row in m.data:
        den = math.lcm(*(c.denominator for c in row)) if row else 1
        out.append([int(c * den) for c in row])
    return out


def _bareiss_echelon(a: list[list[int]]) -> tuple[list[list[int]], list[int]]:
    """Fraction-free forward elimination.

    Returns the echelon rows (in Z) and the list of pivot columns.
    """
    rows = [list(r) for r in a]
    m = len(rows)
    n = len(rows[0]) if rows else 0
    piv_cols: list[int] = []
    prev = 1
    r = 0
    for c in range(n):
        if r == m:
            break
        # pick the smallest-magnitude nonzero pivot to slow growth
        best = -1
        for i in range(r, m):
            if rows[i][c] != 0 and (best < 0 or abs(rows[i][c]) < abs(rows[best][c])):
                best = i
        if best < 0:
            continue
        rows[r], rows[best] = rows[best], rows[r]
        piv = rows[r][c]
        for i in range(r + 1, m):
            row_i = rows[i]
            ric = row_i[c]
            if ric == 0 and not any(row_i[c:]):
                continue  # all-zero tail stays zero under the update
            row_r = rows[r]
            for j in range(c, n):
                row_i[j] = (piv * row_i[j] - ric * row_r[j]) // prev
        prev = piv
        piv_cols.append(c)
        r += 1
    return rows[:r], piv_cols


def rank(m: RatMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(_bareiss_echelon(_integer_rows(m))[1])


def _is_prime_64(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _build_ns_primes(count: int = 12) -> list[int]:
    primes = []
    candidate = (1 << 62) - 1
    while len(primes) < count:
        if _is_prime_64(candidate):
            primes.append(candidate)
        candidate -= 2
    return primes


# primes just under 2^62 for the modular nullspace shortcut
_NS_PRIMES = _build_ns_primes()


def _rref_mod_p(int_rows: list[list[int]], n: int, p: int):
    """Reduced row echelon form mod p; returns (pivot cols, reduced rows)."""
    work = [[x % p for x in row] for row in int_rows]
    m = len(work)
    piv_cols: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        pivot = next((i for i in range(r, m) if work[i][c]), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        inv = pow(work[r][c], -1, p)
        work[r] = [x * inv % p for x in work[r]]
        row_r = work[r]
        for i in range(m):
            if i != r and work[i][c]:
                f = work[i][c]
                row_i = work[i]
                for j in range(c, n):
                    if row_r[j]:
                        row_i[j] = (row_i[j] - f * row_r[j]) % p
        piv_cols.append(c)
        r += 1
    return piv_cols, work[: len(piv_cols)]


def _nullspace_modular(int_rows: list[list[int]], n: int):
    """Attempt the nullspace via multi-prime elimination.

    RREFs mod a growing set of ~62-bit primes are CRT-combined, the
    reduced-echelon kernel basis is rationally reconstructed and checked
    against M v = 0 exactly.  Since the mod-p kernel can never be smaller
    than the rational one, a full set of exactly-verified candidates IS
    the rational kernel; any failure returns None and the caller falls
    back to fraction-free elimination.
    """
    computed: list[tuple[int, list[int], list[list[int]]]] = []
    used = 0
    for batch in (1, 5, 12):
        while used < batch and used < len(_NS_PRIMES):
            p = _NS_PRIMES[used]
            piv, rows = _rref_mod_p(int_rows, n, p)
            computed.append((p, piv, rows))
            used += 1
        pivot_sets = [piv for _, piv, _ in computed]
        if any(piv != pivot_sets[0] for piv in pivot_sets):
            return None  # an unlucky prime dropped rank; play it safe
        piv_cols = pivot_sets[0]
        free_cols = [j for j in range(n) if j not in set(piv_cols)]
        modulus = 1
        for p, _, _ in computed:
            modulus *= p
        bound = math.isqrt((modulus - 1) // 2)
        basis: list[tuple[Fraction, ...]] = []
        ok = True
        for fc in free_cols:
            vec = [Fraction(0)] * n
            vec[fc] = Fraction(1)
            for k, pc in enumerate(piv_cols):
                residue = _crt([(-rows[k][fc]) % p for p, _, rows in computed],
                               [p for p, _, _ in computed])
                value = _rational_reconstruct(residue, modulus, bound, bound)
                if value is None:
                    ok = False
                    break
                vec[pc] = value
            if not ok:
                break
            den = math.lcm(*(x.denominator for x in vec))
            ints = [int(x * den) for x in vec]
            good = True
            for row in int_rows:
                if sum(a * b for a, b in zip(row, ints) if b) != 0:
                    good = False
                    break
            if not good:
                ok = False
                break
            basis.append(tuple(vec))
        if ok:
            return basis
    return None


def _crt(residues: list[int], moduli: list[int]) -> int:
    total = residues[0]
    modulus = moduli[0]
    for r, p in zip(residues[1:], moduli[1:]):
        inv = pow(modulus % p, -1, p)
        total = total + modulus * (((r - total) % p) * inv % p)
        modulus *= p
    return total % modulus


def nullspace_fast(m: RatMatrix) -> list[tuple[Fraction, ...]]:
    """nullspace() with a modular shortcut for large integer systems.

    Bit-identical to nullspace(): the reduced echelon basis is unique, and
    the shortcut self-verifies exactly before being trusted.
    """
    if m.rows == 0 or m.cols == 0:
        return nullspace(m)
    int_rows = _integer_rows(m)
    stripped = []
    for row in int_rows:
        g = math.gcd(*(abs(x) for x in row))
        stripped.append([x // g for x in row] if g > 1 else row)
    result = _nullspace_modular(stripped, m.cols)
    if result is not None:
        return result
    return nullspace(m)


def nullspace(m: RatMatrix) -> list[tuple[Fraction, ...]]:
    """Basis of the right kernel {v : Mv = 0}, in reduced echelon form.

    Each basis vector has a 1 in "its" free column and zeros in the other
    free columns; the empty list means M is injective.
    """
    n = m.cols
    if n == 0:
        return []
    if m.rows == 0:
        basis = []
        for j in range(n):
            v = [Fraction(0)] * n
            v[j] = Fraction(1)
            basis.append(tuple(v))
        return basis
    ech, piv_cols = _bareiss_echelon(_integer_rows(m))
    piv_set = set(piv_cols)
    free_cols = [j for j in range(n) if j not in piv_set]
    basis = []
    for fc in free_cols:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        # back-substitute pivot variables, bottom up
        for k in range(len(piv_cols) - 1, -1, -1):
            pc = piv_cols[k]
            row = ech[k]
            s = sum(
                (Fraction(row[j]) * v[j] for j in range(pc + 1, n) if v[j] != 0),
                Fraction(0),
            )
            v[pc] = -s / row[pc]
        basis.append(tuple(v))
    return basis


def reduced_row_space(rows: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    """Canonical basis (RREF rows) of the span of the given vectors.

    Two families span the same subspace iff their canonical bases are
    equal.  Intended for small inputs; plain Gauss-Jordan over Q.
    """
    work = [[_as_fraction(x) for x in row] for row in rows]
    if not work:
        return ()
    n = len(work[0])
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, len(work)) if work[i][c] != 0), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        pv = work[r][c]
        work[r] = [x / pv for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        r += 1
        if r == len(work):
            break
    return tuple(tuple(row) for row in work[:r] if any(x != 0 for x in row))


def solve_unique(a: RatMatrix, b: Sequence) -> tuple[Fraction, ...]:
    """The unique solution of A x = b.

    Raises ValueError if the system is inconsistent or underdetermined.
    """
    n = a.cols
    aug = RatMatrix([list(row) + [v] for row, v in zip(a.data, b)])
    ech, piv_cols = _bareiss_echelon(_integer_rows(aug))
    if any(pc == n for pc in piv_cols):
        raise ValueError("inconsistent linear system")
    if len(piv_cols) < n:
        raise ValueError("underdetermined linear system")
    x = [Fraction(0)] * n
    for k in range(n - 1, -1, -1):
        row = ech[k]
        pc = piv_cols[k]
        s = sum((Fraction(row[j]) * x[j] for j in range(pc + 1, n)), Fraction(0))
        x[pc] = (Fraction(row[n]) - s) / row[pc]
    return tuple(x)


def invert(m: RatMatrix) -> RatMatrix:
    if not m.is_square():
        raise ValueError("inverse of non-square matrix")
    n = m.rows
    cols = []
    for j in range(n):
        e = [Fraction(1) if i == j else Fraction(0) for i in range(n)]
        cols.append(solve_unique(m, e))
    return RatMatrix.from_columns(cols)


# --- spectral operations ----------------------------------------------------


def char_poly(m: RatMatrix) -> UniPoly:
    """det(M - t I), exact; leading coefficient (-1)^n.

    Faddeev-LeVerrier recurrence on traces.
    """
    if not m.is_square():
        raise ValueError("characteristic polynomial of non-square matrix")
    n = m.rows
    if n == 0:
        return UniPoly.constant(1)
    # p(t) = t^n + c[n-1] t^(n-1) + ... + c[0]  equals det(tI - M)
    c = [Fraction(0)] * (n + 1)
    c[n] = Fraction(1)
    mk = RatMatrix.identity(n)
    for k in range(1, n + 1):
        mk = m @ mk
        ck = -mk.trace() / k
        c[n - k] = ck
        if k < n:
            mk = mk + RatMatrix.identity(n).scale(ck)
    p = UniPoly(c)
    if n % 2 == 1:
        p = p.scale(-1)  # det(M - tI) = (-1)^n det(tI - M)
    return p


def _int_matrix(m: RatMatrix) -> list[list[int]]:
    """Primitive integer multiple of the matrix (nonzero input)."""
    den = math.lcm(*(x.denominator for row in m.data for x in row))
    ints = [[int(x * den) for x in row] for row in m.data]
    g = math.gcd(*(abs(x) for row in ints for x in row))
    if g > 1:
        ints = [[x // g for x in row] for row in ints]
    return ints


def _int_matmul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def _int_char_poly(a: list[list[int]]) -> list[int]:
    """det(tI - M) for an integer matrix; the coefficients are integers
    and the Faddeev-LeVerrier divisions are exact."""
    n = len(a)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    mk = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        mk = _int_matmul(a, mk)
        trace = sum(mk[i][i] for i in range(n))
        ck = -trace // k
        assert ck * k == -trace
        coeffs[n - k] = ck
        if k < n:
            for i in range(n):
                mk[i][i] += ck
    return coeffs


def is_diagonalizable_over_closure(m: RatMatrix) -> bool:
    """True iff the squarefree part of the characteristic polynomial
    annihilates the matrix.

    Runs on a primitive integer multiple of the matrix (the property is
    scale invariant), keeping the whole test in integer arithmetic.
    """
    if not m.is_square():
        raise ValueError("diagonalizability of non-square matrix")
    if m.is_zero() or m.rows == 0:
        return True
    a = _int_matrix(m)
    chi = _int_char_poly(a)
    sf = _squarefree_int(_int_primitive(list(chi)))
    # Horner: sf(a) == 0?
    n = len(a)
    acc = [[0] * n for _ in range(n)]
    for c in reversed(sf):
        acc = _int_matmul(acc, a)
        for i in range(n):
            acc[i][i] += c
    return all(x == 0 for row in acc for x in row)


class EigenDecomposition:
    """Exact eigendecomposition: T^-1 M T = D with rational entries."""

    __slots__ = ("eigenvalues", "transition", "diagonal")

    def __init__(
        self,
        eigenvalues: list[tuple[Fraction, int]],
        transition: RatMatrix,
        diagonal: RatMatrix,
    ):
        self.eigenvalues = eigenvalues
        self.transition = transition
        self.diagonal = diagonal


def _normalize_column(col: Sequence[Fraction]) -> tuple[Fraction, ...]:
    for x in col:
        if x != 0:
            return tuple(c / x for c in col)
    return tuple(col)


def eigen_decomposition(m: RatMatrix) -> EigenDecomposition:
    """Diagonalize M over Q.

    Requires M diagonalizable over the closure; raises
    IrrationalEigenvalues (with the blocking monic factor) when the
    spectrum is not rational, NotDiagonalizable when the precondition
    fails.
    """
    chi = char_poly(m)
    p = squarefree_part(chi)
    if not p.eval_matrix(m).is_zero():
        raise NotDiagonalizable(f"squarefree part {p} does not annihilate the matrix")
    roots = rational_roots_with_multiplicity(p)
    if len(roots) < p.degree():
        witness = p
        for r, _ in roots:
            witness = witness // UniPoly((-r, 1))
        raise IrrationalEigenvalues(witness.monic())
    n = m.rows
    columns: list[tuple[Fraction, ...]] = []
    eigenvalues: list[tuple[Fraction, int]] = []
    diag_values: list[Fraction] = []
    for value, _ in roots:
        kernel = nullspace(m - RatMatrix.identity(n).scale(value))
        eigenvalues.append((value, len(kernel)))
        for vec in kernel:
            columns.append(_normalize_column(vec))
            diag_values.append(value)
    if len(columns) != n:
        raise NotDiagonalizable("eigenspace dimensions do not sum to n")
    t = RatMatrix.from_columns(columns)
    d = RatMatrix.diagonal(diag_values)
    assert invert(t) @ m @ t == d
    return EigenDecomposition(eigenvalues, t, d)


def commute_family(bs: Sequence[RatMatrix]) -> bool:
    """True iff all pairs commute (checked on integer multiples)."""
    if len(bs) < 2:
        return True
    n = bs[0].rows
    if any(not b.is_square() or b.rows != n for b in bs):
        raise ValueError("family members must be square and equally sized")
    ints = [
        [[0] * n for _ in range(n)] if m.is_zero() else _int_matrix(m) for m in bs
    ]
    for i in range(len(ints)):
        for j in range(i + 1, len(ints)):
            if _int_matmul(ints[i], ints[j]) != _int_matmul(ints[j], ints[i]):
                return False
    return True


MAX_SIMDIAG_RETRIES = 8


def simultaneous_diagonalize(bs: Sequence[RatMatrix], rng) -> RatMatrix:
    """One transition matrix T with T^-1 B T diagonal for every B.

    The family must pairwise commute and be diagonalizable over the
    closure.  A random rational combination is diagonalized and the
    result checked against every member; a fresh combination is drawn on
    failure (a measure-zero event for commuting diagonalizable
    families).  For a single matrix, that matrix itself is used.
    """
    if not bs:
        raise ValueError("empty family")
    n = bs[0].rows
    if len(bs) == 1:
        dec = eigen_decomposition(bs[0])
        return dec.transition
    for _ in range(MAX_SIMDIAG_RETRIES):
        coeffs = [rng.wide_nonzero_integer() for _ in bs]
        combo = RatMatrix.zero(n, n)
        for c, b in zip(coeffs, bs):
            combo = combo + b.scale(c)
        try:
            dec = eigen_decomposition(combo)
        except NotDiagonalizable:
            continue  # degenerate combination; redraw
        t = dec.transition
        t_inv = invert(t)
        if all((t_inv @ b @ t).is_diagonal() for b in bs):
            return t
    raise RetriesExhausted("no random combination yielded a common eigenbasis")
