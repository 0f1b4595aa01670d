"""Black-box access to the input polynomial.

A ``PolyOracle`` hides an n-variate polynomial behind exact point
evaluation and counts every call.  Three backends are provided: a sparse
polynomial, a product of linear forms, and an arithmetic circuit.  The
circuit backend additionally supports reverse-mode differentiation
(``circuit_gradient``), which evaluates the whole gradient at a cost
proportional to the circuit size and without any oracle calls; all other
backends obtain derivatives by univariate interpolation along axis lines,
at exactly ``degree + 1`` evaluations per partial derivative.

Randomness is centralized in ``RandomSource``: a seeded generator drawing
uniformly from the centered integer interval of a configurable size, so
that identical seeds reproduce identical runs bit for bit.
"""

from __future__ import annotations

import math
import random
import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import ParseError, ZeroPolynomial
from .forms import Factorization
from .sparsepoly import SparsePoly

DEFAULT_SAMPLE_BOUND = 2**20


class RandomSource:
    """Seeded integer sampler over {-floor(s/2), ..., ceil(s/2) - 1}."""

    def __init__(self, seed: int, sample_bound: int = DEFAULT_SAMPLE_BOUND):
        if sample_bound < 2:
            raise ValueError("sample_bound must be at least 2")
        self.seed = seed
        self.sample_bound = sample_bound
        self._lo = -(sample_bound // 2)
        self._hi = (sample_bound + 1) // 2
        self._rng = random.Random(seed)

    def integer(self) -> int:
        return self._rng.randrange(self._lo, self._hi)

    def nonzero_integer(self) -> int:
        while True:
            v = self.integer()
            if v != 0:
                return v

    def integer_between(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], independent of the sample bound."""
        return self._rng.randint(lo, hi)

    def point(self, n: int) -> tuple[int, ...]:
        return tuple(self.integer() for _ in range(n))

    def nonzero_point(self, n: int) -> tuple[int, ...]:
        while True:
            p = self.point(n)
            if any(p):
                return p

    def wide_integer(self) -> int:
        """One draw from an interval at least the default size.

        Identity tests and genericity draws stay sharp even when the
        configured sampling set was shrunk for cheap arithmetic.
        """
        if self.sample_bound >= DEFAULT_SAMPLE_BOUND:
            return self.integer()
        lo = -(DEFAULT_SAMPLE_BOUND // 2)
        hi = (DEFAULT_SAMPLE_BOUND + 1) // 2
        return self._rng.randrange(lo, hi)

    def wide_nonzero_integer(self) -> int:
        while True:
            v = self.wide_integer()
            if v != 0:
                return v

    def wide_point(self, n: int) -> tuple[int, ...]:
        return tuple(self.wide_integer() for _ in range(n))


# ---------------------------------------------------------------------------
# Arithmetic circuits
# ---------------------------------------------------------------------------

INPUT, CONST, ADD, SUB, MUL = "input", "const", "add", "sub", "mul"


@dataclass(frozen=True)
class Gate:
    op: str
    a: object = None  # input index / constant value / left operand index
    b: object = None  # right operand index


@dataclass(frozen=True)
class Circuit:
    """Straight-line program over +, -, *; gates reference earlier gates."""

    n_vars: int
    gates: tuple[Gate, ...]
    output: int

    def __post_init__(self):
        for idx, g in enumerate(self.gates):
            if g.op == INPUT:
                if not (0 <= g.a < self.n_vars):
                    raise ValueError(f"gate {idx}: input index out of range")
            elif g.op == CONST:
                pass
            elif g.op in (ADD, SUB, MUL):
                if not (0 <= g.a < idx and 0 <= g.b < idx):
                    raise ValueError(f"gate {idx}: operand must reference an earlier gate")
            else:
                raise ValueError(f"gate {idx}: unknown op {g.op!r}")
        if not (0 <= self.output < len(self.gates)):
            raise ValueError("output index out of range")

    def size(self) -> int:
        return len(self.gates)

    def evaluate(self, point: Sequence):
        vals: list = [None] * len(self.gates)
        for i, g in enumerate(self.gates):
            if g.op == INPUT:
                vals[i] = point[g.a]
            elif g.op == CONST:
                vals[i] = g.a
            elif g.op == ADD:
                vals[i] = vals[g.a] + vals[g.b]
            elif g.op == SUB:
                vals[i] = vals[g.a] - vals[g.b]
            else:
                vals[i] = vals[g.a] * vals[g.b]
        return vals[self.output]

    def degree_bound(self) -> int:
        """Syntactic upper bound on the total degree."""
        deg = [0] * len(self.gates)
        for i, g in enumerate(self.gates):
            if g.op == INPUT:
                deg[i] = 1
            elif g.op == CONST:
                deg[i] = 0
            elif g.op == MUL:
                deg[i] = deg[g.a] + deg[g.b]
            else:
                deg[i] = max(deg[g.a], deg[g.b])
        return deg[self.output]


def circuit_gradient(circuit: Circuit, point: Sequence) -> tuple:
    """All n partial derivatives at a point by reverse accumulation.

    One forward and one backward sweep over the gates; exact rationals
    throughout, no oracle involvement.
    """
    gates = circuit.gates
    vals: list = [None] * len(gates)
    for i, g in enumerate(gates):
        if g.op == INPUT:
            vals[i] = point[g.a]
        elif g.op == CONST:
            vals[i] = g.a
        elif g.op == ADD:
            vals[i] = vals[g.a] + vals[g.b]
        elif g.op == SUB:
            vals[i] = vals[g.a] - vals[g.b]
        else:
            vals[i] = vals[g.a] * vals[g.b]
    adj = [Fraction(0)] * len(gates)
    adj[circuit.output] = Fraction(1)
    grad = [Fraction(0)] * circuit.n_vars
    for i in range(len(gates) - 1, -1, -1):
        a = adj[i]
        if a == 0:
            continue
        g = gates[i]
        if g.op == INPUT:
            grad[g.a] += a
        elif g.op == ADD:
            adj[g.a] += a
            adj[g.b] += a
        elif g.op == SUB:
            adj[g.a] += a
            adj[g.b] -= a
        elif g.op == MUL:
            adj[g.a] += a * vals[g.b]
            adj[g.b] += a * vals[g.a]
    return tuple(grad)


# --- expression parsing -----------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<number>\d+(?:/\d+)?)|(?P<var>x\d+)|(?P<op>[-+*^()])|(?P<bad>\S))"
)


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            break
        if m.lastgroup == "bad":
            raise ParseError(f"unexpected character {m.group('bad')!r}", m.start("bad"))
        if m.lastgroup == "number":
            raw = m.group("number")
            if "/" in raw:
                num, den = raw.split("/")
                if int(den) == 0:
                    raise ParseError("zero denominator", m.start("number"))
                value = Fraction(int(num), int(den))
            else:
                value = Fraction(int(raw))
            tokens.append(("number", value, m.start("number")))
        elif m.lastgroup == "var":
            index = int(m.group("var")[1:])
            if index < 1:
                raise ParseError(f"unknown variable {m.group('var')!r}", m.start("var"))
            tokens.append(("var", index - 1, m.start("var")))
        else:
            tokens.append((m.group("op"), None, m.start("op")))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _CircuitBuilder:
    def __init__(self):
        self.gates: list[Gate] = []

    def add(self, gate: Gate) -> int:
        self.gates.append(gate)
        return len(self.gates) - 1

    def power(self, base: int, exponent: int) -> int:
        # repeated squaring, expanding into mul gates
        if exponent == 0:
            return self.add(Gate(CONST, Fraction(1)))
        result = None
        square = base
        e = exponent
        while e:
            if e & 1:
                result = square if result is None else self.add(Gate(MUL, result, square))
            e >>= 1
            if e:
                square = self.add(Gate(MUL, square, square))
        return result


class _Parser:
    """Recursive descent with precedence climbing.

    Grammar: sum of products of unary-signed powers; '^' takes a
    nonnegative integer literal exponent and binds tightest.
    """

    def __init__(self, tokens, builder: _CircuitBuilder):
        self.tokens = tokens
        self.i = 0
        self.builder = builder
        self.max_var = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str):
        tok = self.advance()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[0]!r}", tok[2])
        return tok

    def parse_expression(self) -> int:
        node = self.parse_term()
        while self.peek()[0] in ("+", "-"):
            op = self.advance()[0]
            rhs = self.parse_term()
            node = self.builder.add(Gate(ADD if op == "+" else SUB, node, rhs))
        return node

    def parse_term(self) -> int:
        node = self.parse_factor()
        while self.peek()[0] == "*":
            self.advance()
            rhs = self.parse_factor()
            node = self.builder.add(Gate(MUL, node, rhs))
        return node

    def parse_factor(self) -> int:
        if self.peek()[0] == "-":
            pos = self.advance()[2]
            operand = self.parse_factor()
            zero = self.builder.add(Gate(CONST, Fraction(0)))
            return self.builder.add(Gate(SUB, zero, operand))
        if self.peek()[0] == "+":
            self.advance()
            return self.parse_factor()
        return self.parse_power()

    def parse_power(self) -> int:
        base = self.parse_atom()
        if self.peek()[0] == "^":
            self.advance()
            tok = self.advance()
            if tok[0] != "number" or tok[1].denominator != 1 or tok[1] < 0:
                raise ParseError("exponent must be a nonnegative integer literal", tok[2])
            return self.builder.power(base, int(tok[1]))
        return base

    def parse_atom(self) -> int:
        tok = self.advance()
        if tok[0] == "number":
            return self.builder.add(Gate(CONST, tok[1]))
        if tok[0] == "var":
            self.max_var = max(self.max_var, tok[1] + 1)
            return self.builder.add(Gate(INPUT, tok[1]))
        if tok[0] == "(":
            node = self.parse_expression()
            self.expect(")")
            return node
        raise ParseError(f"unexpected token {tok[0]!r}", tok[2])


def parse_expression(text: str) -> Circuit:
    """Parse expression text (variables x1..xN, rationals, + - * ^) into a
    circuit."""
    tokens = _tokenize(text)
    builder = _CircuitBuilder()
    parser = _Parser(tokens, builder)
    output = parser.parse_expression()
    end = parser.advance()
    if end[0] != "end":
        raise ParseError(f"trailing input {end[0]!r}", end[2])
    n_vars = max(parser.max_var, 1)
    return Circuit(n_vars, tuple(builder.gates), output)


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------


class PolyOracle:
    """Evaluation access to a hidden polynomial, with call counting.

    ``degree_bound`` is an upper bound on the total degree (exact for the
    sparse and product backends).  Evaluation is pure; the counter is the
    only mutable state and tolerates concurrent increments.
    """

    def __init__(self, n_vars: int, degree_bound: int):
        self.n_vars = n_vars
        self.degree_bound = degree_bound
        self._calls = 0
        self._lock = threading.Lock()

    @property
    def calls(self) -> int:
        return self._calls

    def evaluate(self, point: Sequence):
        if len(point) != self.n_vars:
            raise ValueError(f"expected {self.n_vars} coordinates, got {len(point)}")
        with self._lock:
            self._calls += 1
        return self._evaluate(point)

    def _evaluate(self, point: Sequence):
        raise NotImplementedError


class SparsePolyOracle(PolyOracle):
    def __init__(self, poly: SparsePoly):
        super().__init__(poly.n_vars, max(poly.degree(), 0))
        self.poly = poly

    def _evaluate(self, point):
        return self.poly.evaluate(point)


class ProductOracle(PolyOracle):
    """Oracle for scale * prod (form . x)^mult; never expands the product.

    The forms' rational content is pulled into a single scale up front so
    that evaluation at integer points runs entirely in integer arithmetic
    until one final Fraction multiplication.
    """

    def __init__(self, factorization: Factorization, n_vars: int | None = None):
        n = n_vars if n_vars is not None else factorization.n_vars
        super().__init__(n, factorization.degree())
        self.factorization = factorization
        scale = factorization.scale
        int_forms = []
        for form, mult in factorization.factors:
            den = math.lcm(*(c.denominator for c in form.coeffs))
            ints = [int(c * den) for c in form.coeffs]
            g = math.gcd(*(abs(c) for c in ints))
            scale *= Fraction(g, den) ** mult
            int_forms.append(([c // g for c in ints], mult))
        self._scale = scale
        self._int_forms = int_forms

    def _evaluate(self, point):
        acc = 1
        for coeffs, mult in self._int_forms:
            dot = 0
            for c, x in zip(coeffs, point):
                if c:
                    dot += c * x
            acc *= dot if mult == 1 else dot**mult
        return self._scale * acc


class CircuitOracle(PolyOracle):
    def __init__(self, circuit: Circuit, degree_bound: int | None = None):
        bound = degree_bound if degree_bound is not None else circuit.degree_bound()
        super().__init__(circuit.n_vars, bound)
        self.circuit = circuit

    def _evaluate(self, point):
        return self.circuit.evaluate(point)


class CallableOracle(PolyOracle):
    """Wrap an arbitrary exact evaluation function."""

    def __init__(self, n_vars: int, degree_bound: int, fn: Callable[[Sequence], object]):
        super().__init__(n_vars, degree_bound)
        self._fn = fn

    def _evaluate(self, point):
        return self._fn(point)


class TransformedOracle(PolyOracle):
    """Oracle for g(x) = f(M x); calls pass through to the inner oracle."""

    def __init__(self, inner: PolyOracle, matrix):
        super().__init__(inner.n_vars, inner.degree_bound)
        self.inner = inner
        self.matrix = matrix

    def _evaluate(self, point):
        return self.inner.evaluate(self.matrix.apply(point))


# --- derivatives and degree -------------------------------------------------


def partial_derivative_at(oracle: PolyOracle, i: int, a: Sequence):
    """(df/dx_i)(a) by interpolating f along a + t e_i at t = 0..d.

    Costs exactly d + 1 oracle calls; circuit backends use
    ``gradient_at`` instead when the whole gradient is wanted.
    """
    if not (0 <= i < oracle.n_vars):
        raise ValueError("variable index out of range")
    d = oracle.degree_bound
    values = []
    for t in range(d + 1):
        pt = list(a)
        pt[i] = pt[i] + t
        values.append(oracle.evaluate(pt))
    # derivative at t=0 of the Newton-form interpolant:
    # g'(0) = sum_{k>=1} (-1)^(k-1) Delta^k g(0) / k
    # computed over a common denominator so the difference table stays in Z
    den = math.lcm(*(v.denominator if isinstance(v, Fraction) else 1 for v in values))
    level = [int(v * den) for v in values]
    unit = math.lcm(*range(1, d + 1)) if d else 1
    total = 0
    sign = 1
    for k in range(1, d + 1):
        level = [level[j + 1] - level[j] for j in range(len(level) - 1)]
        total += sign * level[0] * (unit // k)
        sign = -sign
    return Fraction(total, den * unit)


def gradient_at(oracle: PolyOracle, a: Sequence) -> tuple:
    """Full gradient; white-box circuits are differentiated directly."""
    if isinstance(oracle, CircuitOracle):
        return circuit_gradient(oracle.circuit, a)
    return tuple(partial_derivative_at(oracle, i, a) for i in range(oracle.n_vars))


def _line_degree(values: Sequence) -> int:
    """Degree of the polynomial interpolating values at 0..m, or -1."""
    level = list(values)
    degree = -1
    k = 0
    while level:
        if any(v != 0 for v in level):
            degree = k
        level = [level[j + 1] - level[j] for j in range(len(level) - 1)]
        k += 1
    return degree


def estimate_degree(oracle: PolyOracle, rng: RandomSource, lines: int = 3) -> int:
    """Degree of f from univariate restrictions along random lines.

    Majority vote over several independent lines, falling back to the
    maximum (a restriction's degree never exceeds deg f).
    """
    bound = oracle.degree_bound
    votes = []
    for _ in range(lines):
        a = rng.point(oracle.n_vars)
        v = rng.nonzero_point(oracle.n_vars)
        values = [oracle.evaluate([ai + t * vi for ai, vi in zip(a, v)]) for t in range(bound + 1)]
        votes.append(_line_degree(values))
    if all(v == -1 for v in votes) and oracle.evaluate((0,) * oracle.n_vars) == 0:
        raise ZeroPolynomial("all restrictions vanish identically")
    for v in votes:
        if votes.count(v) >= 2:
            return max(v, 0)
    return max(max(votes), 0)


def check_homogeneous(oracle: PolyOracle, d: int, rng: RandomSource) -> bool:
    """Test f(t a) = t^d f(a) at a random point and scalar."""
    for _ in range(4):
        a = rng.point(oracle.n_vars)
        t = rng.nonzero_integer()
        fa = oracle.evaluate(a)
        fta = oracle.evaluate([t * x for x in a])
        if fa != 0 or fta != 0:
            return fta == Fraction(t) ** d * fa
    return True  # f vanished at every sample; homogeneity is unfalsified
