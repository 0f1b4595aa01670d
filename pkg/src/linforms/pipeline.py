"""Shared execution pipeline behind the CLI and the HTTP service.

Builds the oracle from one of the three input representations, settles
the degree, checks homogeneity, dispatches to the selected algorithm
(``auto`` tries the cheapest first: Lie reduction, then hyperplane
identification, then bivariate projections) and packages the outcome as a
``RunReport`` with exact call accounting.  A reported ``factored`` status
is always backed by a random-point check against the oracle.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from fractions import Fraction

from . import bivproj, hyper, lieform
from .errors import (
    GroupingFailed,
    InconsistentProbes,
    InconsistentProjections,
    LinformsError,
    NonIntegralExponents,
    NotAffineProduct,
    NotSplitOverQ,
    ParseError,
    RetriesExhausted,
    SystemNotUnique,
    VerificationFailed,
    ZeroPolynomial,
)
from .exactmath import UniPoly
from .forms import Factorization, LinearForm
from .oracle import (
    DEFAULT_SAMPLE_BOUND,
    CallableOracle,
    Circuit,
    CircuitOracle,
    Gate,
    PolyOracle,
    RandomSource,
    SparsePolyOracle,
    check_homogeneous,
    estimate_degree,
    parse_expression,
)
from .sparsepoly import SparsePoly

STATUS_FACTORED = "factored"
STATUS_CLOSURE = "exists-over-closure"
STATUS_NOT_PRODUCT = "not-product"
STATUS_ERROR = "error"

ALGORITHMS = ("lie", "bivariate", "hyperplane", "auto")

# rejections that mean "this input is not a product of rational linear
# forms (of the shape the algorithm handles)", as opposed to plain errors
_REJECTIONS = (
    NotAffineProduct,
    NotSplitOverQ,
    InconsistentProjections,
    NonIntegralExponents,
)
_FAILURES = (
    RetriesExhausted,
    VerificationFailed,
    GroupingFailed,
    InconsistentProbes,
    SystemNotUnique,
)


@dataclass(frozen=True)
class PolySource:
    """Exactly one of the three input representations."""

    expr: str | None = None
    sparse_text: str | None = None
    circuit_data: dict | None = None

    def __post_init__(self):
        given = sum(x is not None for x in (self.expr, self.sparse_text, self.circuit_data))
        if given != 1:
            raise ValueError("provide exactly one input representation")


@dataclass(frozen=True)
class RunOptions:
    algorithm: str = "auto"
    seed: int = 0
    sample_bound: int = DEFAULT_SAMPLE_BOUND
    degree: int | None = None
    decide_only: bool = False
    deterministic_line_test: bool = False
    reduce_essential: bool = False

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.sample_bound < 2:
            raise ValueError("sample bound must be at least 2")
        if self.degree is not None and self.degree < 0:
            raise ValueError("degree must be nonnegative")


@dataclass
class RunReport:
    status: str
    factorization: Factorization | None
    witness: UniPoly | None
    blackbox_calls: int
    algorithm: str
    seed: int
    elapsed: float
    message: str | None = None

    def to_dict(self) -> dict:
        factors = None
        lam = None
        if self.factorization is not None:
            lam = str(self.factorization.scale)
            factors = [
                {"coeffs": [str(c) for c in form.coeffs], "exponent": mult}
                for form, mult in self.factorization.factors
            ]
        return {
            "status": self.status,
            "lambda": lam,
            "factors": factors,
            "blackbox_calls": self.blackbox_calls,
            "algorithm": self.algorithm,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def circuit_from_data(data: dict) -> Circuit:
    """Circuit from its JSON form: {n_vars, gates: [[op, ...]], output}."""
    try:
        n_vars = int(data["n_vars"])
        raw_gates = data["gates"]
        output = int(data["output"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed circuit object: {exc}") from exc
    gates = []
    for item in raw_gates:
        op = item[0]
        if op == "input":
            gates.append(Gate("input", int(item[1])))
        elif op == "const":
            gates.append(Gate("const", Fraction(str(item[1]))))
        elif op in ("add", "sub", "mul"):
            gates.append(Gate(op, int(item[1]), int(item[2])))
        else:
            raise ValueError(f"unknown gate op {op!r}")
    return Circuit(n_vars, tuple(gates), output)


def build_oracle(source: PolySource) -> PolyOracle:
    if source.expr is not None:
        return CircuitOracle(parse_expression(source.expr))
    if source.sparse_text is not None:
        return SparsePolyOracle(SparsePoly.from_text(source.sparse_text))
    return CircuitOracle(circuit_from_data(source.circuit_data))


def _outcome_to_report_parts(outcome: lieform.FactorOutcome):
    if isinstance(outcome, lieform.FactoredOverQ):
        return STATUS_FACTORED, outcome.factorization, None, None
    if isinstance(outcome, lieform.ExistsOverClosure):
        return STATUS_CLOSURE, None, outcome.witness, None
    return STATUS_NOT_PRODUCT, None, None, f"rejected: {outcome.reason}"


def _restrict_to_essential(oracle: PolyOracle, rng: RandomSource):
    """Optional preprocessing: change variables so f depends on its first
    r coordinates, and expose those as an r-variate oracle."""
    a, r, reduced = lieform.essential_variables_reduce(oracle, rng)
    n = oracle.n_vars
    if r == n:
        return oracle, None

    def eval_restricted(point):
        return reduced.evaluate(tuple(point) + (0,) * (n - r))

    restricted = CallableOracle(r, oracle.degree_bound, eval_restricted)

    def pull_back(fact: Factorization) -> Factorization:
        forms = []
        for form, mult in fact.factors:
            full = list(form.coeffs) + [Fraction(0)] * (n - r)
            coeffs = tuple(
                sum((full[k] * a.data[k][j] for k in range(n)), Fraction(0))
                for j in range(n)
            )
            forms.append((LinearForm(coeffs), mult))
        return Factorization(fact.scale, tuple(forms)).canonical()

    return restricted, pull_back


def _run_algorithm(
    algorithm: str,
    oracle: PolyOracle,
    rng: RandomSource,
    d: int,
    deterministic_line_test: bool,
):
    """Returns (status, factorization, witness, message)."""
    if algorithm == "lie":
        return _outcome_to_report_parts(
            lieform.factor_independent_forms(oracle, rng, degree=d)
        )
    if algorithm == "hyperplane":
        fact = hyper.factor_hyperplane(
            oracle, rng, degree=d, deterministic_line_test=deterministic_line_test
        )
        return STATUS_FACTORED, fact, None, None
    if algorithm == "bivariate":
        fact = bivproj.factor_general(oracle, rng, degree=d)
        return STATUS_FACTORED, fact, None, None
    # auto: cheapest first; fall through on any rejection
    messages = []
    try:
        outcome = lieform.factor_independent_forms(oracle, rng, degree=d)
        if not isinstance(outcome, lieform.NotProduct):
            return _outcome_to_report_parts(outcome)
        messages.append(f"lie: {outcome.reason}")
    except (*_REJECTIONS, *_FAILURES) as exc:
        messages.append(f"lie: {exc}")
    try:
        fact = hyper.factor_hyperplane(
            oracle, rng, degree=d, deterministic_line_test=deterministic_line_test
        )
        return STATUS_FACTORED, fact, None, None
    except (*_REJECTIONS, *_FAILURES) as exc:
        messages.append(f"hyperplane: {exc}")
    try:
        fact = bivproj.factor_general(oracle, rng, degree=d)
        return STATUS_FACTORED, fact, None, None
    except (*_REJECTIONS, *_FAILURES) as exc:
        messages.append(f"bivariate: {exc}")
    return STATUS_NOT_PRODUCT, None, None, "; ".join(messages)


def execute(source: PolySource, options: RunOptions) -> RunReport:
    started = time.perf_counter()
    seed = options.seed

    def report(status, factorization=None, witness=None, message=None, calls=0):
        return RunReport(
            status=status,
            factorization=factorization,
            witness=witness,
            blackbox_calls=calls,
            algorithm=options.algorithm,
            seed=seed,
            elapsed=time.perf_counter() - started,
            message=message,
        )

    try:
        oracle = build_oracle(source)
    except (ParseError, ValueError) as exc:
        return report(STATUS_ERROR, message=str(exc))
    rng = RandomSource(seed, options.sample_bound)
    try:
        if options.degree is not None:
            d = options.degree
        elif isinstance(oracle, SparsePolyOracle):
            d = max(oracle.poly.degree(), 0)
        else:
            d = estimate_degree(oracle, rng)
        oracle.degree_bound = d
        if d == 0:
            value = oracle.evaluate((0,) * oracle.n_vars)
            if value == 0:
                raise ZeroPolynomial("the zero polynomial has no factorization")
            return report(
                STATUS_FACTORED, Factorization(value, ()), calls=oracle.calls
            )
        if not check_homogeneous(oracle, d, rng):
            return report(
                STATUS_NOT_PRODUCT,
                message="not homogeneous: a product of linear forms is homogeneous",
                calls=oracle.calls,
            )
        work_oracle = oracle
        pull_back = None
        if options.reduce_essential:
            work_oracle, pull_back = _restrict_to_essential(oracle, rng)
        if options.decide_only:
            decision = lieform.decide_orbit_membership(work_oracle, False, rng)
            if decision.member:
                return report(STATUS_CLOSURE, calls=oracle.calls)
            return report(
                STATUS_NOT_PRODUCT,
                message=f"rejected: {decision.reason}",
                calls=oracle.calls,
            )
        status, factorization, witness, message = _run_algorithm(
            options.algorithm,
            work_oracle,
            rng,
            d,
            options.deterministic_line_test,
        )
        if factorization is not None and pull_back is not None:
            factorization = pull_back(factorization)
        if status == STATUS_FACTORED:
            point = rng.point(oracle.n_vars)
            if oracle.evaluate(point) != factorization.evaluate(point):
                raise VerificationFailed("final random-point check failed")
        return report(status, factorization, witness, message, calls=oracle.calls)
    except _REJECTIONS as exc:
        return report(STATUS_NOT_PRODUCT, message=str(exc), calls=oracle.calls)
    except (LinformsError, ValueError) as exc:
        return report(
            STATUS_ERROR,
            message=f"{type(exc).__name__}: {exc}",
            calls=oracle.calls,
        )
