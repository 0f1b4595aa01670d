"""linforms: exact black-box factorization into products of linear forms.

The input polynomial is accessed only through exact rational point
evaluation.  Three independent algorithms are provided: reduction to
simultaneous matrix diagonalization via the polynomial's symmetry Lie
algebra (linearly independent forms), reconstruction from bivariate
projections, and identification of the hyperplanes of the zero set
(both allowing linearly dependent forms).
"""

from .errors import (
    GroupingFailed,
    InconsistentProbes,
    InconsistentProjections,
    IrrationalEigenvalues,
    LinformsError,
    NonIntegralExponents,
    NotAffineProduct,
    NotDiagonalizable,
    NotSplitOverQ,
    ParseError,
    RetriesExhausted,
    RootFormMismatch,
    SystemNotUnique,
    VerificationFailed,
    ZeroPolynomial,
)
from .forms import Factorization, LinearForm
from .oracle import (
    Circuit,
    CircuitOracle,
    PolyOracle,
    ProductOracle,
    RandomSource,
    SparsePolyOracle,
    TransformedOracle,
    check_homogeneous,
    circuit_gradient,
    estimate_degree,
    gradient_at,
    parse_expression,
    partial_derivative_at,
)
from .sparsepoly import SparsePoly

__all__ = [
    "Circuit",
    "CircuitOracle",
    "Factorization",
    "GroupingFailed",
    "InconsistentProbes",
    "InconsistentProjections",
    "IrrationalEigenvalues",
    "LinearForm",
    "LinformsError",
    "NonIntegralExponents",
    "NotAffineProduct",
    "NotDiagonalizable",
    "NotSplitOverQ",
    "ParseError",
    "PolyOracle",
    "ProductOracle",
    "RandomSource",
    "RetriesExhausted",
    "RootFormMismatch",
    "SparsePoly",
    "SparsePolyOracle",
    "SystemNotUnique",
    "TransformedOracle",
    "VerificationFailed",
    "ZeroPolynomial",
    "check_homogeneous",
    "circuit_gradient",
    "estimate_degree",
    "gradient_at",
    "parse_expression",
    "partial_derivative_at",
]

__version__ = "0.1.0"
