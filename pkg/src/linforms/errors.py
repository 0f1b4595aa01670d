"""Exception hierarchy shared across the package.

Every failure mode that an algorithm can report (as opposed to a plain
programming error) gets its own class so callers can route on it.  The
randomized algorithms distinguish *definitive* rejections (the input is
provably not of the expected shape, e.g. ``NotSplitOverQ``) from
*retryable* bad-randomness events (``InconsistentProbes``,
``GroupingFailed``), which are retried internally with fresh draws before
surfacing.
"""

from __future__ import annotations


class LinformsError(Exception):
    """Base class for all package errors."""


class ParseError(LinformsError):
    """Malformed expression text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ZeroPolynomial(LinformsError):
    """The black box appears to compute the zero polynomial."""


class NotDiagonalizable(LinformsError):
    """Matrix is not diagonalizable over the algebraic closure."""


class IrrationalEigenvalues(LinformsError):
    """All eigenvalues exist over the closure but some are irrational.

    ``witness`` is the monic squarefree factor (degree >= 2, no rational
    roots) that blocks a rational eigendecomposition.
    """

    def __init__(self, witness):
        super().__init__(f"irrational eigenvalues, witness factor {witness}")
        self.witness = witness


class RetriesExhausted(LinformsError):
    """A randomized step kept hitting its (improbable) bad event."""


class SystemNotUnique(LinformsError):
    """The centralizer linear system has no unique solution."""


class NonIntegralExponents(LinformsError):
    """Recovered exponent vector is not a positive integer vector."""

    def __init__(self, exponents):
        super().__init__(f"exponent vector {exponents} is not positive integral")
        self.exponents = exponents


class NotAffineProduct(LinformsError):
    """A bivariate polynomial is not a product of rational affine forms."""


class InconsistentProjections(LinformsError):
    """Bivariate projections cannot be merged into one factorization."""


class VerificationFailed(LinformsError):
    """A computed factorization failed its random-point check."""


class NotSplitOverQ(LinformsError):
    """A line restriction has non-rational roots, so the zero set is not
    a union of rational hyperplanes."""


class InconsistentProbes(LinformsError):
    """Probe lines disagree on the number or multiplicities of roots."""


class GroupingFailed(LinformsError):
    """Intersection points could not be grouped into hyperplanes."""


class RootFormMismatch(LinformsError):
    """A probe root does not lie on exactly one identified hyperplane."""
