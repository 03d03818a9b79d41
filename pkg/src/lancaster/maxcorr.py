"""Lancaster sequences and the maximal correlation ``R = sup_n |rho_n|``."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from .errors import InvalidSpec, NegativeProduct
from .families import BivariateGamma, FamilySpec, RegressionCoeffs, family_nu, regression_coeffs

# relative slack used when comparing |rho_n| values for ties / monotonicity
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class LancasterSequence:
    """``rho[n-1] = rho_n`` for n = 1..K, with the support cutoff ``nu``."""

    rho: tuple[float, ...]
    nu: int | None
    monotone_decreasing: bool
    strictly_decreasing: bool = False

    @property
    def K(self) -> int:
        return len(self.rho)

    def __getitem__(self, n: int) -> float:
        """``rho_n`` with 1-based indexing."""
        if not 1 <= n <= self.K:
            raise IndexError(f"rho_{n} not computed (K = {self.K})")
        return self.rho[n - 1]


def lancaster_sequence(coeffs: RegressionCoeffs, nu: int | None = None) -> LancasterSequence:
    """``rho_n = sign(A_n) sqrt(A_n B_n 1{n <= nu})``.

    Raises
    ------
    NegativeProduct
        Some admissible ``A_n B_n`` is negative, so the coefficients cannot
        come from a law with diagonal structure.
    """
    rho = []
    for n, (a, b) in enumerate(zip(coeffs.A, coeffs.B), start=1):
        if nu is not None and n > nu:
            rho.append(0.0)
            continue
        prod = a * b
        if prod < 0:
            # tolerate rounding noise around an exact zero
            if prod < -1e-15 * max(1.0, abs(a), abs(b)):
                raise NegativeProduct(f"A_{n} * B_{n} = {prod!r} < 0")
            prod = 0.0
        rho.append(float(np.sign(a)) * sqrt(prod))
    mags = np.abs(rho)
    diffs = np.diff(mags)
    slack = TIE_RTOL * np.maximum(mags[:-1], 1e-300)
    monotone = bool(np.all(diffs <= slack))
    # strict decrease only required where the sequence is not yet cut off
    live = mags[:-1] > 0
    strict = bool(np.all(diffs[live] < -slack[live])) if len(rho) > 1 else True
    return LancasterSequence(tuple(rho), nu, monotone, strict and monotone)


@dataclass(frozen=True)
class MaxCorrReport:
    """Result of :func:`maximal_correlation`.

    Only the five documented fields are serialized; ``sign`` (the sign of
    ``A_{n0}``, i.e. whether optimal transforms co-move or counter-move)
    and ``truncation_proven`` are carried alongside.
    """

    R: float
    attaining_index: int | None
    unique_max: bool
    truncation_note: str
    oracle_residual: float | None = None
    sign: int = 1
    truncation_proven: bool = True
    sequence: LancasterSequence | None = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "R": self.R,
            "attaining_index": self.attaining_index,
            "unique_max": self.unique_max,
            "truncation_note": self.truncation_note,
            "oracle_residual": self.oracle_residual,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @property
    def attainment(self) -> str:
        """Human-readable description of the optimal transforms."""
        if self.attaining_index is None or self.R == 0:
            return "R = 0: X and Y are uncorrelated under every polynomial pair"
        n0 = self.attaining_index
        rel = "a1*b1 > 0" if self.sign > 0 else "a1*b1 < 0"
        return f"g1 = a0 + a1*phi_{n0}(x), g2 = b0 + b1*psi_{n0}(y) with {rel}"


def report_from_sequence(seq: LancasterSequence) -> MaxCorrReport:
    mags = np.abs(seq.rho)
    R = float(mags.max()) if mags.size else 0.0
    if R == 0.0:
        return MaxCorrReport(0.0, None, False, "all computed rho_n vanish", sequence=seq)
    n0 = int(np.argmax(mags)) + 1
    ties = np.flatnonzero(mags >= R * (1 - TIE_RTOL))
    unique = ties.size == 1
    sign = 1 if seq.rho[n0 - 1] > 0 else -1
    top = seq.K if seq.nu is None else min(seq.K, seq.nu)
    if seq.nu is not None and seq.nu <= seq.K:
        proven = True
        note = f"exact: rho_n = 0 for n > nu = {seq.nu}; sup over n <= {top}"
    elif seq.monotone_decreasing:
        proven = True
        note = f"|rho_n| non-increasing through K = {seq.K}; sup attained at n = {n0}"
    else:
        proven = False
        note = f"UNPROVEN: |rho_n| not monotone by K = {seq.K}; sup taken over n <= {top}"
    return MaxCorrReport(
        R=R,
        attaining_index=n0,
        unique_max=unique,
        truncation_note=note,
        sign=sign,
        truncation_proven=proven,
        sequence=seq,
    )


def maximal_correlation(spec: FamilySpec, K: int = 12) -> MaxCorrReport:
    """Maximal correlation of a diagonal family from its regression coefficients.

    Examples
    --------
    >>> from lancaster.families import UniformOrderStats
    >>> round(maximal_correlation(UniformOrderStats(2, 3, 4)).R, 12)
    0.666666666667
    """
    seq = lancaster_sequence(regression_coeffs(spec, K), family_nu(spec))
    return report_from_sequence(seq)


def splitting_record_bound(n: int, n1: int, n2: int) -> float:
    """Maximal correlation of the two branch records after ``n`` shared records."""
    for name, v in (("n", n), ("n1", n1), ("n2", n2)):
        if isinstance(v, bool) or int(v) != v or v < 1:
            raise InvalidSpec(f"{name} must be a positive integer")
    # evaluated as sqrt(A_1 B_1) with the same roundings as the gamma path,
    # so the two agree bit-for-bit (n / (sqrt(n+n1) sqrt(n+n2)) can differ by ulps)
    a = 1.0 * (n / (n + n2))
    b = 1.0 * (n / (n + n1))
    return sqrt(a * b)


def splitting_spec(n: int, n1: int, n2: int) -> BivariateGamma:
    """The splitting-record pair as a bivariate gamma with integer shapes."""
    splitting_record_bound(n, n1, n2)
    return BivariateGamma(n, n1, n2, 1.0)
