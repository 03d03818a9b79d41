"""Covariance expansions checked against direct quadrature.

Each check computes ``Cov[g1(X), g2(Y)]`` twice: directly, with the
family's exact joint rule, and through a series.

* diagonal expansion: ``sum_n rho_n alpha_n beta_n`` with Fourier
  coefficients of g1, g2 in the marginal orthonormal systems;
* bivariate normal: ``sum_n rho^n s1^n s2^n / n! E[g1^(n)(X)] E[g2^(n)(Y)]``;
* bivariate gamma: ``sum_n [a0]_n / (n! [a0+a1]_n [a0+a2]_n)
  E[X^n g1^(n)(X)] E[Y^n g2^(n)(Y)]``, with its single-gamma and
  record specializations.

Functions with derivatives are given as :class:`Smooth` or as a pair
``(f, [f', f'', ...])``.  A pair is read as a polynomial: derivatives past
the end of the list are zero, so the series terminates.  Non-polynomial
functions must say so with ``Smooth(..., terminates=False)``; their
series is cut at the cap and the size of the last term is reported.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import factorial
from typing import Callable, Sequence, Union

import numpy as np
from numpy.polynomial import Polynomial

from ._math import rising
from .errors import InvalidSpec, SeriesNotTerminated
from .families import (
    BivariateGamma,
    BivariateNormal,
    ExponentialRecords,
    FamilySpec,
    joint_quadrature,
    marginals,
)
from .maxcorr import maximal_correlation
from .oracle import polynomial_systems
from .orthopoly import fourier_coeffs, gauss_gamma, gauss_normal

SERIES_TOL = 1e-10
QUAD_NODES = 48

Fn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Smooth:
    """A function with its derivatives ``derivs[k-1] = f^(k)``."""

    f: Fn
    derivs: tuple[Fn, ...] = ()
    terminates: bool = True

    def __call__(self, x):
        return _broadcast(self.f, x)

    def derivative(self, n: int, x):
        if n == 0:
            return self(x)
        if n <= len(self.derivs):
            return _broadcast(self.derivs[n - 1], x)
        if self.terminates:
            return np.zeros_like(np.asarray(x, dtype=float))
        raise SeriesNotTerminated(f"derivative of order {n} was not supplied")

    @property
    def order(self) -> float:
        """Highest derivative that can be nonzero (``inf`` if unbounded)."""
        return len(self.derivs) if self.terminates else float("inf")


FnLike = Union[Smooth, tuple, Fn]


def _broadcast(f, x):
    x = np.asarray(x, dtype=float)
    return np.asarray(f(x), dtype=float) * np.ones_like(x)


def as_smooth(g: FnLike) -> Smooth:
    if isinstance(g, Smooth):
        return g
    if isinstance(g, Polynomial):
        return polynomial(g.coef)
    if isinstance(g, tuple) and len(g) == 2 and callable(g[0]):
        return Smooth(g[0], tuple(g[1]), True)
    if callable(g):
        return Smooth(g, (), False)
    raise TypeError(f"cannot interpret {g!r} as a function")


def polynomial(coeffs: Sequence[float]) -> Smooth:
    """Polynomial ``sum_k coeffs[k] x^k`` with all its derivatives."""
    p = Polynomial(np.asarray(coeffs, dtype=float)).trim()
    ders = []
    q = p
    for _ in range(p.degree()):
        q = q.deriv()
        ders.append(q)
    return Smooth(p, tuple(ders), True)


def identity() -> Smooth:
    return polynomial([0.0, 1.0])


def constant(c: float) -> Smooth:
    return polynomial([c])


def exponential(a: float, order: int = 40) -> Smooth:
    """``exp(a x)`` with ``order`` derivatives; the series does not terminate."""
    ders = tuple((lambda k: (lambda x: a**k * np.exp(a * x)))(k) for k in range(1, order + 1))
    return Smooth(lambda x: np.exp(a * x), ders, False)


@dataclass(frozen=True)
class IdentityCheck:
    lhs: float
    rhs: float
    terms_used: int
    residual: float
    tail_term: float = 0.0
    terms: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "terms_used": self.terms_used,
            "residual": self.residual,
            "tail_term": self.tail_term,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _joint_cov(spec: FamilySpec, g1: Smooth, g2: Smooth, m: int) -> float:
    x, y, w = joint_quadrature(spec, m)
    a, b = g1(x), g2(y)
    ea, eb = w @ a, w @ b
    return float(w @ ((a - ea) * (b - eb)))


def _series(coef, side1, side2, g1: Smooth, g2: Smooth, K: int, tol: float):
    """``sum_{n=1}^{N} coef(n) side1(n) side2(n)`` with termination logic.

    ``side_i(n)`` is the expectation attached to the n-th derivative.
    """
    if K < 1:
        raise InvalidSpec("K must be at least 1")
    natural = min(g1.order, g2.order)
    cap = min(K, len(g1.derivs) if not g1.terminates else K, len(g2.derivs) if not g2.terminates else K)
    top = int(min(natural, cap))
    terms = [coef(n) * side1(n) * side2(n) for n in range(1, top + 1)]
    exact = natural <= top
    if not exact and not terms:
        raise SeriesNotTerminated("non-polynomial function given without derivatives")
    tail = 0.0 if exact or not terms else float(abs(terms[-1]))
    if not exact and tail > tol:
        raise SeriesNotTerminated(f"term {top} has magnitude {tail:.3e} > {tol:.1e}")
    return float(np.sum(terms)) if terms else 0.0, top, tail, tuple(terms)


def _check(lhs, rhs, top, tail, terms) -> IdentityCheck:
    return IdentityCheck(lhs, rhs, top, abs(lhs - rhs), tail, terms)


def check_diagonal_covariance(spec: FamilySpec, g1: FnLike, g2: FnLike, K: int = 6) -> IdentityCheck:
    """``Cov[g1(X), g2(Y)]`` against ``sum_{n<=K} rho_n alpha_n beta_n``."""
    f1, f2 = as_smooth(g1), as_smooth(g2)
    phi, psi = polynomial_systems(spec, K)
    mx, my = marginals(spec)
    m = max(K + 12, 32)
    alpha = fourier_coeffs(phi, f1, mx.rule(m)).alpha
    beta = fourier_coeffs(psi, f2, my.rule(m)).alpha
    rho = maximal_correlation(spec, K).sequence.rho
    terms = tuple(rho[n - 1] * alpha[n] * beta[n] for n in range(1, K + 1))
    rhs = float(np.sum(terms))
    lhs = _joint_cov(spec, f1, f2, m)
    return IdentityCheck(lhs, rhs, K, abs(lhs - rhs), float(abs(terms[-1])), terms)


def check_normal_covariance(
    mu1: float, mu2: float, sigma1: float, sigma2: float, rho: float,
    g1: FnLike, g2: FnLike, K: int = 12, tol: float = SERIES_TOL,
) -> IdentityCheck:
    """Normal covariance expansion through expected derivatives."""
    spec = BivariateNormal(mu1, mu2, sigma1, sigma2, rho)
    f1, f2 = as_smooth(g1), as_smooth(g2)
    qx = gauss_normal(mu1, sigma1, QUAD_NODES)
    qy = gauss_normal(mu2, sigma2, QUAD_NODES)

    rhs, top, tail, terms = _series(
        lambda n: (rho * sigma1 * sigma2) ** n / factorial(n),
        lambda n: qx.weights @ f1.derivative(n, qx.nodes),
        lambda n: qy.weights @ f2.derivative(n, qy.nodes),
        f1, f2, K, tol,
    )
    lhs = _joint_cov(spec, f1, f2, QUAD_NODES)
    return _check(lhs, rhs, top, tail, terms)


def _gamma_side(g: Smooth, shape: float, lam: float):
    q = gauss_gamma(shape, lam, QUAD_NODES)
    return lambda n: q.weights @ (q.nodes**n * g.derivative(n, q.nodes))


def check_gamma_covariance(
    alpha0: float, alpha1: float, alpha2: float, lam: float,
    g1: FnLike, g2: FnLike, K: int = 12, tol: float = SERIES_TOL,
) -> IdentityCheck:
    """Bivariate-gamma expansion; the direct side is 3-D quadrature over
    the independent components ``(X0, X1, X2)``."""
    spec = BivariateGamma(alpha0, alpha1, alpha2, lam)
    f1, f2 = as_smooth(g1), as_smooth(g2)
    a0, a1, a2 = spec.alpha0, spec.alpha1, spec.alpha2
    rhs, top, tail, terms = _series(
        lambda n: rising(a0, n) / (factorial(n) * rising(a0 + a1, n) * rising(a0 + a2, n)),
        _gamma_side(f1, a0 + a1, spec.lam),
        _gamma_side(f2, a0 + a2, spec.lam),
        f1, f2, K, tol,
    )
    lhs = _joint_cov(spec, f1, f2, QUAD_NODES // 2)
    return _check(lhs, rhs, top, tail, terms)


def check_gamma_stein(
    alpha0: float, lam: float, g1: FnLike, g2: FnLike, K: int = 12, tol: float = SERIES_TOL,
) -> IdentityCheck:
    """Single-gamma identity: ``Cov[g1(X), g2(X)]`` for ``X ~ Gamma(alpha0; lam)``
    as ``sum_n E[X^n g1^(n)] E[X^n g2^(n)] / (n! [alpha0]_n)``."""
    if not alpha0 > 0 or not lam > 0:
        raise InvalidSpec("alpha0 and lambda must be positive")
    f1, f2 = as_smooth(g1), as_smooth(g2)
    rhs, top, tail, terms = _series(
        lambda n: 1.0 / (factorial(n) * rising(alpha0, n)),
        _gamma_side(f1, alpha0, lam),
        _gamma_side(f2, alpha0, lam),
        f1, f2, K, tol,
    )
    q = gauss_gamma(alpha0, lam, QUAD_NODES)
    a, b = f1(q.nodes), f2(q.nodes)
    lhs = float(q.weights @ ((a - q.weights @ a) * (b - q.weights @ b)))
    return _check(lhs, rhs, top, tail, terms)


def check_record_covariance(
    n: int, m: int, g1: FnLike, g2: FnLike, K: int = 12, tol: float = SERIES_TOL,
) -> IdentityCheck:
    """Record identity: ``Cov[g1(W_n), g2(W_{n+m})]`` for standard exponential
    records as ``sum_k E[W_n^k g1^(k)] E[W_{n+m}^k g2^(k)] / (k! [n+m]_k)``."""
    spec = ExponentialRecords(n, m)
    f1, f2 = as_smooth(g1), as_smooth(g2)
    rhs, top, tail, terms = _series(
        lambda k: 1.0 / (factorial(k) * rising(n + m, k)),
        _gamma_side(f1, n, 1.0),
        _gamma_side(f2, n + m, 1.0),
        f1, f2, K, tol,
    )
    lhs = _joint_cov(spec, f1, f2, QUAD_NODES // 2)
    return _check(lhs, rhs, top, tail, terms)
