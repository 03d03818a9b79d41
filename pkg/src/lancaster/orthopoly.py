"""Orthonormal polynomial systems built from moment sequences.

The builder runs modified Gram-Schmidt (two passes) on the monomial
basis under the inner product ``<p, q> = p^T H q`` where ``H`` is the
Hankel matrix of moments.  Moments are handled in standardized
coordinates ``t = (x - center) / scale``; raw moments are standardized
first, which keeps ``H`` far better conditioned than in the raw basis.

When the law sits on finitely many points ``x_0..x_nu`` the system is
continued past degree ``nu`` with the vanishing polynomials

    phi_n(x) = x^(n - nu - 1) (x - x_0) ... (x - x_nu),   n > nu,

so that every degree has a polynomial with positive leading coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy import special

from .errors import (
    DegenerateSupport,
    DegreeOutOfRange,
    LancasterError,
    MomentMatrixNotPSD,
    QuadratureFailure,
)

DEFAULT_K = 12
PIVOT_TOL = 1e-10
PSD_TOL = 1e-10


class InconsistentSupport(LancasterError, ValueError):
    """Moments are not those of a law on the supplied support points."""


# --------------------------------------------------------------------------- #
# Quadrature rules
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class Quadrature:
    """Discrete probability measure ``sum_i w_i delta_{x_i}``."""

    nodes: np.ndarray
    weights: np.ndarray

    def expect(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(np.dot(self.weights, f(self.nodes)))

    def check(self, tol: float = 1e-10) -> None:
        if self.nodes.shape != self.weights.shape:
            raise QuadratureFailure("nodes and weights differ in shape")
        if np.any(self.weights < -tol):
            raise QuadratureFailure("negative quadrature weight")
        total = float(np.sum(self.weights))
        if abs(total - 1.0) > tol:
            raise QuadratureFailure(f"weights sum to {total!r}, expected 1")


def _normalized(nodes, weights) -> Quadrature:
    w = np.asarray(weights, dtype=float)
    return Quadrature(np.asarray(nodes, dtype=float), w / w.sum())


def gauss_normal(mu: float, sigma: float, m: int = 64) -> Quadrature:
    z, w = special.roots_hermitenorm(m)
    return _normalized(mu + sigma * z, w)


def gauss_beta(p: float, q: float, m: int = 64) -> Quadrature:
    """Gauss-Jacobi rule for Beta(p, q) on (0, 1)."""
    t, w = special.roots_jacobi(m, q - 1.0, p - 1.0)
    return _normalized(0.5 * (1.0 + t), w)


def gauss_gamma(shape: float, rate: float = 1.0, m: int = 64) -> Quadrature:
    """Generalized Gauss-Laguerre rule for Gamma(shape; rate).

    ``shape == 0`` is the point mass at zero.
    """
    if shape == 0:
        return Quadrature(np.zeros(1), np.ones(1))
    x, w = special.roots_genlaguerre(m, shape - 1.0)
    return _normalized(x / rate, w)


def discrete_rule(points: Sequence[float], probs: Sequence[float]) -> Quadrature:
    return Quadrature(np.asarray(points, dtype=float), np.asarray(probs, dtype=float))


def quantile_rule(ppf: Callable[[np.ndarray], np.ndarray], m: int = 256) -> Quadrature:
    """Gauss-Legendre on (0, 1) pushed through a quantile function."""
    u, w = np.polynomial.legendre.leggauss(m)
    u = 0.5 * (u + 1.0)
    return Quadrature(np.asarray(ppf(u), dtype=float), 0.5 * w)


# --------------------------------------------------------------------------- #
# Moments
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class MomentSequence:
    """Moments ``E[T^k]``, k = 0..2K, of ``T = (X - center) / scale``.

    With the defaults ``center=0, scale=1`` these are raw moments of X.
    """

    moments: tuple[float, ...]
    degree_cap: int
    center: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "moments", tuple(float(m) for m in self.moments))
        if self.degree_cap < 1:
            raise ValueError("degree_cap must be positive")
        if len(self.moments) < 2 * self.degree_cap + 1:
            raise ValueError(
                f"need {2 * self.degree_cap + 1} moments for degree cap "
                f"{self.degree_cap}, got {len(self.moments)}"
            )
        if abs(self.moments[0] - 1.0) > 1e-12:
            raise ValueError("m_0 must equal 1")
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    def hankel(self) -> np.ndarray:
        K = self.degree_cap
        m = np.asarray(self.moments)
        idx = np.add.outer(np.arange(K + 1), np.arange(K + 1))
        return m[idx]

    def raw(self) -> list[float]:
        """Raw moments ``E[X^k]`` recovered by binomial expansion."""
        c, s = self.center, self.scale
        mu = self.moments
        return [
            sum(comb(k, j) * s**j * mu[j] * c ** (k - j) for j in range(k + 1))
            for k in range(len(mu))
        ]

    def standardized(self) -> "MomentSequence":
        """Re-express around the mean with unit variance.

        Loses accuracy when ``|mean| >> sd``; callers that can compute
        standardized moments directly (see :func:`moments_from_quadrature`)
        should do so.
        """
        mu = self.moments
        mean_t = mu[1]
        var_t = mu[2] - mu[1] ** 2
        if var_t < -1e-12 * max(1.0, mu[2]):
            raise MomentMatrixNotPSD(f"negative variance {var_t:.3e}")
        if not var_t > 0:
            raise DegenerateSupport("variance is not positive")
        sd_t = var_t**0.5
        new = [
            sum(comb(k, j) * mu[j] * (-mean_t) ** (k - j) for j in range(k + 1)) / sd_t**k
            for k in range(len(mu))
        ]
        new[0], new[1], new[2] = 1.0, 0.0, 1.0
        return MomentSequence(
            tuple(new),
            self.degree_cap,
            center=self.center + self.scale * mean_t,
            scale=self.scale * sd_t,
        )


def moments_from_quadrature(
    rule: Quadrature, K: int, center: float | None = None, scale: float | None = None
) -> MomentSequence:
    """Standardized moments integrated directly against ``rule``.

    With a Gaussian rule of ``m > K`` nodes the integrals are exact for
    every moment up to order ``2K``.
    """
    rule.check()
    x, w = rule.nodes, rule.weights
    if center is None:
        center = float(np.dot(w, x))
    if scale is None:
        scale = float(np.sqrt(np.dot(w, (x - center) ** 2)))
    if not scale > 0:
        raise DegenerateSupport("quadrature rule has zero spread")
    t = (x - center) / scale
    powers = np.vander(t, 2 * K + 1, increasing=True)
    mu = w @ powers
    mu[0] = 1.0
    return MomentSequence(tuple(mu), K, center=center, scale=scale)


# --------------------------------------------------------------------------- #
# Polynomial systems
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class PolySystem:
    """Orthonormal polynomials ``phi_0..phi_K`` with positive leading terms.

    ``std_coeffs[n]`` holds ``phi_n`` in the variable ``t = (x - center) / scale``
    for ``n <= min(K, nu)``; higher degrees (finite support only) are the
    vanishing product polynomials over ``support``.  When ``recurrence``
    ``(a, b)`` is set, ``b[n] phi_{n+1} = (t - a[n]) phi_n - b[n-1] phi_{n-1}``
    and evaluation uses it instead of the monomial coefficients.
    """

    std_coeffs: tuple[np.ndarray, ...]
    degree_cap: int
    center: float = 0.0
    scale: float = 1.0
    nu: int | None = None
    support: tuple[float, ...] | None = None
    pivots: tuple[float, ...] = field(default=(), repr=False)
    recurrence: tuple[tuple[float, ...], tuple[float, ...]] | None = field(default=None, repr=False)

    @property
    def n_orthonormal(self) -> int:
        """Highest degree that is a genuine (non-vanishing) member."""
        return len(self.std_coeffs) - 1

    def _product_poly(self, n: int) -> Polynomial:
        base = Polynomial.fromroots(self.support)
        return base * Polynomial([0.0, 1.0]) ** (n - self.nu - 1)

    @property
    def coeffs(self) -> list[np.ndarray]:
        """Monomial coefficients in x (ascending order) for n = 0..K."""
        t_of_x = Polynomial([-self.center / self.scale, 1.0 / self.scale])
        out = []
        for n in range(self.degree_cap + 1):
            if n <= self.n_orthonormal:
                out.append(Polynomial(self.std_coeffs[n])(t_of_x).coef)
            else:
                out.append(self._product_poly(n).coef)
        return out

    @property
    def leading(self) -> list[float]:
        lead = []
        for n in range(self.degree_cap + 1):
            if n <= self.n_orthonormal:
                lead.append(float(self.std_coeffs[n][-1] / self.scale**n))
            else:
                lead.append(1.0)
        return lead

    def __call__(self, n: int, x):
        return eval_poly(self, n, x)

    def table(self, x, degrees: int | None = None) -> np.ndarray:
        """Rows ``phi_n(x)`` for n = 0..degrees (default K)."""
        top = self.degree_cap if degrees is None else degrees
        return np.array([eval_poly(self, n, x) for n in range(top + 1)])


def _hankel_gram_schmidt(H: np.ndarray, top: int, pivot_tol: float):
    """Two-pass MGS of ``e_0..e_top`` under ``<p,q> = p^T H q``.

    Returns the orthonormal coefficient vectors, the pivots, and the
    (monic) residual at the first degree whose pivot collapsed, if any.
    """
    size = H.shape[0]
    basis: list[np.ndarray] = []
    pivots: list[float] = []
    lead_pivot = float(H[0, 0])
    for k in range(top + 1):
        v = np.zeros(size)
        v[k] = 1.0
        for _ in range(2):
            for q in basis:
                v = v - float(q @ H @ v) * q
        piv = float(v @ H @ v)
        pivots.append(piv)
        if k > 0 and piv < pivot_tol * lead_pivot:
            if piv < -1e-8 * lead_pivot:
                raise MomentMatrixNotPSD(f"negative pivot {piv:.3e} at degree {k}")
            return basis, pivots, v
        basis.append(v / np.sqrt(piv))
    return basis, pivots, None


def build_ops(
    moments: MomentSequence,
    support: Sequence[float] | None = None,
    pivot_tol: float = PIVOT_TOL,
) -> PolySystem:
    """Construct the orthonormal polynomial system of a moment sequence.

    Parameters
    ----------
    moments : MomentSequence
        Moments up to order ``2K``.  Raw moments are standardized first.
    support : sequence of float, optional
        Support points of a finitely supported law.  When omitted and the
        moments turn out to be finitely supported, the points are recovered
        as the zeros of the first collapsed monic polynomial.
    pivot_tol : float
        Relative pivot threshold declaring the support finite.

    Raises
    ------
    MomentMatrixNotPSD
        The Hankel matrix has an eigenvalue below ``-PSD_TOL``.
    DegenerateSupport
        Fewer than two support points.
    """
    if moments.center == 0.0 and moments.scale == 1.0:
        moments = moments.standardized()
    K = moments.degree_cap
    H = moments.hankel()
    eig = np.linalg.eigvalsh(H)
    if eig[0] < -PSD_TOL * max(1.0, eig[-1]):
        raise MomentMatrixNotPSD(f"Hankel eigenvalue {eig[0]:.3e} < 0")

    if support is not None:
        pts = np.unique(np.asarray(support, dtype=float))
        if pts.size < 2:
            raise DegenerateSupport("support has fewer than two points")
        nu_given = pts.size - 1
    else:
        pts, nu_given = None, None

    top = K if nu_given is None else min(K, nu_given)
    basis, pivots, collapsed = _hankel_gram_schmidt(H, top, pivot_tol)
    if len(basis) < 2:
        raise DegenerateSupport("moments describe a point mass")

    nu: int | None
    if collapsed is not None:
        nu = len(basis) - 1
        if nu_given is not None and nu != nu_given:
            raise InconsistentSupport(
                f"moments have {nu + 1} support points, {nu_given + 1} given"
            )
        if pts is None:
            roots = np.roots(collapsed[: nu + 2][::-1]).real
            pts = np.sort(moments.center + moments.scale * roots)
    elif nu_given is not None and nu_given <= K:
        nu = nu_given
    else:
        nu = nu_given  # None (unbounded as far as degree K can tell) or > K

    std = tuple(np.asarray(b[: n + 1], dtype=float) for n, b in enumerate(basis))
    return PolySystem(
        std_coeffs=std,
        degree_cap=K,
        center=moments.center,
        scale=moments.scale,
        nu=nu,
        support=None if pts is None or nu is None else tuple(float(p) for p in pts),
        pivots=tuple(pivots),
    )


def build_ops_from_rule(
    rule: Quadrature,
    K: int,
    support: Sequence[float] | None = None,
    center: float | None = None,
    scale: float | None = None,
    pivot_tol: float = PIVOT_TOL,
) -> PolySystem:
    """Orthonormal system of the law carried by a quadrature rule.

    Runs the Stieltjes procedure on the rule's nodes (in standardized
    coordinates) with one re-orthogonalization pass per degree.  With a
    Gaussian rule of ``m > K`` nodes the result is the exact system of the
    underlying law; unlike the moment route its accuracy does not degrade
    with the conditioning of the Hankel matrix.

    ``support`` marks a finitely supported law; degrees above
    ``nu = len(support) - 1`` become the vanishing product polynomials.
    """
    rule.check()
    x, w = rule.nodes, rule.weights
    if center is None:
        center = float(np.dot(w, x))
    if scale is None:
        scale = float(np.sqrt(np.dot(w, (x - center) ** 2)))
    if not scale > 0:
        raise DegenerateSupport("quadrature rule has zero spread")
    t = (x - center) / scale
    if support is not None:
        pts = np.unique(np.asarray(support, dtype=float))
        if pts.size < 2:
            raise DegenerateSupport("support has fewer than two points")
        nu = int(pts.size - 1)
    else:
        pts, nu = None, None
    top = K if nu is None else min(K, nu)

    basis = [np.ones_like(t)]
    a: list[float] = []
    b: list[float] = []
    pivots = [1.0]
    for n in range(top):
        p = basis[-1]
        a.append(float(np.dot(w, t * p * p)))
        q = (t - a[-1]) * p - (b[-1] * basis[-2] if b else 0.0)
        # re-orthogonalize against every earlier member
        for r in basis:
            q = q - np.dot(w, q * r) * r
        norm2 = float(np.dot(w, q * q))
        if norm2 < pivot_tol:
            if nu is None:
                raise DegenerateSupport(f"rule has only {n + 1} support points; pass them as support")
            break
        b.append(float(np.sqrt(norm2)))
        basis.append(q / b[-1])
        pivots.append(pivots[-1] * norm2)

    # monomial coefficients in t from the recurrence (reporting only)
    polys = [Polynomial([1.0])]
    T = Polynomial([0.0, 1.0])
    for n in range(len(b)):
        nxt = (T - a[n]) * polys[n] - (b[n - 1] * polys[n - 1] if n else 0.0)
        polys.append(nxt / b[n])
    std = tuple(np.pad(pl.coef, (0, n + 1 - pl.coef.size)) for n, pl in enumerate(polys))
    return PolySystem(
        std_coeffs=std,
        degree_cap=K,
        center=center,
        scale=scale,
        nu=nu,
        support=None if pts is None else tuple(float(v) for v in pts),
        pivots=tuple(pivots),
        recurrence=(tuple(a), tuple(b)),
    )


def eval_poly(sys: PolySystem, n: int, x):
    """Evaluate ``phi_n`` at ``x`` (scalar or array).

    Uses the three-term recurrence when the system carries one, Horner's
    rule on the standardized coefficients otherwise.
    """
    if not 0 <= n <= sys.degree_cap:
        raise DegreeOutOfRange(f"degree {n} outside 0..{sys.degree_cap}")
    x = np.asarray(x, dtype=float)
    if n <= sys.n_orthonormal and sys.recurrence is not None:
        t = (x - sys.center) / sys.scale
        a, b = sys.recurrence
        prev, out = np.zeros_like(t), np.ones_like(t)
        for k in range(n):
            nxt = ((t - a[k]) * out - (b[k - 1] if k else 0.0) * prev) / b[k]
            prev, out = out, nxt
    elif n <= sys.n_orthonormal:
        t = (x - sys.center) / sys.scale
        c = sys.std_coeffs[n]
        acc = np.full_like(t, c[-1])
        for a in c[-2::-1]:
            acc = acc * t + a
        out = acc
    else:
        out = x ** (n - sys.nu - 1)
        for p in sys.support:
            out = out * (x - p)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------- #
# Fourier coefficients
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class FourierCoeffs:
    alpha: tuple[float, ...]
    variance: float
    parseval_residual: float


def fourier_coeffs(
    sys: PolySystem, g: Callable[[np.ndarray], np.ndarray], quadrature: Quadrature
) -> FourierCoeffs:
    """``alpha_n = E[g(X) phi_n(X)]`` for n = 0..K under ``quadrature``."""
    quadrature.check()
    x, w = quadrature.nodes, quadrature.weights
    gx = np.asarray(g(x), dtype=float) * np.ones_like(x)
    alpha = tuple(float(np.dot(w, gx * eval_poly(sys, n, x))) for n in range(sys.degree_cap + 1))
    mean = float(np.dot(w, gx))
    var = float(np.dot(w, (gx - mean) ** 2))
    resid = abs(var - sum(a * a for a in alpha[1:]))
    return FourierCoeffs(alpha=alpha, variance=var, parseval_residual=resid)
