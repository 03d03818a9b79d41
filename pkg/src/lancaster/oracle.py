"""Numerical estimates of maximal correlation that do not use the closed forms.

* :func:`svd_maxcorr` -- second singular value of the normalized joint table.
* :func:`ace_maxcorr` -- alternating conditional expectations (power
  iteration) on a discrete joint.
* :func:`discretize` -- equal-probability binning of a continuous family.
* :func:`verify_diagonal` -- ``E[phi_n(X) psi_k(Y)]`` by exact quadrature.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial
from scipy import stats

from .errors import NoConvergenceWarning, QuadratureFailure, UnsupportedFamily
from .families import (
    BetaType,
    BivariateGamma,
    BivariateNormal,
    ExponentialRecords,
    FamilySpec,
    FinitePopOrderStats,
    UniformOrderStats,
    _canonical,
    conditional_moment,
    joint_pmf,
    joint_quadrature,
    marginals,
    sample_joint,
)
from .joint import DiscreteJoint
from .maxcorr import maximal_correlation
from .orthopoly import build_ops_from_rule

DEFAULT_BINS = 128
MC_SAMPLES = 1_000_000
NODES_PER_PIECE = 8


# --------------------------------------------------------------------------- #
# Exact oracle
# --------------------------------------------------------------------------- #


def _normalized_table(joint: DiscreteJoint):
    J = joint.restricted()
    sx, sy = np.sqrt(J.px), np.sqrt(J.py)
    Q = J.P / np.outer(sx, sy)
    return J, Q, sx, sy


def svd_maxcorr(joint: DiscreteJoint) -> float:
    """Second singular value of ``Q = P / sqrt(px py^T)``.

    The top singular pair (value 1, vectors ``sqrt(px)``, ``sqrt(py)``)
    belongs to constant functions; it is deflated before the SVD.
    """
    _, Q, sx, sy = _normalized_table(joint)
    s = np.linalg.svd(Q - np.outer(sx, sy), compute_uv=False)
    return float(min(1.0, max(0.0, s[0])))


# --------------------------------------------------------------------------- #
# ACE
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class AceResult:
    R_hat: float
    iterations: int
    converged: bool
    g_table: np.ndarray
    h_table: np.ndarray

    def to_dict(self) -> dict:
        return {
            "R_hat": self.R_hat,
            "iterations": self.iterations,
            "converged": self.converged,
            "g_table": self.g_table.tolist(),
            "h_table": self.h_table.tolist(),
        }


def _standardize(v, p):
    v = v - np.dot(p, v)
    sd = float(np.sqrt(np.dot(p, v * v)))
    return v, sd


def ace_maxcorr(
    joint: DiscreteJoint,
    tol: float = 1e-8,
    max_iter: int = 10_000,
    seed: int = 0,
) -> AceResult:
    """Maximal correlation by alternating conditional expectations.

    Stops once successive estimates differ by less than ``tol`` and the
    geometric extrapolation of the remaining steps is below ``tol`` too.

    Starts from the standardized identity on the X support.  When that
    start has no component along the optimal direction (for example when
    ``E(X | Y)`` is constant) the iterate collapses; it is then restarted
    from a seeded random vector.

    Returns
    -------
    AceResult
        ``converged`` is False (and a :class:`NoConvergenceWarning` is
        issued) when ``max_iter`` is exhausted.
    """
    J = joint.restricted()
    P, px, py = J.P, J.px, J.py
    rng = np.random.default_rng(seed)

    g, sd = _standardize(J.x_support.copy(), px)
    if sd <= 0:
        g, sd = _standardize(rng.standard_normal(px.size), px)
    g = g / sd

    r_prev = -1.0
    step_prev = np.inf
    r = 0.0
    h = np.zeros(py.size)
    restarted = False
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        h, sd_h = _standardize((P.T @ g) / py, py)
        if sd_h < 1e-10 and not restarted:
            restarted = True
            g, sd = _standardize(rng.standard_normal(px.size), px)
            g = g / sd
            r_prev, step_prev = -1.0, np.inf
            continue
        if sd_h == 0:
            r = 0.0
            converged = True
            break
        h = h / sd_h
        g_new, r = _standardize((P @ h) / px, px)
        if r == 0:
            converged = True
            break
        g = g_new / r
        step = abs(r - r_prev)
        # the iterates approach R geometrically; bound the remaining tail too
        q = step / step_prev if step_prev > 0 else 0.0
        tail = step * q / (1.0 - q) if q < 1.0 else 0.0
        if step < tol and tail < tol:
            converged = True
            break
        r_prev, step_prev = r, step
    if not converged:
        warnings.warn(f"ACE stopped after {max_iter} iterations", NoConvergenceWarning, stacklevel=2)
    return AceResult(float(min(1.0, max(0.0, r))), it, converged, g, h)


# --------------------------------------------------------------------------- #
# Discretization
# --------------------------------------------------------------------------- #


def _pieces(breaks: np.ndarray, m: int):
    """Gauss-Legendre nodes/weights on each [breaks[k], breaks[k+1]]."""
    t, w = np.polynomial.legendre.leggauss(m)
    lo, hi = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + half * (t + 1.0)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def _latent_table(
    w_ppf: Callable,
    w_cdf: Callable,
    x_edges: np.ndarray,
    y_edges: np.ndarray,
    cond_x: Callable,
    cond_y: Callable,
    m: int = NODES_PER_PIECE,
) -> np.ndarray:
    """Cell masses of (X, Y) that are conditionally independent given W.

    ``cond_x(edges, w)`` returns ``Pr(X <= edge | W = w)`` as an array of
    shape ``(len(w), len(edges))``.  W is integrated on the probability
    scale, split wherever W crosses a bin edge (the conditional cdfs have
    kinks or jumps there).
    """
    finite = np.concatenate([x_edges, y_edges])
    finite = finite[np.isfinite(finite)]
    # geometric refinement towards u = 0, 1 where w_ppf is singular
    tails = 0.5 ** np.arange(2, 45)
    breaks = np.unique(np.concatenate([[0.0, 1.0], tails, 1.0 - tails, np.clip(w_cdf(finite), 0.0, 1.0)]))
    u, wu = _pieces(breaks, m)
    w = w_ppf(u)
    fx = np.diff(cond_x(x_edges, w), axis=1)
    fy = np.diff(cond_y(y_edges, w), axis=1)
    P = (fx * wu[:, None]).T @ fy
    return np.clip(P, 0.0, None)


def _step_cdf(edges, w):
    return (w[:, None] <= edges[None, :]).astype(float)


def _mid_quantiles(marg, bins):
    return np.asarray(marg.ppf((np.arange(bins) + 0.5) / bins), dtype=float)


def _edges(marg, bins):
    e = np.asarray(marg.ppf(np.arange(bins + 1) / bins), dtype=float)
    e[0], e[-1] = -np.inf, np.inf
    return e


def _discretize_quadrature(spec: FamilySpec, bins: int) -> np.ndarray:
    s = _canonical(spec)
    mx, my = marginals(s)
    xe, ye = _edges(mx, bins), _edges(my, bins)

    if isinstance(s, BivariateNormal):
        r = s.rho
        zx = (xe - s.mu1) / s.sigma1
        zy = (ye - s.mu2) / s.sigma2
        if abs(r) == 1.0:
            # Y is a monotone function of X: the table is a permutation
            P = np.eye(bins) / bins
            return P if r > 0 else P[:, ::-1]
        sd = np.sqrt(1.0 - r * r)
        std = stats.norm()
        return _latent_table(
            std.ppf, std.cdf, zx, zy, _step_cdf,
            lambda e, w: stats.norm.cdf((e[None, :] - r * w[:, None]) / sd),
        )

    if isinstance(s, BetaType):
        wb = stats.beta(s.beta, s.gamma)

        def cond_y(e, w):
            gap = 1.0 - w[:, None]
            with np.errstate(divide="ignore", invalid="ignore"):
                t = (e[None, :] - w[:, None]) / gap
            # at w = 1 the law of Y is a point mass at 1
            t = np.where(gap > 0, t, np.where(e[None, :] >= 1.0, 1.0, 0.0))
            return wb.cdf(np.clip(t, 0.0, 1.0))

        return _latent_table(mx.ppf, mx.cdf, xe, ye, _step_cdf, cond_y)

    if isinstance(s, BivariateGamma):
        if s.alpha0 == 0:
            return np.full((bins, bins), 1.0 / bins**2)
        lam = s.lam
        w0 = stats.gamma(s.alpha0, scale=1.0 / lam)

        def shifted(alpha):
            if alpha == 0:
                return _step_cdf
            d = stats.gamma(alpha, scale=1.0 / lam)
            return lambda e, w: d.cdf(np.maximum(e[None, :] - w[:, None], 0.0))

        return _latent_table(w0.ppf, w0.cdf, xe, ye, shifted(s.alpha1), shifted(s.alpha2))

    raise UnsupportedFamily(f"no quadrature discretization for {type(spec).__name__}")


def _discretize_mc(spec: FamilySpec, bins: int, seed: int, samples: int):
    mx, my = marginals(spec)
    xe, ye = _edges(mx, bins), _edges(my, bins)
    xy = sample_joint(spec, seed, samples)
    a = np.clip(np.searchsorted(xe, xy[:, 0], side="right") - 1, 0, bins - 1)
    b = np.clip(np.searchsorted(ye, xy[:, 1], side="right") - 1, 0, bins - 1)
    counts = np.zeros((bins, bins))
    np.add.at(counts, (a, b), 1.0)
    P = counts / samples
    stderr = float(np.sqrt(P.max() * (1 - P.max()) / samples))
    return P, stderr


def discretize(
    spec: FamilySpec,
    bins: int = DEFAULT_BINS,
    method: str = "auto",
    seed: int = 0,
    samples: int = MC_SAMPLES,
) -> DiscreteJoint:
    """Equal-probability binning of a family's joint law.

    ``method="quadrature"`` integrates the cell masses through the
    family's conditional-independence representation; ``"mc"`` bins
    ``samples`` draws; ``"auto"`` prefers quadrature.  Finite-population
    specs return their exact pmf and ignore ``bins``.
    """
    if isinstance(spec, FinitePopOrderStats):
        return joint_pmf(spec)
    if not isinstance(
        spec, (BivariateNormal, BetaType, UniformOrderStats, ExponentialRecords, BivariateGamma)
    ):
        raise UnsupportedFamily(f"cannot discretize {type(spec).__name__}")
    if bins < 8:
        raise ValueError("bins must be at least 8")
    mx, my = marginals(spec)
    xs, ys = _mid_quantiles(mx, bins), _mid_quantiles(my, bins)
    if method == "mc":
        P, se = _discretize_mc(spec, bins, seed, samples)
        return DiscreteJoint(P, xs, ys, mass_stderr=se)
    if method not in ("auto", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    P = _discretize_quadrature(spec, bins)
    deficit = abs(1.0 - float(P.sum()))
    if deficit > 1e-6:
        raise RuntimeError(f"quadrature lost {deficit:.2e} of the mass")
    return DiscreteJoint(P / P.sum(), xs, ys, mass_deficit=deficit)


# --------------------------------------------------------------------------- #
# Diagonal structure
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class DiagonalCheck:
    """``inner[n, k] = E[phi_n(X) psi_k(Y)]`` and its deviation from
    ``delta_nk rho_n`` for n, k = 0..K (``rho_0 = 1``)."""

    inner: np.ndarray
    expected: np.ndarray
    residuals: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max())


def polynomial_systems(spec: FamilySpec, K: int):
    """Orthonormal systems of both marginals.

    Built by the Stieltjes recurrence on each marginal's exact rule (a
    Gaussian rule well beyond degree K, or the pmf).  Finite supports are
    passed explicitly so the vanishing polynomials above ``nu`` use the
    exact points.
    """
    out = []
    for mg in marginals(spec):
        rule = mg.rule(K + 20)
        out.append(build_ops_from_rule(rule, K, support=mg.support, center=mg.mean, scale=mg.sd))
    return out[0], out[1]


def verify_diagonal(spec: FamilySpec, K: int = 6, quadrature=None) -> DiagonalCheck:
    """Check that the OPS cross-moment matrix is diagonal with entries rho_n.

    ``quadrature`` may be a triple ``(x, y, w)`` of nodes and weights;
    by default the family's exact joint rule is used.
    """
    phi, psi = polynomial_systems(spec, K)
    x, y, w = joint_quadrature(spec, m=K + 12) if quadrature is None else quadrature
    w = np.asarray(w, dtype=float)
    if abs(w.sum() - 1.0) > 1e-10:
        raise QuadratureFailure(f"joint weights sum to {w.sum()!r}")
    Fx = phi.table(x)
    Fy = psi.table(y)
    inner = (Fx * w) @ Fy.T
    rho = maximal_correlation(spec, K).sequence.rho
    expected = np.diag(np.concatenate([[1.0], rho]))
    return DiagonalCheck(inner, expected, np.abs(inner - expected))


# --------------------------------------------------------------------------- #
# Regression diagnostics
# --------------------------------------------------------------------------- #


def regression_slopes(joint: DiscreteJoint) -> tuple[float, float]:
    """Linear-regression slopes ``(A_1, B_1)``: of ``E(X|Y)`` on Y and of
    ``E(Y|X)`` on X."""
    P, px, py = joint.P, joint.px, joint.py
    x, y = joint.x_support, joint.y_support
    mx, my = px @ x, py @ y
    cov = float((x - mx) @ P @ (y - my))
    vx = float(px @ (x - mx) ** 2)
    vy = float(py @ (y - my) ** 2)
    return cov / vy, cov / vx


def fitted_leading_coeff(spec: FamilySpec, which: str, n: int, points) -> float:
    """Leading coefficient of a degree-n polynomial fitted through the
    conditional moments at ``points``."""
    points = np.asarray(points, dtype=float)
    vals = [conditional_moment(spec, which, n, v) for v in points]
    return float(Polynomial.fit(points, vals, n).convert().coef[-1])


def unit_disc_joint(grid: int = 100, sub: int = 32) -> DiscreteJoint:
    """Uniform law on the open unit disc, binned on a ``grid x grid``
    cartesian grid over [-1, 1]^2.

    Each cell's mass is its area inside the disc, estimated from
    ``sub x sub`` interior sample points.
    """
    h = 2.0 / grid
    centers = -1.0 + h * (np.arange(grid) + 0.5)
    offs = h * ((np.arange(sub) + 0.5) / sub - 0.5)
    # per-axis offsets; inside iff (cx + dx)^2 + (cy + dy)^2 < 1
    px_ = (centers[:, None] + offs[None, :]) ** 2  # (grid, sub)
    inside = px_[:, None, :, None] + px_[None, :, None, :] < 1.0
    frac = inside.mean(axis=(2, 3))
    return DiscreteJoint(frac / frac.sum(), centers, centers)
