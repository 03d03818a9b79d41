"""The six bivariate families with polynomial regression.

Every family knows its marginal laws, the leading coefficients ``A_n``
(of ``E(X^n | Y)``) and ``B_n`` (of ``E(Y^n | X)``), the full conditional
moment polynomials, a sampler, and a polynomial-exact joint quadrature
rule built from its stochastic representation:

* ``BivariateNormal``: ``Y = mu2 + sigma2 (rho Z1 + sqrt(1 - rho^2) Z2)``;
* ``BetaType`` / ``UniformOrderStats``: Dirichlet, ``Y = X + (1 - X) B``;
* ``ExponentialRecords``: ``Y = X + Gamma(m)``;
* ``BivariateGamma``: ``(X0 + X1, X0 + X2)``;
* ``FinitePopOrderStats``: exact enumeration.
"""

from __future__ import annotations

from fractions import Fraction

import json
import operator
from dataclasses import asdict, dataclass, fields
from functools import lru_cache
from itertools import combinations
from math import comb, sqrt
from typing import Any, ClassVar

import numpy as np
from scipy import stats

from ._math import ascending_to_raw, raw_to_ascending, rising, rising_ratio
from .errors import InvalidSpec, OutOfSupport
from .joint import DiscreteJoint
from .orthopoly import (
    MomentSequence,
    Quadrature,
    discrete_rule,
    gauss_beta,
    gauss_gamma,
    gauss_normal,
    moments_from_quadrature,
)

ENUMERATION_LIMIT = 20

X_GIVEN_Y = "x|y"
Y_GIVEN_X = "y|x"


# --------------------------------------------------------------------------- #
# Specs
# --------------------------------------------------------------------------- #


def _as_int(value, name):
    if isinstance(value, bool):
        raise InvalidSpec(f"{name} must be an integer")
    try:
        return operator.index(value)
    except TypeError:
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise InvalidSpec(f"{name} must be an integer, got {value!r}") from None


def _as_real(value, name):
    if isinstance(value, bool):
        raise InvalidSpec(f"{name} must be a real number")
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise InvalidSpec(f"{name} must be a real number, got {value!r}") from None
    if not np.isfinite(out):
        raise InvalidSpec(f"{name} must be finite")
    return out


class FamilySpec:
    """Base class; concrete specs are frozen dataclasses with a ``tag``."""

    tag: ClassVar[str]
    _registry: ClassVar[dict[str, type["FamilySpec"]]] = {}

    def __init_subclass__(cls, **kw):
        super().__init_subclass__(**kw)
        FamilySpec._registry[cls.tag] = cls

    def params(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def _decode_params(cls, params: dict[str, Any]) -> dict[str, Any]:
        return params

    def to_dict(self) -> dict[str, Any]:
        return {"family": self.tag, "params": self.params()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @staticmethod
    def from_dict(doc: dict[str, Any]) -> "FamilySpec":
        if not isinstance(doc, dict) or "family" not in doc:
            raise InvalidSpec('family spec must be an object with a "family" key')
        tag = doc["family"]
        cls = FamilySpec._registry.get(tag)
        if cls is None:
            raise InvalidSpec(f"unknown family {tag!r}; expected one of {sorted(FamilySpec._registry)}")
        params = doc.get("params", {})
        if not isinstance(params, dict):
            raise InvalidSpec('"params" must be an object')
        params = cls._decode_params(params)
        names = {f.name for f in fields(cls)}
        extra = set(params) - names
        if extra:
            raise InvalidSpec(f"unknown parameters for {tag}: {sorted(extra)}")
        try:
            return cls(**params)
        except TypeError as exc:
            raise InvalidSpec(str(exc)) from None

    @staticmethod
    def from_json(text: str) -> "FamilySpec":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidSpec(f"malformed JSON: {exc}") from None
        return FamilySpec.from_dict(doc)


@dataclass(frozen=True)
class BivariateNormal(FamilySpec):
    tag: ClassVar[str] = "BivariateNormal"
    mu1: float = 0.0
    mu2: float = 0.0
    sigma1: float = 1.0
    sigma2: float = 1.0
    rho: float = 0.0

    def __post_init__(self):
        for name in ("mu1", "mu2", "sigma1", "sigma2", "rho"):
            object.__setattr__(self, name, _as_real(getattr(self, name), name))
        if not (self.sigma1 > 0 and self.sigma2 > 0):
            raise InvalidSpec("sigma1 and sigma2 must be positive")
        if not -1.0 <= self.rho <= 1.0:
            raise InvalidSpec("rho must lie in [-1, 1]")


@dataclass(frozen=True)
class BetaType(FamilySpec):
    """Density proportional to ``x^(a-1) (y-x)^(b-1) (1-y)^(c-1)`` on ``0<x<y<1``."""

    tag: ClassVar[str] = "BetaType"
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = _as_real(getattr(self, name), name)
            if not v > 0:
                raise InvalidSpec(f"{name} must be positive")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class UniformOrderStats(FamilySpec):
    """``(U_{i:n}, U_{j:n})`` from n standard uniforms."""

    tag: ClassVar[str] = "UniformOrderStats"
    i: int
    j: int
    n: int

    def __post_init__(self):
        for name in ("i", "j", "n"):
            object.__setattr__(self, name, _as_int(getattr(self, name), name))
        if not 1 <= self.i < self.j <= self.n:
            raise InvalidSpec("need 1 <= i < j <= n")

    def as_beta_type(self) -> BetaType:
        return BetaType(self.i, self.j - self.i, self.n + 1 - self.j)


@dataclass(frozen=True)
class ExponentialRecords(FamilySpec):
    """``(W_n, W_{n+m})``: upper records of a standard exponential sequence."""

    tag: ClassVar[str] = "ExponentialRecords"
    n: int
    m: int

    def __post_init__(self):
        for name in ("n", "m"):
            v = _as_int(getattr(self, name), name)
            if v < 1:
                raise InvalidSpec(f"{name} must be a positive integer")
            object.__setattr__(self, name, v)

    def as_gamma(self) -> "BivariateGamma":
        return BivariateGamma(self.n, 0, self.m, 1.0)


@dataclass(frozen=True)
class FinitePopOrderStats(FamilySpec):
    """``(U_{i:n}^{(N)}, U_{j:n}^{(N)})``: order statistics of a simple random
    sample of size n drawn without replacement from ``{1, ..., N}``."""

    tag: ClassVar[str] = "FinitePopOrderStats"
    i: int
    j: int
    n: int
    N: int

    def __post_init__(self):
        for name in ("i", "j", "n", "N"):
            object.__setattr__(self, name, _as_int(getattr(self, name), name))
        if not 1 <= self.i < self.j <= self.n < self.N:
            raise InvalidSpec("need 1 <= i < j <= n < N")

    @property
    def x_support(self) -> np.ndarray:
        return np.arange(self.i, self.N - (self.n - self.i) + 1, dtype=float)

    @property
    def y_support(self) -> np.ndarray:
        return np.arange(self.j, self.N - (self.n - self.j) + 1, dtype=float)


@dataclass(frozen=True)
class BivariateGamma(FamilySpec):
    """``(X0 + X1, X0 + X2)`` with independent ``X_k ~ Gamma(alpha_k; lambda)``."""

    tag: ClassVar[str] = "BivariateGamma"
    alpha0: float
    alpha1: float
    alpha2: float
    lam: float = 1.0

    def __post_init__(self):
        for name in ("alpha0", "alpha1", "alpha2", "lam"):
            object.__setattr__(self, name, _as_real(getattr(self, name), name))
        if min(self.alpha0, self.alpha1, self.alpha2) < 0:
            raise InvalidSpec("gamma shapes must be non-negative")
        if not (self.alpha0 + self.alpha1 > 0 and self.alpha0 + self.alpha2 > 0):
            raise InvalidSpec("need alpha0 + alpha1 > 0 and alpha0 + alpha2 > 0")
        if not self.lam > 0:
            raise InvalidSpec("lambda must be positive")

    # JSON uses "lambda", which is a Python keyword
    def params(self) -> dict[str, Any]:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    @classmethod
    def _decode_params(cls, params):
        params = dict(params)
        if "lambda" in params:
            params["lam"] = params.pop("lambda")
        return params


def _canonical(spec: FamilySpec) -> FamilySpec:
    """Map aliases onto the family that carries the formulas."""
    if isinstance(spec, UniformOrderStats):
        return spec.as_beta_type()
    if isinstance(spec, ExponentialRecords):
        return spec.as_gamma()
    return spec


# --------------------------------------------------------------------------- #
# Marginal laws
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class Marginal:
    """One-dimensional law: ``kind`` in {normal, beta, gamma, discrete}."""

    kind: str
    a: float = 0.0
    b: float = 1.0
    points: tuple[float, ...] = ()
    probs: tuple[float, ...] = ()

    @property
    def dist(self):
        if self.kind == "normal":
            return stats.norm(self.a, self.b)
        if self.kind == "beta":
            return stats.beta(self.a, self.b)
        if self.kind == "gamma":
            return stats.gamma(self.a, scale=1.0 / self.b)
        raise TypeError("discrete marginals have no scipy law here")

    def raw_moment(self, k: int) -> float:
        if self.kind == "normal":
            mu, s = self.a, self.b
            return sum(
                comb(k, r) * mu ** (k - r) * s**r * _gauss_moment(r)
                for r in range(0, k + 1, 2)
            )
        if self.kind == "beta":
            return rising_ratio(self.a, self.a + self.b, k)
        if self.kind == "gamma":
            return rising(self.a, k) / self.b**k
        return float(np.dot(self.probs, np.asarray(self.points) ** k))

    @property
    def mean(self) -> float:
        return self.raw_moment(1)

    @property
    def sd(self) -> float:
        if self.kind == "normal":
            return self.b
        if self.kind == "beta":
            s = self.a + self.b
            return sqrt(self.a * self.b / (s * s * (s + 1)))
        if self.kind == "gamma":
            return sqrt(self.a) / self.b
        pts = np.asarray(self.points)
        mu = float(np.dot(self.probs, pts))
        return float(np.sqrt(np.dot(self.probs, (pts - mu) ** 2)))

    def rule(self, m: int = 64) -> Quadrature:
        if self.kind == "normal":
            return gauss_normal(self.a, self.b, m)
        if self.kind == "beta":
            return gauss_beta(self.a, self.b, m)
        if self.kind == "gamma":
            return gauss_gamma(self.a, self.b, m)
        return discrete_rule(self.points, self.probs)

    def ppf(self, u):
        if self.kind == "discrete":
            cdf = np.cumsum(self.probs)
            idx = np.searchsorted(cdf, u, side="left")
            return np.asarray(self.points)[np.minimum(idx, len(self.points) - 1)]
        if self.kind == "gamma" and self.a == 0:
            return np.zeros_like(np.asarray(u, dtype=float))
        return self.dist.ppf(u)

    def cdf(self, x):
        if self.kind == "gamma" and self.a == 0:
            return (np.asarray(x, dtype=float) >= 0).astype(float)
        return self.dist.cdf(x)

    @property
    def support(self) -> tuple[float, ...] | None:
        return self.points if self.kind == "discrete" else None


def _finite_pop_marginal(i: int, n: int, N: int) -> Marginal:
    ks = np.arange(i, N - (n - i) + 1)
    probs = np.array([comb(k - 1, i - 1) * comb(N - k, n - i) for k in ks], dtype=float) / comb(N, n)
    return Marginal("discrete", points=tuple(float(k) for k in ks), probs=tuple(probs))


def marginals(spec: FamilySpec) -> tuple[Marginal, Marginal]:
    s = _canonical(spec)
    if isinstance(s, BivariateNormal):
        return Marginal("normal", s.mu1, s.sigma1), Marginal("normal", s.mu2, s.sigma2)
    if isinstance(s, BetaType):
        return Marginal("beta", s.alpha, s.beta + s.gamma), Marginal("beta", s.alpha + s.beta, s.gamma)
    if isinstance(s, BivariateGamma):
        return (
            Marginal("gamma", s.alpha0 + s.alpha1, s.lam),
            Marginal("gamma", s.alpha0 + s.alpha2, s.lam),
        )
    if isinstance(s, FinitePopOrderStats):
        return _finite_pop_marginal(s.i, s.n, s.N), _finite_pop_marginal(s.j, s.n, s.N)
    raise InvalidSpec(f"unsupported spec {spec!r}")


def support_nu(spec: FamilySpec) -> tuple[int | None, int | None]:
    """Support cardinality minus one for X and Y (``None`` = infinite)."""
    if isinstance(spec, FinitePopOrderStats):
        return spec.N - spec.n, spec.N - spec.n
    return None, None


def family_nu(spec: FamilySpec) -> int | None:
    nx, ny = support_nu(spec)
    if nx is None:
        return ny
    if ny is None:
        return nx
    return min(nx, ny)


# --------------------------------------------------------------------------- #
# Regression coefficients
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class RegressionCoeffs:
    """Leading coefficients ``A_n`` and ``B_n`` for n = 1..K."""

    A: tuple[float, ...]
    B: tuple[float, ...]

    @property
    def K(self) -> int:
        return len(self.A)


def regression_coeffs(spec: FamilySpec, K: int = 12) -> RegressionCoeffs:
    """Closed-form leading coefficients of the conditional moment polynomials."""
    if K < 1:
        raise InvalidSpec("K must be at least 1")
    s = _canonical(spec)
    ns = range(1, K + 1)
    if isinstance(s, BivariateNormal):
        ra = s.rho * s.sigma1 / s.sigma2
        rb = s.rho * s.sigma2 / s.sigma1
        A = [ra**n for n in ns]
        B = [rb**n for n in ns]
    elif isinstance(s, BetaType):
        A = [rising_ratio(s.alpha, s.alpha + s.beta, n) for n in ns]
        B = [rising_ratio(s.gamma, s.beta + s.gamma, n) for n in ns]
    elif isinstance(s, FinitePopOrderStats):
        i, j, n_ = s.i, s.j, s.n
        A = [rising_ratio(i, j, m) for m in ns]
        B = [rising_ratio(n_ + 1 - j, n_ + 1 - i, m) for m in ns]
    elif isinstance(s, BivariateGamma):
        a0, a1, a2 = s.alpha0, s.alpha1, s.alpha2
        A = [rising_ratio(a0, a0 + a2, n) for n in ns]
        B = [rising_ratio(a0, a0 + a1, n) for n in ns]
    else:
        raise InvalidSpec(f"unsupported spec {spec!r}")
    return RegressionCoeffs(tuple(float(a) for a in A), tuple(float(b) for b in B))


def closed_form_R(spec: FamilySpec) -> float:
    """Published closed-form maximal correlation of each family."""
    if isinstance(spec, BivariateNormal):
        return abs(spec.rho)
    if isinstance(spec, BetaType):
        a, b, c = spec.alpha, spec.beta, spec.gamma
        return sqrt(a * c / ((b + a) * (b + c)))
    if isinstance(spec, (UniformOrderStats, FinitePopOrderStats)):
        i, j, n = spec.i, spec.j, spec.n
        return sqrt(i * (n + 1 - j) / (j * (n + 1 - i)))
    if isinstance(spec, ExponentialRecords):
        return sqrt(spec.n / (spec.n + spec.m))
    if isinstance(spec, BivariateGamma):
        a0, a1, a2 = spec.alpha0, spec.alpha1, spec.alpha2
        return a0 / (sqrt(a0 + a1) * sqrt(a0 + a2))
    raise InvalidSpec(f"unsupported spec {spec!r}")


# --------------------------------------------------------------------------- #
# Conditional moments
# --------------------------------------------------------------------------- #


def _gauss_moment(k: int) -> int:
    """``E[Z^k]`` for standard normal Z: ``(k-1)!!`` for even k, else 0."""
    if k % 2:
        return 0
    out = 1
    for r in range(k - 1, 0, -2):
        out *= r
    return out


def _normal_power_mean(a: float, b: float, n: int) -> float:
    """``E[(a + b Z)^n]`` for standard normal Z."""
    return sum(
        comb(n, k) * a ** (n - k) * b**k * _gauss_moment(k)
        for k in range(0, n + 1, 2)
    )


def _finite_pop_raw_moments(i: int, n: int, N: int, order: int) -> list[float]:
    # exact rationals: the Stirling transform cancels heavily at high order
    asc = [Fraction(1)]
    for r in range(order):
        asc.append(asc[-1] * Fraction((N + 1 + r) * (i + r), n + 1 + r))
    return ascending_to_raw(asc)


def conditional_moment(
    spec: FamilySpec, which: str, n: int, cond_value: float, ascending: bool = False
) -> float:
    """Full conditional moment ``E(X^n | Y=y)`` (``which="x|y"``) or
    ``E(Y^n | X=x)`` (``which="y|x"``).

    ``ascending=True`` (finite population only) returns the ascending
    moment ``E([X]_n | Y)`` or ``E([Y]_n | X)`` instead.
    """
    if which not in (X_GIVEN_Y, Y_GIVEN_X):
        raise ValueError(f"which must be {X_GIVEN_Y!r} or {Y_GIVEN_X!r}")
    if n < 0:
        raise ValueError("moment order must be non-negative")
    v = float(cond_value)
    s = _canonical(spec)
    if ascending and not isinstance(s, FinitePopOrderStats):
        raise InvalidSpec("ascending conditional moments are defined for FinitePopOrderStats only")

    if isinstance(s, BivariateNormal):
        if which == X_GIVEN_Y:
            a = s.mu1 + s.rho * s.sigma1 / s.sigma2 * (v - s.mu2)
            b = s.sigma1 * sqrt(max(0.0, 1.0 - s.rho**2))
        else:
            a = s.mu2 + s.rho * s.sigma2 / s.sigma1 * (v - s.mu1)
            b = s.sigma2 * sqrt(max(0.0, 1.0 - s.rho**2))
        return float(_normal_power_mean(a, b, n))

    if isinstance(s, BetaType):
        if not 0.0 < v < 1.0:
            raise OutOfSupport(f"conditioning value {v} outside (0, 1)")
        if which == X_GIVEN_Y:
            return v**n * rising_ratio(s.alpha, s.alpha + s.beta, n)
        # Y | X=x  =  x + (1 - x) Beta(beta, gamma)
        return sum(
            comb(n, k) * v ** (n - k) * (1 - v) ** k * rising_ratio(s.beta, s.beta + s.gamma, k)
            for k in range(n + 1)
        )

    if isinstance(s, BivariateGamma):
        if v < 0:
            raise OutOfSupport(f"conditioning value {v} is negative")
        a0, a1, a2, lam = s.alpha0, s.alpha1, s.alpha2, s.lam
        if which == X_GIVEN_Y:
            own, other = a1, a2
        else:
            own, other = a2, a1
        return sum(
            comb(n, j) * rising(a0, j) * rising(own, n - j)
            / (lam ** (n - j) * rising(a0 + other, j)) * v**j
            for j in range(n + 1)
        )

    if isinstance(s, FinitePopOrderStats):
        i, j, size, N = s.i, s.j, s.n, s.N
        k = int(round(v))
        if which == X_GIVEN_Y:
            if k != v or not j <= k <= N - (size - j):
                raise OutOfSupport(f"Y={v} outside {{{j}..{N - (size - j)}}}")
            # X | Y=s  ~  U_{i:j-1}^{(s-1)}
            if ascending:
                return rising(k, n) * rising_ratio(i, j, n)
            return _finite_pop_raw_moments(i, j - 1, k - 1, n)[n]
        if k != v or not i <= k <= N - (size - i):
            raise OutOfSupport(f"X={v} outside {{{i}..{N - (size - i)}}}")
        # Y | X=k  ~  k + U_{j-i:n-i}^{(N-k)}
        raw = _finite_pop_raw_moments(j - i, size - i, N - k, n)
        if ascending:
            # [Y]_n = [k + V]_n expanded through raw moments of Y
            ys = [sum(comb(r, l) * k ** (r - l) * raw[l] for l in range(r + 1)) for r in range(n + 1)]
            return raw_to_ascending(ys)[n]
        return sum(comb(n, l) * k ** (n - l) * raw[l] for l in range(n + 1))

    raise InvalidSpec(f"unsupported spec {spec!r}")


# --------------------------------------------------------------------------- #
# Marginal moments
# --------------------------------------------------------------------------- #


def marginal_moments(spec: FamilySpec, K: int = 12) -> tuple[MomentSequence, MomentSequence]:
    """Raw moments ``E[X^k]``, ``E[Y^k]`` for k = 0..2K from closed forms."""
    s = _canonical(spec)
    if isinstance(s, FinitePopOrderStats):
        mx = _finite_pop_raw_moments(s.i, s.n, s.N, 2 * K)
        my = _finite_pop_raw_moments(s.j, s.n, s.N, 2 * K)
        mx[0] = my[0] = 1.0
        return MomentSequence(tuple(mx), K), MomentSequence(tuple(my), K)
    mx, my = marginals(s)
    return tuple(
        MomentSequence(tuple(mg.raw_moment(k) for k in range(2 * K + 1)), K) for mg in (mx, my)
    )


def standardized_moments(spec: FamilySpec, K: int = 12) -> tuple[MomentSequence, MomentSequence]:
    """Moments of ``(X - E X) / sd X`` (and likewise Y) up to order 2K.

    Center and scale are closed-form; the moments themselves are
    integrated against the marginal's Gaussian rule (or pmf), which is
    exact for polynomials and avoids the cancellation of the binomial
    transform of raw moments.
    """
    out = []
    for mg in marginals(spec):
        rule = mg.rule(max(2 * K + 2, 32))
        out.append(moments_from_quadrature(rule, K, center=mg.mean, scale=mg.sd))
    return out[0], out[1]


# --------------------------------------------------------------------------- #
# Joint laws
# --------------------------------------------------------------------------- #


def joint_pmf(spec: FinitePopOrderStats, method: str = "auto") -> DiscreteJoint:
    """Exact joint pmf of the pair of finite-population order statistics.

    ``method`` is ``"enumerate"`` (all C(N, n) subsets), ``"formula"``
    (product of three binomials) or ``"auto"`` (enumerate for N <= 20).
    """
    if not isinstance(spec, FinitePopOrderStats):
        raise InvalidSpec("joint_pmf needs a FinitePopOrderStats spec")
    if method == "auto":
        method = "enumerate" if spec.N <= ENUMERATION_LIMIT else "formula"
    counts = _joint_counts(spec.i, spec.j, spec.n, spec.N, method)
    P = counts / comb(spec.N, spec.n)
    return DiscreteJoint(P, spec.x_support, spec.y_support)


@lru_cache(maxsize=256)
def _joint_counts_cached(i, j, n, N, method):
    xs = np.arange(i, N - (n - i) + 1)
    ys = np.arange(j, N - (n - j) + 1)
    counts = np.zeros((xs.size, ys.size))
    if method == "enumerate":
        for subset in combinations(range(1, N + 1), n):
            counts[subset[i - 1] - i, subset[j - 1] - j] += 1
    elif method == "formula":
        for a, k in enumerate(xs):
            for b, l in enumerate(ys):
                if l > k:
                    counts[a, b] = comb(k - 1, i - 1) * comb(l - k - 1, j - i - 1) * comb(N - l, n - j)
    else:
        raise ValueError(f"unknown method {method!r}")
    counts.setflags(write=False)
    return counts


def _joint_counts(i, j, n, N, method):
    return _joint_counts_cached(i, j, n, N, method).copy()


def joint_quadrature(spec: FamilySpec, m: int = 24) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes ``(x_k, y_k)`` and weights ``w_k`` representing the joint law.

    Exact for polynomials in (x, y) of degree below ``2m`` in each latent
    coordinate; for the finite population this is the pmf itself.
    """
    s = _canonical(spec)
    if isinstance(s, BivariateNormal):
        q = gauss_normal(0.0, 1.0, m)
        z1, z2 = np.meshgrid(q.nodes, q.nodes, indexing="ij")
        w = np.outer(q.weights, q.weights)
        r = s.rho
        x = s.mu1 + s.sigma1 * z1
        y = s.mu2 + s.sigma2 * (r * z1 + sqrt(max(0.0, 1 - r * r)) * z2)
        return x.ravel(), y.ravel(), w.ravel()
    if isinstance(s, BetaType):
        qx = gauss_beta(s.alpha, s.beta + s.gamma, m)
        qb = gauss_beta(s.beta, s.gamma, m)
        x, b = np.meshgrid(qx.nodes, qb.nodes, indexing="ij")
        w = np.outer(qx.weights, qb.weights)
        return x.ravel(), (x + (1 - x) * b).ravel(), w.ravel()
    if isinstance(s, BivariateGamma):
        q0, q1, q2 = (gauss_gamma(a, s.lam, m) for a in (s.alpha0, s.alpha1, s.alpha2))
        x0, x1, x2 = np.meshgrid(q0.nodes, q1.nodes, q2.nodes, indexing="ij")
        w = np.einsum("i,j,k->ijk", q0.weights, q1.weights, q2.weights)
        return (x0 + x1).ravel(), (x0 + x2).ravel(), w.ravel()
    if isinstance(s, FinitePopOrderStats):
        J = joint_pmf(s)
        x, y = np.meshgrid(J.x_support, J.y_support, indexing="ij")
        keep = J.P.ravel() > 0
        return x.ravel()[keep], y.ravel()[keep], J.P.ravel()[keep]
    raise InvalidSpec(f"unsupported spec {spec!r}")


def sample_joint(spec: FamilySpec, rng_seed, count: int) -> np.ndarray:
    """``count`` i.i.d. draws of ``(X, Y)`` as a ``(count, 2)`` array."""
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    if isinstance(spec, BivariateNormal):
        z = rng.standard_normal((count, 2))
        r = spec.rho
        x = spec.mu1 + spec.sigma1 * z[:, 0]
        y = spec.mu2 + spec.sigma2 * (r * z[:, 0] + sqrt(max(0.0, 1 - r * r)) * z[:, 1])
    elif isinstance(spec, BetaType):
        d = rng.dirichlet([spec.alpha, spec.beta, spec.gamma], size=count)
        x, y = d[:, 0], d[:, 0] + d[:, 1]
    elif isinstance(spec, UniformOrderStats):
        u = np.sort(rng.random((count, spec.n)), axis=1)
        x, y = u[:, spec.i - 1], u[:, spec.j - 1]
    elif isinstance(spec, ExponentialRecords):
        w = np.cumsum(rng.standard_exponential((count, spec.n + spec.m)), axis=1)
        x, y = w[:, spec.n - 1], w[:, spec.n + spec.m - 1]
    elif isinstance(spec, FinitePopOrderStats):
        keys = rng.random((count, spec.N))
        chosen = np.sort(np.argsort(keys, axis=1)[:, : spec.n], axis=1) + 1
        x, y = chosen[:, spec.i - 1].astype(float), chosen[:, spec.j - 1].astype(float)
    elif isinstance(spec, BivariateGamma):
        def draw(a):
            if a == 0:
                return np.zeros(count)
            return rng.gamma(a, 1.0 / spec.lam, size=count)

        x0, x1, x2 = draw(spec.alpha0), draw(spec.alpha1), draw(spec.alpha2)
        x, y = x0 + x1, x0 + x2
    else:
        raise InvalidSpec(f"unsupported spec {spec!r}")
    return np.column_stack([x, y])
