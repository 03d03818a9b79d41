"""Monte Carlo engines for order statistics, records and finite populations.

All engines estimate the Pearson correlation of a transformed pair.
Replicates are split into a fixed number of batches; batch ``b`` draws
from its own stream ``SeedSequence(seed).spawn(B)[b]``.  The estimate is
therefore identical whatever the number of worker threads, and the
standard error comes from a jackknife over batches.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy import stats

from .errors import DegenerateVariance, InvalidSpec
from .families import FinitePopOrderStats, UniformOrderStats, closed_form_R
from .maxcorr import splitting_record_bound

BATCHES = 100
MIN_REPLICATES = 10
CHUNK = 1 << 15
DEGENERATE_RTOL = 1e-10

UNIFORM_QUANTILE = "uniform-quantile"
RECORD_QUANTILE = "record-quantile"


# --------------------------------------------------------------------------- #
# Parents
# --------------------------------------------------------------------------- #

_NAMED = {
    "uniform": stats.uniform(),
    "exp": stats.expon(),
    "exponential": stats.expon(),
    "normal": stats.norm(),
    "logistic": stats.logistic(),
    "gumbel": stats.gumbel_r(),
}


@dataclass(frozen=True)
class ParentTransform:
    """Map from a uniform (or standard exponential) variate to the parent law.

    ``kind="uniform-quantile"`` applies ``g(u) = F^-1(u)`` on (0, 1);
    ``kind="record-quantile"`` applies ``g(u) = F^-1(1 - exp(-u))`` on
    (0, inf), which carries standard exponential records to F-records.
    ``upper`` is the inverse survival function ``v -> F^-1(1 - v)``; when
    present it is used where ``1 - u`` would lose precision.
    """

    kind: str
    quantile: Callable[[np.ndarray], np.ndarray]
    upper: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = "custom"
    continuous: bool = True
    scale: float = 1.0
    loc: float = 0.0

    def __post_init__(self):
        if self.kind not in (UNIFORM_QUANTILE, RECORD_QUANTILE):
            raise InvalidSpec(f"unknown parent kind {self.kind!r}")
        if not self.scale > 0:
            raise InvalidSpec("parent scale must be positive")

    def _affine(self, v):
        return self.scale * np.asarray(v, dtype=float) + self.loc

    def at(self, u, v=None):
        """``g`` at probability ``u`` with optional complement ``v = 1 - u``."""
        u = np.asarray(u, dtype=float)
        if self.upper is None or v is None:
            return self._affine(self.quantile(u))
        v = np.asarray(v, dtype=float)
        return self._affine(np.where(u <= 0.5, self.quantile(u), self.upper(v)))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == UNIFORM_QUANTILE:
            return self.at(t, 1.0 - t)
        return self.from_survival(np.exp(-t))

    def from_survival(self, s):
        """Parent value whose survival probability is ``s``."""
        s = np.asarray(s, dtype=float)
        if self.upper is not None:
            return self._affine(self.upper(s))
        return self._affine(self.quantile(1.0 - s))

    def as_kind(self, kind: str) -> "ParentTransform":
        return ParentTransform(kind, self.quantile, self.upper, self.name, self.continuous, self.scale, self.loc)

    def affine(self, scale: float, loc: float) -> "ParentTransform":
        """The parent of ``scale * X + loc``."""
        return ParentTransform(
            self.kind, self.quantile, self.upper, self.name, self.continuous,
            self.scale * scale, self.loc * scale + loc,
        )


def parent(name: str, kind: str = UNIFORM_QUANTILE, scale: float = 1.0, loc: float = 0.0) -> ParentTransform:
    """Named continuous parent (uniform, exp, normal, logistic, gumbel)."""
    try:
        dist = _NAMED[name]
    except KeyError:
        raise InvalidSpec(f"unknown parent {name!r}; choose from {sorted(_NAMED)}") from None
    return ParentTransform(kind, dist.ppf, dist.isf, name, True, float(scale), float(loc))


def discrete_parent(values: Sequence[float], probs: Sequence[float], kind: str = UNIFORM_QUANTILE) -> ParentTransform:
    """Parent with finitely many atoms (accepted for order statistics only)."""
    pts = np.asarray(values, dtype=float)
    cdf = np.cumsum(probs)

    def q(u):
        return pts[np.minimum(np.searchsorted(cdf, u, side="left"), pts.size - 1)]

    return ParentTransform(kind, q, None, "discrete", False)


# --------------------------------------------------------------------------- #
# Estimates
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class SimEstimate:
    corr_hat: float
    stderr: float
    replicates: int
    seed: int
    workers: int = 1
    bound: float | None = field(default=None, compare=False)

    def to_dict(self) -> dict[str, Any]:
        d = {
            "corr_hat": self.corr_hat,
            "stderr": self.stderr,
            "replicates": self.replicates,
            "seed": self.seed,
            "workers": self.workers,
        }
        if self.bound is not None:
            d["bound"] = self.bound
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class _Moments:
    """Count, means and centered second moments of a block of pairs."""

    n: int
    mx: float
    my: float
    sxx: float
    syy: float
    sxy: float

    @classmethod
    def of(cls, x, y):
        mx, my = float(np.mean(x)), float(np.mean(y))
        dx, dy = x - mx, y - my
        return cls(x.size, mx, my, float(dx @ dx), float(dy @ dy), float(dx @ dy))

    def __add__(self, o: "_Moments") -> "_Moments":
        if self.n == 0:
            return o
        n = self.n + o.n
        fx, fy = o.mx - self.mx, o.my - self.my
        c = self.n * o.n / n
        return _Moments(
            n,
            self.mx + fx * o.n / n,
            self.my + fy * o.n / n,
            self.sxx + o.sxx + c * fx * fx,
            self.syy + o.syy + c * fy * fy,
            self.sxy + o.sxy + c * fx * fy,
        )

    def __sub__(self, o: "_Moments") -> "_Moments":
        n = self.n - o.n
        mx = (self.n * self.mx - o.n * o.mx) / n
        my = (self.n * self.my - o.n * o.my) / n
        c = n * o.n / self.n
        fx, fy = o.mx - mx, o.my - my
        return _Moments(
            n, mx, my,
            self.sxx - o.sxx - c * fx * fx,
            self.syy - o.syy - c * fy * fy,
            self.sxy - o.sxy - c * fx * fy,
        )

    @property
    def corr(self) -> float:
        return self.sxy / np.sqrt(self.sxx * self.syy)


_EMPTY = _Moments(0, 0.0, 0.0, 0.0, 0.0, 0.0)


def _batch_sizes(replicates: int, batches: int) -> list[int]:
    q, r = divmod(replicates, batches)
    return [q + (b < r) for b in range(batches)]


def _run_batches(
    draw: Callable[[np.random.Generator, int], tuple[np.ndarray, np.ndarray]],
    replicates: int,
    seed: int,
    workers: int = 1,
    batches: int = BATCHES,
) -> SimEstimate:
    if replicates < MIN_REPLICATES:
        raise ValueError(f"need at least {MIN_REPLICATES} replicates")
    batches = min(batches, replicates // 2)
    sizes = _batch_sizes(replicates, batches)
    streams = np.random.SeedSequence(seed).spawn(batches)

    def one(b: int) -> _Moments:
        rng = np.random.Generator(np.random.PCG64(streams[b]))
        acc = _EMPTY
        left = sizes[b]
        while left:
            k = min(left, CHUNK)
            x, y = draw(rng, k)
            acc = acc + _Moments.of(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
            left -= k
        return acc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, range(batches)))
    else:
        parts = [one(b) for b in range(batches)]

    total = _EMPTY
    for p in parts:
        total = total + p
    for s, m in ((total.sxx, total.mx), (total.syy, total.my)):
        sd = np.sqrt(max(s, 0.0) / total.n)
        if not sd > DEGENERATE_RTOL * max(abs(m), 1e-300):
            raise DegenerateVariance("a simulated coordinate is (numerically) constant")

    r = float(total.corr)
    loo = np.array([(total - p).corr for p in parts])
    se = float(np.sqrt((batches - 1) / batches * np.sum((loo - loo.mean()) ** 2)))
    return SimEstimate(float(np.clip(r, -1.0, 1.0)), se, replicates, seed, workers)


# --------------------------------------------------------------------------- #
# Models
# --------------------------------------------------------------------------- #


def _check_os(i, j, n):
    if not (isinstance(i, (int, np.integer)) and isinstance(j, (int, np.integer)) and isinstance(n, (int, np.integer))):
        raise InvalidSpec("i, j, n must be integers")
    if not 1 <= i < j <= n:
        raise InvalidSpec("need 1 <= i < j <= n")


def _check_positive(**kw):
    for k, v in kw.items():
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
            raise InvalidSpec(f"{k} must be a positive integer")


def _gamma(rng, shape, size):
    return rng.standard_gamma(shape, size) if shape > 0 else np.zeros(size)


def sim_order_stats(
    parent: ParentTransform, i: int, j: int, n: int,
    replicates: int = 100_000, seed: int = 0, workers: int = 1,
) -> SimEstimate:
    """Correlation of ``(X_{i:n}, X_{j:n}) = (g(U_{i:n}), g(U_{j:n}))``.

    Uniform order statistics come from Dirichlet spacings,
    ``U_{i:n} = G_1 / (G_1 + G_2 + G_3)`` with independent gammas of
    shapes ``i, j - i, n + 1 - j``, so the cost does not grow with n.
    """
    _check_os(i, j, n)

    def draw(rng, k):
        g1 = _gamma(rng, i, k)
        g2 = _gamma(rng, j - i, k)
        g3 = _gamma(rng, n + 1 - j, k)
        t = g1 + g2 + g3
        ui, uj = g1 / t, (g1 + g2) / t
        return parent.at(ui, (g2 + g3) / t), parent.at(uj, g3 / t)

    est = _run_batches(draw, replicates, seed, workers)
    return _with_bound(est, closed_form_R(UniformOrderStats(i, j, n)))


def _record_parent(p: ParentTransform) -> ParentTransform:
    if not p.continuous:
        raise InvalidSpec("record models need a continuous parent")
    return p if p.kind == RECORD_QUANTILE else p.as_kind(RECORD_QUANTILE)


def sim_records(
    parent: ParentTransform, n: int, m: int,
    replicates: int = 100_000, seed: int = 0, workers: int = 1,
) -> SimEstimate:
    """Correlation of the n-th and (n+m)-th upper records of an F-sequence,
    via ``(g(W_n), g(W_{n+m}))`` with exponential partial sums ``W``."""
    _check_positive(n=n, m=m)
    g = _record_parent(parent)

    def draw(rng, k):
        wn = rng.standard_gamma(n, k)
        wnm = wn + rng.standard_gamma(m, k)
        return g(wn), g(wnm)

    est = _run_batches(draw, replicates, seed, workers)
    return _with_bound(est, float(np.sqrt(n / (n + m))))


@dataclass
class RecordSimState:
    """A batch of independent record chains, each scanning an i.i.d.
    F-sequence.

    Each chain tracks the survival probability ``S = 1 - F(R)`` of its
    current record R.  The wait for the next record is geometric with
    success probability S, and the next record is uniform on the part of
    the parent above R (survival ``S * V``), which is exactly what
    scanning the raw sequence produces -- without the unbounded expected
    number of trials.
    """

    current_record: np.ndarray
    survival: np.ndarray
    trial_index: np.ndarray
    record_index: int = 0
    record_times: list[np.ndarray] = field(default_factory=list)

    @classmethod
    def start(cls, size: int) -> "RecordSimState":
        return cls(np.full(size, -np.inf), np.ones(size), np.zeros(size, dtype=np.int64))

    def advance(self, rng: np.random.Generator, parent: ParentTransform) -> np.ndarray:
        k = self.survival.size
        if self.record_index == 0:
            wait = np.ones(k, dtype=np.int64)
        else:
            p = np.maximum(self.survival, np.finfo(float).tiny)
            wait = rng.geometric(p)
        v = 1.0 - rng.random(k)  # in (0, 1]
        new_s = self.survival * v
        value = parent.from_survival(new_s)
        # a parent too flat to resolve in float64 must still give strict records
        value = np.where(value > self.current_record, value, np.nextafter(self.current_record, np.inf))
        self.survival = new_s
        self.current_record = value
        self.record_index += 1
        big = np.iinfo(np.int64).max
        self.trial_index = np.where(self.trial_index > big - wait, big, self.trial_index + wait)
        self.record_times.append(self.trial_index.copy())
        return value

    def branch(self) -> "RecordSimState":
        """Continuation from the current records on a fresh sequence."""
        return RecordSimState(
            self.current_record.copy(), self.survival.copy(),
            np.zeros_like(self.trial_index), self.record_index,
        )


def sim_splitting_records(
    parent: ParentTransform, n: int, n1: int, n2: int,
    replicates: int = 100_000, seed: int = 0, workers: int = 1,
    method: str = "sums",
) -> SimEstimate:
    """Correlation of the two branch records after n shared records.

    ``method="sums"`` uses ``(g(S + G'), g(S + G''))`` with S, G', G''
    independent gammas of shapes n, n1, n2.  ``method="direct"`` runs the
    record chains themselves: n records from the first sequence, then
    ``n1`` more above the shared record from a second sequence and ``n2``
    more from a third.
    """
    _check_positive(n=n, n1=n1, n2=n2)
    g = _record_parent(parent)
    bound = splitting_record_bound(n, n1, n2)

    if method == "sums":
        def draw(rng, k):
            s = rng.standard_gamma(n, k)
            return g(s + rng.standard_gamma(n1, k)), g(s + rng.standard_gamma(n2, k))
    elif method == "direct":
        def draw(rng, k):
            trunk = RecordSimState.start(k)
            for _ in range(n):
                trunk.advance(rng, g)
            a, b = trunk.branch(), trunk.branch()
            for _ in range(n1):
                a.advance(rng, g)
            for _ in range(n2):
                b.advance(rng, g)
            return a.current_record, b.current_record
    else:
        raise ValueError(f"unknown method {method!r}")

    return _with_bound(_run_batches(draw, replicates, seed, workers), bound)


def sim_finite_pop(
    values: Sequence[float], i: int, j: int, n: int,
    replicates: int = 100_000, seed: int = 0, workers: int = 1,
) -> SimEstimate:
    """Correlation of the i-th and j-th order statistics of a simple
    random sample of size n drawn without replacement from ``values``."""
    x = np.asarray(values, dtype=float)
    N = x.size
    _check_os(i, j, n)
    if not n < N:
        raise InvalidSpec("need n < N")
    if np.any(np.diff(x) < 0):
        raise InvalidSpec("population values must be sorted ascending")
    if x[i - 1] == x[N - (n - i) - 1] or x[j - 1] == x[N - (n - j) - 1]:
        raise DegenerateVariance("order statistic is constant on this population")

    def draw(rng, k):
        ranks = np.sort(np.argsort(rng.random((k, N)), axis=1)[:, :n], axis=1)
        return x[ranks[:, i - 1]], x[ranks[:, j - 1]]

    est = _run_batches(draw, replicates, seed, workers)
    return _with_bound(est, closed_form_R(FinitePopOrderStats(i, j, n, N)))


def _with_bound(est: SimEstimate, bound: float) -> SimEstimate:
    return SimEstimate(est.corr_hat, est.stderr, est.replicates, est.seed, est.workers, bound)


# --------------------------------------------------------------------------- #
# Requests
# --------------------------------------------------------------------------- #

MODELS = ("order-stats", "records", "splitting", "finite-pop")


@dataclass(frozen=True)
class SimRequest:
    """``{model, parent, params, replicates, seed}``.

    ``parent`` is a name or ``{"name": ..., "scale": ..., "loc": ...}``.
    Model parameters may sit under ``params`` or at the top level.
    """

    model: str
    parent: str | dict | None
    params: dict
    replicates: int = 100_000
    seed: int = 0

    @classmethod
    def from_dict(cls, doc: dict) -> "SimRequest":
        if not isinstance(doc, dict) or "model" not in doc:
            raise InvalidSpec('simulation request needs a "model" key')
        known = {"model", "parent", "params", "replicates", "seed"}
        params = dict(doc.get("params") or {})
        params.update({k: v for k, v in doc.items() if k not in known})
        model = doc["model"]
        if model not in MODELS:
            raise InvalidSpec(f"unknown model {model!r}; choose from {list(MODELS)}")
        return cls(model, doc.get("parent"), params, int(doc.get("replicates", 100_000)), int(doc.get("seed", 0)))

    def to_dict(self) -> dict:
        return {"model": self.model, "parent": self.parent, "params": self.params,
                "replicates": self.replicates, "seed": self.seed}

    def _parent(self, kind: str) -> ParentTransform:
        p = self.parent if self.parent is not None else "uniform"
        if isinstance(p, str):
            return parent(p, kind)
        if isinstance(p, dict):
            return parent(p.get("name", "uniform"), kind, p.get("scale", 1.0), p.get("loc", 0.0))
        raise InvalidSpec("parent must be a name or an object")

    def run(self, replicates: int | None = None, seed: int | None = None, workers: int = 1) -> SimEstimate:
        reps = self.replicates if replicates is None else replicates
        sd = self.seed if seed is None else seed
        p = self.params
        try:
            if self.model == "order-stats":
                return sim_order_stats(self._parent(UNIFORM_QUANTILE), p["i"], p["j"], p["n"], reps, sd, workers)
            if self.model == "records":
                return sim_records(self._parent(RECORD_QUANTILE), p["n"], p["m"], reps, sd, workers)
            if self.model == "splitting":
                return sim_splitting_records(
                    self._parent(RECORD_QUANTILE), p["n"], p["n1"], p["n2"], reps, sd, workers,
                    method=p.get("method", "sums"),
                )
            values = p.get("values")
            if values is None:
                values = list(range(1, int(p["N"]) + 1))
            return sim_finite_pop(values, p["i"], p["j"], p["n"], reps, sd, workers)
        except KeyError as exc:
            raise InvalidSpec(f"missing parameter {exc.args[0]!r} for model {self.model}") from None
