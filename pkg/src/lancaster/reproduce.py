"""The full results matrix: every closed form, oracle and identity check as
one row ``{check_id, paper_value, computed, residual, pass}``.

Rows are grouped; ``--filter`` matches a group name or a substring of the
check id.  Closed-form and quadrature rows do not depend on the seed;
simulation rows use ``seed`` and ``replicates``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import isfinite, sqrt
from typing import Callable, Iterator

from .families import (
    BetaType,
    BivariateGamma,
    BivariateNormal,
    ExponentialRecords,
    FinitePopOrderStats,
    UniformOrderStats,
    joint_pmf,
)
from .identities import (
    check_diagonal_covariance,
    check_gamma_covariance,
    check_gamma_stein,
    check_normal_covariance,
    check_record_covariance,
    identity,
    polynomial,
)
from .maxcorr import maximal_correlation, splitting_record_bound
from .oracle import ace_maxcorr, discretize, regression_slopes, svd_maxcorr, unit_disc_joint, verify_diagonal
from .simulate import parent, sim_finite_pop, sim_order_stats, sim_records, sim_splitting_records

# value of the ACE oracle on the 100 x 100 disc grid (32 x 32 subsampling)
DISC_R_PIN = 0.3331599
DISC_PIN_TOL = 1e-6

NORMAL_RHOS = (-0.9, -0.5, 0.0, 0.3, 0.99)
BETA_TRIPLES = (
    (1, 1, 1), (2, 1, 3), (0.5, 0.5, 0.5), (3, 2, 1), (1, 4, 2),
    (0.3, 2.5, 0.7), (5, 5, 5), (10, 0.1, 2), (0.2, 0.2, 8), (2.5, 1.5, 3.5),
)
GAMMA_TRIPLES = (
    (2, 1, 3), (2, 1, 2), (1, 0, 0), (1, 0, 2), (0, 1, 1),
    (0.5, 0.3, 0.2), (3, 0, 5), (4, 2, 0), (0.1, 5, 5), (7.5, 1.25, 2.5),
)
POLY_A = (0.5, -1.0, 0.25, 0.5, 0.1)   # degree 4
POLY_B = (1.0, 0.3, -0.7, 0.2, -0.05)  # degree 4


@dataclass(frozen=True)
class Row:
    check_id: str
    group: str
    paper_value: float
    computed: float
    residual: float
    passed: bool
    tol: float

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "paper_value": self.paper_value,
            "computed": self.computed,
            "residual": self.residual,
            "pass": self.passed,
        }


CSV_COLUMNS = ("check_id", "paper_value", "computed", "residual", "pass")


def _close(check_id, group, expected, computed, tol) -> Row:
    res = abs(computed - expected)
    return Row(check_id, group, float(expected), float(computed), float(res), bool(isfinite(res) and res <= tol), tol)


def _hits(check_id, group, bound, est, z=4.0) -> Row:
    res = abs(est.corr_hat - bound)
    return Row(check_id, group, float(bound), est.corr_hat, res, res <= z * est.stderr, z * est.stderr)


def _short(check_id, group, bound, est, z=5.0) -> Row:
    gap = bound - est.corr_hat
    return Row(check_id, group, float(bound), est.corr_hat, gap, gap >= z * est.stderr, z * est.stderr)


def _fmt(*args) -> str:
    return ",".join(f"{a:g}" if isinstance(a, float) else str(a) for a in args)


# --------------------------------------------------------------------------- #
# Row generators
# --------------------------------------------------------------------------- #


def closed_form_rows() -> Iterator[Row]:
    for r in NORMAL_RHOS:
        yield _close(f"maxcorr.normal({r:g})", "normal", abs(r), maximal_correlation(BivariateNormal(rho=r)).R, 1e-12)
    for a, b, c in BETA_TRIPLES:
        expected = sqrt(a * c / ((b + a) * (b + c)))
        yield _close(f"maxcorr.beta({_fmt(a, b, c)})", "beta", expected,
                     maximal_correlation(BetaType(a, b, c)).R, 1e-12)
    for n in range(2, 7):
        for i, j in itertools.combinations(range(1, n + 1), 2):
            expected = sqrt(i * (n + 1 - j) / (j * (n + 1 - i)))
            yield _close(f"maxcorr.order-stats({i},{j},{n})", "order-stats", expected,
                         maximal_correlation(UniformOrderStats(i, j, n)).R, 1e-12)
    for n, m in itertools.product(range(1, 7), repeat=2):
        yield _close(f"maxcorr.records({n},{m})", "records", sqrt(n / (n + m)),
                     maximal_correlation(ExponentialRecords(n, m)).R, 1e-12)
    for n, n1, n2 in itertools.product(range(1, 5), repeat=3):
        expected = n / (sqrt(n + n1) * sqrt(n + n2))
        yield _close(f"maxcorr.splitting({n},{n1},{n2})", "splitting", expected,
                     maximal_correlation(BivariateGamma(n, n1, n2, 1.0)).R, 1e-12)
        yield _close(f"maxcorr.splitting-bound({n},{n1},{n2})", "splitting", expected,
                     splitting_record_bound(n, n1, n2), 1e-12)
    for a0, a1, a2 in GAMMA_TRIPLES:
        expected = a0 / (sqrt(a0 + a1) * sqrt(a0 + a2))
        yield _close(f"maxcorr.gamma({_fmt(a0, a1, a2)})", "gamma", expected,
                     maximal_correlation(BivariateGamma(a0, a1, a2, 1.0)).R, 1e-12)


def finite_pop_specs(max_N: int = 10) -> Iterator[FinitePopOrderStats]:
    for N in range(3, max_N + 1):
        for n in range(2, N):
            for i, j in itertools.combinations(range(1, n + 1), 2):
                yield FinitePopOrderStats(i, j, n, N)


def exact_oracle_rows() -> Iterator[Row]:
    for s in finite_pop_specs():
        expected = sqrt(s.i * (s.n + 1 - s.j) / (s.j * (s.n + 1 - s.i)))
        yield _close(f"oracle.svd.finite-pop({s.i},{s.j},{s.n},{s.N})", "finite-pop", expected,
                     svd_maxcorr(joint_pmf(s)), 1e-10)


def ace_rows(bins: int = 200, tol: float = 1e-8) -> Iterator[Row]:
    for r in (0.3, 0.6, 0.9):
        est = ace_maxcorr(discretize(BivariateNormal(rho=r), bins), tol=tol).R_hat
        yield _close(f"oracle.ace.normal({r:g})", "normal", r, est, 1e-2)
    spec = BetaType(2, 1, 3)
    est = ace_maxcorr(discretize(spec, bins), tol=tol).R_hat
    yield _close("oracle.ace.beta(2,1,3)", "beta", sqrt(2 * 3 / (3 * 4)), est, 1e-2)


DIAGONAL_SPECS = (
    BetaType(1, 1, 1), BetaType(2, 3, 1), BivariateGamma(2, 1, 3, 1.0), FinitePopOrderStats(1, 3, 4, 8),
)


def diagonal_rows(K: int = 6) -> Iterator[Row]:
    for spec in DIAGONAL_SPECS:
        name = type(spec).__name__
        params = ",".join(f"{v:g}" for v in spec.params().values())
        yield _close(f"diagonal.{name}({params})", "diagonal", 0.0, verify_diagonal(spec, K).max_residual, 1e-7)


def simulation_rows(replicates: int, seed: int) -> Iterator[Row]:
    E, U = parent("exp"), parent("uniform")
    reps, sd = replicates, seed
    for n, m in ((1, 1), (2, 3)):
        b = sqrt(n / (n + m))
        yield _hits(f"sim.records.exp({n},{m})", "records", b, sim_records(E, n, m, reps, sd))
        yield _short(f"sim.records.uniform({n},{m})", "records", b, sim_records(U, n, m, reps, sd))
    for i, j, n in ((1, 2, 2), (1, 2, 3)):
        b = sqrt(i * (n + 1 - j) / (j * (n + 1 - i)))
        yield _hits(f"sim.order-stats.uniform({i},{j},{n})", "order-stats", b, sim_order_stats(U, i, j, n, reps, sd))
        yield _short(f"sim.order-stats.exp({i},{j},{n})", "order-stats", b, sim_order_stats(E, i, j, n, reps, sd))
    for n, n1, n2 in ((1, 1, 1), (2, 1, 3)):
        b = splitting_record_bound(n, n1, n2)
        yield _hits(f"sim.splitting.exp({n},{n1},{n2})", "splitting", b,
                    sim_splitting_records(E, n, n1, n2, reps, sd))
    yield _hits("sim.finite-pop.arithmetic(1,2,2,4)", "finite-pop", 0.5, sim_finite_pop([1, 2, 3, 4], 1, 2, 2, reps, sd))
    # the two windows {x1..x3}, {x3..x5} share one point: slopes may differ
    yield _hits("sim.finite-pop.piecewise(1,3,3,5)", "finite-pop", 1 / 3,
                sim_finite_pop([1, 2, 3, 5, 7], 1, 3, 3, reps, sd))
    yield _short("sim.finite-pop.geometric(1,2,2,4)", "finite-pop", 0.5, sim_finite_pop([1, 2, 4, 8], 1, 2, 2, reps, sd))


def identity_rows() -> Iterator[Row]:
    ga, gb = polynomial(POLY_A), polynomial(POLY_B)
    for spec in DIAGONAL_SPECS:
        c = check_diagonal_covariance(spec, ga, gb, K=6)
        yield _close(f"identity.diagonal.{type(spec).__name__}", "identities", c.lhs, c.rhs, 1e-6)
    for args in ((0.0, 0.0, 1.0, 1.0, 0.5), (1.0, -2.0, 0.5, 1.5, -0.8), (0.3, 0.3, 1.2, 1.2, 1.0)):
        c = check_normal_covariance(*args, ga, gb)
        yield _close(f"identity.normal({_fmt(*args)})", "identities", c.lhs, c.rhs, 1e-6)
    for args in ((2.0, 1.0, 3.0, 1.0), (0.7, 0.4, 1.3, 2.0), (3.0, 0.0, 2.0, 0.5)):
        c = check_gamma_covariance(*args, ga, gb)
        yield _close(f"identity.gamma({_fmt(*args)})", "identities", c.lhs, c.rhs, 1e-6)
    c = check_gamma_stein(2.0, 1.0, identity(), identity())
    yield _close("identity.gamma-stein.variance(2)", "identities", 2.0, c.rhs, 1e-12)
    c = check_gamma_stein(1.5, 0.8, ga, gb)
    yield _close("identity.gamma-stein(1.5,0.8)", "identities", c.lhs, c.rhs, 1e-6)
    for n, m in ((1, 1), (2, 3)):
        c = check_record_covariance(n, m, identity(), identity())
        yield _close(f"identity.records.cov({n},{m})", "identities", float(n), c.rhs, 1e-10)
        c = check_record_covariance(n, m, ga, gb)
        yield _close(f"identity.records({n},{m})", "identities", c.lhs, c.rhs, 1e-6)
    # specializations of the gamma series
    s = check_gamma_stein(2.5, 1.3, ga, gb).rhs
    g = check_gamma_covariance(2.5, 0.0, 0.0, 1.3, ga, gb).rhs
    yield _close("identity.specialize.single-gamma", "identities", g, s, 1e-12 * max(1.0, abs(g)))
    r = check_record_covariance(3, 2, ga, gb).rhs
    g = check_gamma_covariance(3.0, 0.0, 2.0, 1.0, ga, gb).rhs
    yield _close("identity.specialize.records", "identities", g, r, 1e-12 * max(1.0, abs(g)))


def disc_rows(tol: float = 1e-8) -> Iterator[Row]:
    joint = unit_disc_joint()
    a1, b1 = regression_slopes(joint)
    yield _close("disc.A1", "disc", 0.0, a1, 1e-3)
    yield _close("disc.B1", "disc", 0.0, b1, 1e-3)
    r = ace_maxcorr(joint, tol=tol).R_hat
    yield Row("disc.R_hat>0.4", "disc", 0.4, r, r - 0.4, r > 0.4, 0.0)
    yield _close("disc.R_hat.pin", "disc", DISC_R_PIN, r, DISC_PIN_TOL)


GROUPS: dict[str, Callable[..., Iterator[Row]]] = {
    "closed-form": lambda **kw: closed_form_rows(),
    "exact-oracle": lambda **kw: exact_oracle_rows(),
    "ace": lambda bins, tol, **kw: ace_rows(bins, tol),
    "diagonal": lambda **kw: diagonal_rows(),
    "simulation": lambda replicates, seed, **kw: simulation_rows(replicates, seed),
    "identities": lambda **kw: identity_rows(),
    "disc": lambda tol, **kw: disc_rows(tol),
}


def results_matrix(
    filter: str | None = None,
    replicates: int = 100_000,
    seed: int = 0,
    bins: int = 200,
    tol: float = 1e-8,
) -> list[Row]:
    """All checks, optionally restricted by group name or id substring."""
    rows: list[Row] = []
    # a section name selects just that section without running the others
    sections = [filter] if filter in GROUPS else list(GROUPS)
    for section in sections:
        gen = GROUPS[section]
        for row in gen(replicates=replicates, seed=seed, bins=bins, tol=tol):
            if filter is None or filter in (section, row.group) or filter in row.check_id:
                rows.append(row)
    return rows
