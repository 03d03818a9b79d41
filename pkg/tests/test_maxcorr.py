import json
from math import sqrt

import numpy as np
import pytest

from lancaster.errors import InvalidSpec, NegativeProduct
from lancaster.families import (
    BetaType,
    BivariateGamma,
    BivariateNormal,
    ExponentialRecords,
    FinitePopOrderStats,
    RegressionCoeffs,
    UniformOrderStats,
    closed_form_R,
    regression_coeffs,
)
from lancaster.maxcorr import (
    lancaster_sequence,
    maximal_correlation,
    report_from_sequence,
    splitting_record_bound,
    splitting_spec,
)


def test_sequence_examples():
    seq = lancaster_sequence(regression_coeffs(BivariateNormal(rho=0.5), 4))
    assert seq[2] == pytest.approx(0.25, abs=1e-15)
    seq = lancaster_sequence(regression_coeffs(BetaType(1, 1, 1), 2))
    assert seq[1] == pytest.approx(0.5, abs=1e-15)
    seq = lancaster_sequence(regression_coeffs(ExponentialRecords(1, 1), 3))
    assert seq[2] == pytest.approx(sqrt(1 / 3), abs=1e-15)
    with pytest.raises(IndexError):
        seq[0]
    with pytest.raises(IndexError):
        seq[4]


def test_negative_product_rejected():
    with pytest.raises(NegativeProduct):
        lancaster_sequence(RegressionCoeffs((0.5, 0.2), (0.5, -0.1)))


def test_rounding_noise_around_zero_tolerated():
    seq = lancaster_sequence(RegressionCoeffs((0.5, 1e-17), (0.5, -1e-17)))
    assert seq.rho[1] == 0.0


def test_sign_follows_a():
    seq = lancaster_sequence(regression_coeffs(BivariateNormal(rho=-0.5), 3))
    np.testing.assert_allclose(seq.rho, [-0.5, 0.25, -0.125], atol=1e-15)
    rep = report_from_sequence(seq)
    assert rep.sign == -1 and rep.R == pytest.approx(0.5)
    assert "a1*b1 < 0" in rep.attainment


def test_report_examples():
    rep = maximal_correlation(BivariateNormal(rho=-0.7))
    assert rep.R == pytest.approx(0.7, abs=1e-15) and rep.attaining_index == 1
    assert rep.unique_max and rep.truncation_proven
    assert maximal_correlation(UniformOrderStats(2, 3, 4)).R == pytest.approx(2 / 3, abs=1e-15)
    assert maximal_correlation(BivariateGamma(2, 1, 2, 3)).R == pytest.approx(1 / sqrt(3), abs=1e-15)


def test_ties_use_smallest_index():
    seq = lancaster_sequence(RegressionCoeffs((0.5, 0.5, 0.1), (0.5, 0.5, 0.1)))
    rep = report_from_sequence(seq)
    assert rep.attaining_index == 1 and not rep.unique_max


def test_non_monotone_is_flagged():
    seq = lancaster_sequence(RegressionCoeffs((0.5, 0.1, 0.3), (0.5, 0.1, 0.3)))
    rep = report_from_sequence(seq)
    assert not rep.truncation_proven
    assert rep.truncation_note.startswith("UNPROVEN")


def test_independent_pair():
    rep = maximal_correlation(BivariateNormal(rho=0.0))
    assert rep.R == 0.0 and rep.attaining_index is None and not rep.unique_max
    assert rep.truncation_proven


@pytest.mark.parametrize("args", [(1, 2, 2, 4), (1, 3, 4, 6), (2, 4, 5, 9), (1, 2, 3, 10)])
def test_finite_population_cutoff(args):
    spec = FinitePopOrderStats(*args)
    _, _, n, N = args
    seq = lancaster_sequence(regression_coeffs(spec, 12), N - n)
    assert seq.nu == N - n
    for k in range(N - n + 1, 13):
        assert seq[k] == 0.0
    assert any(seq[k] != 0.0 for k in range(1, N - n + 1))
    rep = maximal_correlation(spec)
    assert rep.truncation_proven and rep.truncation_note.startswith("exact")


@pytest.mark.parametrize(
    "spec",
    [
        BivariateNormal(rho=0.35),
        BetaType(0.7, 1.3, 2.1),
        UniformOrderStats(2, 5, 7),
        ExponentialRecords(3, 4),
        FinitePopOrderStats(2, 3, 5, 9),
        BivariateGamma(1.2, 0.4, 3.3, 2.0),
        BivariateGamma(2.0, 0.0, 1.0, 1.0),
    ],
)
def test_matches_closed_form(spec):
    assert abs(maximal_correlation(spec).R - closed_form_R(spec)) <= 1e-12


def test_location_scale_invariance():
    base = maximal_correlation(BivariateNormal(rho=0.45)).R
    for mu1, mu2, s1, s2 in [(3, -2, 1, 1), (0, 0, 5, 0.1), (-7, 1e3, 0.02, 40)]:
        assert maximal_correlation(BivariateNormal(mu1, mu2, s1, s2, 0.45)).R == pytest.approx(base, abs=1e-12)
    g = maximal_correlation(BivariateGamma(1.5, 2.0, 0.5, 1.0)).R
    for lam in (0.01, 0.5, 7.0, 300.0):
        assert maximal_correlation(BivariateGamma(1.5, 2.0, 0.5, lam)).R == pytest.approx(g, abs=1e-12)


def test_splitting_bound_examples():
    assert splitting_record_bound(1, 1, 1) == pytest.approx(0.5, abs=1e-15)
    assert splitting_record_bound(2, 3, 3) == pytest.approx(0.4, abs=1e-15)
    assert splitting_record_bound(9, 1, 1) == pytest.approx(0.9, abs=1e-15)
    vals = [splitting_record_bound(n, 1, 1) for n in range(1, 60)]
    assert all(a < b for a, b in zip(vals, vals[1:])) and vals[-1] < 1


def test_splitting_bound_equals_gamma_path():
    for n in range(1, 15):
        for n1 in range(1, 15):
            for n2 in range(1, 15):
                assert splitting_record_bound(n, n1, n2) == maximal_correlation(splitting_spec(n, n1, n2)).R


@pytest.mark.parametrize("bad", [(0, 1, 1), (1, 0, 1), (1, 1, -2), (1.5, 1, 1), (True, 1, 1)])
def test_splitting_bound_rejects(bad):
    with pytest.raises(InvalidSpec):
        splitting_record_bound(*bad)


def test_json_fields():
    doc = json.loads(maximal_correlation(UniformOrderStats(1, 2, 3)).to_json())
    assert list(doc) == ["R", "attaining_index", "unique_max", "truncation_note", "oracle_residual"]
    assert doc["oracle_residual"] is None
