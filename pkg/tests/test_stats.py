import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from virtperm import PreconditionError, ValidationError
from virtperm.experiments import chi2_critical, chi_square, chi_square_two_sample, ks_critical, ks_statistic


def _ks_brute(samples):
    """sup |F_n - F| evaluated just before and at every sample point."""
    x = sorted(samples)
    n = len(x)
    worst = 0.0
    for t in x:
        below = sum(v < t for v in x) / n
        at = sum(v <= t for v in x) / n
        worst = max(worst, abs(at - t), abs(below - t))
    return worst


def test_ks_examples():
    assert ks_statistic([0.5]) == 0.5
    n = 9
    assert ks_statistic([k / (n + 1) for k in range(1, n + 1)]) == pytest.approx(1 / (n + 1))
    ones = [1.0] * 5
    assert ks_statistic(ones) == pytest.approx(_ks_brute(ones)) == pytest.approx(1.0)
    with pytest.raises(PreconditionError):
        ks_statistic([])


@settings(max_examples=100)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=30))
def test_ks_matches_brute_force(xs):
    assert ks_statistic(xs) == pytest.approx(_ks_brute(xs), abs=1e-12)


def test_ks_matches_scipy():
    x = np.random.default_rng(0).random(500)
    assert ks_statistic(x) == pytest.approx(stats.kstest(x, "uniform").statistic, abs=1e-12)


def test_ks_critical():
    assert ks_critical(1e-3, 1) == pytest.approx(1.9495, abs=1e-4)
    assert ks_critical(0.05, 100) == pytest.approx(0.13581, abs=1e-4)


def test_chi_square_examples():
    assert chi_square([25, 25, 50], [0.25, 0.25, 0.5], 100) == (0.0, 2)
    assert chi_square([60, 40], [0.5, 0.5], 100) == (pytest.approx(4.0), 1)
    with pytest.raises(ValidationError):
        chi_square([1, 2, 3], [0.5, 0.5], 6)
    with pytest.raises(ValidationError):
        chi_square([1, 1], [0.5, 0.6], 2)
    with pytest.raises(ValidationError):
        chi_square([1, 1], [1.0, 0.0], 2)
    # zero-probability categories with no counts are dropped from dof
    assert chi_square([30, 0, 70], [0.3, 0.0, 0.7], 100) == (pytest.approx(0.0), 1)


def test_chi_square_matches_scipy():
    obs = np.array([18, 22, 31, 29])
    p = np.array([0.2, 0.2, 0.3, 0.3])
    stat, dof = chi_square(obs, p, 100)
    assert stat == pytest.approx(stats.chisquare(obs, p * 100).statistic)
    assert chi2_critical(1e-3, dof) == pytest.approx(16.266, abs=1e-3)
    assert chi2_critical(0.05, 0) == 0.0


def test_two_sample_matches_contingency_table():
    a = np.array([40, 30, 0, 30])
    b = np.array([35, 45, 0, 20])
    stat, dof = chi_square_two_sample(a, b)
    table = np.array([a, b])[:, (a + b) > 0]
    want = stats.chi2_contingency(table, correction=False)
    assert stat == pytest.approx(want.statistic)
    assert dof == want.dof == 2
    with pytest.raises(ValidationError):
        chi_square_two_sample([1, 2], [1, 2, 3])
    with pytest.raises(ValidationError):
        chi_square_two_sample([0, 0], [1, 2])
