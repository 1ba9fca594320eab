import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special, stats

from virtperm import (
    Fixed,
    FixedAtom,
    LambdaSequence,
    OnCircle,
    Permutation,
    PointConfig,
    PoissonDirichlet,
    PreconditionError,
    Stream,
    ValidationError,
    ewens_log_pmf,
    induced_permutation,
    make_lambda,
    project,
    sample_ewens_crp,
    sample_gem,
    sample_positions,
)
from virtperm.central_sampler import _crp_rows, _gem_rows, _induced_rows, _place, law_from_dict

# --- lambda ------------------------------------------------------------------


def test_make_lambda_examples():
    lam = make_lambda([0.5, 0.3, 0.2])
    assert lam.values == (0.5, 0.3, 0.2) and lam.dust == 0.0
    lam = make_lambda([0.3, 0.5])
    assert lam.values == (0.5, 0.3) and lam.dust == pytest.approx(0.2, abs=1e-15)
    with pytest.raises(ValidationError):
        make_lambda([0.7, 0.7])
    with pytest.raises(ValidationError):
        make_lambda([0.0, 0.5])
    assert make_lambda([]).dust == 1.0


def test_lambda_sequence_validation():
    with pytest.raises(ValidationError):
        LambdaSequence((0.3, 0.5), 0.2)
    with pytest.raises(ValidationError):
        LambdaSequence((0.5,), 0.4)
    lam = LambdaSequence((0.5,), 0.5)
    assert lam.perimeter(1) == 0.5
    with pytest.raises(PreconditionError):
        lam.perimeter(2)
    with pytest.raises(PreconditionError):
        lam.perimeter(0)


def test_laws_round_trip():
    for law in (Fixed(make_lambda([0.6, 0.4])), PoissonDirichlet(1.5, 64, 1e-5)):
        assert law_from_dict(law.to_dict()) == law
    with pytest.raises(ValidationError):
        PoissonDirichlet(0.0)
    with pytest.raises(ValidationError):
        law_from_dict({"law": "uniform"})


# --- stick-breaking ----------------------------------------------------------------


def _mean_first_oracle(theta):
    # E[lambda_1] = int_0^inf exp(-x - theta E1(x)) dx  (theta = 1: Golomb-Dickman)
    val, _ = integrate.quad(lambda x: math.exp(-x - theta * special.exp1(x)), 0, math.inf)
    return val


def test_gem_mean_first_part():
    keys = Stream.from_seed(11).children(range(100_000))
    values, _, _ = _gem_rows(1.0, 256, 1e-6, keys)
    oracle = _mean_first_oracle(1.0)
    assert oracle == pytest.approx(0.6243, abs=1e-4)
    assert abs(values[:, 0].mean() - oracle) < 0.01


@pytest.mark.parametrize("theta", [0.2, 1.0, 5.0])
def test_gem_invariants(theta):
    keys = Stream.from_seed(5).children(range(10_000))
    values, counts, dust = _gem_rows(theta, 256, 1e-6, keys)
    assert np.all(values[:, :-1] >= values[:, 1:])
    assert np.all(values <= 1.0) and np.all(values >= 0.0)
    assert np.all(np.abs(values.sum(axis=1) + dust - 1.0) < 1e-12)
    assert np.all(dust >= 0.0)
    assert np.all(counts >= 1) and np.all(counts <= 256)
    # stopping rule: either the truncation was hit or the tail is below epsilon
    assert np.all((counts == 256) | (dust < 1e-6))


def test_gem_rows_do_not_depend_on_batch():
    s = Stream.from_seed(8)
    keys = s.children(range(40))
    values, counts, dust = _gem_rows(0.7, 256, 1e-6, keys)
    for t in (0, 17, 39):
        lam = sample_gem(0.7, rng=s.child(t))
        assert lam.values == tuple(values[t, : counts[t]])
        assert lam.dust == dust[t]


def test_gem_first_stick_law():
    # unsorted first fraction W_1 ~ Beta(1, theta) is not observable after
    # ranking, but the largest part stochastically dominates it; with theta
    # small the largest part is close to 1
    lam = [sample_gem(0.01, rng=Stream.from_seed(1).child(i)) for i in range(200)]
    assert np.mean([x.values[0] for x in lam]) > 0.97


def test_sample_gem_errors():
    with pytest.raises(PreconditionError):
        sample_gem(0.0)
    with pytest.raises(PreconditionError):
        sample_gem(1.0, truncation=0)


# --- positions -----------------------------------------------------------------------


def test_single_circle_and_all_dust():
    config = sample_positions(make_lambda([1.0]), range(100), 3)
    assert all(isinstance(config[x], OnCircle) and config[x].circle == 1 for x in range(100))
    assert all(0.0 <= config[x].coord < 1.0 for x in range(100))
    config = sample_positions(make_lambda([]), range(10), 3)
    assert [config[x] for x in range(10)] == [FixedAtom(x) for x in range(10)]


def test_fraction_on_first_circle():
    config = sample_positions(make_lambda([0.6, 0.4]), range(100_000), Stream.from_seed(21))
    frac = sum(config[x].circle == 1 for x in range(100_000)) / 100_000
    assert abs(frac - 0.6) < 0.01


def test_coordinates_uniform():
    lam = make_lambda([0.5, 0.3])
    config = sample_positions(lam, range(20_000), 4)
    coords = [config[x].coord / 0.5 for x in range(20_000) if config[x] != FixedAtom(x) and config[x].circle == 1]
    assert stats.kstest(coords, "uniform").pvalue > 1e-3


def test_positions_are_restrictions():
    lam = make_lambda([0.5, 0.3])
    big = sample_positions(lam, range(500), 9)
    small = sample_positions(lam, [3, 77, 400], 9)
    assert small == big.restrict([3, 77, 400])


def test_position_errors():
    lam = make_lambda([1.0])
    with pytest.raises(PreconditionError):
        sample_positions(lam, [1, 1], 0)
    with pytest.raises(PreconditionError):
        sample_positions(lam, [-1], 0)
    with pytest.raises(PreconditionError):
        sample_positions(lam, [0], 0)[5]


def test_point_config_validation_and_json():
    lam = make_lambda([0.5, 0.3])
    with pytest.raises(ValidationError):
        PointConfig(lam, {0: OnCircle(1, 0.6)})
    with pytest.raises(ValidationError):
        PointConfig(lam, {0: OnCircle(1, 0.1), 1: OnCircle(1, 0.1)})
    with pytest.raises(PreconditionError):
        PointConfig(lam, {0: OnCircle(3, 0.1)})
    config = sample_positions(lam, range(50), 2)
    assert PointConfig.from_json(config.to_json()) == config


def test_place_matches_cumulative_rule():
    values = np.array([[0.5, 0.3, 0.0]])
    u_circ = np.array([[0.0, 0.49, 0.5, 0.79, 0.8, 0.99]])
    u_coord = np.full((1, 6), 0.5)
    circ, coord = _place(values, u_circ, u_coord)
    assert circ.tolist() == [[0, 0, 1, 1, -1, -1]]
    assert coord.tolist() == [[0.25, 0.25, 0.15, 0.15, 0.0, 0.0]]


# --- induced permutations -------------------------------------------------------------


def test_induced_examples():
    lam = make_lambda([1.0])
    config = PointConfig(lam, {10: OnCircle(1, 0.1), 20: OnCircle(1, 0.5), 30: OnCircle(1, 0.9)})
    assert induced_permutation(config, [10, 20, 30]) == Permutation.from_cycles([(10, 20, 30)])
    dust = sample_positions(make_lambda([]), range(6), 1)
    assert induced_permutation(dust, range(6)) == Permutation.identity(range(6))
    with pytest.raises(PreconditionError):
        induced_permutation(config, [10, 10])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32), size=st.integers(1, 60), data=st.data())
def test_induced_is_virtual_permutation(seed, size, data):
    lam = sample_gem(1.3, rng=seed)
    config = sample_positions(lam, range(size), Stream.from_seed(seed).child(1))
    j = sorted(data.draw(st.sets(st.integers(0, size - 1))))
    i = sorted(data.draw(st.sets(st.sampled_from(j)))) if j else []
    sk = induced_permutation(config, range(size))
    assert project(sk, j) == induced_permutation(config, j)
    assert project(induced_permutation(config, j), i) == induced_permutation(config, i)


def test_induced_rows_match_scalar():
    lam = make_lambda([0.4, 0.35])
    keys = Stream.from_seed(4).children(range(300))
    for k in keys:
        s = Stream(tuple(int(v) for v in k))
        config = sample_positions(lam, range(6), s)
        circ = np.array([[config[x].circle - 1 if isinstance(config[x], OnCircle) else -1 for x in range(6)]])
        coord = np.array([[config[x].coord if isinstance(config[x], OnCircle) else 0.0 for x in range(6)]])
        assert _induced_rows(circ, coord)[0].tolist() == list(induced_permutation(config, range(6)).images)


# --- sequential insertion ------------------------------------------------------------


def _chi2_pvalue(counts, probs):
    mask = probs > 0
    return stats.chisquare(counts[mask], probs[mask] * counts.sum()).pvalue


def _crp_counts(n, theta, trials, seed):
    keys = Stream.from_seed(seed).children(range(trials))
    rows = _crp_rows(n, theta, keys)
    index = {p: i for i, p in enumerate(itertools.permutations(range(n)))}
    counts = np.zeros(len(index))
    for r in map(tuple, rows.tolist()):
        counts[index[r]] += 1
    perms = [Permutation(tuple(range(n)), p) for p in index]
    probs = np.array([math.exp(ewens_log_pmf(p, theta)) for p in perms])
    return counts, probs


def test_crp_uniform_at_theta_one():
    counts, probs = _crp_counts(3, 1.0, 100_000, 1)
    assert np.allclose(probs, 1 / 6)
    assert _chi2_pvalue(counts, probs) > 1e-3


def test_crp_theta_zero_gives_uniform_full_cycles():
    counts, probs = _crp_counts(4, 0.0, 30_000, 2)
    assert counts[probs == 0].sum() == 0
    assert (probs > 0).sum() == 6
    assert _chi2_pvalue(counts, probs) > 1e-3


def test_crp_matches_ewens_at_theta_two():
    counts, probs = _crp_counts(4, 2.0, 100_000, 3)
    assert _chi2_pvalue(counts, probs) > 1e-3


def test_crp_scalar_and_edge_cases():
    keys = Stream.from_seed(6).children(range(5))
    rows = _crp_rows(7, 1.5, keys)
    for k, row in zip(keys, rows):
        p = sample_ewens_crp(7, 1.5, Stream(tuple(int(v) for v in k)))
        assert list(p.images) == row.tolist()
    assert sample_ewens_crp(1, 2.0, 0) == Permutation.identity([0])
    with pytest.raises(PreconditionError):
        sample_ewens_crp(0, 1.0, 0)
    with pytest.raises(PreconditionError):
        sample_ewens_crp(3, -1.0, 0)
