import math
import pickle

import pytest
from hypothesis import given
from hypothesis import strategies as st

from virtperm import INFINITE, PointProcess, ValidationError

locs = st.lists(st.floats(-100, 100).filter(lambda x: x != 0.0), unique=True, max_size=10)


@given(xs=locs, zero=st.one_of(st.integers(0, 5), st.just(INFINITE)))
def test_json_round_trip(xs, zero):
    pp = PointProcess.from_counts({x: 1 + i for i, x in enumerate(xs)}, zero)
    assert PointProcess.from_json(pp.to_json()) == pp


def test_validation():
    with pytest.raises(ValidationError):
        PointProcess(((1.0, 1), (0.5, 1)))
    with pytest.raises(ValidationError):
        PointProcess(((0.0, 1),))
    with pytest.raises(ValidationError):
        PointProcess(((1.0, 0),))
    with pytest.raises(ValidationError):
        PointProcess((), -1)
    with pytest.raises(ValidationError):
        PointProcess(((math.inf, 1),))


def test_linear_statistic():
    pp = PointProcess(((-1.0, 2), (3.0, 1)), 4)
    assert pp.linear_statistic(lambda x: x * x) == 2 + 9
    assert pp.linear_statistic(lambda x: 1.0) == 7
    inf = PointProcess(((1.0, 1),), INFINITE)
    assert inf.linear_statistic(lambda x: x) == 1.0
    with pytest.raises(ValidationError):
        inf.linear_statistic(lambda x: 1.0)
    assert inf.total_mass() is INFINITE
    assert pp.total_mass() == 7


def test_restrict_and_csv():
    pp = PointProcess(((-2.0, 1), (1.0, 2), (5.0, 1)), 3)
    assert pp.restrict(0.5, 6.0) == PointProcess(((1.0, 2), (5.0, 1)), 0)
    assert pp.restrict(-3.0, 1.0).zero_multiplicity == 3
    assert pp.to_csv() == "location,multiplicity\n-2.0,1\n0.0,3\n1.0,2\n5.0,1\n"
    assert PointProcess(((1.0, 1),), INFINITE).to_csv() == "location,multiplicity\n0.0,inf\n1.0,1\n"
    assert PointProcess(((1.0, 1),)).to_csv() == "location,multiplicity\n1.0,1\n"


def test_infinite_is_a_singleton():
    assert pickle.loads(pickle.dumps(INFINITE)) is INFINITE
    assert repr(INFINITE) == "INFINITE"
