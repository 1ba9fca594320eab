import cmath
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from virtperm import (
    INFINITE,
    FixedAtom,
    NotEquivalentError,
    OnCircle,
    PointConfig,
    PreconditionError,
    ValidationError,
    asymptotic_length,
    delta_arc,
    distance,
    eval_eigenfunction,
    flow_apply,
    make_lambda,
    sample_positions,
    spectrum_U,
)
from virtperm.flow_spectrum import is_admissible

LAM = make_lambda([0.5, 0.3])
UNIT = make_lambda([1.0])


def cfg(lam=LAM, **points):
    return PointConfig(lam, {int(k[1:]): v for k, v in points.items()})


def test_asymptotic_length():
    c = cfg(x0=FixedAtom(0), x1=OnCircle(1, 0.2), x2=OnCircle(1, 0.4), x3=OnCircle(2, 0.1))
    assert asymptotic_length(c, 0) == 0.0
    assert asymptotic_length(c, 1) == 0.5 == asymptotic_length(c, 2)
    assert asymptotic_length(c, 3) == 0.3


def test_distance_examples():
    p, q = OnCircle(1, 0.1), OnCircle(1, 0.9)
    c = cfg(UNIT, x0=p, x1=q)
    assert distance(c, p, q) == pytest.approx(0.2)
    assert distance(c, p, p) == 0.0
    c2 = cfg(x0=OnCircle(1, 0.1), x1=OnCircle(2, 0.1), x2=FixedAtom(2))
    assert distance(c2, OnCircle(1, 0.1), OnCircle(2, 0.1)) == 1.0
    assert distance(c2, FixedAtom(2), OnCircle(2, 0.1)) == 1.0
    assert distance(c2, FixedAtom(2), FixedAtom(2)) == 0.0


def test_delta_examples():
    c = cfg(UNIT, x0=OnCircle(1, 0.2), x1=OnCircle(1, 0.7))
    p, q = OnCircle(1, 0.2), OnCircle(1, 0.7)
    assert delta_arc(c, p, p).value == 0.0
    assert delta_arc(c, p, q).value == pytest.approx(0.5)
    assert delta_arc(c, q, p).value == pytest.approx(0.5)
    with pytest.raises(NotEquivalentError):
        delta_arc(c, p, FixedAtom(3))
    with pytest.raises(NotEquivalentError):
        delta_arc(cfg(), OnCircle(1, 0.1), OnCircle(2, 0.1))


def test_flow_examples():
    p = OnCircle(1, 0.1)
    assert flow_apply(cfg(), p, 0.0) == p
    assert flow_apply(cfg(), p, 0.75).coord == pytest.approx(0.35, abs=1e-15)
    assert flow_apply(cfg(), FixedAtom(4), 0.3) == FixedAtom(4)
    q = flow_apply(cfg(), OnCircle(2, 0.1), -0.1 - 1e-18)
    assert 0.0 <= q.coord < 0.3


@settings(max_examples=300)
@given(circle=st.sampled_from([1, 2]), u=st.floats(0, 1, exclude_max=True),
       a=st.floats(-5, 5), b=st.floats(-5, 5))
def test_flow_group_law_and_isometry(circle, u, a, b):
    lam_k = LAM.perimeter(circle)
    p = OnCircle(circle, min(u * lam_k, math.nextafter(lam_k, 0)))
    q = OnCircle(circle, (p.coord + 0.123) % lam_k)
    c = cfg()
    assert distance(c, flow_apply(c, flow_apply(c, p, a), b), flow_apply(c, p, a + b)) <= 1e-12
    assert distance(c, flow_apply(c, p, lam_k), p) <= 1e-12
    assert abs(distance(c, flow_apply(c, p, a), flow_apply(c, q, a)) - distance(c, p, q)) <= 1e-12
    # delta cocycle through the flow: delta(p, S^a p) = a mod lambda
    d = delta_arc(c, p, flow_apply(c, p, a)).value
    assert min(abs(d - a % lam_k), lam_k - abs(d - a % lam_k)) <= 1e-12


def test_spectrum_examples():
    pp = spectrum_U(UNIT, 7)
    assert pp.atoms == ((-2 * math.pi, 1), (2 * math.pi, 1)) and pp.zero_multiplicity == 1
    pp = spectrum_U(make_lambda([0.5, 0.5]), 13)
    assert pp.atoms == ((-4 * math.pi, 2), (4 * math.pi, 2)) and pp.zero_multiplicity == 2
    assert spectrum_U(LAM, 20).zero_multiplicity is INFINITE
    assert spectrum_U(LAM, (1.0, 20.0)).zero_multiplicity == 0
    assert spectrum_U(make_lambda([]), 5).atoms == ()


def test_spectrum_merges_commensurable_circles():
    # 8 pi is m=2 on the circle of perimeter 1/2 and m=1 on the one of 1/4
    pp = spectrum_U(make_lambda([0.5, 0.25]), 9 * math.pi)
    mult = dict(pp.atoms)
    assert mult[8 * math.pi] == 2 and mult[4 * math.pi] == 1


def test_eigenfunction():
    c = sample_positions(LAM, range(200), 5)
    on1 = [c[x] for x in range(200) if isinstance(c[x], OnCircle) and c[x].circle == 1]
    base, y = on1[0], on1[1]
    a = 2 * math.pi * 3 / 0.5
    assert is_admissible(0.5, a) and not is_admissible(0.5, 1.0)
    assert eval_eigenfunction(c, base, base, a) == 1
    assert eval_eigenfunction(c, base, FixedAtom(7), a) == 0
    other = next(c[x] for x in range(200) if isinstance(c[x], OnCircle) and c[x].circle == 2)
    assert eval_eigenfunction(c, base, other, a) == 0
    want = cmath.exp(1j * a * delta_arc(c, base, y).value)
    assert eval_eigenfunction(c, base, y, a) == pytest.approx(want, abs=1e-12)
    # f(S^t y) = e^{i a t} f(y)
    t = 0.0137
    assert eval_eigenfunction(c, base, flow_apply(c, y, t), a) == pytest.approx(
        cmath.exp(1j * a * t) * eval_eigenfunction(c, base, y, a), abs=1e-9)
    with pytest.raises(ValidationError):
        eval_eigenfunction(c, base, y, 1.0)
    with pytest.raises(PreconditionError):
        eval_eigenfunction(c, FixedAtom(0), y, a)
