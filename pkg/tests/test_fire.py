import math
import pickle

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from creds.fire import (INFEASIBLE, K, FireState, FireStatus, QuenchCapability, area_rate, critical_area,
                        deadline_time, evolve_under_quench, grow, is_feasible, perimeter, quench_time)

spreads = st.floats(0.01, 0.3)
rates = st.floats(5.0, 40.0)
areas = st.floats(1.0, 2000.0)
times = st.floats(0.0, 500.0)


class TestSentinel:
    def test_orders_above_every_float(self):
        assert 1e308 < INFEASIBLE
        assert INFEASIBLE > math.inf
        assert not INFEASIBLE < 0.0
        assert INFEASIBLE == INFEASIBLE

    def test_no_arithmetic(self):
        with pytest.raises(TypeError):
            INFEASIBLE + 1.0

    def test_singleton_survives_pickle(self):
        assert pickle.loads(pickle.dumps(INFEASIBLE)) is INFEASIBLE
        assert not is_feasible(INFEASIBLE) and is_feasible(3.0)


def test_critical_area_values():
    assert critical_area(20, 0.1) == pytest.approx(3183.10, abs=0.01)
    assert critical_area(40, 0.1) == pytest.approx(4 * critical_area(20, 0.1))
    assert critical_area(20, 0.2) == pytest.approx(795.77, abs=0.01)


def test_critical_area_is_where_growth_stops():
    for q, s in [(20, 0.1), (26, 0.07), (16, 0.05)]:
        assert area_rate(critical_area(q, s), s, q) == pytest.approx(0.0, abs=1e-9)


def test_deadline_values():
    assert deadline_time(3183.0989, 0.1, 20) == pytest.approx(0.0, abs=1e-4)
    assert deadline_time(78.5398, 0.1, 20) == pytest.approx(268.31, abs=0.05)
    # large initial radius, stronger agent
    assert deadline_time(math.pi * 15**2, 0.1, 26) == pytest.approx(263.8028520389279, rel=1e-12)
    assert deadline_time(4000.0, 0.1, 20) is INFEASIBLE


def test_quench_time_examples():
    assert quench_time(0, 0.1, 20) == 0.0
    # RK4 time to zero; see test_oracle for the cross-check
    assert quench_time(100, 0.1, 20) == pytest.approx(5.682435, abs=1e-5)
    assert quench_time(3183.0989, 0.1, 20) is INFEASIBLE


def test_quench_time_small_area_limit():
    # growth negligible: time ~ a / q
    assert quench_time(1e-10, 0.05, 20) == pytest.approx(1e-10 / 20, rel=1e-4)


@given(areas, spreads, times, times)
def test_grow_semigroup(a, s, t1, t2):
    assert grow(grow(a, s, t1), s, t2) == pytest.approx(grow(a, s, t1 + t2), rel=1e-12)


@given(areas, spreads, rates)
def test_round_trip_quench_to_zero(a, s, q):
    tq = quench_time(a, s, q)
    if tq is INFEASIBLE:
        return
    assert evolve_under_quench(a, s, q, tq) == pytest.approx(0.0, abs=1e-4)


@given(st.floats(1.0, 500.0), st.floats(0.01, 0.1), rates, st.floats(1.001, 1.5))
def test_quench_time_monotone(a, s, q, f):
    base = quench_time(a, s, q)
    if base is INFEASIBLE:
        return
    assert quench_time(a * f, s, q) > base
    assert quench_time(a, s * f, q) > base
    assert quench_time(a, s, q * f) < base


@settings(max_examples=50)
@given(spreads, rates, st.floats(0.0, 100.0))
def test_critical_area_is_a_fixed_point(s, q, t):
    ac = critical_area(q, s)
    assert abs(evolve_under_quench(ac, s, q, t) - ac) < 1e-3


@given(spreads, rates)
def test_quench_time_diverges_near_critical(s, q):
    ac = critical_area(q, s)
    times_ = [quench_time(ac * (1 - eps), s, q) for eps in (1e-2, 1e-4, 1e-6)]
    assert times_[0] < times_[1] < times_[2]
    # logarithmic blow-up: each factor 100 closer adds (2q/c^2) ln 100
    c = K * s
    assert times_[2] - times_[1] == pytest.approx(2 * q / c**2 * math.log(100), rel=1e-3)


@given(areas, spreads, rates, times, times)
def test_evolve_composes(a, s, q, t1, t2):
    one = evolve_under_quench(evolve_under_quench(a, s, q, t1), s, q, t2)
    both = evolve_under_quench(a, s, q, t1 + t2)
    assert one == pytest.approx(both, rel=1e-7, abs=1e-6)


def test_evolve_above_critical_grows_but_slower():
    s, q = 0.1, 20
    a = 1.5 * critical_area(q, s)
    out = evolve_under_quench(a, s, q, 50)
    assert a < out < grow(a, s, 50)


def test_evolve_without_quench_is_growth():
    assert evolve_under_quench(100, 0.1, 0, 10) == grow(100, 0.1, 10)


def test_perimeter_of_circle():
    r = 7.0
    assert perimeter(math.pi * r * r) == pytest.approx(2 * math.pi * r)
    assert K == pytest.approx(2 * math.sqrt(math.pi))


@pytest.mark.parametrize("bad", [dict(spread_rate=0.0), dict(initial_area=0.0), dict(area=-1.0)])
def test_fire_state_validation(bad):
    kw = dict(id=1, center=(0, 0), area=10.0, initial_area=10.0, spread_rate=0.1) | bad
    with pytest.raises(ValueError):
        FireState(**kw)


def test_fire_state_flags():
    f = FireState(1, (0, 0), 10.0, 10.0, 0.1)
    assert f.active and f.max_area_seen == 10.0
    f.status = FireStatus.QUENCHED
    assert not f.active
    with pytest.raises(ValueError):
        QuenchCapability(-1, 10)


def test_negative_inputs_rejected():
    with pytest.raises(ValueError):
        grow(-1, 0.1, 1)
    with pytest.raises(ValueError):
        quench_time(10, 0, 20)
