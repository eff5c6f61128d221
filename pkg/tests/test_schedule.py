import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from creds.fire import INFEASIBLE, critical_area, deadline_time, grow, quench_time
from creds.schedule import (AgentSnapshot, FireSnapshot, ScheduleModel, baseline_score, build_schedule, dpmc_score,
                            marginal_insertion)

AGENT = AgentSnapshot(1, (0.0, 0.0), 20.0, 20.0)


def fires_from(spec, spread=0.05):
    return {j + 1: FireSnapshot(j + 1, (x, y), a, spread) for j, (x, y, a) in enumerate(spec)}


def test_empty_path_costs_nothing():
    m = ScheduleModel(AGENT, {})
    assert m.score([], "dpmc") == 0.0
    assert m.score([], "baseline") == 0.0


def test_single_task_timeline():
    fires = fires_from([(200, 0, 150.0)])
    s = build_schedule(AGENT, [1], fires)
    start = 10.0
    area = grow(150.0, 0.05, start)
    assert s.start_times[0] == pytest.approx(start)
    assert s.areas_at_start[0] == pytest.approx(area)
    assert s.quench_times[0] == pytest.approx(quench_time(area, 0.05, 20))
    assert s.completion_times[0] == pytest.approx(start + s.quench_times[0])
    assert s.deadlines[0] == pytest.approx(deadline_time(150.0, 0.05, 20))
    assert dpmc_score(s) == pytest.approx((math.sqrt(critical_area(20, 0.05)) - math.sqrt(area)) * start)
    assert baseline_score(s) == pytest.approx(start + s.quench_times[0])


def test_second_task_starts_after_first_completes():
    fires = fires_from([(200, 0, 150.0), (200, 300, 100.0)])
    s = build_schedule(AGENT, [1, 2], fires)
    assert s.start_times[1] == pytest.approx(s.completion_times[0] + 15.0)


def test_missed_deadline_makes_path_infeasible():
    fires = fires_from([(5000, 0, 0.95 * critical_area(20, 0.05))])
    s = build_schedule(AGENT, [1], fires)
    assert not s.feasible and s.quench_times[0] is INFEASIBLE
    assert dpmc_score(s) is INFEASIBLE and baseline_score(s) is INFEASIBLE
    assert ScheduleModel(AGENT, fires).score([1]) is INFEASIBLE


def test_ready_time_and_plan_epoch():
    fires = {1: FireSnapshot(1, (200, 0), 150.0, 0.05, time=0.0)}
    busy = AgentSnapshot(1, (0.0, 0.0), 20.0, 20.0, ready_time=130.0)
    s = ScheduleModel(busy, fires, plan_time=100.0).schedule([1])
    # 30 s still busy, then 10 s of travel; fire grew for 100 s before the epoch
    assert s.start_times[0] == pytest.approx(40.0)
    assert s.areas_at_start[0] == pytest.approx(grow(150.0, 0.05, 140.0))


def test_repeated_task_rejected():
    with pytest.raises(ValueError):
        build_schedule(AGENT, [1, 1], fires_from([(10, 0, 50.0)]))


def test_unknown_task_rejected():
    with pytest.raises(KeyError):
        ScheduleModel(AGENT, {}).score([4])


def test_cost_name_checked():
    with pytest.raises(ValueError):
        ScheduleModel(AGENT, fires_from([(10, 0, 50.0)])).score([1], "fastest")


fire_lists = st.lists(st.tuples(st.floats(-600, 600), st.floats(-600, 600), st.floats(20, 800)),
                      min_size=2, max_size=5)


@settings(max_examples=60, deadline=None)
@given(fire_lists, st.sampled_from(["dpmc", "baseline"]))
def test_marginal_is_cheapest_insertion(spec, cost):
    fires = fires_from(spec)
    model = ScheduleModel(AGENT, fires)
    path, cand = list(fires)[:-1], len(fires)
    if model.score(path, cost) is INFEASIBLE:
        assert model.marginal(path, cand, cost) == (INFEASIBLE, 0)
        return
    best, best_pos = INFEASIBLE, 0
    for pos in range(len(path) + 1):
        s = model.score(path[:pos] + [cand] + path[pos:], cost)
        if s is not INFEASIBLE and (best is INFEASIBLE or s < best):
            best, best_pos = s, pos
    got, pos = marginal_insertion(model, path, cand, cost)
    if best is INFEASIBLE:
        assert got is INFEASIBLE
    else:
        assert pos == best_pos
        assert got == pytest.approx(best - model.score(path, cost), rel=1e-12, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(fire_lists)
def test_cached_scores_match_fresh_schedules(spec):
    fires = fires_from(spec)
    model = ScheduleModel(AGENT, fires)
    for perm in itertools.islice(itertools.permutations(fires), 10):
        s = build_schedule(AGENT, perm, fires)
        for cost, fn in (("dpmc", dpmc_score), ("baseline", baseline_score)):
            a, b = model.score(perm, cost), fn(s)
            assert (a is INFEASIBLE) == (b is INFEASIBLE)
            if a is not INFEASIBLE:
                assert a == pytest.approx(b, rel=1e-12)


def test_tie_keeps_lowest_position():
    # candidate at the agent's own position: inserting first or later gives
    # the same baseline cost only when the path is empty
    fires = fires_from([(0, 0, 50.0)])
    model = ScheduleModel(AGENT, fires)
    assert model.marginal([], 1, "baseline")[1] == 0
