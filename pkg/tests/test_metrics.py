import random
import statistics

import pytest
from hypothesis import given
from hypothesis import strategies as st

from creds.metrics import CSV_COLUMNS, RunMetrics, aggregate, compute_run_metrics, read_csv, write_csv


def ev(t, kind, fire=None, agent=None, area=None, **info):
    rec = {"t": t, "kind": kind, "agent": agent, "fire": fire, "position": None, "area": area}
    if info:
        rec["info"] = info
    return rec


def three_fire_log(shift=0.0):
    s = shift
    return [
        ev(s + 0, "ignite", 1, area=100.0), ev(s + 0, "ignite", 2, area=50.0), ev(s + 0, "ignite", 3, area=80.0),
        ev(s + 0, "replan", rounds=4, converged=True, deadlock=False),
        ev(s + 0, "quench_start", 1, 1, area=100.0),
        ev(s + 10, "quenched", 1, 1, area=0.0, max_area=100.0),
        ev(s + 20, "quench_start", 2, 2, area=100.0),
        ev(s + 35, "quenched", 2, 2, area=0.0, max_area=100.0),
        ev(s + 36, "replan", rounds=6, converged=False, deadlock=True),
        ev(s + 40, "quench_start", 3, 1, area=120.0),
        ev(s + 70, "quenched", 3, 1, area=0.0, max_area=120.0),
        ev(s + 70, "mission_end", success=True),
    ]


def test_hand_computed_three_fire_log():
    m = compute_run_metrics(three_fire_log())
    assert m.success
    assert m.completion_time == 70.0
    assert m.total_quench_time == pytest.approx(10 + 15 + 30)
    assert m.fer_per_fire == {1: 0.0, 2: 1.0, 3: pytest.approx(0.5)}
    assert m.mean_fer == pytest.approx(0.5)
    assert m.replans == 2 and m.deadlocks == 1 and m.consensus_rounds_mean == 5.0


def test_fer_is_shift_invariant():
    a, b = compute_run_metrics(three_fire_log()), compute_run_metrics(three_fire_log(123.0))
    assert a.fer_per_fire == b.fer_per_fire


def test_instant_quench_has_zero_fer():
    log = [ev(0, "ignite", 1, area=10.0), ev(0, "quench_start", 1, 1, area=10.0),
           ev(0, "quenched", 1, 1, area=0.0, max_area=10.0), ev(0, "mission_end", success=True)]
    assert compute_run_metrics(log).mean_fer == 0.0


def test_failed_run_keeps_raw_values():
    log = [ev(0, "ignite", 1, area=10.0), ev(50, "infeasible", 1, area=40.0, max_area=40.0),
           ev(7200, "mission_end", success=False)]
    m = compute_run_metrics(log)
    assert not m.success and m.completion_time == 7200 and m.fer_per_fire[1] == 3.0 and m.infeasible == 1


def test_log_without_end_rejected():
    with pytest.raises(ValueError):
        compute_run_metrics([ev(0, "ignite", 1, area=1.0)])


def runs_from(flags, times):
    return [RunMetrics(s, t, t / 2, {}, t / 100, 1, [3], 0, 1, run_id=k)
            for k, (s, t) in enumerate(zip(flags, times))]


def test_success_rates():
    assert aggregate(runs_from([True] * 4, [1, 2, 3, 4]))["success_rate"] == 100.0
    assert aggregate(runs_from([True] * 71 + [False] * 29, range(100)))["success_rate"] == 71.0
    with pytest.raises(ValueError):
        aggregate([])


@given(st.lists(st.tuples(st.booleans(), st.floats(0, 1e4)), min_size=1, max_size=40))
def test_stats_match_reference_and_ignore_order(rows):
    runs = runs_from([r[0] for r in rows], [r[1] for r in rows])
    summary = aggregate(runs)
    ok = [r[1] for r in rows if r[0]]
    if ok:
        ref = summary["successful"]["completion_time_s"]
        assert ref["mean"] == pytest.approx(statistics.fmean(ok), rel=1e-12, abs=1e-9)
        assert ref["std"] == pytest.approx(statistics.pstdev(ok), rel=1e-9, abs=1e-6)
    else:
        assert summary["successful"]["completion_time_s"]["mean"] is None
    shuffled = list(runs)
    random.Random(0).shuffle(shuffled)
    assert aggregate(shuffled) == summary
    assert 0 <= summary["success_rate"] <= 100


def test_csv_columns_and_order():
    runs = runs_from([True, False], [5.0, 7.0])
    text = write_csv(list(reversed(runs)))
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    rows = read_csv(text)
    assert [r["run_id"] for r in rows] == ["0", "1"]
    assert rows[1]["success"] == "0" and float(rows[0]["completion_time_s"]) == 5.0
