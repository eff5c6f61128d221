"""Path schedules and the two path costs.

Times in a :class:`PathSchedule` are measured from the planning epoch
``plan_time``.  An agent that is still busy at the epoch carries a
``ready_time`` (absolute) and starts its path from ``position`` then.

Costs:

* ``dpmc``: (sum of sqrt(critical area) - sqrt(area at start)) times
  (sum of start times).
* ``baseline``: sum of execution times (travel + quench).

Both are 0 on an empty path and INFEASIBLE once any start time misses its
deadline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .fire import INFEASIBLE, SQRT_PI, critical_area, grow, quench_time

COSTS = ("dpmc", "baseline")


@dataclass(frozen=True)
class FireSnapshot:
    """What a planner knows about a fire: its area at ``time`` (absolute)."""

    id: int
    center: tuple[float, float]
    area: float
    spread_rate: float
    time: float = 0.0


@dataclass(frozen=True)
class AgentSnapshot:
    id: int
    position: tuple[float, float]
    speed: float
    quench_rate: float
    ready_time: float = 0.0


@dataclass(frozen=True)
class PathSchedule:
    agent_id: int
    tasks: tuple[int, ...]
    start_times: tuple
    quench_times: tuple
    execution_times: tuple
    completion_times: tuple
    deadlines: tuple
    areas_at_start: tuple
    critical_areas: tuple
    feasible: bool

    def __len__(self) -> int:
        return len(self.tasks)


class ScheduleModel:
    """Schedule evaluator for one agent against fixed fire snapshots.

    Caches per-fire constants plus path scores and marginal insertion
    results, which repeat heavily across consensus rounds.
    """

    def __init__(self, agent: AgentSnapshot, fires: Mapping[int, FireSnapshot], plan_time: float = 0.0):
        self.agent = agent
        self.fires = fires
        self.plan_time = plan_time
        self.ready_offset = max(agent.ready_time - plan_time, 0.0)
        self._consts: dict[int, tuple] = {}
        self._scores: dict[tuple, object] = {}
        self._prefix: dict[tuple, list] = {}
        self._marginals: dict[tuple, tuple] = {}

    def _fire(self, j: int) -> tuple:
        c = self._consts.get(j)
        if c is None:
            try:
                f = self.fires[j]
            except KeyError:
                raise KeyError(f"unknown task id {j}") from None
            area_now = grow(f.area, f.spread_rate, max(self.plan_time - f.time, 0.0))
            r_now = math.sqrt(area_now)
            a_crit = critical_area(self.agent.quench_rate, f.spread_rate)
            r_crit = math.sqrt(a_crit)
            # relative deadline; negative when already past critical
            deadline = (r_crit - r_now) / (f.spread_rate * SQRT_PI)
            c = (f.center[0], f.center[1], r_now, f.spread_rate, r_crit, a_crit, deadline)
            self._consts[j] = c
        return c

    def _initial(self) -> tuple:
        # (x, y, time free, sum margins, sum starts, sum executions)
        return (self.agent.position[0], self.agent.position[1], self.ready_offset, 0.0, 0.0, 0.0)

    def _step(self, state: tuple | None, j: int) -> tuple | None:
        if state is None:
            return None
        x, y, t_free, sum_margin, sum_start, sum_exec = state
        cx, cy, r_now, spread, r_crit, _, deadline = self._fire(j)
        travel = math.hypot(cx - x, cy - y) / self.agent.speed
        start = t_free + travel
        if not start < deadline:
            return None
        r_start = r_now + SQRT_PI * spread * start
        tq = quench_time(r_start * r_start, spread, self.agent.quench_rate)
        if tq is INFEASIBLE:
            return None
        return (cx, cy, start + tq, sum_margin + (r_crit - r_start), sum_start + start, sum_exec + travel + tq)

    @staticmethod
    def _value(state: tuple | None, cost: str):
        if state is None:
            return INFEASIBLE
        if cost == "dpmc":
            return state[3] * state[4]
        if cost == "baseline":
            return state[5]
        raise ValueError(f"unknown cost {cost!r}")

    def prefix_states(self, path: Sequence[int]) -> list:
        key = tuple(path)
        states = self._prefix.get(key)
        if states is None:
            states = [self._initial()]
            for j in key:
                states.append(self._step(states[-1], j))
            self._prefix[key] = states
        return states

    def score(self, path: Sequence[int], cost: str = "dpmc"):
        key = (tuple(path), cost)
        s = self._scores.get(key)
        if s is None:
            s = self._value(self.prefix_states(path)[-1], cost)
            self._scores[key] = s
        return s

    def marginal(self, path: Sequence[int], candidate: int, cost: str = "dpmc") -> tuple[object, int]:
        """Cheapest insertion of ``candidate``: (cost increase, position).

        Position ``p`` means the task runs right after the first ``p``
        tasks. Equal scores keep the lowest position.
        """
        path = tuple(path)
        key = (path, candidate, cost)
        hit = self._marginals.get(key)
        if hit is not None:
            return hit
        if candidate in path:
            raise ValueError(f"task {candidate} already in path")
        prefix = self.prefix_states(path)
        base = self._value(prefix[-1], cost)
        best, best_pos = INFEASIBLE, 0
        if base is not INFEASIBLE:
            for pos in range(len(path) + 1):
                s = self._step(prefix[pos], candidate)
                for k in path[pos:]:
                    if s is None:
                        break
                    s = self._step(s, k)
                value = self._value(s, cost)
                if value is not INFEASIBLE and (best is INFEASIBLE or value < best):
                    best, best_pos = value, pos
        result = (INFEASIBLE, 0) if best is INFEASIBLE else (best - base, best_pos)
        self._marginals[key] = result
        return result

    def schedule(self, path: Sequence[int]) -> PathSchedule:
        """Full per-task timeline; tasks after the first missed deadline are INFEASIBLE."""
        starts, quenches, execs, completions, deadlines, areas, crits = [], [], [], [], [], [], []
        x, y = self.agent.position
        t_free = self.ready_offset
        feasible = True
        for j in path:
            cx, cy, r_now, spread, r_crit, a_crit, deadline = self._fire(j)
            deadlines.append(deadline if deadline >= 0 else INFEASIBLE)
            crits.append(a_crit)
            if not feasible:
                for seq in (starts, quenches, execs, completions, areas):
                    seq.append(INFEASIBLE)
                continue
            travel = math.hypot(cx - x, cy - y) / self.agent.speed
            start = t_free + travel
            r_start = r_now + SQRT_PI * spread * start
            area = r_start * r_start
            starts.append(start)
            areas.append(area)
            tq = quench_time(area, spread, self.agent.quench_rate) if start < deadline else INFEASIBLE
            if tq is INFEASIBLE:
                feasible = False
                quenches.append(INFEASIBLE)
                execs.append(INFEASIBLE)
                completions.append(INFEASIBLE)
                continue
            quenches.append(tq)
            execs.append(travel + tq)
            t_free = start + tq
            completions.append(t_free)
            x, y = cx, cy
        if len(set(path)) != len(path):
            raise ValueError("path repeats a task")
        return PathSchedule(
            agent_id=self.agent.id,
            tasks=tuple(path),
            start_times=tuple(starts),
            quench_times=tuple(quenches),
            execution_times=tuple(execs),
            completion_times=tuple(completions),
            deadlines=tuple(deadlines),
            areas_at_start=tuple(areas),
            critical_areas=tuple(crits),
            feasible=feasible,
        )


def build_schedule(agent: AgentSnapshot, path: Sequence[int], fires: Mapping[int, FireSnapshot],
                   plan_time: float = 0.0) -> PathSchedule:
    return ScheduleModel(agent, fires, plan_time).schedule(path)


def dpmc_score(schedule: PathSchedule, critical_areas: Sequence[float] | None = None):
    if not schedule.feasible:
        return INFEASIBLE
    crits = schedule.critical_areas if critical_areas is None else critical_areas
    margin = sum(math.sqrt(ac) - math.sqrt(a) for ac, a in zip(crits, schedule.areas_at_start))
    return margin * sum(schedule.start_times)


def baseline_score(schedule: PathSchedule):
    if not schedule.feasible:
        return INFEASIBLE
    return sum(schedule.execution_times)


COST_FUNCTIONS: dict[str, Callable[[PathSchedule], object]] = {
    "dpmc": dpmc_score,
    "baseline": baseline_score,
}


def marginal_insertion(model: ScheduleModel, current_path: Sequence[int], candidate: int,
                       cost: str = "dpmc") -> tuple[object, int]:
    return model.marginal(current_path, candidate, cost)
