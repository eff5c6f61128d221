"""Fixed-step world: fire growth, agent motion, sensing, quenching, replanning.

Per tick (in this order): agents advance through their activity within the
tick (arrivals and quench completions land at their exact sub-tick time),
untouched fires grow in closed form, fires past every agent's critical area
are flagged infeasible, agents sense, and any new detection triggers a
global replan.

:func:`run` collapses runs of ticks in which nothing can happen (no
arrival, completion, detection, leg end or infeasibility is reachable) into
one analytic step; the state reached is the same.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .consensus import ConsensusConfig, run_rounds
from .fire import (INFEASIBLE, FireState, FireStatus, QuenchCapability, critical_area, deadline_time,
                   evolve_under_quench, grow, quench_time)
from .planner import PlannerState
from .schedule import AgentSnapshot, FireSnapshot
from .search import (SearchParams, SearchState, TemperatureField, reflect_into, sample_temperature,
                     search_step, try_detect)

IDLE = "idle"
SEARCHING = "searching"
TRAVELING = "traveling"
QUENCHING = "quenching"

_EPS = 1e-9


@dataclass
class UavState:
    id: int
    position: tuple[float, float]
    capability: QuenchCapability
    sensing_radius: float
    rng: np.random.Generator
    detected: set[int] = field(default_factory=set)
    path: list[int] = field(default_factory=list)
    activity: str = IDLE
    search: SearchState = field(default_factory=SearchState)
    leg_target: tuple[float, float] | None = None
    planner: PlannerState | None = None

    @property
    def target(self) -> int | None:
        return self.path[0] if self.activity in (TRAVELING, QUENCHING) and self.path else None


@dataclass
class SimParams:
    dt: float = 0.1
    horizon: float = 7200.0
    cost: str = "dpmc"
    full_observability: bool = False
    consensus: ConsensusConfig = field(default_factory=ConsensusConfig)
    search: SearchParams = field(default_factory=SearchParams)
    popup_rate: float = 0.0  # fires per second
    popup_until: float = 0.0
    popup_radius: tuple[float, float] = (5.0, 15.0)
    popup_spread_rate: float = 0.05
    fast_forward: bool = True
    # "min": a fire is lost once past the weakest agent's critical area;
    # "max": only once past every agent's
    infeasible_rule: str = "max"


@dataclass
class World:
    bounds: tuple[float, float]
    fires: dict[int, FireState]
    uavs: list[UavState]
    params: SimParams
    rng: np.random.Generator
    clock: float = 0.0
    steps: int = 0
    events: list[dict] = field(default_factory=list)
    failed: bool = False
    pending_replan: bool = False
    threshold: float = 0.0
    next_popup: float = math.inf
    round_trace: list[dict] | None = None

    def log(self, kind: str, t: float | None = None, agent: int | None = None, fire: int | None = None,
            position=None, area: float | None = None, **info) -> None:
        rec = {"t": self.clock if t is None else t, "kind": kind, "agent": agent, "fire": fire,
               "position": None if position is None else [float(position[0]), float(position[1])],
               "area": area}
        if info:
            rec["info"] = info
        self.events.append(rec)

    @property
    def done(self) -> bool:
        if self.clock >= self.params.horizon - _EPS:
            return True
        if self.clock < self.params.popup_until and self.params.popup_rate > 0:
            return False
        return not any(f.active for f in self.fires.values())

    def flag_quench_rate(self) -> float | None:
        rates = [u.capability.quench_rate for u in self.uavs]
        if not rates:
            return None
        return min(rates) if self.params.infeasible_rule == "min" else max(rates)


def build_world(fires: list[FireState], uavs: list[UavState], bounds: tuple[float, float],
                params: SimParams, rng: np.random.Generator) -> World:
    if params.infeasible_rule not in ("min", "max"):
        raise ValueError(f"infeasible_rule must be 'min' or 'max', got {params.infeasible_rule!r}")
    world = World(bounds=bounds, fires={f.id: f for f in fires}, uavs=sorted(uavs, key=lambda u: u.id),
                  params=params, rng=rng)
    world.threshold = TemperatureField.from_fires(fires, params.search).threshold
    if params.popup_rate > 0 and params.popup_until > 0:
        world.next_popup = float(rng.exponential(1.0 / params.popup_rate))
    for f in fires:
        world.log("ignite", fire=f.id, position=f.center, area=f.area, spread_rate=f.spread_rate)
    for u in world.uavs:
        world.log("deploy", agent=u.id, position=u.position, speed=u.capability.speed,
                  quench_rate=u.capability.quench_rate, sensing_radius=u.sensing_radius)
    return world


def start(world: World) -> None:
    """Initial sensing and planning at t = 0."""
    _sense(world)
    if any(u.detected for u in world.uavs):
        replan(world)
    for u in world.uavs:
        if not u.path and u.activity == IDLE:
            u.activity = SEARCHING


def run(world: World) -> World:
    if world.steps == 0 and not any(e["kind"] == "replan" for e in world.events):
        start(world)
    dt = world.params.dt
    while not world.done:
        n = 1
        if world.params.fast_forward:
            n = max(1, int(_quiet_time(world) / dt) - 1)
        remaining = int(round((world.params.horizon - world.clock) / dt))
        tick(world, dt, min(n, max(remaining, 1)))
    finish(world)
    return world


def finish(world: World) -> None:
    success = not world.failed and all(f.status is FireStatus.QUENCHED for f in world.fires.values())
    for f in world.fires.values():
        if f.active or f.status is FireStatus.INFEASIBLE:
            world.log("end", fire=f.id, area=f.area, status=f.status.value, max_area=f.max_area_seen)
    world.log("mission_end", success=success, replans=sum(1 for e in world.events if e["kind"] == "replan"))


def tick(world: World, dt: float, n: int = 1) -> World:
    """Advance ``n`` ticks of length ``dt`` (n > 1 only when nothing can happen)."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    t0 = world.clock
    t1 = (world.steps + n) * dt
    span = t1 - t0
    fire_time = {fid: t0 for fid, f in world.fires.items() if f.active}

    for u in world.uavs:
        _advance_uav(world, u, t0, t1, fire_time)

    for fid, tref in fire_time.items():
        f = world.fires[fid]
        if f.active and f.status is not FireStatus.QUENCHING and tref < t1:
            f.area = grow(f.area, f.spread_rate, t1 - tref)
        if f.active:
            f.max_area_seen = max(f.max_area_seen, f.area)
    world.steps += n
    world.clock = t1

    mark_infeasible(world)
    _popups(world, span)
    new = _sense(world)
    if new or world.pending_replan:
        replan(world)
    for u in world.uavs:
        if u.activity == IDLE and not u.path:
            u.activity = SEARCHING
            u.leg_target = None
    return world


def _advance_uav(world: World, u: UavState, t0: float, t1: float, fire_time: dict[int, float]) -> None:
    t = t0
    speed = u.capability.speed
    for _ in range(1_000_000):
        if t >= t1 - _EPS:
            return
        if u.activity == TRAVELING:
            f = world.fires[u.path[0]]
            if not f.active:
                u.path.pop(0)
                _next_task(world, u, t)
                continue
            d = math.dist(u.position, f.center)
            if t + d / speed <= t1:
                t += d / speed
                u.position = f.center
                f.area = grow(f.area, f.spread_rate, t - fire_time[f.id])
                fire_time[f.id] = t
                f.max_area_seen = max(f.max_area_seen, f.area)
                if f.area >= critical_area(u.capability.quench_rate, f.spread_rate):
                    world.log("abandon", t=t, agent=u.id, fire=f.id, position=f.center, area=f.area)
                    u.path.pop(0)
                    u.activity = IDLE
                    world.pending_replan = True
                    continue
                u.activity = QUENCHING
                f.status = FireStatus.QUENCHING
                world.log("quench_start", t=t, agent=u.id, fire=f.id, position=f.center, area=f.area)
            else:
                frac = speed * (t1 - t) / d
                u.position = (u.position[0] + frac * (f.center[0] - u.position[0]),
                              u.position[1] + frac * (f.center[1] - u.position[1]))
                t = t1
        elif u.activity == QUENCHING:
            f = world.fires[u.path[0]]
            q = u.capability.quench_rate
            tq = quench_time(f.area, f.spread_rate, q)
            if tq is INFEASIBLE:
                f.status = FireStatus.DETECTED
                world.log("abandon", t=t, agent=u.id, fire=f.id, position=f.center, area=f.area)
                u.path.pop(0)
                u.activity = IDLE
                world.pending_replan = True
                continue
            if t + tq <= t1:
                t += tq
                f.area = 0.0
                f.status = FireStatus.QUENCHED
                fire_time[f.id] = t
                world.log("quenched", t=t, agent=u.id, fire=f.id, position=f.center, area=0.0,
                          max_area=f.max_area_seen)
                for other in world.uavs:
                    other.detected.discard(f.id)
                u.path.pop(0)
                _next_task(world, u, t)
            else:
                f.area = evolve_under_quench(f.area, f.spread_rate, q, t1 - t)
                fire_time[f.id] = t1
                t = t1
        elif u.activity == SEARCHING:
            if u.leg_target is None:
                _new_leg(world, u, t - t0)
            d = math.dist(u.position, u.leg_target)
            if d <= _EPS:
                u.leg_target = None
                continue
            if t + d / speed <= t1:
                t += d / speed
                u.position = u.leg_target
                u.leg_target = None
            else:
                frac = speed * (t1 - t) / d
                u.position = (u.position[0] + frac * (u.leg_target[0] - u.position[0]),
                              u.position[1] + frac * (u.leg_target[1] - u.position[1]))
                t = t1
        else:
            return
    raise RuntimeError(f"agent {u.id} made no progress within one step")


def _next_task(world: World, u: UavState, t: float) -> None:
    if u.path:
        u.activity = TRAVELING
        world.log("travel", t=t, agent=u.id, fire=u.path[0], position=u.position)
        return
    u.activity = IDLE
    if any(world.fires[j].active and not _claimed(world, j) for j in u.detected):
        world.pending_replan = True


def _claimed(world: World, j: int) -> bool:
    return any(j in v.path for v in world.uavs)


def _new_leg(world: World, u: UavState, elapsed: float) -> None:
    # only plumes the team cannot account for attract a searcher; unattended
    # fires are grown to the leg start
    known = set().union(*(v.detected for v in world.uavs), *(v.path for v in world.uavs))
    active = [f for f in world.fires.values() if f.active and f.id not in known]
    if elapsed > 0:
        active = [f if f.status is FireStatus.QUENCHING else _Plume(f.center, grow(f.area, f.spread_rate, elapsed))
                  for f in active]
    tf = TemperatureField.from_fires(active, world.params.search, bounds=world.bounds, threshold=world.threshold)
    temp, grad = sample_temperature(tf, u.position)
    delta, u.search = search_step(u.search, temp, grad, u.rng, world.threshold, world.params.search)
    u.leg_target = reflect_into((u.position[0] + delta[0], u.position[1] + delta[1]), world.bounds)


@dataclass(frozen=True)
class _Plume:
    center: tuple[float, float]
    area: float


def mark_infeasible(world: World) -> None:
    """Flag unattended fires past the critical area picked by ``infeasible_rule``."""
    q_max = world.flag_quench_rate()
    if q_max is None:
        return
    for f in world.fires.values():
        if not f.active or f.status is FireStatus.QUENCHING:
            continue
        if f.area >= critical_area(q_max, f.spread_rate):
            f.status = FireStatus.INFEASIBLE
            world.failed = True
            world.log("infeasible", fire=f.id, position=f.center, area=f.area, max_area=f.max_area_seen)
            for u in world.uavs:
                u.detected.discard(f.id)
                if f.id in u.path:
                    head = u.target == f.id
                    u.path.remove(f.id)
                    if head:
                        u.activity = IDLE
                        world.pending_replan = True


def _sense(world: World) -> bool:
    active = [f for f in world.fires.values() if f.active]
    new = False
    for u in world.uavs:
        if world.params.full_observability:
            found = [f.id for f in active if f.id not in u.detected]
        else:
            found = try_detect(u.position, u.sensing_radius, active, u.detected)
        for j in found:
            u.detected.add(j)
            if world.fires[j].status is FireStatus.UNDETECTED:
                world.fires[j].status = FireStatus.DETECTED
            world.log("detect", agent=u.id, fire=j, position=u.position, area=world.fires[j].area)
            new = True
    return new


def _popups(world: World, span: float) -> None:
    p = world.params
    while world.next_popup <= world.clock and world.next_popup < p.popup_until:
        fid = max(world.fires, default=0) + 1
        center = (float(world.rng.uniform(0, world.bounds[0])), float(world.rng.uniform(0, world.bounds[1])))
        r = float(world.rng.uniform(*p.popup_radius))
        area = math.pi * r * r
        world.fires[fid] = FireState(fid, center, area, area, p.popup_spread_rate, ignition_time=world.clock)
        world.log("ignite", fire=fid, position=center, area=area, spread_rate=p.popup_spread_rate, popup=True)
        world.next_popup += float(world.rng.exponential(1.0 / p.popup_rate))


def replan(world: World, triggering_agents=None) -> World:
    """Re-auction every detected, active task not already being executed.

    Agents keep their activated task (travelling to or quenching) and plan
    from its predicted completion time and place.
    """
    now = world.clock
    snapshots, frozen = [], {}
    for u in world.uavs:
        cap = u.capability
        pos, ready = u.position, now
        if u.activity in (TRAVELING, QUENCHING) and u.path:
            f = world.fires[u.path[0]]
            frozen[u.id] = f.id
            if u.activity == TRAVELING:
                travel = math.dist(u.position, f.center) / cap.speed
                area = grow(f.area, f.spread_rate, travel)
                ready = now + travel
            else:
                area = f.area
            tq = quench_time(area, f.spread_rate, cap.quench_rate)
            if tq is not INFEASIBLE:
                ready += tq
            pos = f.center
        snapshots.append(AgentSnapshot(u.id, tuple(pos), cap.speed, cap.quench_rate, ready))
    busy = set(frozen.values())
    tasks = {j for u in world.uavs for j in u.detected
             if j not in busy and world.fires[j].active and world.fires[j].status is not FireStatus.QUENCHING}
    fires = {j: FireSnapshot(j, world.fires[j].center, world.fires[j].area, world.fires[j].spread_rate, now)
             for j in sorted(tasks)}
    detected = {u.id: sorted(u.detected & tasks) for u in world.uavs}
    trace = None
    if world.round_trace is not None:
        replan_index = sum(1 for e in world.events if e["kind"] == "replan")
        trace = lambda rec: world.round_trace.append({"t": now, "replan": replan_index, **rec})  # noqa: E731
    outcome = run_rounds(snapshots, fires, detected, world.params.cost, world.params.consensus,
                         plan_time=now, trace=trace)
    for u in world.uavs:
        planned = outcome.paths.get(u.id, [])
        u.planner = outcome.states.get(u.id)
        for j in planned:
            world.fires[j].status = FireStatus.ASSIGNED
        if u.id in frozen:
            u.path = [frozen[u.id]] + planned
        else:
            u.path = list(planned)
            if u.path:
                u.activity = TRAVELING
                u.leg_target = None
                world.log("travel", agent=u.id, fire=u.path[0], position=u.position)
            elif u.activity in (IDLE, TRAVELING, QUENCHING):
                u.activity = SEARCHING
                u.leg_target = None
    for j in tasks - set(outcome.winners):
        if world.fires[j].status is FireStatus.ASSIGNED:
            world.fires[j].status = FireStatus.DETECTED
    world.pending_replan = False
    world.log("replan", rounds=outcome.iterations_used, settled=outcome.settled_round,
              converged=outcome.converged, deadlock=outcome.deadlock_resolved,
              unassigned=outcome.infeasible_task_count, tasks=len(tasks),
              paths={str(u.id): list(u.path) for u in world.uavs})
    return world


def _quiet_time(world: World) -> float:
    """Lower bound on the time until anything discrete can happen."""
    h = world.params.horizon - world.clock
    if world.pending_replan:
        return 0.0
    moving = []
    for u in world.uavs:
        v = u.capability.speed
        if u.activity == TRAVELING:
            h = min(h, math.dist(u.position, world.fires[u.path[0]].center) / v)
            moving.append(u)
        elif u.activity == QUENCHING:
            f = world.fires[u.path[0]]
            tq = quench_time(f.area, f.spread_rate, u.capability.quench_rate)
            h = min(h, 0.0 if tq is INFEASIBLE else tq)
        elif u.activity == SEARCHING:
            # leg ends need no bound: legs chain inside _advance_uav
            moving.append(u)
        if h <= 0:
            return 0.0
    active = [f for f in world.fires.values() if f.active]
    if not world.params.full_observability:
        for u in moving:
            v, px, py, r = u.capability.speed, u.position[0], u.position[1], u.sensing_radius
            known = u.detected
            for f in active:
                if f.id not in known:
                    h = min(h, (math.hypot(f.center[0] - px, f.center[1] - py) - r) / v)
    q_max = world.flag_quench_rate()
    for f in active if q_max is not None else ():
        if f.status is not FireStatus.QUENCHING:
            td = deadline_time(f.area, f.spread_rate, q_max)
            h = min(h, 0.0 if td is INFEASIBLE else td)
    if world.params.popup_rate > 0 and world.next_popup < world.params.popup_until:
        h = min(h, world.next_popup - world.clock)
    return max(h, 0.0)
