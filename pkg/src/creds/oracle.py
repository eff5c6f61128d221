"""Brute-force references: an RK4 integrator for the area ODE and an
exhaustive assignment solver for small static instances.

Neither shares code with the closed forms or the auction planner beyond the
schedule builder used to score a fixed path.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numba

from .fire import INFEASIBLE, K
from .schedule import AgentSnapshot, FireSnapshot, ScheduleModel

RK4_STEP = 1e-3
MAX_CANDIDATES = 10**7


@numba.njit(cache=True)
def _rate(a, c, q):
    return c * math.sqrt(a if a > 0.0 else 0.0) - q


@numba.njit(cache=True)
def _rk4_step(a, c, q, h):
    k1 = _rate(a, c, q)
    k2 = _rate(a + 0.5 * h * k1, c, q)
    k3 = _rate(a + 0.5 * h * k2, c, q)
    k4 = _rate(a + h * k3, c, q)
    return a + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@numba.njit(cache=True)
def _rk4_integrate(a, c, q, duration, h):
    n = int(duration / h)
    for _ in range(n):
        a = _rk4_step(a, c, q, h)
        if a <= 0.0 and q > 0.0:
            return 0.0
    rest = duration - n * h
    if rest > 0.0:
        a = _rk4_step(a, c, q, rest)
    if a < 0.0:
        a = 0.0
    return a


@numba.njit(cache=True)
def _rk4_time_to_zero(a, c, q, h, t_max):
    t = 0.0
    while t < t_max:
        nxt = _rk4_step(a, c, q, h)
        if nxt <= 0.0:
            # bisect the length of the final step on a single RK4 stage
            lo, hi = 0.0, h
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if _rk4_step(a, c, q, mid) > 0.0:
                    lo = mid
                else:
                    hi = mid
            return t + 0.5 * (lo + hi)
        a = nxt
        t += h
    return -1.0


def rk4_area(area: float, spread_rate: float, quench_rate: float, duration: float, step: float = RK4_STEP) -> float:
    """Area after ``duration`` seconds, integrated with fixed-step RK4."""
    return float(_rk4_integrate(float(area), K * spread_rate, float(quench_rate), float(duration), step))


def ode_quench_oracle(area: float, spread_rate: float, quench_rate: float, *, step: float = RK4_STEP,
                      t_max: float = 1e6):
    """Time-to-zero of the area ODE by RK4, or INFEASIBLE.

    Areas at or above the stationary point never reach zero; they are
    reported infeasible without integrating.
    """
    if area == 0:
        return 0.0
    c = K * spread_rate
    if c * math.sqrt(area) >= quench_rate:
        return INFEASIBLE
    t = _rk4_time_to_zero(float(area), c, float(quench_rate), step, t_max)
    return INFEASIBLE if t < 0 else float(t)


@dataclass
class SmallInstance:
    agents: list[AgentSnapshot]
    fires: dict[int, FireSnapshot]
    plan_time: float = 0.0

    def __post_init__(self) -> None:
        if len(self.agents) > 3 or len(self.fires) > 6:
            raise ValueError("small instances hold at most 3 agents and 6 fires")
        if count_candidates(len(self.agents), len(self.fires)) > MAX_CANDIDATES:
            raise ValueError("instance exceeds enumeration cap")


@dataclass
class OracleResult:
    feasible: bool
    total_cost: float | None
    paths: dict[int, list[int]] = field(default_factory=dict)
    candidates: int = 0


def count_candidates(n_agents: int, n_fires: int) -> int:
    """Number of ways to split ``n_fires`` labelled fires into ordered paths."""
    # n! * C(n + m - 1, m - 1)
    return math.factorial(n_fires) * math.comb(n_fires + n_agents - 1, n_agents - 1)


def exhaustive_assign(instance: SmallInstance, cost: str = "dpmc") -> OracleResult:
    """Cheapest feasible split of every fire into per-agent ordered paths.

    The best ordering of a subset is independent across agents, so each
    agent's optimum per subset is found once and subsets are then combined.
    """
    if count_candidates(len(instance.agents), len(instance.fires)) > MAX_CANDIDATES:
        raise ValueError("instance exceeds enumeration cap")
    fire_ids = sorted(instance.fires)
    n = len(fire_ids)
    best_by_agent: list[dict[int, tuple[float, tuple[int, ...]]]] = []
    for agent in instance.agents:
        model = ScheduleModel(agent, instance.fires, instance.plan_time)
        best: dict[int, tuple[float, tuple[int, ...]]] = {}
        for size in range(n + 1):
            for perm in itertools.permutations(range(n), size):
                path = tuple(fire_ids[p] for p in perm)
                score = model.score(path, cost)
                if score is INFEASIBLE:
                    continue
                mask = 0
                for p in perm:
                    mask |= 1 << p
                if mask not in best or score < best[mask][0]:
                    best[mask] = (score, path)
        best_by_agent.append(best)

    best_total: float | None = None
    best_paths: dict[int, list[int]] = {}
    for owners in itertools.product(range(len(instance.agents)), repeat=n):
        masks = [0] * len(instance.agents)
        for pos, owner in enumerate(owners):
            masks[owner] |= 1 << pos
        total = 0.0
        for a, mask in enumerate(masks):
            entry = best_by_agent[a].get(mask)
            if entry is None:
                break
            total += entry[0]
        else:
            if best_total is None or total < best_total:
                best_total = total
                best_paths = {agent.id: list(best_by_agent[a][masks[a]][1])
                              for a, agent in enumerate(instance.agents)}
    return OracleResult(
        feasible=best_total is not None,
        total_cost=best_total,
        paths=best_paths,
        candidates=count_candidates(len(instance.agents), n),
    )


@dataclass
class PathVerdict:
    feasible: bool
    start_times: dict[int, float]
    completion_times: dict[int, float]
    reason: str = ""


def verify_paths(instance: SmallInstance, paths: dict[int, list[int]], step: float = 1e-2) -> PathVerdict:
    """Re-derive every start and completion time by integrating the ODE.

    Feasible when no fire is taken twice and every fire is still below the
    acting agent's stationary area when quenching starts. Uses only the RK4
    integrator, not the closed forms.
    """
    seen: set[int] = set()
    starts: dict[int, float] = {}
    done: dict[int, float] = {}
    agents = {a.id: a for a in instance.agents}
    for i, path in sorted(paths.items()):
        a = agents[i]
        x, y = a.position
        t = max(a.ready_time - instance.plan_time, 0.0)
        for j in path:
            if j in seen:
                return PathVerdict(False, starts, done, f"fire {j} assigned twice")
            seen.add(j)
            f = instance.fires[j]
            t += math.hypot(f.center[0] - x, f.center[1] - y) / a.speed
            elapsed = instance.plan_time + t - f.time
            area = rk4_area(f.area, f.spread_rate, 0.0, elapsed, step) if elapsed > 0 else f.area
            tq = ode_quench_oracle(area, f.spread_rate, a.quench_rate, step=step)
            if tq is INFEASIBLE:
                return PathVerdict(False, starts, done, f"agent {i} reaches fire {j} past its critical area")
            starts[j] = t
            t += tq
            done[j] = t
            x, y = f.center
    return PathVerdict(True, starts, done)


def creds_assign(instance: SmallInstance, cost: str = "dpmc", cfg=None):
    """The auction on a fully observed small instance."""
    from .consensus import run_rounds

    ids = sorted(instance.fires)
    return run_rounds(instance.agents, instance.fires, {a.id: ids for a in instance.agents}, cost, cfg,
                      plan_time=instance.plan_time)


def audit_world(world, cost: str = "dpmc") -> dict:
    """Oracle-versus-auction verdict for the t = 0 state of a small world."""
    agents = [AgentSnapshot(u.id, tuple(u.position), u.capability.speed, u.capability.quench_rate)
              for u in world.uavs]
    fires = {f.id: FireSnapshot(f.id, tuple(f.center), f.area, f.spread_rate) for f in world.fires.values()}
    instance = SmallInstance(agents, fires)
    best = exhaustive_assign(instance, cost)
    outcome = creds_assign(instance, cost)
    verdict = verify_paths(instance, outcome.paths)
    complete = len(outcome.winners) == len(fires)
    creds_cost = None
    if complete:
        total = 0.0
        for a in agents:
            total += ScheduleModel(a, fires).score(outcome.paths[a.id], cost)
        creds_cost = total
    gap = None
    if best.feasible and creds_cost is not None and best.total_cost:
        gap = (creds_cost - best.total_cost) / abs(best.total_cost)
    return {
        "cost": cost,
        "agents": len(agents),
        "fires": len(fires),
        "oracle": {"feasible": best.feasible, "total_cost": best.total_cost,
                   "paths": {str(k): v for k, v in best.paths.items()}, "candidates": best.candidates},
        "creds": {"converged": outcome.converged, "all_assigned": complete, "paths_verified": verdict.feasible,
                  "feasible": complete and verdict.feasible, "total_cost": creds_cost,
                  "paths": {str(k): v for k, v in outcome.paths.items()}, "rounds": outcome.iterations_used},
        "relative_gap": gap,
    }
