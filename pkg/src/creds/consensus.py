"""Synchronous conflict resolution between agents' greedy bundles.

Each round every agent extends its bundle, all agents exchange their
winning-bid (y) and winner (z) tables with their neighbours, merge them with
the decision table in :func:`merge_messages`, and drop every bundled task
from the first one they lost onward.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .fire import INFEASIBLE
from .planner import UNASSIGNED, PlannerState, build_bundle
from .schedule import AgentSnapshot, FireSnapshot, ScheduleModel

log = logging.getLogger(__name__)


@dataclass
class ConsensusConfig:
    """Round limits and communication topology.

    ``w2`` and ``max_iters`` default to the number of agents and three times
    the number of agents. ``graph`` maps agent id to neighbour ids; ``None``
    means fully connected.
    """

    w1: int = 3
    w2: int | None = None
    max_iters: int | None = None
    graph: dict[int, list[int]] | None = None
    single_add_per_round: bool = False
    share_detections: bool = False

    def resolve(self, agent_ids: Sequence[int]) -> tuple[int, int, int, dict[int, list[int]]]:
        m = len(agent_ids)
        w2 = m if self.w2 is None else self.w2
        max_iters = 3 * m if self.max_iters is None else self.max_iters
        max_iters = max(max_iters, self.w1)
        if self.w1 < 1:
            raise ValueError("w1 must be >= 1")
        if w2 < 1:
            raise ValueError("w2 must be >= 1")
        if self.graph is None:
            neighbours = {i: [k for k in agent_ids if k != i] for i in agent_ids}
        else:
            neighbours = {i: sorted(k for k in self.graph.get(i, ()) if k != i) for i in agent_ids}
        return self.w1, w2, max_iters, neighbours


@dataclass
class AssignmentOutcome:
    paths: dict[int, list[int]]
    winners: dict[int, int]
    bids: dict[int, float]
    converged: bool
    iterations_used: int
    settled_round: int
    deadlock_resolved: bool
    infeasible_task_count: int
    states: dict[int, PlannerState] = field(default_factory=dict)


def merge_messages(receiver: PlannerState, sender_id: int, sender_bids: Mapping[int, object],
                   sender_winners: Mapping[int, int]) -> PlannerState:
    """Apply the reduced consensus decision table for one sender.

    Cases the table does not list leave the receiver untouched. Equal bids
    are broken in favour of the lower agent id.
    """
    out = receiver.copy()
    i, k = receiver.agent_id, sender_id
    for j in sorted(set(sender_winners) | set(receiver.winners)):
        zk = sender_winners.get(j, UNASSIGNED)
        zi = receiver.winners.get(j, UNASSIGNED)
        yk = sender_bids.get(j, INFEASIBLE)
        yi = receiver.bids.get(j, INFEASIBLE)
        if zk == k:
            if zi == k or zi == UNASSIGNED or yk < yi or (yk == yi and k < zi):
                _update(out, j, yk, zk)
        elif zk == i:
            if zi == k:
                _reset(out, j)
        elif zk != UNASSIGNED:
            if zi == k:
                _reset(out, j)
        elif zi == k:
            _update(out, j, yk, zk)
    return out


def _update(state: PlannerState, j: int, y, z: int) -> None:
    if z == UNASSIGNED:
        _reset(state, j)
    else:
        state.bids[j] = y
        state.winners[j] = z


def _reset(state: PlannerState, j: int) -> None:
    state.bids.pop(j, None)
    state.winners.pop(j, None)


def release_lost_tasks(state: PlannerState) -> PlannerState:
    """Drop the first task no longer won and everything bundled after it."""
    for idx, j in enumerate(state.bundle):
        if state.winner(j) != state.agent_id:
            break
    else:
        return state
    out = state.copy()
    dropped = out.bundle[idx:]
    del out.bundle[idx:]
    gone = set(dropped)
    out.path = [j for j in out.path if j not in gone]
    for j in dropped:
        if out.winner(j) == out.agent_id:
            _reset(out, j)
    return out


def conflict_free_paths(states: Mapping[int, PlannerState]) -> dict[int, list[int]]:
    """Each contested task stays with the claimant holding the lowest own bid."""
    claims: dict[int, list[tuple]] = {}
    for i, st in states.items():
        for j in st.path:
            own = st.bids.get(j, INFEASIBLE) if st.winner(j) == i else INFEASIBLE
            claims.setdefault(j, []).append((own, i))
    keep = {j: min(c, key=lambda t: (t[0], t[1]))[1] for j, c in claims.items()}
    return {i: [j for j in st.path if keep[j] == i] for i, st in states.items()}


def _feasible_prefix(model: ScheduleModel, path: list[int], cost: str) -> list[int]:
    states = model.prefix_states(path)
    for n, s in enumerate(states[1:]):
        if s is None:
            return path[:n]
    return path


def run_rounds(agents: Sequence[AgentSnapshot], fires: Mapping[int, FireSnapshot],
               detected: Mapping[int, Iterable[int]], cost: str = "dpmc",
               cfg: ConsensusConfig | None = None, plan_time: float = 0.0,
               states: Mapping[int, PlannerState] | None = None,
               trace: Callable[[dict], None] | None = None) -> AssignmentOutcome:
    """Alternate bundle building and consensus until winners settle."""
    cfg = cfg or ConsensusConfig()
    ids = [a.id for a in agents]
    w1, w2, max_iters, neighbours = cfg.resolve(ids)
    models = {a.id: ScheduleModel(a, fires, plan_time) for a in agents}
    known = {i: {j for j in detected.get(i, ()) if j in fires} for i in ids}
    considered = set().union(*known.values()) if known else set()
    if states is None:
        states = {i: PlannerState(i) for i in ids}
    else:
        states = {i: states[i].copy() for i in ids}

    def one_round(lam: int) -> None:
        nonlocal states
        built = {i: build_bundle(states[i], models[i], known[i], cost, cfg.single_add_per_round) for i in ids}
        inbox = {i: (dict(built[i].bids), dict(built[i].winners)) for i in ids}
        merged = {}
        for i in ids:
            st = built[i]
            for k in neighbours[i]:
                y_k, z_k = inbox[k]
                st = merge_messages(st, k, y_k, z_k)
                if cfg.share_detections:
                    known[i].update(j for j, z in z_k.items() if z != UNASSIGNED and j in fires)
            merged[i] = release_lost_tasks(st)
        states = merged
        if trace is not None:
            for i in ids:
                st = states[i]
                trace({
                    "round": lam,
                    "agent": i,
                    "bundle": list(st.bundle),
                    "path": list(st.path),
                    "y": {str(j): (None if y is INFEASIBLE else y) for j, y in sorted(st.bids.items())},
                    "z": {str(j): z for j, z in sorted(st.winners.items())},
                })

    prev: tuple | None = None
    stable = 0
    settled = 0
    lam = 0
    converged = False
    while lam < max_iters:
        lam += 1
        one_round(lam)
        views = [tuple(sorted(states[i].winner_map().items())) for i in ids]
        agreed = all(v == views[0] for v in views)
        if agreed and views[0] == prev:
            stable += 1
        elif agreed:
            stable, settled = 1, lam
        else:
            stable = 0
        prev = views[0] if agreed else None
        if stable >= w1:
            converged = True
            break

    deadlock = False
    if converged:
        paths = {i: list(states[i].path) for i in ids}
    else:
        # deadlock removal: keep the visited assignment leaving fewest tasks out
        deadlock = True
        best = None
        for extra in range(w2):
            lam += 1
            one_round(lam)
            cand = conflict_free_paths(states)
            cand = {i: _feasible_prefix(models[i], p, cost) for i, p in cand.items()}
            missing = len(considered) - sum(len(p) for p in cand.values())
            if best is None or missing < best[0]:
                best = (missing, cand)
        paths = best[1]
        settled = lam
        log.debug("deadlock removal after %d rounds, %d tasks left out", lam, best[0])

    winners = {j: i for i, p in paths.items() for j in p}
    bids = {}
    for j, i in winners.items():
        y = states[i].bids.get(j, INFEASIBLE) if states[i].winner(j) == i else INFEASIBLE
        if y is INFEASIBLE:
            pos = paths[i].index(j)
            y, _ = models[i].marginal([t for t in paths[i][:pos]], j, cost)
        bids[j] = y
    return AssignmentOutcome(
        paths=paths,
        winners=winners,
        bids=bids,
        converged=converged,
        iterations_used=lam,
        settled_round=settled,
        deadlock_resolved=deadlock,
        infeasible_task_count=len(considered) - len(winners),
        states=states,
    )
