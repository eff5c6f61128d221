"""Greedy auction bundle construction for one agent."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .fire import INFEASIBLE
from .schedule import ScheduleModel

UNASSIGNED = 0


@dataclass
class PlannerState:
    """Replicated auction state held by one agent.

    ``bundle`` is in order of addition, ``path`` in order of execution.
    ``bids`` (y) and ``winners`` (z) are sparse: a missing bid is INFEASIBLE
    and a missing winner is UNASSIGNED.
    """

    agent_id: int
    bundle: list[int] = field(default_factory=list)
    path: list[int] = field(default_factory=list)
    bids: dict[int, object] = field(default_factory=dict)
    winners: dict[int, int] = field(default_factory=dict)

    def bid(self, task: int):
        return self.bids.get(task, INFEASIBLE)

    def winner(self, task: int) -> int:
        return self.winners.get(task, UNASSIGNED)

    def copy(self) -> PlannerState:
        return PlannerState(self.agent_id, list(self.bundle), list(self.path), dict(self.bids), dict(self.winners))

    def winner_map(self) -> dict[int, int]:
        return {j: z for j, z in self.winners.items() if z != UNASSIGNED}


def build_bundle(state: PlannerState, model: ScheduleModel, detected: Iterable[int], cost: str = "dpmc",
                 single_add: bool = False) -> PlannerState:
    """Add valid tasks greedily until none is left (or once, if ``single_add``).

    A task is valid when its marginal cost beats the winning bid the agent
    knows of. The cheapest valid task (lowest id on ties) goes to the end of
    the bundle and to its best position in the path.
    """
    state = state.copy()
    detected = sorted(set(detected))
    while True:
        in_bundle = set(state.bundle)
        best_task, best_cost, best_pos = None, INFEASIBLE, 0
        for j in detected:
            if j in in_bundle:
                continue
            c, pos = model.marginal(state.path, j, cost)
            if c is INFEASIBLE or not c < state.bid(j):
                continue
            if best_task is None or c < best_cost:
                best_task, best_cost, best_pos = j, c, pos
        if best_task is None:
            break
        state.bundle.append(best_task)
        state.path.insert(best_pos, best_task)
        state.bids[best_task] = best_cost
        state.winners[best_task] = state.agent_id
        if single_add:
            break
    return state
