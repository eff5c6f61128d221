"""Compare auction paths with exhaustive search on random small instances."""

import argparse
import json
import math

import numpy as np

from creds.oracle import SmallInstance, creds_assign, exhaustive_assign, verify_paths
from creds.schedule import AgentSnapshot, FireSnapshot, ScheduleModel


def random_instance(rng):
    m = int(rng.integers(1, 4))
    n = int(rng.integers(1, 6 if m == 3 else 7))
    spread = rng.uniform(0.05, 0.12)
    fires = {j: FireSnapshot(j, tuple(rng.uniform(0, 1000, 2)), math.pi * rng.uniform(5, 25) ** 2, spread)
             for j in range(1, n + 1)}
    caps = rng.choice([16.0, 20.0, 26.0], size=m)
    agents = [AgentSnapshot(i + 1, tuple(rng.uniform(0, 1000, 2)), float(c), float(c)) for i, c in enumerate(caps)]
    return SmallInstance(agents, fires)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=200)
    ap.add_argument("--seed", type=int, default=66)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    tally = {"oracle_feasible": 0, "dpmc_feasible": 0, "baseline_feasible": 0}
    gaps = []
    for _ in range(args.instances):
        inst = random_instance(rng)
        best = exhaustive_assign(inst, "dpmc")
        tally["oracle_feasible"] += best.feasible
        for cost in ("dpmc", "baseline"):
            out = creds_assign(inst, cost)
            ok = len(out.winners) == len(inst.fires) and verify_paths(inst, out.paths).feasible
            tally[f"{cost}_feasible"] += ok
            if cost == "dpmc" and ok and best.feasible and best.total_cost:
                total = sum(ScheduleModel(a, inst.fires).score(out.paths[a.id], "dpmc") for a in inst.agents)
                gaps.append((total - best.total_cost) / abs(best.total_cost))
    tally["median_gap"] = float(np.median(gaps)) if gaps else None
    print(json.dumps(tally, indent=2))


if __name__ == "__main__":
    main()
