"""Success rate per team x observability x fire count, for both costs.

    python scripts/success_table.py --runs 100 --seed 1 --out-dir out/table
"""

import argparse
import json
import os
from pathlib import Path

from creds.config import preset
from creds.harness import run_batch

TEAMS = ("homo", "hetero")
OBS = ("fo", "po")
FIRES = (15, 20, 25)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out-dir", default="out/table")
    args = ap.parse_args()

    rows = []
    for team in TEAMS:
        for obs in OBS:
            for n in FIRES:
                name = f"{team}-{obs}-{n}"
                cell = {"preset": name}
                for cost in ("dpmc", "baseline"):
                    _, s = run_batch(preset(name).replace(cost=cost), args.runs, jobs=args.jobs,
                                     master_seed=args.seed, out_dir=Path(args.out_dir) / name, prefix=cost)
                    cell[cost] = s["success_rate"]
                    cell[f"{cost}_time"] = s["successful"]["completion_time_s"]["mean"]
                    cell[f"{cost}_fer"] = s["successful"]["mean_fer"]["mean"]
                rows.append(cell)
                print(f"{name:14s} dpmc {cell['dpmc']:5.1f}%  baseline {cell['baseline']:5.1f}%", flush=True)
    Path(args.out_dir).mkdir(parents=True, exist_ok=True)
    (Path(args.out_dir) / "table.json").write_text(json.dumps(rows, indent=2) + "\n")


if __name__ == "__main__":
    main()
