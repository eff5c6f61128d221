"""Failure rate against fire-to-agent ratio when quench rate or speed is raised.

    python scripts/capability_sweep.py --runs 50 --seed 1 --out-dir out/sweep
"""

import argparse
import json
import os
from pathlib import Path

from creds.config import SWEEPS
from creds.harness import failure_knee, run_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=50)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--level", type=float, default=20.0, help="failure level (%%) that defines the knee")
    ap.add_argument("--out-dir", default="out/sweep")
    args = ap.parse_args()

    knees = {}
    for name in sorted(SWEEPS):
        spec = SWEEPS[name]
        rows = run_sweep(spec, args.runs, jobs=args.jobs, master_seed=args.seed, out_dir=args.out_dir)
        for r in rows:
            print(f"{name:14s} {spec.axis}={r['value']:<4g} ratio {r['ratio']}  failure {r['failure_rate']:5.1f}%",
                  flush=True)
        knees[name] = {str(v): failure_knee(rows, v, args.level) for v in spec.values}
    print(json.dumps(knees, indent=2))
    (Path(args.out_dir) / "knees.json").write_text(json.dumps(knees, indent=2) + "\n")


if __name__ == "__main__":
    main()
