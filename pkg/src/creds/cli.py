"""Command line: ``creds {run,batch,sweep,oracle}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import SWEEPS, ConfigError, ScenarioConfig, load_config, preset, preset_names

log = logging.getLogger("creds")

EXIT_CONFIG = 2
EXIT_IO = 3


def _scenario(args: argparse.Namespace) -> ScenarioConfig:
    if args.config and args.preset:
        raise ConfigError("--config", "give either --config or --preset, not both")
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = preset(args.preset or "homo-po-15")
    changes = {}
    if args.cost:
        changes["cost"] = args.cost
    if args.observability:
        changes["observability"] = args.observability
    if args.seed is not None:
        changes["seed"] = args.seed
    return cfg.replace(**changes) if changes else cfg


def _common(p: argparse.ArgumentParser, runs: bool = True) -> None:
    p.add_argument("--config", help="scenario JSON file")
    p.add_argument("--preset", help=f"named scenario ({', '.join(preset_names())})")
    p.add_argument("--seed", type=int, help="master seed (default: the scenario's)")
    p.add_argument("--out-dir", default="out", help="output directory (default: out)")
    p.add_argument("--cost", choices=("dpmc", "baseline"))
    p.add_argument("--observability", choices=("full", "partial"))
    if runs:
        p.add_argument("--runs", type=int, default=100, help="Monte-Carlo runs (default: 100)")
        p.add_argument("--jobs", type=int, default=1, help="worker processes (default: 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="creds", description="Auction-based wildfire assignment simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="one run; writes its event and consensus traces")
    _common(p, runs=False)
    p.add_argument("--run-index", type=int, default=0, help="run index within the master seed")

    p = sub.add_parser("batch", help="Monte-Carlo batch; writes batch.csv and batch.json")
    _common(p)

    p = sub.add_parser("sweep", help="failure rate over fire-to-agent ratio and one capability")
    _common(p)
    p.add_argument("--sweep", choices=sorted(SWEEPS), action="append",
                   help="sweep name (repeatable; default: all)")

    p = sub.add_parser("oracle", help="compare the auction against exhaustive search on a small scenario")
    _common(p, runs=False)
    p.add_argument("--run-index", type=int, default=0)
    return parser


def cmd_run(args, cfg: ScenarioConfig) -> int:
    from .harness import simulate, write_jsonl

    res = simulate(cfg, cfg.seed, args.run_index, keep_events=True, trace_rounds=True)
    out = Path(args.out_dir)
    write_jsonl(out / "events.jsonl", res.events)
    write_jsonl(out / "rounds.jsonl", res.rounds)
    m = res.metrics
    report = {"scenario": cfg.name, "seed": m.seed, "success": m.success, "completion_time_s": m.completion_time,
              "total_quench_time_s": m.total_quench_time, "mean_fer": m.mean_fer, "replans": m.replans,
              "deadlocks": m.deadlocks}
    print(json.dumps(report, indent=2))
    return 0


def cmd_batch(args, cfg: ScenarioConfig) -> int:
    from .harness import run_batch

    if args.runs < 1:
        raise ConfigError("--runs", "must be >= 1")
    _, summary = run_batch(cfg, args.runs, jobs=args.jobs, out_dir=args.out_dir)
    print(json.dumps({k: summary[k] for k in ("scenario", "n_runs", "success_rate", "deadlocks")}))
    return 0


def cmd_sweep(args, cfg: ScenarioConfig) -> int:
    from .harness import failure_knee, run_sweep

    if args.runs < 1:
        raise ConfigError("--runs", "must be >= 1")
    for name in args.sweep or sorted(SWEEPS):
        spec = SWEEPS[name]
        rows = run_sweep(spec, args.runs, jobs=args.jobs, master_seed=cfg.seed, cost=args.cost,
                         observability=args.observability, out_dir=args.out_dir)
        knees = {str(v): failure_knee(rows, v) for v in spec.values}
        print(json.dumps({"sweep": name, "axis": spec.axis, "knee_ratio": knees}))
    return 0


def cmd_oracle(args, cfg: ScenarioConfig) -> int:
    from .oracle import audit_world
    from .harness import build_run

    world = build_run(cfg, cfg.seed, args.run_index)
    verdict = audit_world(world, cfg.cost)
    out = Path(args.out_dir)
    from .harness import atomic_write

    text = json.dumps(verdict, indent=2, sort_keys=True) + "\n"
    atomic_write(out / "oracle.json", text)
    print(text, end="")
    return 0


COMMANDS = {"run": cmd_run, "batch": cmd_batch, "sweep": cmd_sweep, "oracle": cmd_oracle}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _scenario(args)
        return COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
