"""Per-run indices from an event log, and order-independent aggregation."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

CSV_COLUMNS = ("run_id", "seed", "success", "completion_time_s", "total_quench_time_s", "mean_fer",
               "replans", "consensus_rounds_mean", "deadlocks")
SCHEMA_VERSION = 1


@dataclass
class RunMetrics:
    success: bool
    completion_time: float
    total_quench_time: float
    fer_per_fire: dict[int, float]
    mean_fer: float
    replans: int
    consensus_rounds: list[int] = field(default_factory=list)
    deadlocks: int = 0
    converged_replans: int = 0
    n_fires: int = 0
    quenched: int = 0
    infeasible: int = 0
    run_id: int = 0
    seed: int = 0

    @property
    def consensus_rounds_mean(self) -> float:
        return math.fsum(self.consensus_rounds) / len(self.consensus_rounds) if self.consensus_rounds else 0.0

    def csv_row(self) -> dict[str, object]:
        return {
            "run_id": self.run_id,
            "seed": self.seed,
            "success": int(self.success),
            "completion_time_s": _fmt(self.completion_time),
            "total_quench_time_s": _fmt(self.total_quench_time),
            "mean_fer": _fmt(self.mean_fer),
            "replans": self.replans,
            "consensus_rounds_mean": _fmt(self.consensus_rounds_mean),
            "deadlocks": self.deadlocks,
        }


def _fmt(x: float) -> str:
    return repr(float(x))


def compute_run_metrics(events: Iterable[dict], run_id: int = 0, seed: int = 0) -> RunMetrics:
    """Walk an event log once.

    Failed runs keep their raw values: completion time is the time the run
    stopped, and fires never quenched contribute their peak area to FER.
    """
    initial: dict[int, float] = {}
    peak: dict[int, float] = {}
    started: dict[int, float] = {}
    quench_total = 0.0
    last_quench = 0.0
    quenched = set()
    infeasible = set()
    rounds, deadlocks, converged = [], 0, 0
    success, end_t = None, 0.0
    for e in events:
        kind, j = e["kind"], e.get("fire")
        info = e.get("info") or {}
        end_t = max(end_t, e["t"])
        if kind == "ignite":
            initial[j] = e["area"]
            peak[j] = e["area"]
        elif kind == "quench_start":
            started[j] = e["t"]
            peak[j] = max(peak[j], e["area"])
        elif kind == "abandon":
            started.pop(j, None)
            peak[j] = max(peak[j], e["area"])
        elif kind == "quenched":
            quench_total += e["t"] - started.pop(j, e["t"])
            last_quench = max(last_quench, e["t"])
            quenched.add(j)
            peak[j] = max(peak[j], info.get("max_area", 0.0))
        elif kind in ("infeasible", "end"):
            if kind == "infeasible":
                infeasible.add(j)
            peak[j] = max(peak[j], info.get("max_area", e["area"]))
        elif kind == "replan":
            rounds.append(info["rounds"])
            deadlocks += bool(info.get("deadlock"))
            converged += bool(info.get("converged"))
        elif kind == "mission_end":
            success = bool(info["success"])
    if success is None:
        raise ValueError("event log has no mission_end record")
    fer = {j: (peak[j] - a0) / a0 for j, a0 in sorted(initial.items())}
    return RunMetrics(
        success=success,
        completion_time=last_quench if success else end_t,
        total_quench_time=quench_total,
        fer_per_fire=fer,
        mean_fer=math.fsum(fer.values()) / len(fer) if fer else 0.0,
        replans=len(rounds),
        consensus_rounds=rounds,
        deadlocks=deadlocks,
        converged_replans=converged,
        n_fires=len(initial),
        quenched=len(quenched),
        infeasible=len(infeasible),
        run_id=run_id,
        seed=seed,
    )


def _stats(values: Sequence[float]) -> dict[str, float | None]:
    # sorted + fsum so the result does not depend on run order
    vals = sorted(values)
    n = len(vals)
    if n == 0:
        return {"mean": None, "std": None, "n": 0}
    mean = math.fsum(vals) / n
    var = math.fsum((v - mean) ** 2 for v in vals) / n
    return {"mean": mean, "std": math.sqrt(var), "n": n}


def aggregate(runs: Sequence[RunMetrics]) -> dict:
    """Success rate plus each index over successful runs and over all runs."""
    if not runs:
        raise ValueError("aggregate needs at least one run")
    ok = [r for r in runs if r.success]
    indices = {
        "completion_time_s": lambda r: r.completion_time,
        "total_quench_time_s": lambda r: r.total_quench_time,
        "mean_fer": lambda r: r.mean_fer,
    }
    replans = sum(r.replans for r in runs)
    summary = {
        "schema_version": SCHEMA_VERSION,
        "n_runs": len(runs),
        "n_success": len(ok),
        "success_rate": 100.0 * len(ok) / len(runs),
        "successful": {k: _stats([f(r) for r in ok]) for k, f in indices.items()},
        "all": {k: _stats([f(r) for r in runs]) for k, f in indices.items()},
        "replans": replans,
        "convergence_rate": 100.0 * sum(r.converged_replans for r in runs) / replans if replans else 100.0,
        "mean_iterations": _stats([x for r in runs for x in r.consensus_rounds])["mean"],
        "deadlocks": sum(r.deadlocks for r in runs),
    }
    return summary


def write_csv(runs: Sequence[RunMetrics]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in sorted(runs, key=lambda r: r.run_id):
        writer.writerow(r.csv_row())
    return buf.getvalue()


def read_csv(text: str) -> list[dict[str, str]]:
    rows = list(csv.DictReader(io.StringIO(text)))
    if rows and tuple(rows[0]) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV columns {tuple(rows[0])}")
    return rows


def write_json(summary: dict) -> str:
    return json.dumps(summary, indent=2, sort_keys=True) + "\n"
